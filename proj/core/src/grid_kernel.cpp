#include "grid_kernel.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <thread>

#include "prime_lab/summation.hpp"

namespace prime_lab::detail {

namespace {

// Neumaier accumulation over a tile, laid out for the inner loop.
struct TileAccumulator {
    std::array<double, kResyncStride> sum{};
    std::array<double, kResyncStride> comp{};

    void add(std::size_t j, double x) noexcept {
        const double s = sum[j];
        const double t = s + x;
        comp[j] += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        sum[j] = t;
    }
    double value(std::size_t j) const noexcept { return sum[j] + comp[j]; }
};

constexpr std::size_t kLanes = 4;

struct Unit {
    std::size_t tile_begin;
    std::size_t tile_len;
    std::size_t mode_begin;
    std::size_t mode_end;
};

void run_unit(const Unit& u, std::span<const double> freq, std::span<const double> cos_coef,
              std::span<const double> sin_coef, const SampleGrid& grid, double* cos_out,
              double* sin_out) {
    const bool want_cos = !cos_coef.empty();
    const bool want_sin = !sin_coef.empty();
    const double t0 = grid.at(u.tile_begin);
    const double dt = grid.spacing();

    TileAccumulator cos_acc;
    TileAccumulator sin_acc;

    std::size_t i = u.mode_begin;
    // Modes advance together in groups of kLanes for instruction-level
    // parallelism; within each grid point they are still added in ascending
    // mode order, exactly as the scalar tail does.
    for (; i + kLanes <= u.mode_end; i += kLanes) {
        std::array<double, kLanes> c, s, cr, sr, a, b;
        for (std::size_t q = 0; q < kLanes; ++q) {
            const double f = freq[i + q];
            c[q] = std::cos(t0 * f);
            s[q] = std::sin(t0 * f);
            cr[q] = std::cos(dt * f);
            sr[q] = std::sin(dt * f);
            a[q] = want_cos ? cos_coef[i + q] : 0.0;
            b[q] = want_sin ? sin_coef[i + q] : 0.0;
        }
        for (std::size_t j = 0; j < u.tile_len; ++j) {
            for (std::size_t q = 0; q < kLanes; ++q) {
                if (want_cos) cos_acc.add(j, a[q] * c[q]);
                if (want_sin) sin_acc.add(j, b[q] * s[q]);
                const double cn = c[q] * cr[q] - s[q] * sr[q];
                s[q] = s[q] * cr[q] + c[q] * sr[q];
                c[q] = cn;
            }
        }
    }
    for (; i < u.mode_end; ++i) {
        const double f = freq[i];
        double c = std::cos(t0 * f);
        double s = std::sin(t0 * f);
        const double cr = std::cos(dt * f);
        const double sr = std::sin(dt * f);
        const double a = want_cos ? cos_coef[i] : 0.0;
        const double b = want_sin ? sin_coef[i] : 0.0;
        for (std::size_t j = 0; j < u.tile_len; ++j) {
            if (want_cos) cos_acc.add(j, a * c);
            if (want_sin) sin_acc.add(j, b * s);
            const double cn = c * cr - s * sr;
            s = s * cr + c * sr;
            c = cn;
        }
    }

    for (std::size_t j = 0; j < u.tile_len; ++j) {
        if (want_cos) cos_out[j] = cos_acc.value(j);
        if (want_sin) sin_out[j] = sin_acc.value(j);
    }
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

TrigSums grid_trig_sums(std::span<const double> frequencies, std::span<const double> cos_coef,
                        std::span<const double> sin_coef, const SampleGrid& grid,
                        unsigned threads) {
    const std::size_t n = grid.size();
    const std::size_t m = frequencies.size();
    const std::size_t tiles = (n + kResyncStride - 1) / kResyncStride;
    const std::size_t blocks = std::max<std::size_t>(1, (m + kModeBlock - 1) / kModeBlock);

    // partial[b * n + k]: block b's contribution at grid point k.
    std::vector<double> cos_partial(cos_coef.empty() ? 0 : blocks * n, 0.0);
    std::vector<double> sin_partial(sin_coef.empty() ? 0 : blocks * n, 0.0);

    const std::size_t units = tiles * blocks;
    auto run = [&](std::size_t index) {
        const std::size_t tile = index / blocks;
        const std::size_t block = index % blocks;
        Unit u{tile * kResyncStride, std::min(kResyncStride, n - tile * kResyncStride),
               block * kModeBlock, std::min(m, (block + 1) * kModeBlock)};
        const std::size_t offset = block * n + u.tile_begin;
        run_unit(u, frequencies, cos_coef, sin_coef, grid,
                 cos_partial.empty() ? nullptr : cos_partial.data() + offset,
                 sin_partial.empty() ? nullptr : sin_partial.data() + offset);
    };

    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), units));
    if (workers <= 1) {
        for (std::size_t i = 0; i < units; ++i) run(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < units; i = next++) run(i);
            });
    }

    auto reduce = [&](const std::vector<double>& partial) {
        if (partial.empty()) return std::vector<double>{};
        if (blocks == 1) return partial;
        std::vector<double> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            CompensatedSum acc;
            for (std::size_t b = 0; b < blocks; ++b) acc.add(partial[b * n + k]);
            out[k] = acc.value();
        }
        return out;
    };
    return {reduce(cos_partial), reduce(sin_partial)};
}

}  // namespace prime_lab::detail
