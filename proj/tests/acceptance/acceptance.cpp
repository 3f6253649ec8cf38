// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and runtime ceilings are fixed constants below;
// criteria without a ceiling only report their runtime.
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracle.hpp"
#include "prime_lab/analysis.hpp"
#include "prime_lab/experiments.hpp"

using namespace prime_lab;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, std::string what) {
        if (!cond) ok = false;
        notes.push_back((cond ? "" : "FAILED ") + std::move(what));
    }
};

int failures = 0;
constexpr double kNoCeiling = std::numeric_limits<double>::infinity();

void criterion(int id, const char* title, double limit_seconds,
               const std::function<void(Check&)>& body) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.expect(false, fmt::format("threw: {}", e.what()));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (std::isfinite(limit_seconds))
        check.expect(secs < limit_seconds,
                     fmt::format("runtime {:.2f} s < {} s", secs, limit_seconds));
    else
        check.notes.push_back(fmt::format("runtime {:.2f} s", secs));
    if (!check.ok) ++failures;
    fmt::print("{} criterion {:>2}: {}\n", check.ok ? "PASS" : "FAIL", id, title);
    for (const auto& n : check.notes) fmt::print("      {}\n", n);
    std::cout.flush();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "prime_lab_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool same_files(const std::vector<fs::path>& a, const std::vector<fs::path>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].filename() != b[i].filename() || slurp(a[i]) != slurp(b[i])) return false;
    return true;
}

const fs::path kRefs = fs::path(PRIME_LAB_DATA_DIR) / "zeta_ordinates_140_160.txt";

}  // namespace

int main() {
    const PrimeTable million = sieve_primes(1'000'000);

    criterion(1, "prime counts", 1.0, [](Check& c) {
        const auto small = sieve_primes(100).size();
        const auto large = sieve_primes(1'000'000).size();
        c.expect(small == 25, fmt::format("pi(100) = {} (want 25)", small));
        c.expect(large == 78498, fmt::format("pi(10^6) = {} (want 78498)", large));
    });

    criterion(2, "balance-regime budget grows like ln ln P", 5.0, [](Check& c) {
        const auto table = sieve_primes(1'000'000);
        const std::uint64_t cutoffs[] = {1000, 10'000, 100'000, 1'000'000};
        std::vector<double> b;
        for (auto p : cutoffs) b.push_back(amplitude_budget(table.truncated(p), 0.5).exact);
        for (std::size_t i = 0; i + 1 < b.size(); ++i) {
            const double step = b[i + 1] - b[i];
            const double lnln = std::log(std::log(double(cutoffs[i + 1]))) -
                                std::log(std::log(double(cutoffs[i])));
            const double rel = std::abs(step / lnln - 1.0);
            c.expect(rel < 0.15, fmt::format("P {}->{}: dB = {:.5f}, d ln ln P = {:.5f}, "
                                             "relative {:.4f} < 0.15",
                                             cutoffs[i], cutoffs[i + 1], step, lnln, rel));
        }
    });

    criterion(3, "over-damped budget stays bounded", 5.0, [](Check& c) {
        const auto table = sieve_primes(1'000'000);
        auto budget = [&](std::uint64_t p) {
            const auto t = table.truncated(p);
            const double fast = amplitude_budget(t, 0.75).exact;
            const double slow = static_cast<double>(oracle::budget(t.primes(), 0.75L));
            c.expect(std::abs(fast - slow) <= 1e-12 * slow,
                     fmt::format("B_{}(0.75) = {:.8f} matches long double sum", p, fast));
            return fast;
        };
        const double b100 = budget(100), b4 = budget(10'000), b6 = budget(1'000'000);
        c.expect(b6 - b4 < 0.01, fmt::format("B_1e6 - B_1e4 = {:.5f} < 0.01", b6 - b4));
        c.expect(b6 - b100 < 0.06, fmt::format("B_1e6 - B_100 = {:.5f} < 0.06", b6 - b100));
    });

    criterion(4, "high-energy budget grows polynomially", 5.0, [](Check& c) {
        const auto table = sieve_primes(1'000'000);
        const double b4 = amplitude_budget(table.truncated(10'000), 0.25).exact;
        const double b6 = amplitude_budget(table, 0.25).exact;
        c.expect(b6 / b4 > 5.0, fmt::format("B_1e6 / B_1e4 = {:.4f} > 5 (x = 0.25)", b6 / b4));
    });

    criterion(5, "RMS slope scaling exponents", 10.0, [](Check& c) {
        const std::vector<std::uint64_t> cutoffs{10'000, 100'000, 1'000'000};
        const double lo = fit_scaling_exponent(0.25, cutoffs).fitted_exponent;
        const double mid = fit_scaling_exponent(0.5, cutoffs).fitted_exponent;
        const double hi = fit_scaling_exponent(0.75, cutoffs).fitted_exponent;
        c.expect(std::abs(lo - 0.25) < 0.06, fmt::format("x = 0.25: fit {:.5f}, |fit - 0.25| < 0.06", lo));
        c.expect(std::abs(hi) < 0.02, fmt::format("x = 0.75: fit {:.5f}, |fit| < 0.02", hi));
        c.expect(hi < mid && mid < lo, fmt::format("x = 0.5: fit {:.5f} strictly between", mid));
    });

    criterion(6, "quasi-random phase heuristic", 30.0, [](Check& c) {
        const auto table = sieve_primes(10'000);
        const WeightedEnsemble ens(table, 0.5);
        const SampleGrid window(1000.0, 2000.0, 2);
        constexpr std::size_t n = 5000;
        constexpr std::uint64_t seed = 20240601;
        const double h = heuristic_rms_slope(ens);
        const double e = empirical_rms_slope(ens, window, n, seed);
        c.expect(std::abs(e / h - 1.0) < 0.25,
                 fmt::format("RMS S': empirical {:.4f} vs heuristic {:.4f} ({:+.1f}%)", e, h,
                             100 * (e / h - 1.0)));
        const double b = amplitude_budget(table, 0.5).exact;
        const double predicted = std::sqrt(b / 2.0);
        const double s = empirical_rms_signal(ens, window, n, seed);
        c.expect(std::abs(s / predicted - 1.0) < 0.25,
                 fmt::format("RMS S: empirical {:.4f} vs sqrt(B/2) {:.4f} ({:+.1f}%)", s,
                             predicted, 100 * (s / predicted - 1.0)));
    });

    criterion(7, "grid kernel fidelity and thread independence", kNoCeiling, [&](Check& c) {
        const WeightedEnsemble ens(million, 0.5);
        const SampleGrid grid(140.0, 160.0, 3000);
        const double scale = ens.weight_sum();

        std::vector<SampledSignal> runs;
        for (unsigned threads : {1u, 4u, 8u}) {
            const auto start = std::chrono::steady_clock::now();
            runs.push_back(eval_grid(ens, grid, false, {threads}));
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            c.expect(secs < 60.0, fmt::format("full grid, {} threads: {:.2f} s < 60 s", threads, secs));
        }

        std::mt19937_64 gen(7);
        std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
        double worst_direct = 0.0, worst_oracle = 0.0;
        for (int i = 0; i < 16; ++i) {
            const std::size_t k = pick(gen);
            const double t = grid.at(k);
            const double v = runs[0].values[k];
            worst_direct = std::max(worst_direct, std::abs(v - eval_point(ens, t)));
            const long double ref = oracle::signal(million.primes(), 0.5L, static_cast<long double>(t));
            worst_oracle = std::max(worst_oracle, static_cast<double>(std::abs(v - ref)));
        }
        c.expect(worst_direct < 1e-8,
                 fmt::format("max |grid - eval_point| over 16 points = {:.3e} < 1e-8", worst_direct));
        c.expect(worst_oracle < 1e-9 * scale,
                 fmt::format("max |grid - long double oracle| = {:.3e} < 1e-9 * sum w = {:.3e}",
                             worst_oracle, 1e-9 * scale));

        std::vector<std::string> csv;
        for (const auto& r : runs) {
            std::ostringstream out;
            write_csv(out, r);
            csv.push_back(out.str());
        }
        const bool bitwise = std::memcmp(runs[0].values.data(), runs[1].values.data(),
                                         runs[0].values.size() * sizeof(double)) == 0 &&
                             std::memcmp(runs[0].values.data(), runs[2].values.data(),
                                         runs[0].values.size() * sizeof(double)) == 0;
        c.expect(bitwise && csv[0] == csv[1] && csv[0] == csv[2],
                 "threads 1, 4, 8 give byte-identical values and CSV");
    });

    criterion(8, "crossing detector", kNoCeiling, [](Check& c) {
        const auto harness = WeightedEnsemble::from_modes({1.0}, {1.0});
        const auto scan = detect_crossings(eval_grid(harness, SampleGrid(0.0, 10.0, 1001)), harness);
        const double pi = std::numbers::pi;
        const double roots[] = {pi / 2, 3 * pi / 2, 5 * pi / 2};
        const double slopes[] = {-1.0, 1.0, -1.0};
        c.expect(scan.crossings.size() == 3,
                 fmt::format("cos(t) on [0,10]: {} crossings (want 3)", scan.crossings.size()));
        if (scan.crossings.size() == 3) {
            double root_err = 0.0, slope_err = 0.0;
            for (int i = 0; i < 3; ++i) {
                root_err = std::max(root_err, std::abs(scan.crossings[i].t0 - roots[i]));
                slope_err = std::max(slope_err, std::abs(scan.crossings[i].slope - slopes[i]));
            }
            c.expect(root_err < 1e-9, fmt::format("root error {:.3e} < 1e-9", root_err));
            c.expect(slope_err < 1e-6, fmt::format("slope error {:.3e} < 1e-6", slope_err));
        }

        const WeightedEnsemble ens(sieve_primes(10), 0.5);
        const SampleGrid grid(0.0, 30.0, 3001);
        const auto found = detect_crossings(eval_grid(ens, grid), ens).crossings;
        bool all_ok = !found.empty();
        double worst = 0.0;
        for (const auto& x : found) {
            const double v = eval_point(ens, x.t0);
            worst = std::max(worst, std::abs(v));
            const double before = eval_point(ens, x.t0 - grid.spacing());
            const double after = eval_point(ens, x.t0 + grid.spacing());
            all_ok = all_ok && std::abs(v) < 1e-9 && before * after < 0.0;
        }
        c.expect(all_ok, fmt::format("P = 10, x = 1/2: {} crossings re-verified, max |S(t0)| = "
                                     "{:.3e} < 1e-9, strict sign change",
                                     found.size(), worst));
    });

    std::vector<fs::path> figure2_files;
    criterion(9, "weight comparison properties", kNoCeiling, [&](Check& c) {
        auto config = ExperimentConfig::defaults(ExperimentKind::WeightComparison);
        config.reference_ordinates_path = kRefs;
        config.output_dir = scratch("figure2_a");
        const auto r = run_weight_comparison(config);
        figure2_files = r.files;
        c.expect(r.cells.size() == 6, fmt::format("{} cells (want 6)", r.cells.size()));
        for (const auto& cell : r.cells) {
            if (cell.exponent == 0.25 && cell.cutoff == 1'000'000)
                c.expect(cell.max_abs_ratio > 3.0,
                         fmt::format("x = 0.25: max|S| ratio P=1e6 vs 100 = {:.4f} > 3",
                                     cell.max_abs_ratio));
            if (cell.exponent == 0.75 && cell.cutoff == 1'000'000)
                c.expect(cell.budget_gap < 0.06,
                         fmt::format("x = 0.75: energy gap P=1e6 vs 100 = {:.5f} < 0.06",
                                     cell.budget_gap));
            if (cell.exponent == 0.5)
                c.expect(cell.wells >= 1 && cell.deepest_well > 1.0,
                         fmt::format("x = 0.5, P = {}: {} wells, deepest {:.4f} > 1", cell.cutoff,
                                     cell.wells, cell.deepest_well));
        }
    });

    criterion(10, "repeat runs are byte-identical", kNoCeiling, [&](Check& c) {
        auto fig1 = ExperimentConfig::defaults(ExperimentKind::Progressive);
        fig1.reference_ordinates_path = kRefs;
        fig1.output_dir = scratch("figure1_a");
        const auto f1a = run_progressive(fig1).files;
        fig1.output_dir = scratch("figure1_b");
        c.expect(same_files(f1a, run_progressive(fig1).files), "figure1: 3 files identical");

        auto fig2 = ExperimentConfig::defaults(ExperimentKind::WeightComparison);
        fig2.reference_ordinates_path = kRefs;
        fig2.output_dir = scratch("figure2_b");
        std::vector<fs::path> first = figure2_files;
        if (first.empty()) {
            fig2.output_dir = scratch("figure2_a");
            first = run_weight_comparison(fig2).files;
            fig2.output_dir = scratch("figure2_b");
        }
        c.expect(same_files(first, run_weight_comparison(fig2).files),
                 fmt::format("figure2: {} files identical", first.size()));

        auto scaling = ExperimentConfig::defaults(ExperimentKind::ScalingStudy);
        scaling.sampling.seed = 42;
        scaling.output_dir = scratch("scaling_a");
        const auto sa = run_scaling_study(scaling).files;
        scaling.output_dir = scratch("scaling_b");
        c.expect(same_files(sa, run_scaling_study(scaling).files), "scaling: 3 files identical");
    });

    fmt::print("{} of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
