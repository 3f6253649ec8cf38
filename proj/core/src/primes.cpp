#include "prime_lab/primes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "prime_lab/errors.hpp"
#include "prime_lab/summation.hpp"

namespace prime_lab {

namespace {

std::vector<std::uint64_t> simple_sieve(std::uint64_t limit) {
    std::vector<bool> composite(limit + 1, false);
    std::vector<std::uint64_t> primes;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return primes;
}

// Odd-only segmented sieve; segment byte k stands for low + 2k.
std::vector<std::uint64_t> segmented_sieve(std::uint64_t limit, std::size_t segment_size) {
    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 1;
    const std::vector<std::uint64_t> base = simple_sieve(root);

    std::vector<std::uint64_t> primes{2};
    primes.reserve(static_cast<std::size_t>(1.1 * static_cast<double>(limit) /
                                            std::log(static_cast<double>(limit))));

    // next[i]: next odd multiple of base[i] (starting at its square) still to cross off.
    std::vector<std::uint64_t> next;
    next.reserve(base.size());
    for (std::uint64_t p : base)
        if (p != 2) next.push_back(p * p);

    std::vector<char> segment(segment_size);
    const std::uint64_t span = 2 * static_cast<std::uint64_t>(segment_size);
    for (std::uint64_t low = 3; low <= limit; low += span) {
        const std::uint64_t high = std::min(low + span - 2, limit | 1);
        std::fill(segment.begin(), segment.end(), char{1});
        for (std::size_t i = 0; i < next.size(); ++i) {
            const std::uint64_t p = base[i + 1];
            if (p * p > high) break;
            std::uint64_t m = next[i];
            for (; m <= high; m += 2 * p) segment[(m - low) / 2] = 0;
            next[i] = m;
        }
        for (std::uint64_t n = low; n <= std::min(high, limit); n += 2)
            if (segment[(n - low) / 2]) primes.push_back(n);
    }
    return primes;
}

}  // namespace

PrimeTable::PrimeTable() : data_(std::make_shared<const Storage>()) {}

PrimeTable PrimeTable::from_sorted(std::uint64_t cutoff, std::vector<std::uint64_t> primes) {
    for (std::size_t i = 0; i < primes.size(); ++i) {
        if (primes[i] < 2 || primes[i] > cutoff)
            throw ValidationError(fmt::format("prime {} outside [2, {}]", primes[i], cutoff));
        if (i > 0 && primes[i] <= primes[i - 1])
            throw ValidationError("prime list is not strictly ascending");
    }
    auto storage = std::make_shared<Storage>();
    storage->cutoff = cutoff;
    storage->logs.resize(primes.size());
    std::transform(primes.begin(), primes.end(), storage->logs.begin(),
                   [](std::uint64_t p) { return std::log(static_cast<double>(p)); });
    storage->primes = std::move(primes);
    return PrimeTable(std::move(storage));
}

PrimeTable PrimeTable::truncated(std::uint64_t new_cutoff) const {
    const auto ps = primes();
    const auto end = std::upper_bound(ps.begin(), ps.end(), new_cutoff);
    auto storage = std::make_shared<Storage>();
    storage->cutoff = new_cutoff;
    storage->primes.assign(ps.begin(), end);
    storage->logs.assign(data_->logs.begin(), data_->logs.begin() + (end - ps.begin()));
    return PrimeTable(std::move(storage));
}

std::shared_ptr<const std::vector<double>> PrimeTable::shared_logs() const {
    return {data_, &data_->logs};
}

PrimeTable sieve_primes(std::uint64_t cutoff, const SieveOptions& options) {
    if (cutoff < 2) throw EmptyRangeError(fmt::format("no primes <= {}", cutoff));
    if (cutoff > options.max_cutoff)
        throw CapacityError(fmt::format("cutoff {} exceeds the configured ceiling {}", cutoff,
                                        options.max_cutoff));
    auto primes = cutoff > options.segment_threshold
                      ? segmented_sieve(cutoff, std::max<std::size_t>(options.segment_size, 64))
                      : simple_sieve(cutoff);
    return PrimeTable::from_sorted(cutoff, std::move(primes));
}

namespace {

// Empty optional when the file is missing or malformed.
std::optional<std::vector<std::uint64_t>> read_cache(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::vector<std::uint64_t> primes;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::uint64_t value = 0;
        const auto* end = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(line.data(), end, value);
        if (ec != std::errc{} || ptr != end) return std::nullopt;
        if (!primes.empty() && value <= primes.back()) return std::nullopt;
        primes.push_back(value);
    }
    return primes;
}

}  // namespace

void write_prime_cache(const std::filesystem::path& cache, const PrimeTable& table) {
    std::ofstream out(cache, std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write prime cache '{}'", cache.string()));
    for (std::uint64_t p : table.primes()) out << p << '\n';
    if (!out) throw IoError(fmt::format("failed writing prime cache '{}'", cache.string()));
}

PrimeTable load_or_sieve(std::uint64_t cutoff, const std::filesystem::path& cache,
                         const SieveOptions& options) {
    if (cutoff < 2) throw EmptyRangeError(fmt::format("no primes <= {}", cutoff));
    if (cutoff > options.max_cutoff)
        throw CapacityError(fmt::format("cutoff {} exceeds the configured ceiling {}", cutoff,
                                        options.max_cutoff));
    if (auto cached = read_cache(cache); cached && !cached->empty() && cached->back() >= cutoff) {
        try {
            const std::uint64_t largest = cached->back();
            auto all = PrimeTable::from_sorted(largest, std::move(*cached));
            return all.truncated(cutoff);
        } catch (const ValidationError&) {
            // fall through to a fresh sieve
        }
    }
    PrimeTable table = sieve_primes(cutoff, options);
    write_prime_cache(cache, table);
    return table;
}

WeightedEnsemble::WeightedEnsemble(PrimeTable table, double exponent)
    : table_(std::move(table)), exponent_(exponent) {
    if (!(exponent > 0.0) || !std::isfinite(exponent))
        throw DomainError(fmt::format("weight exponent must be > 0, got {}", exponent));
    frequencies_ = table_.shared_logs();
    // exp(-x ln p) in extended precision, rounded once: keeps p^{-x} within
    // an ulp or so even where x ln p is large enough to amplify the rounding
    // of a double logarithm.
    const auto primes = table_.primes();
    weights_.resize(primes.size());
    const long double xl = exponent;
    for (std::size_t i = 0; i < primes.size(); ++i)
        weights_[i] = static_cast<double>(
            std::exp(-xl * std::log(static_cast<long double>(primes[i]))));
    finish();
}

WeightedEnsemble WeightedEnsemble::from_modes(std::vector<double> frequencies,
                                              std::vector<double> weights) {
    if (frequencies.size() != weights.size())
        throw ValidationError("frequency and weight columns differ in length");
    WeightedEnsemble e;
    e.frequencies_ = std::make_shared<const std::vector<double>>(std::move(frequencies));
    e.weights_ = std::move(weights);
    e.finish();
    return e;
}

WeightedEnsemble WeightedEnsemble::prefix(std::size_t count) const {
    count = std::min(count, size());
    WeightedEnsemble e;
    e.exponent_ = exponent_;
    if (!table_.empty() && count > 0)
        e.table_ = table_.truncated(table_.primes()[count - 1]);
    e.frequencies_ = std::make_shared<const std::vector<double>>(
        frequencies_->begin(), frequencies_->begin() + static_cast<std::ptrdiff_t>(count));
    e.weights_.assign(weights_.begin(), weights_.begin() + static_cast<std::ptrdiff_t>(count));
    e.finish();
    return e;
}

void WeightedEnsemble::finish() {
    CompensatedSum acc;
    for (double w : weights_) acc.add(std::abs(w));
    weight_sum_ = acc.value();
}

}  // namespace prime_lab
