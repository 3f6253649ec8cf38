#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

namespace prime_lab {

struct SieveOptions {
    // Cutoffs above this use the segmented sieve.
    std::uint64_t segment_threshold = 10'000'000;
    // Bytes per segment of the segmented sieve.
    std::size_t segment_size = 1u << 18;
    // Largest cutoff accepted at all; larger requests raise CapacityError.
    std::uint64_t max_cutoff = 1'000'000'000;
};

/// Ascending primes up to a cutoff with their natural logarithms.
///
/// Immutable once built; copies share the same storage, so a table can be
/// handed to any number of concurrent readers.
class PrimeTable {
public:
    PrimeTable();

    /// Builds a table from an already-sorted prime list (e.g. read from a
    /// cache). Throws ValidationError if `primes` is not strictly ascending
    /// or holds a value above `cutoff`.
    static PrimeTable from_sorted(std::uint64_t cutoff,
                                  std::vector<std::uint64_t> primes);

    std::uint64_t cutoff() const noexcept { return data_->cutoff; }
    std::size_t size() const noexcept { return data_->primes.size(); }
    bool empty() const noexcept { return data_->primes.empty(); }

    std::span<const std::uint64_t> primes() const noexcept { return data_->primes; }
    std::span<const double> logs() const noexcept { return data_->logs; }

    /// Primes <= new_cutoff, sharing nothing with this table.
    PrimeTable truncated(std::uint64_t new_cutoff) const;

    // Shared handle to the log column, used by ensembles to alias it.
    std::shared_ptr<const std::vector<double>> shared_logs() const;

private:
    struct Storage {
        std::uint64_t cutoff = 0;
        std::vector<std::uint64_t> primes;
        std::vector<double> logs;
    };

    explicit PrimeTable(std::shared_ptr<const Storage> data) : data_(std::move(data)) {}

    std::shared_ptr<const Storage> data_;
};

/// All primes <= cutoff. Throws EmptyRangeError for cutoff < 2 and
/// CapacityError above options.max_cutoff.
PrimeTable sieve_primes(std::uint64_t cutoff, const SieveOptions& options = {});

/// Like sieve_primes, but reuses (and refreshes) a plain-text cache of
/// ascending primes, one per line. A cache whose largest prime reaches the
/// cutoff is filtered; anything shorter or malformed is re-sieved and
/// overwritten.
PrimeTable load_or_sieve(std::uint64_t cutoff, const std::filesystem::path& cache,
                         const SieveOptions& options = {});

void write_prime_cache(const std::filesystem::path& cache, const PrimeTable& table);

/// Frequency/amplitude table for the prime cosine sums: frequency ln p and
/// amplitude p^{-x} per prime.
class WeightedEnsemble {
public:
    /// Throws DomainError unless exponent > 0.
    WeightedEnsemble(PrimeTable table, double exponent);

    /// Arbitrary modes a_i cos(w_i t), for test harnesses and analytic checks.
    /// The underlying prime table is empty and exponent() is 0.
    static WeightedEnsemble from_modes(std::vector<double> frequencies,
                                       std::vector<double> weights);

    const PrimeTable& table() const noexcept { return table_; }
    double exponent() const noexcept { return exponent_; }
    std::size_t size() const noexcept { return weights_.size(); }

    std::span<const double> frequencies() const noexcept { return *frequencies_; }
    std::span<const double> weights() const noexcept { return weights_; }

    // Σ |a_i|, the triangle-inequality bound on |S(t)|.
    double weight_sum() const noexcept { return weight_sum_; }

    /// The first `count` modes (count clamped to size()).
    WeightedEnsemble prefix(std::size_t count) const;

private:
    WeightedEnsemble() = default;
    void finish();

    PrimeTable table_;
    double exponent_ = 0.0;
    std::shared_ptr<const std::vector<double>> frequencies_;
    std::vector<double> weights_;
    double weight_sum_ = 0.0;
};

inline WeightedEnsemble build_ensemble(PrimeTable table, double exponent) {
    return WeightedEnsemble(std::move(table), exponent);
}

}  // namespace prime_lab
