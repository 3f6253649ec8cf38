#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prime_lab/primes.hpp"

namespace prime_lab {

/// Uniform grid t_k = t_start + k * spacing, k = 0..n-1, with the last
/// point pinned to t_end.
class SampleGrid {
public:
    /// Throws DomainError unless t_start < t_end (both finite) and n >= 2.
    SampleGrid(double t_start, double t_end, std::size_t n_samples);

    double t_start() const noexcept { return t_start_; }
    double t_end() const noexcept { return t_end_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return spacing_; }

    double at(std::size_t k) const noexcept {
        return k + 1 == n_ ? t_end_ : t_start_ + static_cast<double>(k) * spacing_;
    }

    friend bool operator==(const SampleGrid&, const SampleGrid&) = default;

private:
    double t_start_;
    double t_end_;
    std::size_t n_;
    double spacing_;
};

struct SampledSignal {
    SampleGrid grid;
    std::vector<double> values;
    std::optional<std::vector<double>> derivatives;
};

/// The phase reference theta(t) of the phase-referenced signal.
class PhaseReference {
public:
    enum class Kind { Zero, Linear, RiemannSiegel };

    static PhaseReference zero() noexcept { return {Kind::Zero, 0.0}; }
    static PhaseReference linear(double rate) noexcept { return {Kind::Linear, rate}; }
    // theta(t) = (t/2) ln(t / 2pi) - t/2 - pi/8; defined for t > 0 only.
    static PhaseReference riemann_siegel() noexcept { return {Kind::RiemannSiegel, 0.0}; }

    /// Accepts "zero", "linear:<rate>" and "rs". Throws ValidationError.
    static PhaseReference parse(std::string_view text);

    Kind kind() const noexcept { return kind_; }
    double rate() const noexcept { return rate_; }

    bool evaluable_at(double t) const noexcept { return kind_ != Kind::RiemannSiegel || t > 0.0; }

    /// Throws DomainError where !evaluable_at(t).
    double operator()(double t) const;

    std::string to_string() const;

private:
    PhaseReference(Kind kind, double rate) noexcept : kind_(kind), rate_(rate) {}

    Kind kind_;
    double rate_;
};

struct EvalOptions {
    // Worker threads for grid kernels; 0 picks the hardware concurrency.
    // Results never depend on this value.
    unsigned threads = 0;
};

/// S(t) = Σ a_p cos(t ln p), compensated, ascending-prime order.
double eval_point(const WeightedEnsemble& ensemble, double t);

/// S'(t) = -Σ a_p ln p sin(t ln p).
double eval_derivative_point(const WeightedEnsemble& ensemble, double t);

/// S (and optionally S') on every grid point, via the rotation kernel.
SampledSignal eval_grid(const WeightedEnsemble& ensemble, const SampleGrid& grid,
                        bool with_derivative = false, const EvalOptions& options = {});

/// W(t) = 2 Σ a_p cos(theta(t) - t ln p) on every grid point.
SampledSignal eval_phase_referenced(const WeightedEnsemble& ensemble, const SampleGrid& grid,
                                    const PhaseReference& theta,
                                    const EvalOptions& options = {});

struct ProgressiveOptions {
    std::uint64_t prefix_ceiling = 1000;
};

/// One phase-referenced signal per prefix of the prime list: result[j]
/// uses the first j+1 primes. Throws CapacityError when the ensemble's
/// cutoff exceeds options.prefix_ceiling.
std::vector<SampledSignal> progressive_partial_sums(const WeightedEnsemble& ensemble,
                                                    const SampleGrid& grid,
                                                    const PhaseReference& theta,
                                                    const ProgressiveOptions& options = {});

/// CSV with header "t,value[,derivative]" and 17 significant digits.
void write_csv(std::ostream& out, const SampledSignal& signal);

/// Parses the format written by write_csv. The grid is reconstructed from
/// the first and last t and the row count.
SampledSignal read_signal_csv(std::istream& in);

}  // namespace prime_lab
