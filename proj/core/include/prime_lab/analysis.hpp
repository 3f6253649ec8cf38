#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "prime_lab/primes.hpp"
#include "prime_lab/signal.hpp"

namespace prime_lab {

// ---------------------------------------------------------------------------
// Zero-like crossings

/// A point where the signal vanishes with nonzero local slope.
struct Crossing {
    double t0 = 0.0;        // refined root
    double slope = 0.0;     // derivative at t0
    double residual = 0.0;  // |signal(t0)| after refinement
};

struct CrossingOptions {
    // Candidates with |slope| <= floor are tangencies, not crossings.
    // Unset: 1e-6 times the heuristic RMS slope of the ensemble.
    std::optional<double> slope_floor;
    int max_iterations = 80;
    // Refinement stops once |value| < residual_factor * (1 + Σ|a_p|).
    double residual_factor = 1e-10;
};

struct CrossingScan {
    std::vector<Crossing> crossings;
    // Set when every sample is exactly zero; no crossing can be located.
    bool degenerate_input = false;
    // Grid sign changes that did not survive refinement.
    std::size_t rejected_flat = 0;        // slope below the floor
    std::size_t rejected_unbracketed = 0; // direct evaluation disagreed with the grid sign
    std::size_t rejected_residual = 0;    // refinement did not reach the residual bound
};

/// Pointwise value/derivative pair the crossing detector refines against.
struct SignalFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    // Scale of the residual bound, 1 + max |signal|.
    double residual_scale = 1.0;
};

/// Brackets every strict sign change of `signal`, bisects on S, and keeps
/// roots whose slope clears the floor. Results are sorted by t0.
CrossingScan detect_crossings(const SampledSignal& signal, const WeightedEnsemble& ensemble,
                              const CrossingOptions& options = {});

/// Same scan against an arbitrary function; options.slope_floor must be set.
CrossingScan detect_crossings(const SampledSignal& signal, const SignalFunction& function,
                              const CrossingOptions& options);

// ---------------------------------------------------------------------------
// Destructive-interference wells

struct Well {
    double t_center = 0.0;    // parabolic-refined location of the local minimum
    double depth = 0.0;       // -signal at the minimum
    double half_width = 0.0;  // half the distance between the enclosing zero crossings
};

/// Interior local minima below -depth_threshold. Throws DomainError unless
/// depth_threshold > 0.
std::vector<Well> detect_wells(const SampledSignal& signal, double depth_threshold);

/// Fraction of primes whose phase t ln p (mod 2pi) lies within `delta` of pi,
/// i.e. whose cosine term sits in the destructive band. delta must be in (0, pi).
double coincidence_fraction(const PrimeTable& table, double t, double delta);

// ---------------------------------------------------------------------------
// Amplitude budget and regimes

enum class Regime { HighEnergy, Balance, OverDamped };

std::string_view to_string(Regime regime) noexcept;

/// Regime of exponent x; x within 1e-12 of 1/2 counts as Balance.
Regime classify_regime(double exponent) noexcept;

struct BudgetReport {
    std::uint64_t cutoff = 0;
    double exponent = 0.0;
    double exact = 0.0;            // Σ_{p<=P} p^{-2x}
    double integral_approx = 0.0;  // ∫_2^P u^{-2x} / ln u du
    Regime regime = Regime::Balance;
};

/// Throws DomainError unless x > 0.
BudgetReport amplitude_budget(const PrimeTable& table, double exponent);

/// ∫_2^P u^{-2x} / ln u du by adaptive Gauss-Kronrod to 1e-8 relative.
/// Throws DomainError unless P > 2 and x > 0.
double budget_integral_approx(double cutoff, double exponent);

// ---------------------------------------------------------------------------
// RMS slope scaling

/// sqrt(½ Σ p^{-2x} (ln p)^2). Throws DomainError unless x > 0.
double heuristic_rms_slope(const PrimeTable& table, double exponent);

/// sqrt(½ Σ a_i^2 w_i^2) for an arbitrary ensemble.
double heuristic_rms_slope(const WeightedEnsemble& ensemble);

/// RMS of S' at n_samples points drawn uniformly from [window.t_start,
/// window.t_end] with a seeded generator. Throws DomainError if
/// n_samples < 100.
double empirical_rms_slope(const WeightedEnsemble& ensemble, const SampleGrid& window,
                           std::size_t n_samples, std::uint64_t seed);

/// Same sampling contract applied to S itself.
double empirical_rms_signal(const WeightedEnsemble& ensemble, const SampleGrid& window,
                            std::size_t n_samples, std::uint64_t seed);

struct EmpiricalSampling {
    double window_start = 1000.0;
    double window_end = 2000.0;
    std::size_t n_samples = 1000;
    std::uint64_t seed = 1;
};

struct SlopeScalingReport {
    double exponent = 0.0;
    std::vector<std::uint64_t> cutoffs;
    std::vector<double> heuristic_rms;
    std::vector<double> empirical_rms;  // empty unless sampling was requested
    double fitted_exponent = 0.0;       // least-squares slope of ln(heuristic) vs ln(P)
    double predicted_exponent = 0.0;    // (1 - 2x)/2 for x < 1/2, else 0
};

/// Throws DomainError for fewer than 3 cutoffs, non-increasing cutoffs, or a
/// smallest cutoff below 1000.
SlopeScalingReport fit_scaling_exponent(double exponent, const std::vector<std::uint64_t>& cutoffs,
                                        const std::optional<EmpiricalSampling>& sampling = {});

/// As above, reusing `table` (which must reach the largest cutoff).
SlopeScalingReport fit_scaling_exponent(const PrimeTable& table, double exponent,
                                        const std::vector<std::uint64_t>& cutoffs,
                                        const std::optional<EmpiricalSampling>& sampling = {});

/// Ordinary least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Report output

void write_csv(std::ostream& out, const std::vector<BudgetReport>& reports);
void print_table(std::ostream& out, const std::vector<BudgetReport>& reports);
void write_csv(std::ostream& out, const std::vector<SlopeScalingReport>& reports);
void print_table(std::ostream& out, const std::vector<SlopeScalingReport>& reports);

}  // namespace prime_lab
