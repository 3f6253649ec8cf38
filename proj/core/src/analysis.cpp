#include "prime_lab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "prime_lab/csv.hpp"
#include "prime_lab/errors.hpp"
#include "prime_lab/summation.hpp"

namespace prime_lab {

namespace {

void require_positive_exponent(double exponent) {
    if (!(exponent > 0.0) || !std::isfinite(exponent))
        throw DomainError(fmt::format("weight exponent must be > 0, got {}", exponent));
}

int sign_of(double v) noexcept { return (v > 0.0) - (v < 0.0); }

}  // namespace

// ---------------------------------------------------------------------------
// Crossings

CrossingScan detect_crossings(const SampledSignal& signal, const WeightedEnsemble& ensemble,
                              const CrossingOptions& options) {
    CrossingOptions opts = options;
    if (!opts.slope_floor) opts.slope_floor = 1e-6 * heuristic_rms_slope(ensemble);
    SignalFunction fn{[&](double t) { return eval_point(ensemble, t); },
                      [&](double t) { return eval_derivative_point(ensemble, t); },
                      1.0 + ensemble.weight_sum()};
    return detect_crossings(signal, fn, opts);
}

CrossingScan detect_crossings(const SampledSignal& signal, const SignalFunction& fn,
                              const CrossingOptions& options) {
    if (!options.slope_floor) throw ValidationError("detect_crossings needs a slope floor");
    const double floor = *options.slope_floor;
    const double bound = options.residual_factor * fn.residual_scale;
    const auto& v = signal.values;
    const auto& grid = signal.grid;

    CrossingScan scan;
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
        scan.degenerate_input = true;
        return scan;
    }

    std::optional<std::size_t> prev;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] == 0.0) continue;
        const bool change = prev && sign_of(v[*prev]) != sign_of(v[k]);
        const std::size_t left = prev.value_or(k);
        prev = k;
        if (!change) continue;

        double a = grid.at(left), b = grid.at(k);
        double fa = fn.value(a), fb = fn.value(b);
        double t0 = 0.0, residual = 0.0;
        if (fa == 0.0 || fb == 0.0) {
            t0 = fa == 0.0 ? a : b;
        } else if (sign_of(fa) == sign_of(fb)) {
            ++scan.rejected_unbracketed;
            continue;
        } else {
            bool converged = false;
            for (int it = 0; it < options.max_iterations; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = fn.value(m);
                if (std::abs(fm) < bound || m == a || m == b) {
                    t0 = m;
                    residual = std::abs(fm);
                    converged = std::abs(fm) < bound;
                    break;
                }
                if (sign_of(fm) == sign_of(fa)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                    fb = fm;
                }
            }
            if (!converged) {
                if (residual == 0.0) {
                    t0 = std::abs(fa) <= std::abs(fb) ? a : b;
                    residual = std::min(std::abs(fa), std::abs(fb));
                }
                if (!(residual < bound)) {
                    ++scan.rejected_residual;
                    continue;
                }
            }
        }
        const double slope = fn.derivative(t0);
        if (!(std::abs(slope) > floor)) {
            ++scan.rejected_flat;
            continue;
        }
        scan.crossings.push_back({t0, slope, residual});
    }

    std::sort(scan.crossings.begin(), scan.crossings.end(),
              [](const Crossing& x, const Crossing& y) { return x.t0 < y.t0; });
    const double min_gap = 0.5 * grid.spacing();
    std::vector<Crossing> unique;
    for (const Crossing& c : scan.crossings)
        if (unique.empty() || c.t0 - unique.back().t0 > min_gap) unique.push_back(c);
    scan.crossings = std::move(unique);
    return scan;
}

// ---------------------------------------------------------------------------
// Wells

std::vector<Well> detect_wells(const SampledSignal& signal, double depth_threshold) {
    if (!(depth_threshold > 0.0))
        throw DomainError(fmt::format("depth threshold must be > 0, got {}", depth_threshold));
    const auto& f = signal.values;
    const auto& grid = signal.grid;
    const double dt = grid.spacing();
    const std::size_t n = f.size();

    // Linear-interpolated zero between samples j and j+1 (f changes sign there).
    auto zero_between = [&](std::size_t j) {
        return grid.at(j) + dt * f[j] / (f[j] - f[j + 1]);
    };

    std::vector<Well> wells;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!(f[k] < f[k - 1] && f[k] <= f[k + 1] && f[k] < -depth_threshold)) continue;

        double t_center = grid.at(k);
        double minimum = f[k];
        const double curvature = f[k - 1] - 2.0 * f[k] + f[k + 1];
        if (curvature > 0.0) {
            const double offset = 0.5 * (f[k - 1] - f[k + 1]) / curvature;
            t_center += offset * dt;
            minimum -= 0.25 * (f[k - 1] - f[k + 1]) * offset;
        }

        double left = grid.t_start();
        for (std::size_t j = k; j-- > 0;) {
            if (f[j] >= 0.0) {
                left = zero_between(j);
                break;
            }
        }
        double right = grid.t_end();
        for (std::size_t j = k + 1; j < n; ++j) {
            if (f[j] >= 0.0) {
                right = zero_between(j - 1);
                break;
            }
        }
        wells.push_back({t_center, -minimum, 0.5 * (right - left)});
    }
    return wells;
}

double coincidence_fraction(const PrimeTable& table, double t, double delta) {
    if (!(delta > 0.0 && delta < std::numbers::pi))
        throw DomainError(fmt::format("delta must lie in (0, pi), got {}", delta));
    if (table.empty()) return 0.0;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    // cos is even, so |t| gives the same band membership as t.
    const double at = std::abs(t);
    std::size_t hits = 0;
    for (double lp : table.logs()) {
        const double phase = std::fmod(at * lp, two_pi);
        if (std::abs(phase - std::numbers::pi) < delta) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(table.size());
}

// ---------------------------------------------------------------------------
// Budget

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
    case Regime::HighEnergy:
        return "HighEnergy";
    case Regime::Balance:
        return "Balance";
    case Regime::OverDamped:
        return "OverDamped";
    }
    return "?";
}

Regime classify_regime(double exponent) noexcept {
    if (std::abs(exponent - 0.5) <= 1e-12) return Regime::Balance;
    return exponent < 0.5 ? Regime::HighEnergy : Regime::OverDamped;
}

BudgetReport amplitude_budget(const PrimeTable& table, double exponent) {
    require_positive_exponent(exponent);
    if (table.empty()) throw EmptyRangeError("amplitude budget of an empty prime table");
    CompensatedSum acc;
    for (double lp : table.logs()) acc.add(std::exp(-2.0 * exponent * lp));
    BudgetReport r;
    r.cutoff = table.cutoff();
    r.exponent = exponent;
    r.exact = acc.value();
    r.integral_approx =
        table.cutoff() > 2 ? budget_integral_approx(static_cast<double>(table.cutoff()), exponent)
                           : 0.0;
    r.regime = classify_regime(exponent);
    return r;
}

// ---------------------------------------------------------------------------
// Slopes

double heuristic_rms_slope(const PrimeTable& table, double exponent) {
    require_positive_exponent(exponent);
    CompensatedSum acc;
    for (double lp : table.logs()) acc.add(std::exp(-2.0 * exponent * lp) * lp * lp);
    return std::sqrt(0.5 * acc.value());
}

double heuristic_rms_slope(const WeightedEnsemble& ensemble) {
    const auto f = ensemble.frequencies();
    const auto a = ensemble.weights();
    CompensatedSum acc;
    for (std::size_t i = 0; i < f.size(); ++i) acc.add(a[i] * a[i] * f[i] * f[i]);
    return std::sqrt(0.5 * acc.value());
}

namespace {

template <class Fn>
double sampled_rms(const SampleGrid& window, std::size_t n_samples, std::uint64_t seed, Fn&& fn) {
    if (n_samples < 100)
        throw DomainError(fmt::format("RMS estimate needs >= 100 samples, got {}", n_samples));
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(window.t_start(), window.t_end());
    CompensatedSum acc;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double v = fn(dist(gen));
        acc.add(v * v);
    }
    return std::sqrt(acc.value() / static_cast<double>(n_samples));
}

}  // namespace

double empirical_rms_slope(const WeightedEnsemble& ensemble, const SampleGrid& window,
                           std::size_t n_samples, std::uint64_t seed) {
    return sampled_rms(window, n_samples, seed,
                       [&](double t) { return eval_derivative_point(ensemble, t); });
}

double empirical_rms_signal(const WeightedEnsemble& ensemble, const SampleGrid& window,
                            std::size_t n_samples, std::uint64_t seed) {
    return sampled_rms(window, n_samples, seed, [&](double t) { return eval_point(ensemble, t); });
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DomainError("least squares needs two equally long columns of >= 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = compensated_sum(x) / n;
    const double my = compensated_sum(y) / n;
    CompensatedSum sxy, sxx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy.add((x[i] - mx) * (y[i] - my));
        sxx.add((x[i] - mx) * (x[i] - mx));
    }
    if (sxx.value() == 0.0) throw DomainError("least squares needs distinct abscissae");
    return sxy.value() / sxx.value();
}

namespace {

void validate_cutoffs(const std::vector<std::uint64_t>& cutoffs) {
    if (cutoffs.size() < 3)
        throw DomainError(fmt::format("scaling fit needs >= 3 cutoffs, got {}", cutoffs.size()));
    if (cutoffs.front() < 1000)
        throw DomainError(fmt::format("smallest cutoff must be >= 1000, got {}", cutoffs.front()));
    for (std::size_t i = 1; i < cutoffs.size(); ++i)
        if (cutoffs[i] <= cutoffs[i - 1])
            throw DomainError("scaling fit cutoffs must be strictly increasing");
}

}  // namespace

SlopeScalingReport fit_scaling_exponent(double exponent, const std::vector<std::uint64_t>& cutoffs,
                                        const std::optional<EmpiricalSampling>& sampling) {
    require_positive_exponent(exponent);
    validate_cutoffs(cutoffs);
    return fit_scaling_exponent(sieve_primes(cutoffs.back()), exponent, cutoffs, sampling);
}

SlopeScalingReport fit_scaling_exponent(const PrimeTable& table, double exponent,
                                        const std::vector<std::uint64_t>& cutoffs,
                                        const std::optional<EmpiricalSampling>& sampling) {
    require_positive_exponent(exponent);
    validate_cutoffs(cutoffs);
    if (table.cutoff() < cutoffs.back())
        throw ValidationError("prime table does not reach the largest cutoff");

    SlopeScalingReport r;
    r.exponent = exponent;
    r.cutoffs = cutoffs;
    r.predicted_exponent =
        classify_regime(exponent) == Regime::HighEnergy ? (1.0 - 2.0 * exponent) / 2.0 : 0.0;

    // One ascending pass; each cutoff reads off the running sum.
    const auto primes = table.primes();
    const auto logs = table.logs();
    CompensatedSum acc;
    std::size_t i = 0;
    for (std::uint64_t cutoff : cutoffs) {
        for (; i < primes.size() && primes[i] <= cutoff; ++i)
            acc.add(std::exp(-2.0 * exponent * logs[i]) * logs[i] * logs[i]);
        r.heuristic_rms.push_back(std::sqrt(0.5 * acc.value()));
    }

    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < cutoffs.size(); ++k) {
        lx.push_back(std::log(static_cast<double>(cutoffs[k])));
        ly.push_back(std::log(r.heuristic_rms[k]));
    }
    r.fitted_exponent = least_squares_slope(lx, ly);

    if (sampling) {
        const SampleGrid window(sampling->window_start, sampling->window_end, 2);
        for (std::uint64_t cutoff : cutoffs) {
            const WeightedEnsemble ens(table.truncated(cutoff), exponent);
            r.empirical_rms.push_back(
                empirical_rms_slope(ens, window, sampling->n_samples, sampling->seed));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Output

void write_csv(std::ostream& out, const std::vector<BudgetReport>& reports) {
    out << "exponent,cutoff,exact,integral_approx,regime\n";
    for (const auto& r : reports)
        out << format_real(r.exponent) << ',' << r.cutoff << ',' << format_real(r.exact) << ','
            << format_real(r.integral_approx) << ',' << to_string(r.regime) << '\n';
}

void print_table(std::ostream& out, const std::vector<BudgetReport>& reports) {
    fmt::print(out, "{:>8} {:>12} {:>16} {:>16} {:>12}\n", "x", "P", "exact B_P(x)",
               "integral", "regime");
    for (const auto& r : reports)
        fmt::print(out, "{:>8.4g} {:>12} {:>16.6f} {:>16.6f} {:>12}\n", r.exponent, r.cutoff,
                   r.exact, r.integral_approx, to_string(r.regime));
}

void write_csv(std::ostream& out, const std::vector<SlopeScalingReport>& reports) {
    out << "exponent,cutoff,heuristic_rms,empirical_rms,fitted_exponent,predicted_exponent\n";
    for (const auto& r : reports)
        for (std::size_t k = 0; k < r.cutoffs.size(); ++k)
            out << format_real(r.exponent) << ',' << r.cutoffs[k] << ','
                << format_real(r.heuristic_rms[k]) << ','
                << (r.empirical_rms.empty() ? std::string{} : format_real(r.empirical_rms[k]))
                << ',' << format_real(r.fitted_exponent) << ','
                << format_real(r.predicted_exponent) << '\n';
}

void print_table(std::ostream& out, const std::vector<SlopeScalingReport>& reports) {
    for (const auto& r : reports) {
        fmt::print(out, "x = {:.4g}: fitted exponent {:.5f}, predicted {:.5f}\n", r.exponent,
                   r.fitted_exponent, r.predicted_exponent);
        fmt::print(out, "  {:>12} {:>16} {:>16}\n", "P", "heuristic rms", "empirical rms");
        for (std::size_t k = 0; k < r.cutoffs.size(); ++k) {
            const std::string emp =
                r.empirical_rms.empty() ? "-" : fmt::format("{:.6f}", r.empirical_rms[k]);
            fmt::print(out, "  {:>12} {:>16.6f} {:>16}\n", r.cutoffs[k], r.heuristic_rms[k], emp);
        }
    }
}

}  // namespace prime_lab
