#include "prime_lab/signal.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "grid_kernel.hpp"
#include "prime_lab/csv.hpp"
#include "prime_lab/errors.hpp"
#include "prime_lab/summation.hpp"

namespace prime_lab {

SampleGrid::SampleGrid(double t_start, double t_end, std::size_t n_samples)
    : t_start_(t_start), t_end_(t_end), n_(n_samples), spacing_(0.0) {
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_start < t_end))
        throw DomainError(fmt::format("grid needs t_start < t_end, got [{}, {}]", t_start, t_end));
    if (n_samples < 2) throw DomainError("grid needs at least 2 samples");
    spacing_ = (t_end - t_start) / static_cast<double>(n_samples - 1);
}

PhaseReference PhaseReference::parse(std::string_view text) {
    text = trim(text);
    if (text == "zero") return zero();
    if (text == "rs") return riemann_siegel();
    if (text.starts_with("linear:")) {
        const double rate = parse_real(text.substr(7), 1);
        if (!std::isfinite(rate)) throw ValidationError("linear phase rate must be finite");
        return linear(rate);
    }
    throw ValidationError(fmt::format("unknown phase reference '{}' (zero|linear:<rate>|rs)", text));
}

double PhaseReference::operator()(double t) const {
    switch (kind_) {
    case Kind::Zero:
        return 0.0;
    case Kind::Linear:
        return rate_ * t;
    case Kind::RiemannSiegel:
        if (!(t > 0.0))
            throw DomainError(fmt::format("Riemann-Siegel phase needs t > 0, got {}", t));
        return 0.5 * t * std::log(t / (2.0 * std::numbers::pi)) - 0.5 * t -
               std::numbers::pi / 8.0;
    }
    return 0.0;
}

std::string PhaseReference::to_string() const {
    switch (kind_) {
    case Kind::Zero:
        return "zero";
    case Kind::Linear:
        return "linear:" + format_real(rate_);
    case Kind::RiemannSiegel:
        return "rs";
    }
    return {};
}

double eval_point(const WeightedEnsemble& ensemble, double t) {
    const auto f = ensemble.frequencies();
    const auto a = ensemble.weights();
    CompensatedSum acc;
    for (std::size_t i = 0; i < f.size(); ++i) acc.add(a[i] * std::cos(t * f[i]));
    return acc.value();
}

double eval_derivative_point(const WeightedEnsemble& ensemble, double t) {
    const auto f = ensemble.frequencies();
    const auto a = ensemble.weights();
    CompensatedSum acc;
    for (std::size_t i = 0; i < f.size(); ++i) acc.add(a[i] * f[i] * std::sin(t * f[i]));
    return -acc.value();
}

SampledSignal eval_grid(const WeightedEnsemble& ensemble, const SampleGrid& grid,
                        bool with_derivative, const EvalOptions& options) {
    std::vector<double> slope_coef;
    if (with_derivative) {
        const auto f = ensemble.frequencies();
        const auto a = ensemble.weights();
        slope_coef.resize(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) slope_coef[i] = a[i] * f[i];
    }
    auto sums = detail::grid_trig_sums(ensemble.frequencies(), ensemble.weights(), slope_coef,
                                       grid, options.threads);
    SampledSignal out{grid, std::move(sums.cos_sums), std::nullopt};
    if (with_derivative) {
        for (double& v : sums.sin_sums) v = -v;
        out.derivatives = std::move(sums.sin_sums);
    }
    return out;
}

SampledSignal eval_phase_referenced(const WeightedEnsemble& ensemble, const SampleGrid& grid,
                                    const PhaseReference& theta, const EvalOptions& options) {
    if (!theta.evaluable_at(grid.t_start()))
        throw DomainError(fmt::format("phase reference '{}' is undefined at t = {}",
                                      theta.to_string(), grid.t_start()));
    // cos(θ - t ln p) = cos θ cos(t ln p) + sin θ sin(t ln p)
    const bool need_sin = theta.kind() != PhaseReference::Kind::Zero;
    auto sums = detail::grid_trig_sums(ensemble.frequencies(), ensemble.weights(),
                                       need_sin ? ensemble.weights() : std::span<const double>{},
                                       grid, options.threads);
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!need_sin) {
            values[k] = 2.0 * sums.cos_sums[k];
            continue;
        }
        const double th = theta(grid.at(k));
        values[k] = 2.0 * (std::cos(th) * sums.cos_sums[k] + std::sin(th) * sums.sin_sums[k]);
    }
    return {grid, std::move(values), std::nullopt};
}

std::vector<SampledSignal> progressive_partial_sums(const WeightedEnsemble& ensemble,
                                                    const SampleGrid& grid,
                                                    const PhaseReference& theta,
                                                    const ProgressiveOptions& options) {
    if (ensemble.table().cutoff() > options.prefix_ceiling)
        throw CapacityError(fmt::format("cutoff {} exceeds the progressive prefix ceiling {}",
                                        ensemble.table().cutoff(), options.prefix_ceiling));
    if (!theta.evaluable_at(grid.t_start()))
        throw DomainError(fmt::format("phase reference '{}' is undefined at t = {}",
                                      theta.to_string(), grid.t_start()));

    std::vector<double> phase(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) phase[k] = theta(grid.at(k));

    const auto f = ensemble.frequencies();
    const auto a = ensemble.weights();
    std::vector<CompensatedSum> running(grid.size());
    std::vector<SampledSignal> out;
    out.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::vector<double> values(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            running[k].add(2.0 * a[i] * std::cos(phase[k] - grid.at(k) * f[i]));
            values[k] = running[k].value();
        }
        out.push_back({grid, std::move(values), std::nullopt});
    }
    return out;
}

void write_csv(std::ostream& out, const SampledSignal& signal) {
    const bool deriv = signal.derivatives.has_value();
    out << (deriv ? "t,value,derivative\n" : "t,value\n");
    for (std::size_t k = 0; k < signal.grid.size(); ++k) {
        out << format_real(signal.grid.at(k)) << ',' << format_real(signal.values[k]);
        if (deriv) out << ',' << format_real((*signal.derivatives)[k]);
        out << '\n';
    }
}

SampledSignal read_signal_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing CSV header", 1);
    const auto header = trim(line);
    bool deriv = false;
    if (header == "t,value,derivative")
        deriv = true;
    else if (header != "t,value")
        throw ParseError(fmt::format("unexpected CSV header '{}'", header), 1);

    std::vector<double> ts, values, derivs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(trim(line));
        if (fields.size() != (deriv ? 3u : 2u))
            throw ParseError("wrong number of CSV fields", line_no);
        ts.push_back(parse_real(fields[0], line_no));
        values.push_back(parse_real(fields[1], line_no));
        if (deriv) derivs.push_back(parse_real(fields[2], line_no));
    }
    if (ts.size() < 2) throw ParseError("signal CSV needs at least 2 rows", line_no);
    SampledSignal out{SampleGrid(ts.front(), ts.back(), ts.size()), std::move(values),
                      std::nullopt};
    if (deriv) out.derivatives = std::move(derivs);
    return out;
}

}  // namespace prime_lab
