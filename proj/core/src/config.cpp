#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include <fmt/format.h>

#include "prime_lab/csv.hpp"
#include "prime_lab/errors.hpp"
#include "prime_lab/experiments.hpp"

namespace prime_lab {

std::string_view to_string(ExperimentKind kind) noexcept {
    switch (kind) {
    case ExperimentKind::Progressive:
        return "progressive";
    case ExperimentKind::WeightComparison:
        return "weight_comparison";
    case ExperimentKind::ScalingStudy:
        return "scaling_study";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
    text = trim(text);
    if (text == "progressive") return ExperimentKind::Progressive;
    if (text == "weight_comparison") return ExperimentKind::WeightComparison;
    if (text == "scaling_study") return ExperimentKind::ScalingStudy;
    throw ValidationError(fmt::format(
        "unknown experiment '{}' (progressive|weight_comparison|scaling_study)", text));
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    switch (kind) {
    case ExperimentKind::Progressive:
        c.exponents = {0.5};
        c.cutoffs = {97};
        break;
    case ExperimentKind::WeightComparison:
        c.exponents = {0.25, 0.5, 0.75};
        c.cutoffs = {100, 1'000'000};
        break;
    case ExperimentKind::ScalingStudy:
        c.exponents = {0.25, 0.5, 0.75};
        c.cutoffs = {1'000, 10'000, 100'000, 1'000'000};
        break;
    }
    return c;
}

void ExperimentConfig::validate() const {
    if (exponents.empty()) throw ValidationError("experiment needs at least one exponent");
    if (cutoffs.empty()) throw ValidationError("experiment needs at least one cutoff");
    for (double x : exponents)
        if (!(x > 0.0) || !std::isfinite(x))
            throw ValidationError(fmt::format("exponent must be > 0, got {}", x));
    for (std::uint64_t p : cutoffs)
        if (p < 2) throw ValidationError(fmt::format("cutoff must be >= 2, got {}", p));
    if (!(depth_threshold > 0.0))
        throw ValidationError(fmt::format("depth threshold must be > 0, got {}", depth_threshold));
    if (!theta.evaluable_at(grid.t_start()))
        throw ValidationError(fmt::format("phase reference '{}' is undefined at t = {}",
                                          theta.to_string(), grid.t_start()));

    switch (kind) {
    case ExperimentKind::Progressive:
        if (exponents.size() != 1 || cutoffs.size() != 1)
            throw ValidationError("progressive experiment takes a single exponent and cutoff");
        break;
    case ExperimentKind::WeightComparison:
        break;
    case ExperimentKind::ScalingStudy:
        if (cutoffs.size() < 3)
            throw ValidationError("scaling study needs at least 3 cutoffs");
        if (sampling.n_samples < 100)
            throw ValidationError("scaling study needs rms_samples >= 100");
        if (!(sampling.window_start < sampling.window_end))
            throw ValidationError("scaling study window must have window_start < window_end");
        break;
    }
}

KeyValues read_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
        const auto key = trim(view.substr(0, eq));
        if (key.empty()) throw ParseError("empty key", line_no);
        kv[std::string(key)] = std::string(trim(view.substr(eq + 1)));
    }
    return kv;
}

std::uint64_t parse_cutoff(std::string_view text) {
    text = trim(text);
    std::uint64_t as_int = 0;
    const char* end = text.data() + text.size();
    if (auto [ptr, ec] = std::from_chars(text.data(), end, as_int);
        !text.empty() && ec == std::errc{} && ptr == end)
        return as_int;

    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end)
        throw ValidationError(fmt::format("cutoff '{}' is not a number", text));
    if (!(value >= 0.0) || value > 9.007199254740992e15 || std::floor(value) != value)
        throw ValidationError(fmt::format("cutoff '{}' is not an exact non-negative integer", text));
    return static_cast<std::uint64_t>(value);
}

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    for (auto field : split_fields(trim(text))) {
        field = trim(field);
        if (field.empty()) continue;
        try {
            out.push_back(parse_real(field, 1));
        } catch (const ParseError&) {
            throw ValidationError(fmt::format("'{}' is not a number", field));
        }
    }
    return out;
}

std::vector<std::uint64_t> parse_cutoff_list(std::string_view text) {
    std::vector<std::uint64_t> out;
    for (auto field : split_fields(trim(text))) {
        if (trim(field).empty()) continue;
        out.push_back(parse_cutoff(field));
    }
    return out;
}

void apply_key_values(ExperimentConfig& config, const KeyValues& values) {
    double t_start = config.grid.t_start();
    double t_end = config.grid.t_end();
    std::size_t samples = config.grid.size();

    auto real = [](const std::string& key, const std::string& v) {
        try {
            return parse_real(v, 1);
        } catch (const ParseError&) {
            throw ValidationError(fmt::format("{}: '{}' is not a number", key, v));
        }
    };

    for (const auto& [key, value] : values) {
        if (key == "experiment")
            config.kind = parse_experiment_kind(value);
        else if (key == "exponents" || key == "exponent")
            config.exponents = parse_real_list(value);
        else if (key == "cutoffs" || key == "cutoff")
            config.cutoffs = parse_cutoff_list(value);
        else if (key == "t_start")
            t_start = real(key, value);
        else if (key == "t_end")
            t_end = real(key, value);
        else if (key == "samples")
            samples = parse_cutoff(value);
        else if (key == "theta")
            config.theta = PhaseReference::parse(value);
        else if (key == "refs")
            config.reference_ordinates_path =
                value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
        else if (key == "out")
            config.output_dir = value;
        else if (key == "cache")
            config.prime_cache =
                value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
        else if (key == "depth_threshold")
            config.depth_threshold = real(key, value);
        else if (key == "seed")
            config.sampling.seed = parse_cutoff(value);
        else if (key == "threads")
            config.threads = static_cast<unsigned>(parse_cutoff(value));
        else if (key == "rms_samples")
            config.sampling.n_samples = parse_cutoff(value);
        else if (key == "window_start")
            config.sampling.window_start = real(key, value);
        else if (key == "window_end")
            config.sampling.window_end = real(key, value);
        else
            throw ValidationError(fmt::format("unknown configuration key '{}'", key));
    }
    try {
        config.grid = SampleGrid(t_start, t_end, samples);
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
}

ReferenceOrdinates load_reference_ordinates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot read reference ordinates '{}'", path.string()));
    ReferenceOrdinates refs;
    refs.source = path.filename().string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const double v = parse_real(view, line_no);
        if (!refs.ordinates.empty() && v <= refs.ordinates.back())
            throw ValidationError(fmt::format(
                "reference ordinates must be strictly ascending ({} after {}, line {})", v,
                refs.ordinates.back(), line_no));
        refs.ordinates.push_back(v);
    }
    return refs;
}

}  // namespace prime_lab
