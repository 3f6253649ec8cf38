#include "prime_lab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "prime_lab/csv.hpp"
#include "prime_lab/errors.hpp"
#include "prime_lab/svg.hpp"

namespace prime_lab {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError(fmt::format("cannot create output directory '{}'", dir.string()));
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
    return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

PrimeTable make_table(std::uint64_t cutoff, const ExperimentConfig& config) {
    return config.prime_cache ? load_or_sieve(cutoff, *config.prime_cache)
                              : sieve_primes(cutoff);
}

std::optional<ReferenceOrdinates> maybe_refs(const ExperimentConfig& config) {
    if (!config.reference_ordinates_path) return std::nullopt;
    return load_reference_ordinates(*config.reference_ordinates_path);
}

std::vector<double> grid_points(const SampleGrid& grid) {
    std::vector<double> t(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) t[k] = grid.at(k);
    return t;
}

// Light blue to dark navy as `frac` goes 0 -> 1.
std::string ramp_color(double frac) {
    auto mix = [frac](int a, int b) {
        return static_cast<int>(std::lround(a + (b - a) * frac));
    };
    return fmt::format("#{:02x}{:02x}{:02x}", mix(0xa6, 0x08), mix(0xcb, 0x30), mix(0xe3, 0x6b));
}

// |S| <= sum of weights (|W| <= twice that), up to rotation drift in the
// grid kernel.
void check_amplitude_bound(const SampledSignal& s, double bound) {
    for (double v : s.values)
        if (!(std::abs(v) <= bound * (1.0 + 1e-12)))
            throw Error(fmt::format("signal value {} exceeds amplitude bound {}", v, bound));
}

std::string format_exponent(double x) { return fmt::format("{:g}", x); }

}  // namespace

// ---------------------------------------------------------------------------

ProgressiveResult run_progressive(const ExperimentConfig& config) {
    config.validate();
    const auto refs = maybe_refs(config);
    ensure_dir(config.output_dir);

    const WeightedEnsemble ens(make_table(config.cutoffs.front(), config), config.exponents.front());
    const auto partials = progressive_partial_sums(ens, config.grid, config.theta);
    const auto primes = ens.table().primes();
    for (std::size_t j = 0; j < partials.size(); ++j)
        check_amplitude_bound(partials[j], 2.0 * ens.prefix(j + 1).weight_sum());

    ProgressiveResult result;

    const fs::path csv_path = config.output_dir / "progressive.csv";
    {
        auto out = open_output(csv_path);
        out << 't';
        for (std::uint64_t p : primes) out << ",upto_" << p;
        out << '\n';
        for (std::size_t k = 0; k < config.grid.size(); ++k) {
            out << format_real(config.grid.at(k));
            for (const auto& s : partials) out << ',' << format_real(s.values[k]);
            out << '\n';
        }
        close_output(out, csv_path);
    }
    result.files.push_back(csv_path);

    std::vector<Well> final_wells;
    for (std::size_t j = 0; j < partials.size(); ++j) {
        auto wells = detect_wells(partials[j], config.depth_threshold);
        PrefixWellSummary row;
        row.largest_prime = primes[j];
        row.well_count = wells.size();
        if (!wells.empty()) {
            const auto deepest = std::max_element(
                wells.begin(), wells.end(),
                [](const Well& a, const Well& b) { return a.depth < b.depth; });
            row.deepest_depth = deepest->depth;
            row.deepest_t = deepest->t_center;
            row.deepest_half_width = deepest->half_width;
        }
        result.prefixes.push_back(row);
        if (j + 1 == partials.size()) final_wells = std::move(wells);
    }

    const fs::path wells_path = config.output_dir / "progressive_wells.csv";
    {
        auto out = open_output(wells_path);
        out << "largest_prime,well_count,deepest_depth,deepest_t,deepest_half_width\n";
        for (const auto& r : result.prefixes)
            out << r.largest_prime << ',' << r.well_count << ',' << format_real(r.deepest_depth)
                << ',' << format_real(r.deepest_t) << ',' << format_real(r.deepest_half_width)
                << '\n';
        close_output(out, wells_path);
    }
    result.files.push_back(wells_path);

    svg::Figure fig(2, 1,
                    fmt::format("Progressive superposition, x = {}, primes up to {}, theta = {}",
                                format_exponent(ens.exponent()), ens.table().cutoff(),
                                config.theta.to_string()),
                    900.0, 320.0);
    const auto t = grid_points(config.grid);
    auto& a = fig.panel(0, 0);
    a.title = "(a) partial sums, one prime added per curve";
    a.x_label = "t";
    a.y_label = "W(t)";
    for (std::size_t j = 0; j < partials.size(); ++j) {
        const double frac =
            partials.size() > 1 ? static_cast<double>(j) / static_cast<double>(partials.size() - 1)
                                : 1.0;
        a.series.push_back({t, partials[j].values, ramp_color(frac), 0.7, false, {}});
    }
    auto& b = fig.panel(1, 0);
    b.title = "(b) full ensemble with detected wells";
    b.x_label = "t";
    b.y_label = "W(t)";
    b.series.push_back({t, partials.back().values, "#08306b", 1.2, false,
                        fmt::format("N = {}", ens.table().cutoff())});
    for (const auto& w : final_wells) b.markers.push_back({w.t_center, -w.depth, "#d62728"});
    if (refs) b.vlines = refs->ordinates;

    const fs::path svg_path = config.output_dir / "progressive.svg";
    fig.save(svg_path);
    result.files.push_back(svg_path);
    return result;
}

// ---------------------------------------------------------------------------

void write_csv(std::ostream& out, const std::vector<WeightCell>& cells) {
    out << "exponent,cutoff,prime_count,max_abs,crossings,wells,deepest_well,budget,"
           "max_abs_ratio,budget_gap\n";
    for (const auto& c : cells)
        out << format_real(c.exponent) << ',' << c.cutoff << ',' << c.prime_count << ','
            << format_real(c.max_abs) << ',' << c.crossings << ',' << c.wells << ','
            << format_real(c.deepest_well) << ',' << format_real(c.budget) << ','
            << format_real(c.max_abs_ratio) << ',' << format_real(c.budget_gap) << '\n';
}

WeightComparisonResult run_weight_comparison(const ExperimentConfig& config) {
    config.validate();
    const auto refs = maybe_refs(config);
    ensure_dir(config.output_dir);

    std::vector<std::uint64_t> cutoffs = config.cutoffs;
    std::sort(cutoffs.begin(), cutoffs.end());
    cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
    const PrimeTable full = make_table(cutoffs.back(), config);
    std::vector<PrimeTable> tables;
    for (std::uint64_t p : cutoffs) tables.push_back(full.truncated(p));

    WeightComparisonResult result;
    svg::Figure fig(config.exponents.size(), cutoffs.size(),
                    "Raw prime cosine signal S(t) by weight exponent and cutoff", 520.0, 240.0);
    const auto t = grid_points(config.grid);
    const EvalOptions eval{config.threads};

    for (std::size_t r = 0; r < config.exponents.size(); ++r) {
        const double x = config.exponents[r];
        std::optional<WeightCell> first;
        for (std::size_t c = 0; c < cutoffs.size(); ++c) {
            const WeightedEnsemble ens(tables[c], x);
            const SampledSignal signal = eval_grid(ens, config.grid, false, eval);
            check_amplitude_bound(signal, ens.weight_sum());

            const fs::path cell_path = config.output_dir / fmt::format("weight_x{}_P{}.csv",
                                                                       format_exponent(x),
                                                                       cutoffs[c]);
            {
                auto out = open_output(cell_path);
                write_csv(out, signal);
                close_output(out, cell_path);
            }
            result.files.push_back(cell_path);

            const auto wells = detect_wells(signal, config.depth_threshold);
            WeightCell cell;
            cell.exponent = x;
            cell.cutoff = cutoffs[c];
            cell.prime_count = ens.size();
            for (double v : signal.values) cell.max_abs = std::max(cell.max_abs, std::abs(v));
            cell.crossings = detect_crossings(signal, ens).crossings.size();
            cell.wells = wells.size();
            for (const auto& w : wells) cell.deepest_well = std::max(cell.deepest_well, w.depth);
            cell.budget = amplitude_budget(tables[c], x).exact;
            if (!first) first = cell;
            cell.max_abs_ratio = cell.max_abs / first->max_abs;
            cell.budget_gap = cell.budget - first->budget;
            result.cells.push_back(cell);

            auto& panel = fig.panel(r, c);
            panel.title = fmt::format("x = {}, P = {} ({} primes)", format_exponent(x),
                                      cutoffs[c], ens.size());
            panel.x_label = "t";
            panel.y_label = "S(t)";
            panel.series.push_back({t, signal.values, "#1f4e9c", 0.8, false, {}});
            if (refs) panel.vlines = refs->ordinates;
        }
    }

    const fs::path svg_path = config.output_dir / "weight_comparison.svg";
    fig.save(svg_path);
    result.files.push_back(svg_path);

    // Summary last, after every cell file exists.
    const fs::path summary_path = config.output_dir / "weight_summary.csv";
    {
        auto out = open_output(summary_path);
        write_csv(out, result.cells);
        close_output(out, summary_path);
    }
    result.files.push_back(summary_path);
    return result;
}

// ---------------------------------------------------------------------------

ScalingStudyResult run_scaling_study(const ExperimentConfig& config) {
    config.validate();
    ensure_dir(config.output_dir);

    std::vector<std::uint64_t> cutoffs = config.cutoffs;
    std::sort(cutoffs.begin(), cutoffs.end());
    const PrimeTable full = make_table(cutoffs.back(), config);

    ScalingStudyResult result;
    for (double x : config.exponents) {
        for (std::uint64_t p : cutoffs) result.budgets.push_back(amplitude_budget(full.truncated(p), x));
        result.slopes.push_back(fit_scaling_exponent(full, x, cutoffs, config.sampling));
    }

    const fs::path budget_path = config.output_dir / "scaling_budget.csv";
    {
        auto out = open_output(budget_path);
        write_csv(out, result.budgets);
        close_output(out, budget_path);
    }
    result.files.push_back(budget_path);

    const fs::path slope_path = config.output_dir / "scaling_slope.csv";
    {
        auto out = open_output(slope_path);
        write_csv(out, result.slopes);
        close_output(out, slope_path);
    }
    result.files.push_back(slope_path);

    static const char* const palette[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd",
                                          "#ff7f0e", "#8c564b"};
    svg::Figure fig(1, 1, "Heuristic RMS slope vs prime cutoff", 720.0, 440.0);
    auto& panel = fig.panel(0, 0);
    panel.log_x = true;
    panel.log_y = true;
    panel.x_label = "P";
    panel.y_label = "RMS slope";
    std::vector<double> px(cutoffs.begin(), cutoffs.end());
    for (std::size_t i = 0; i < result.slopes.size(); ++i) {
        const auto& s = result.slopes[i];
        const std::string color = palette[i % std::size(palette)];
        panel.series.push_back({px, s.heuristic_rms, color, 1.6, false,
                                fmt::format("x = {} (fit {:.3f})", format_exponent(s.exponent),
                                            s.fitted_exponent)});
        std::vector<double> guide;
        for (double p : px)
            guide.push_back(s.heuristic_rms.front() *
                            std::pow(p / px.front(), s.predicted_exponent));
        panel.series.push_back({px, guide, color, 1.0, true, {}});
    }
    const fs::path svg_path = config.output_dir / "scaling.svg";
    fig.save(svg_path);
    result.files.push_back(svg_path);
    return result;
}

}  // namespace prime_lab
