// prime_lab command-line tool: one subcommand per library operation.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "prime_lab/analysis.hpp"
#include "prime_lab/csv.hpp"
#include "prime_lab/errors.hpp"
#include "prime_lab/experiments.hpp"
#include "prime_lab/summation.hpp"

namespace fs = std::filesystem;
using namespace prime_lab;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Common {
    bool quiet = false;
    unsigned threads = 0;
    std::string cache;
};

// Raw flag text; numbers that need exact-integer checks stay strings until
// the subcommand runs so the error can name the flag.
struct Flags {
    std::string cutoff;
    std::string exponent;
    std::optional<double> t;
    double t_start = 140.0;
    double t_end = 160.0;
    std::size_t samples = 3000;
    std::string theta = "zero";
    double delta = std::numbers::pi / 2;
    double depth_threshold = 1.0;
    std::uint64_t seed = 1;
    std::string out;
    std::string refs;
    bool no_refs = false;
    bool count_only = false;
    std::string config;
};

std::uint64_t cutoff_flag(const std::string& text) {
    try {
        return parse_cutoff(text);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("--cutoff: {}", e.what()));
    }
}

std::vector<std::uint64_t> cutoff_list_flag(const std::string& text) {
    std::vector<std::uint64_t> out;
    try {
        out = parse_cutoff_list(text);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("--cutoff: {}", e.what()));
    }
    if (out.empty()) throw ValidationError("--cutoff: no value given");
    return out;
}

std::vector<double> exponent_list_flag(const std::string& text) {
    std::vector<double> out;
    try {
        out = parse_real_list(text);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("--exponent: {}", e.what()));
    }
    if (out.empty()) throw ValidationError("--exponent: no value given");
    for (double x : out)
        if (!(x > 0.0) || !std::isfinite(x))
            throw ValidationError(fmt::format("--exponent: must be > 0, got {}", x));
    return out;
}

double exponent_flag(const std::string& text) {
    const auto xs = exponent_list_flag(text);
    if (xs.size() != 1) throw ValidationError("--exponent: expected a single value");
    return xs.front();
}

PhaseReference theta_flag(const std::string& text) {
    try {
        return PhaseReference::parse(text);
    } catch (const Error& e) {
        throw ValidationError(fmt::format("--theta: {}", e.what()));
    }
}

SampleGrid grid_flags(const Flags& f) {
    try {
        return SampleGrid(f.t_start, f.t_end, f.samples);
    } catch (const DomainError& e) {
        throw ValidationError(fmt::format("--t-start/--t-end/--samples: {}", e.what()));
    }
}

PrimeTable primes_for(std::uint64_t cutoff, const Common& common) {
    try {
        return common.cache.empty() ? sieve_primes(cutoff) : load_or_sieve(cutoff, common.cache);
    } catch (const EmptyRangeError& e) {
        throw ValidationError(fmt::format("--cutoff: {}", e.what()));
    } catch (const CapacityError& e) {
        throw ValidationError(fmt::format("--cutoff: {}", e.what()));
    }
}

fs::path output_dir(const std::string& out) {
    const fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError(fmt::format("cannot create output directory '{}'", out));
    return dir;
}

std::ofstream open_file(const fs::path& path) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError(fmt::format("cannot write '{}'", path.string()));
    return file;
}

void finish_file(std::ofstream& file, const fs::path& path) {
    file.close();
    if (!file) throw IoError(fmt::format("failed writing '{}'", path.string()));
    std::cout << "wrote " << path.string() << '\n';
}

// W(t) = 2 Σ w cos(theta(t) - t ln p) at a single point.
double phase_referenced_point(const WeightedEnsemble& ens, const PhaseReference& theta, double t) {
    const double th = theta(t);
    CompensatedSum acc;
    const auto w = ens.weights();
    const auto f = ens.frequencies();
    for (std::size_t i = 0; i < ens.size(); ++i) acc.add(w[i] * std::cos(th - t * f[i]));
    return 2.0 * acc.value();
}

// ---------------------------------------------------------------------------

void run_primes(const Flags& f, const Common& c) {
    const auto table = primes_for(cutoff_flag(f.cutoff), c);
    if (f.count_only) {
        std::cout << table.size() << '\n';
        return;
    }
    if (!f.out.empty()) {
        const auto path = output_dir(f.out) / "primes.csv";
        auto file = open_file(path);
        file << "index,prime\n";
        std::size_t i = 0;
        for (auto p : table.primes()) file << ++i << ',' << p << '\n';
        finish_file(file, path);
        fmt::print("{} primes <= {}\n", table.size(), table.cutoff());
        return;
    }
    for (auto p : table.primes()) std::cout << p << '\n';
}

void run_eval(const Flags& f, const Common& c) {
    const WeightedEnsemble ens(primes_for(cutoff_flag(f.cutoff), c), exponent_flag(f.exponent));
    const auto theta = theta_flag(f.theta);
    const bool raw = theta.kind() == PhaseReference::Kind::Zero;

    if (f.t) {
        const double t = *f.t;
        if (!theta.evaluable_at(t))
            throw ValidationError(
                fmt::format("--t: phase reference '{}' is undefined at t = {}", theta.to_string(), t));
        if (raw) {
            fmt::print("S({}) = {:.5f}\n", t, eval_point(ens, t));
            // + 0.0 folds a negative zero
            fmt::print("S'({}) = {:.5f}\n", t, eval_derivative_point(ens, t) + 0.0);
        } else {
            fmt::print("W({}) = {:.5f}  [theta = {}]\n", t, phase_referenced_point(ens, theta, t),
                       theta.to_string());
        }
        return;
    }

    const auto grid = grid_flags(f);
    if (!theta.evaluable_at(grid.t_start()))
        throw ValidationError(fmt::format("--t-start: phase reference '{}' is undefined at t = {}",
                                          theta.to_string(), grid.t_start()));
    const EvalOptions opts{c.threads};
    const auto signal = raw ? eval_grid(ens, grid, true, opts)
                            : eval_phase_referenced(ens, grid, theta, opts);
    const auto [lo, hi] = std::minmax_element(signal.values.begin(), signal.values.end());
    fmt::print("{}(t) on [{}, {}], {} samples, {} primes, x = {}\n", raw ? "S" : "W",
               grid.t_start(), grid.t_end(), grid.size(), ens.size(), ens.exponent());
    fmt::print("  min {:.5f} at t = {:.5f}\n", *lo,
               grid.at(static_cast<std::size_t>(lo - signal.values.begin())));
    fmt::print("  max {:.5f} at t = {:.5f}\n", *hi,
               grid.at(static_cast<std::size_t>(hi - signal.values.begin())));
    fmt::print("  amplitude bound {:.5f}\n", (raw ? 1.0 : 2.0) * ens.weight_sum());
    if (!f.out.empty()) {
        const auto path = output_dir(f.out) / "eval.csv";
        auto file = open_file(path);
        write_csv(file, signal);
        finish_file(file, path);
    }
}

void run_budget(const Flags& f, const Common& c) {
    const auto cutoffs = cutoff_list_flag(f.cutoff);
    const auto exponents = exponent_list_flag(f.exponent);
    const auto full = primes_for(*std::max_element(cutoffs.begin(), cutoffs.end()), c);
    std::vector<BudgetReport> reports;
    for (double x : exponents)
        for (auto p : cutoffs) reports.push_back(amplitude_budget(full.truncated(p), x));
    print_table(std::cout, reports);
    if (!f.out.empty()) {
        const auto path = output_dir(f.out) / "budget.csv";
        auto file = open_file(path);
        write_csv(file, reports);
        finish_file(file, path);
    }
}

void run_slope(const Flags& f, const Common& c) {
    auto cutoffs = cutoff_list_flag(f.cutoff);
    std::sort(cutoffs.begin(), cutoffs.end());
    cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
    const auto exponents = exponent_list_flag(f.exponent);
    const auto full = primes_for(cutoffs.back(), c);

    std::optional<EmpiricalSampling> sampling;
    if (f.samples > 0) {
        if (f.samples < 100) throw ValidationError("--samples: need at least 100 (or 0 to skip)");
        if (!(f.t_start < f.t_end))
            throw ValidationError("--t-start/--t-end: sampling window needs t_start < t_end");
        sampling = EmpiricalSampling{f.t_start, f.t_end, f.samples, f.seed};
    }

    const bool fit = cutoffs.size() >= 3 && cutoffs.front() >= 1000;
    std::vector<SlopeScalingReport> reports;
    for (double x : exponents) {
        if (fit) {
            reports.push_back(fit_scaling_exponent(full, x, cutoffs, sampling));
            continue;
        }
        SlopeScalingReport r;
        r.exponent = x;
        r.cutoffs = cutoffs;
        r.predicted_exponent = classify_regime(x) == Regime::HighEnergy ? (1.0 - 2.0 * x) / 2.0 : 0.0;
        for (auto p : cutoffs) {
            const auto table = full.truncated(p);
            r.heuristic_rms.push_back(heuristic_rms_slope(table, x));
            if (sampling)
                r.empirical_rms.push_back(empirical_rms_slope(
                    WeightedEnsemble(table, x),
                    SampleGrid(sampling->window_start, sampling->window_end, 2),
                    sampling->n_samples, sampling->seed));
        }
        r.fitted_exponent = std::nan("");
        reports.push_back(std::move(r));
    }
    if (!fit) std::cout << "(fewer than 3 cutoffs >= 1000: no exponent fit)\n";
    print_table(std::cout, reports);
    if (!f.out.empty()) {
        const auto path = output_dir(f.out) / "slope.csv";
        auto file = open_file(path);
        write_csv(file, reports);
        finish_file(file, path);
    }
}

void run_crossings(const Flags& f, const Common& c) {
    const WeightedEnsemble ens(primes_for(cutoff_flag(f.cutoff), c), exponent_flag(f.exponent));
    const auto grid = grid_flags(f);
    const auto scan = detect_crossings(eval_grid(ens, grid, false, {c.threads}), ens);
    fmt::print("{} crossings of S(t) on [{}, {}] ({} primes, x = {})\n", scan.crossings.size(),
               grid.t_start(), grid.t_end(), ens.size(), ens.exponent());
    if (scan.degenerate_input) std::cout << "signal is identically zero on the grid\n";
    if (scan.rejected_flat + scan.rejected_unbracketed + scan.rejected_residual > 0)
        fmt::print("rejected: {} below slope floor, {} unbracketed, {} unresolved\n",
                   scan.rejected_flat, scan.rejected_unbracketed, scan.rejected_residual);
    fmt::print("{:>16} {:>14} {:>12}\n", "t0", "slope", "residual");
    for (const auto& x : scan.crossings)
        fmt::print("{:>16.10f} {:>14.6f} {:>12.3e}\n", x.t0, x.slope, x.residual);
    if (!f.out.empty()) {
        const auto path = output_dir(f.out) / "crossings.csv";
        auto file = open_file(path);
        file << "t0,slope,residual\n";
        for (const auto& x : scan.crossings)
            file << format_real(x.t0) << ',' << format_real(x.slope) << ','
                 << format_real(x.residual) << '\n';
        finish_file(file, path);
    }
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < std::numbers::pi))
        throw ValidationError(fmt::format("--delta: must lie in (0, pi), got {}", delta));
}

void run_wells(const Flags& f, const Common& c) {
    check_delta(f.delta);
    if (!(f.depth_threshold > 0.0))
        throw ValidationError(
            fmt::format("--depth-threshold: must be > 0, got {}", f.depth_threshold));
    const WeightedEnsemble ens(primes_for(cutoff_flag(f.cutoff), c), exponent_flag(f.exponent));
    const auto grid = grid_flags(f);
    const auto wells = detect_wells(eval_grid(ens, grid, false, {c.threads}), f.depth_threshold);
    fmt::print("{} wells deeper than {} on [{}, {}] ({} primes, x = {})\n", wells.size(),
               f.depth_threshold, grid.t_start(), grid.t_end(), ens.size(), ens.exponent());
    fmt::print("{:>12} {:>10} {:>12} {:>12}\n", "t_center", "depth", "half_width", "coincidence");
    std::vector<double> fractions;
    for (const auto& w : wells) {
        fractions.push_back(coincidence_fraction(ens.table(), w.t_center, f.delta));
        fmt::print("{:>12.5f} {:>10.5f} {:>12.5f} {:>12.5f}\n", w.t_center, w.depth, w.half_width,
                   fractions.back());
    }
    if (!f.out.empty()) {
        const auto path = output_dir(f.out) / "wells.csv";
        auto file = open_file(path);
        file << "t_center,depth,half_width,coincidence\n";
        for (std::size_t i = 0; i < wells.size(); ++i)
            file << format_real(wells[i].t_center) << ',' << format_real(wells[i].depth) << ','
                 << format_real(wells[i].half_width) << ',' << format_real(fractions[i]) << '\n';
        finish_file(file, path);
    }
}

void run_coincidence(const Flags& f, const Common& c) {
    check_delta(f.delta);
    const auto table = primes_for(cutoff_flag(f.cutoff), c);
    double t = 0.0;
    if (f.t) {
        t = *f.t;
    } else {
        // No --t: score the deepest point of S on the grid.
        const WeightedEnsemble ens(table, exponent_flag(f.exponent));
        const auto grid = grid_flags(f);
        const auto s = eval_grid(ens, grid, false, {c.threads});
        const auto k = static_cast<std::size_t>(
            std::min_element(s.values.begin(), s.values.end()) - s.values.begin());
        t = grid.at(k);
        fmt::print("minimum of S on [{}, {}]: S({:.5f}) = {:.5f}\n", grid.t_start(), grid.t_end(),
                   t, s.values[k]);
    }
    const double fraction = coincidence_fraction(table, t, f.delta);
    fmt::print("coincidence fraction at t = {:.5f}, delta = {:.5f}: {:.5f} of {} primes\n", t,
               f.delta, fraction, table.size());
    if (!f.out.empty()) {
        const auto path = output_dir(f.out) / "coincidence.csv";
        auto file = open_file(path);
        file << "t,delta,cutoff,prime_count,fraction\n"
             << format_real(t) << ',' << format_real(f.delta) << ',' << table.cutoff() << ','
             << table.size() << ',' << format_real(fraction) << '\n';
        finish_file(file, path);
    }
}

// Flags override the config file, which overrides the experiment defaults.
ExperimentConfig experiment_config(ExperimentKind kind, const Flags& f, const Common& c,
                                   const CLI::App& sub) {
    auto config = ExperimentConfig::defaults(kind);
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw IoError(fmt::format("cannot read config '{}'", f.config));
        apply_key_values(config, read_key_values(in));
        if (config.kind != kind)
            throw ValidationError(fmt::format("--config: file describes '{}', not '{}'",
                                              to_string(config.kind), to_string(kind)));
    }
    auto given = [&](const char* name) {
        const auto* opt = sub.get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    if (given("--cutoff")) config.cutoffs = cutoff_list_flag(f.cutoff);
    if (given("--exponent")) config.exponents = exponent_list_flag(f.exponent);
    if (given("--theta")) config.theta = theta_flag(f.theta);
    if (given("--out")) config.output_dir = f.out;
    if (given("--seed")) config.sampling.seed = f.seed;
    if (c.threads) config.threads = c.threads;
    if (!c.cache.empty()) config.prime_cache = c.cache;

    if (kind == ExperimentKind::ScalingStudy) {
        if (given("--samples")) config.sampling.n_samples = f.samples;
        if (given("--t-start")) config.sampling.window_start = f.t_start;
        if (given("--t-end")) config.sampling.window_end = f.t_end;
    } else {
        if (given("--depth-threshold")) config.depth_threshold = f.depth_threshold;
        if (given("--t-start") || given("--t-end") || given("--samples")) {
            Flags g = f;
            if (!given("--t-start")) g.t_start = config.grid.t_start();
            if (!given("--t-end")) g.t_end = config.grid.t_end();
            if (!given("--samples")) g.samples = config.grid.size();
            config.grid = grid_flags(g);
        }
        if (f.no_refs) {
            config.reference_ordinates_path.reset();
        } else if (given("--refs")) {
            config.reference_ordinates_path = f.refs;
        } else if (!config.reference_ordinates_path) {
            for (const char* candidate : {PRIME_LAB_DEFAULT_REFS, PRIME_LAB_INSTALLED_REFS})
                if (fs::exists(candidate)) {
                    config.reference_ordinates_path = candidate;
                    break;
                }
        }
    }
    config.validate();
    return config;
}

void list_files(const std::vector<fs::path>& files) {
    for (const auto& p : files) std::cout << "wrote " << p.string() << '\n';
}

void run_figure1(const Flags& f, const Common& c, const CLI::App& sub) {
    const auto config = experiment_config(ExperimentKind::Progressive, f, c, sub);
    const auto r = run_progressive(config);
    fmt::print("progressive superposition, x = {}, theta = {}\n", config.exponents.front(),
               config.theta.to_string());
    fmt::print("{:>8} {:>6} {:>10} {:>12} {:>12}\n", "prime", "wells", "deepest", "at t",
               "half_width");
    for (const auto& p : r.prefixes)
        fmt::print("{:>8} {:>6} {:>10.5f} {:>12.5f} {:>12.5f}\n", p.largest_prime, p.well_count,
                   p.deepest_depth, p.deepest_t, p.deepest_half_width);
    list_files(r.files);
}

void run_figure2(const Flags& f, const Common& c, const CLI::App& sub) {
    const auto config = experiment_config(ExperimentKind::WeightComparison, f, c, sub);
    const auto r = run_weight_comparison(config);
    fmt::print("{:>6} {:>10} {:>8} {:>10} {:>9} {:>6} {:>10} {:>10} {:>10} {:>10}\n", "x", "P",
               "primes", "max|S|", "crossings", "wells", "deepest", "budget", "ratio", "gap");
    for (const auto& cell : r.cells)
        fmt::print("{:>6} {:>10} {:>8} {:>10.5f} {:>9} {:>6} {:>10.5f} {:>10.5f} {:>10.5f} "
                   "{:>10.5f}\n",
                   cell.exponent, cell.cutoff, cell.prime_count, cell.max_abs, cell.crossings,
                   cell.wells, cell.deepest_well, cell.budget, cell.max_abs_ratio,
                   cell.budget_gap);
    list_files(r.files);
}

void run_scaling(const Flags& f, const Common& c, const CLI::App& sub) {
    const auto config = experiment_config(ExperimentKind::ScalingStudy, f, c, sub);
    const auto r = run_scaling_study(config);
    print_table(std::cout, r.budgets);
    std::cout << '\n';
    print_table(std::cout, r.slopes);
    list_files(r.files);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prime_lab: prime-weighted oscillatory signals"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    Common common;

    // One Flags per subcommand so per-command defaults never collide.
    std::deque<Flags> flag_sets;
    std::vector<std::pair<CLI::App*, Flags*>> commands;
    auto command = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->add_flag("--quiet,-q", common.quiet, "Suppress timing lines");
        s->add_option("--threads", common.threads,
                      "Worker threads, 0 = all cores (results never change)")
            ->capture_default_str();
        s->add_option("--cache", common.cache, "Prime cache file, reused and extended across runs")
            ->envname("PRIME_LAB_CACHE");
        commands.emplace_back(s, &flag_sets.emplace_back());
        return std::pair<CLI::App*, Flags&>{s, *commands.back().second};
    };
    auto add_cutoff = [](CLI::App* s, Flags& f, const char* def, const char* help) {
        f.cutoff = def;
        s->add_option("--cutoff", f.cutoff, help)->capture_default_str();
    };
    auto add_exponent = [](CLI::App* s, Flags& f, const char* def, const char* help) {
        f.exponent = def;
        s->add_option("--exponent", f.exponent, help)->capture_default_str();
    };
    auto add_grid = [](CLI::App* s, Flags& f) {
        s->add_option("--t-start", f.t_start, "Grid start")->capture_default_str();
        s->add_option("--t-end", f.t_end, "Grid end")->capture_default_str();
        s->add_option("--samples", f.samples, "Grid points")->capture_default_str();
    };
    auto add_window = [](CLI::App* s, Flags& f) {
        f.samples = 1000;
        f.t_start = 1000.0;
        f.t_end = 2000.0;
        s->add_option("--samples", f.samples, "Random samples for the empirical RMS")
            ->capture_default_str();
        s->add_option("--t-start", f.t_start, "Sampling window start")->capture_default_str();
        s->add_option("--t-end", f.t_end, "Sampling window end")->capture_default_str();
        s->add_option("--seed", f.seed, "Sampling seed")->capture_default_str();
    };
    auto add_theta = [](CLI::App* s, Flags& f) {
        s->add_option("--theta", f.theta, "Phase reference: zero | linear:<rate> | rs")
            ->capture_default_str();
    };
    auto add_depth = [](CLI::App* s, Flags& f) {
        s->add_option("--depth-threshold", f.depth_threshold, "Minimum well depth")
            ->capture_default_str();
    };
    auto add_refs = [](CLI::App* s, Flags& f) {
        s->add_option("--refs", f.refs, "Ordinates drawn as dashed lines")
            ->default_str("bundled zeta ordinates");
        s->add_flag("--no-refs", f.no_refs, "Skip the reference overlay");
    };
    auto add_experiment = [&](CLI::App* s, Flags& f, const char* cutoff_def,
                              const char* exp_def) {
        s->add_option("--config", f.config, "key = value file; flags take precedence");
        add_cutoff(s, f, cutoff_def, "Comma-separated cutoffs");
        add_exponent(s, f, exp_def, "Comma-separated exponents");
        s->add_option("--out", f.out, "Output directory")->default_str("prime_lab_out");
    };

    {
        auto [s, f] = command("primes", "List or count the primes up to a cutoff");
        add_cutoff(s, f, "100", "Largest integer considered");
        s->add_flag("--count-only", f.count_only, "Print only the number of primes");
        s->add_option("--out", f.out, "Directory for primes.csv");
    }
    {
        auto [s, f] = command("eval", "Evaluate S(t), or W(t) with a phase reference");
        add_cutoff(s, f, "100", "Prime cutoff P");
        add_exponent(s, f, "0.5", "Weight exponent x > 0");
        s->add_option("--t", f.t, "Single point; omit to sample the grid");
        add_grid(s, f);
        add_theta(s, f);
        s->add_option("--out", f.out, "Directory for eval.csv");
    }
    {
        auto [s, f] = command("budget", "Amplitude budget B_P(x) = sum of p^-2x");
        add_cutoff(s, f, "1e6", "Cutoff or comma-separated cutoffs");
        add_exponent(s, f, "0.5", "Exponent or comma-separated exponents");
        s->add_option("--out", f.out, "Directory for budget.csv");
    }
    {
        auto [s, f] = command("slope", "Heuristic and sampled RMS slope, log-log fit");
        add_cutoff(s, f, "1e4,1e5,1e6", "Comma-separated cutoffs (3+ cutoffs >= 1000 to fit)");
        add_exponent(s, f, "0.25,0.5,0.75", "Comma-separated exponents");
        add_window(s, f);
        s->add_option("--out", f.out, "Directory for slope.csv");
    }
    {
        auto [s, f] = command("crossings", "Zero crossings of S(t) with nonzero slope");
        add_cutoff(s, f, "100", "Prime cutoff P");
        add_exponent(s, f, "0.5", "Weight exponent x > 0");
        add_grid(s, f);
        s->add_option("--out", f.out, "Directory for crossings.csv");
    }
    {
        auto [s, f] = command("wells", "Destructive-interference wells of S(t)");
        add_cutoff(s, f, "100", "Prime cutoff P");
        add_exponent(s, f, "0.5", "Weight exponent x > 0");
        add_grid(s, f);
        add_depth(s, f);
        s->add_option("--delta", f.delta, "Coincidence band half-width in (0, pi)")
            ->capture_default_str();
        s->add_option("--out", f.out, "Directory for wells.csv");
    }
    {
        auto [s, f] = command("coincidence", "Fraction of primes with phase near pi at t");
        add_cutoff(s, f, "100", "Prime cutoff P");
        add_exponent(s, f, "0.5", "Weight exponent used to locate the minimum without --t");
        s->add_option("--t", f.t, "Point to score; omit to use the minimum of S on the grid");
        add_grid(s, f);
        s->add_option("--delta", f.delta, "Band half-width in (0, pi)")->capture_default_str();
        s->add_option("--out", f.out, "Directory for coincidence.csv");
    }
    {
        auto [s, f] = command("figure1", "Progressive superposition, one prime at a time");
        add_experiment(s, f, "97", "0.5");
        add_grid(s, f);
        add_theta(s, f);
        add_depth(s, f);
        add_refs(s, f);
    }
    {
        auto [s, f] = command("figure2", "Weight-exponent comparison grid");
        add_experiment(s, f, "100,1e6", "0.25,0.5,0.75");
        add_grid(s, f);
        add_depth(s, f);
        add_refs(s, f);
    }
    {
        auto [s, f] = command("scaling", "Budget growth and RMS slope scaling study");
        add_experiment(s, f, "1e3,1e4,1e5,1e6", "0.25,0.5,0.75");
        add_window(s, f);
    }

    if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
        fmt::print(stderr, "error: unknown subcommand '{}'\n\n{}", argv[1], app.help());
        return kExitValidation;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    const auto started = std::chrono::steady_clock::now();
    try {
        for (auto& [s, fp] : commands) {
            if (!s->parsed()) continue;
            const Flags& f = *fp;
            const std::string name = s->get_name();
            if (name == "primes") run_primes(f, common);
            else if (name == "eval") run_eval(f, common);
            else if (name == "budget") run_budget(f, common);
            else if (name == "slope") run_slope(f, common);
            else if (name == "crossings") run_crossings(f, common);
            else if (name == "wells") run_wells(f, common);
            else if (name == "coincidence") run_coincidence(f, common);
            else if (name == "figure1") run_figure1(f, common, *s);
            else if (name == "figure2") run_figure2(f, common, *s);
            else if (name == "scaling") run_scaling(f, common, *s);
        }
    } catch (const ValidationError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitValidation;
    } catch (const DomainError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitRuntime;
    }
    std::cout.flush();
    if (!common.quiet) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
        fmt::print(stderr, "elapsed {:.3f} s\n", elapsed.count());
    }
    return 0;
}
