#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prime_lab/analysis.hpp"
#include "prime_lab/signal.hpp"

namespace prime_lab {

enum class ExperimentKind { Progressive, WeightComparison, ScalingStudy };

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(std::string_view text);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::WeightComparison;
    std::vector<double> exponents;
    std::vector<std::uint64_t> cutoffs;
    SampleGrid grid{140.0, 160.0, 3000};
    PhaseReference theta = PhaseReference::zero();
    std::optional<std::filesystem::path> reference_ordinates_path;
    std::filesystem::path output_dir = "prime_lab_out";
    std::optional<std::filesystem::path> prime_cache;
    double depth_threshold = 1.0;
    EmpiricalSampling sampling;
    unsigned threads = 0;

    /// Defaults for each experiment: progressive N=97, x=1/2; weight
    /// comparison x in {1/4, 1/2, 3/4}, P in {100, 10^6}; scaling study
    /// x in {1/4, 1/2, 3/4}, P in {10^3, ..., 10^6}. Grid [140,160] x 3000.
    static ExperimentConfig defaults(ExperimentKind kind);

    /// Throws ValidationError when a field is out of range for `kind`.
    void validate() const;
};

using KeyValues = std::map<std::string, std::string, std::less<>>;

/// Flat "key = value" lines; '#' starts a comment. Throws ParseError.
KeyValues read_key_values(std::istream& in);

/// Overwrites the fields named in `values` (experiment, exponents, cutoffs,
/// t_start, t_end, samples, theta, refs, out, cache, depth_threshold, seed,
/// threads, rms_samples, window_start, window_end). Unknown keys throw
/// ValidationError.
void apply_key_values(ExperimentConfig& config, const KeyValues& values);

/// Integer cutoff, accepting scientific notation ("1e6") when the value is
/// an exact integer. Throws ValidationError otherwise.
std::uint64_t parse_cutoff(std::string_view text);

std::vector<double> parse_real_list(std::string_view text);
std::vector<std::uint64_t> parse_cutoff_list(std::string_view text);

struct ReferenceOrdinates {
    std::vector<double> ordinates;
    std::string source;
};

/// One real per line, '#' comments. Throws IoError if unreadable,
/// ParseError (with line) on junk, ValidationError if not strictly ascending.
ReferenceOrdinates load_reference_ordinates(const std::filesystem::path& path);

struct PrefixWellSummary {
    std::uint64_t largest_prime = 0;
    std::size_t well_count = 0;
    double deepest_depth = 0.0;  // 0 when no well qualifies
    double deepest_t = 0.0;
    double deepest_half_width = 0.0;
};

struct ProgressiveResult {
    std::vector<std::filesystem::path> files;
    std::vector<PrefixWellSummary> prefixes;
};

struct WeightCell {
    double exponent = 0.0;
    std::uint64_t cutoff = 0;
    std::size_t prime_count = 0;
    double max_abs = 0.0;
    std::size_t crossings = 0;
    std::size_t wells = 0;
    double deepest_well = 0.0;
    double budget = 0.0;
    // Relative to the smallest cutoff with the same exponent.
    double max_abs_ratio = 1.0;
    double budget_gap = 0.0;
};

struct WeightComparisonResult {
    std::vector<std::filesystem::path> files;
    std::vector<WeightCell> cells;  // exponent-major, cutoffs ascending
};

struct ScalingStudyResult {
    std::vector<std::filesystem::path> files;
    std::vector<BudgetReport> budgets;
    std::vector<SlopeScalingReport> slopes;
};

/// progressive.csv (t plus one column per prefix), progressive_wells.csv,
/// progressive.svg.
ProgressiveResult run_progressive(const ExperimentConfig& config);

/// One weight_x<x>_P<P>.csv per cell, weight_summary.csv, weight_comparison.svg.
WeightComparisonResult run_weight_comparison(const ExperimentConfig& config);

/// scaling_budget.csv, scaling_slope.csv, scaling.svg.
ScalingStudyResult run_scaling_study(const ExperimentConfig& config);

void write_csv(std::ostream& out, const std::vector<WeightCell>& cells);

}  // namespace prime_lab
