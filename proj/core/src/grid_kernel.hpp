#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "prime_lab/signal.hpp"

namespace prime_lab::detail {

// Grid steps between direct sin/cos resynchronizations of each mode's phase.
inline constexpr std::size_t kResyncStride = 256;
// Modes per work unit; partial sums of blocks are combined in block order.
inline constexpr std::size_t kModeBlock = 8192;

struct TrigSums {
    std::vector<double> cos_sums;  // Σ cos_coef_i cos(t_k w_i), empty if not requested
    std::vector<double> sin_sums;  // Σ sin_coef_i sin(t_k w_i), empty if not requested
};

// Evaluates the requested sums at every grid point. Work is cut into
// (grid tile, mode block) units whose shape depends only on the problem
// size, so the result is identical for any thread count.
TrigSums grid_trig_sums(std::span<const double> frequencies, std::span<const double> cos_coef,
                        std::span<const double> sin_coef, const SampleGrid& grid,
                        unsigned threads);

unsigned resolve_threads(unsigned requested);

}  // namespace prime_lab::detail
