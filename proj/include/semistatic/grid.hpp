#pragma once

#include <span>
#include <vector>

#include "semistatic/claims.hpp"
#include "semistatic/vg.hpp"

namespace semistatic {

struct GridOptions {
    double lo = 1000.0;
    double hi = 3000.0;
    /// Fill the gaps between the outermost strikes and the truncation bounds
    /// with nodes: `tail_uniform_nodes` at the median strike spacing, then
    /// spacing growing by `tail_growth`. Without them the edge cells are wide, the density at
    /// their node misrepresents the cell, and options struck at the edge of
    /// the chain pay nothing on the grid.
    bool tail_nodes = true;
    int tail_uniform_nodes = 4;
    double tail_growth = 1.5;
    /// Relative offset of the two nodes bracketing a jump breakpoint.
    double jump_offset = 1e-9;
};

/// Tensor-product quadrature over per-period node lists. Point i enumerates
/// the product lexicographically with period 1 varying slowest.
struct QuadratureGrid {
    std::vector<std::vector<double>> nodes;
    std::vector<std::vector<double>> widths;
    std::vector<double> points;  // size() x periods(), row-major
    std::vector<double> weights;
    std::vector<double> density;
    std::vector<double> masses;
    double raw_mass = 0.0;  // sum of weight * density before normalization
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] std::size_t size() const { return weights.size(); }
    [[nodiscard]] int periods() const { return static_cast<int>(nodes.size()); }
    [[nodiscard]] std::span<const double> point(std::size_t i) const {
        const auto T = nodes.size();
        return {points.data() + i * T, T};
    }
};

/// Sorted node lists: strikes and breakpoints clipped to (lo, hi), jumps
/// bracketed, optional tail nodes.
std::vector<std::vector<double>> grid_nodes(const std::vector<std::vector<double>>& strike_sets,
                                            const std::vector<std::vector<Breakpoint>>& breakpoints,
                                            const GridOptions& options);

/// Midpoint cells clipped to [lo, hi].
std::vector<double> cell_widths(std::span<const double> nodes, double lo, double hi);

QuadratureGrid build_grid(const std::vector<std::vector<double>>& strike_sets,
                          const std::vector<std::vector<Breakpoint>>& breakpoints, const GridOptions& options,
                          const VGParams& params);

/// Number of tensor points without materializing them.
std::size_t grid_size(const std::vector<std::vector<double>>& nodes);

/// Per-period level sets on which pointwise hedging constraints are imposed:
/// grid nodes, the truncation bounds, the given extra levels, and left limits
/// of the given jump levels.
std::vector<std::vector<double>> constraint_levels(const QuadratureGrid& grid,
                                                   const std::vector<std::vector<double>>& extra_levels,
                                                   const std::vector<std::vector<double>>& left_limits,
                                                   double offset = 1e-9);

/// Row-major tensor product of per-period levels.
std::vector<double> tensor_points(const std::vector<std::vector<double>>& levels);

}  // namespace semistatic
