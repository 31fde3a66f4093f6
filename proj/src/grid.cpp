#include "semistatic/grid.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include <fmt/format.h>

#include "semistatic/kernels.hpp"

namespace semistatic {

namespace {

void sort_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<std::vector<double>> grid_nodes(const std::vector<std::vector<double>>& strike_sets,
                                            const std::vector<std::vector<Breakpoint>>& breakpoints,
                                            const GridOptions& options) {
    if (!(options.lo > 0.0) || !(options.hi > options.lo)) {
        throw std::invalid_argument(fmt::format("degenerate truncation [{}, {}]", options.lo, options.hi));
    }
    const std::size_t T = strike_sets.size();
    if (T == 0) {
        throw std::invalid_argument("grid needs at least one period");
    }
    if (!breakpoints.empty() && breakpoints.size() != T) {
        throw std::invalid_argument("breakpoint lists do not match the number of periods");
    }
    auto inside = [&](double x) { return x > options.lo && x < options.hi; };

    std::vector<std::vector<double>> nodes(T);
    for (std::size_t t = 0; t < T; ++t) {
        for (double k : strike_sets[t]) {
            if (inside(k)) {
                nodes[t].push_back(k);
            }
        }
        if (!breakpoints.empty()) {
            for (const auto& b : breakpoints[t]) {
                if (b.kind == BreakKind::kink) {
                    if (inside(b.level)) {
                        nodes[t].push_back(b.level);
                    }
                } else {
                    for (double x : {b.level * (1.0 - options.jump_offset), b.level * (1.0 + options.jump_offset)}) {
                        if (inside(x)) {
                            nodes[t].push_back(x);
                        }
                    }
                }
            }
        }
        sort_unique(nodes[t]);
        if (nodes[t].empty()) {
            throw std::invalid_argument(fmt::format("period {} has no nodes inside the truncation box", t + 1));
        }
    }

    if (options.tail_nodes) {
        for (auto& n : nodes) {
            // continue the node spacing at the edges, widening geometrically
            std::vector<double> gaps;
            for (std::size_t k = 1; k < n.size(); ++k) {
                if (n[k] - n[k - 1] > 1e-6 * n[k]) {
                    gaps.push_back(n[k] - n[k - 1]);
                }
            }
            double step = 0.1 * (options.hi - options.lo);
            if (!gaps.empty()) {
                std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
                step = gaps[gaps.size() / 2];
            }
            std::vector<double> extra;
            for (double dir : {1.0, -1.0}) {
                double h = step;
                double x = (dir > 0 ? n.back() : n.front()) + dir * h;
                for (int k = 1; x > options.lo && x < options.hi; ++k) {
                    extra.push_back(x);
                    if (k >= options.tail_uniform_nodes) {
                        h *= options.tail_growth;
                    }
                    x += dir * h;
                }
            }
            n.insert(n.end(), extra.begin(), extra.end());
            sort_unique(n);
        }
    }
    return nodes;
}

std::vector<double> cell_widths(std::span<const double> nodes, double lo, double hi) {
    if (nodes.empty()) {
        throw std::invalid_argument("empty node list");
    }
    std::vector<double> widths(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double left = k == 0 ? lo : 0.5 * (nodes[k - 1] + nodes[k]);
        const double right = k + 1 == nodes.size() ? hi : 0.5 * (nodes[k] + nodes[k + 1]);
        widths[k] = std::min(right, hi) - std::max(left, lo);
        if (!(widths[k] > 0.0)) {
            throw std::invalid_argument(fmt::format("node {} has an empty cell in [{}, {}]", nodes[k], lo, hi));
        }
    }
    return widths;
}

std::size_t grid_size(const std::vector<std::vector<double>>& nodes) {
    std::size_t m = 1;
    for (const auto& n : nodes) {
        m *= n.size();
    }
    return m;
}

std::vector<double> tensor_points(const std::vector<std::vector<double>>& levels) {
    const std::size_t T = levels.size();
    const std::size_t M = grid_size(levels);
    std::vector<double> points(M * T);
    std::vector<std::size_t> idx(T, 0);
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            points[i * T + t] = levels[t][idx[t]];
        }
        for (std::size_t t = T; t-- > 0;) {
            if (++idx[t] < levels[t].size()) {
                break;
            }
            idx[t] = 0;
        }
    }
    return points;
}

QuadratureGrid build_grid(const std::vector<std::vector<double>>& strike_sets,
                          const std::vector<std::vector<Breakpoint>>& breakpoints, const GridOptions& options,
                          const VGParams& params) {
    params.validate();
    if (strike_sets.size() != static_cast<std::size_t>(params.periods())) {
        throw std::invalid_argument("strike sets do not match the model's number of periods");
    }
    QuadratureGrid grid;
    grid.lo = options.lo;
    grid.hi = options.hi;
    grid.nodes = grid_nodes(strike_sets, breakpoints, options);
    const std::size_t T = grid.nodes.size();
    for (const auto& n : grid.nodes) {
        grid.widths.push_back(cell_widths(n, options.lo, options.hi));
    }
    grid.points = tensor_points(grid.nodes);
    const std::size_t M = grid_size(grid.nodes);

    // transitions[t][p * N_t + k]: density of node k at period t given node p
    // at period t-1 (a single row from the spot for the first period).
    std::vector<std::vector<double>> transitions(T);
    for (std::size_t t = 0; t < T; ++t) {
        const auto& prev = t == 0 ? std::vector<double>{params.spot} : grid.nodes[t - 1];
        const auto& cur = grid.nodes[t];
        auto& table = transitions[t];
        table.resize(prev.size() * cur.size());
        const auto rows = static_cast<std::int64_t>(prev.size());
        const int period = static_cast<int>(t) + 1;
#pragma omp parallel for schedule(dynamic, 4)
        for (std::int64_t p = 0; p < rows; ++p) {
            const auto pu = static_cast<std::size_t>(p);
            for (std::size_t k = 0; k < cur.size(); ++k) {
                table[pu * cur.size() + k] = transition_density(params, period, prev[pu], cur[k]);
            }
        }
    }

    grid.weights.resize(M);
    grid.density.resize(M);
    std::vector<std::size_t> idx(T, 0);
    for (std::size_t i = 0; i < M; ++i) {
        double w = 1.0;
        double f = 1.0;
        std::size_t prev = 0;
        for (std::size_t t = 0; t < T; ++t) {
            w *= grid.widths[t][idx[t]];
            f *= transitions[t][prev * grid.nodes[t].size() + idx[t]];
            prev = idx[t];
        }
        grid.weights[i] = w;
        grid.density[i] = f;
        for (std::size_t t = T; t-- > 0;) {
            if (++idx[t] < grid.nodes[t].size()) {
                break;
            }
            idx[t] = 0;
        }
    }

    std::vector<double> mass(M);
    for (std::size_t i = 0; i < M; ++i) {
        mass[i] = grid.weights[i] * grid.density[i];
    }
    grid.raw_mass = kernels::sum(mass);
    if (!(grid.raw_mass > 0.0)) {
        throw std::runtime_error("grid carries no probability mass");
    }
    for (std::size_t i = 0; i < M; ++i) {
        mass[i] /= grid.raw_mass;
    }
    grid.masses = std::move(mass);
    return grid;
}

std::vector<std::vector<double>> constraint_levels(const QuadratureGrid& grid,
                                                   const std::vector<std::vector<double>>& extra_levels,
                                                   const std::vector<std::vector<double>>& left_limits,
                                                   double offset) {
    const std::size_t T = grid.nodes.size();
    std::vector<std::vector<double>> levels(T);
    auto add = [&](std::size_t t, double x) {
        if (x >= grid.lo && x <= grid.hi) {
            levels[t].push_back(x);
        }
    };
    for (std::size_t t = 0; t < T; ++t) {
        levels[t] = grid.nodes[t];
        add(t, grid.lo);
        add(t, grid.hi);
        if (t < extra_levels.size()) {
            for (double x : extra_levels[t]) {
                add(t, x);
            }
        }
        if (t < left_limits.size()) {
            for (double x : left_limits[t]) {
                add(t, x * (1.0 - offset));
                add(t, x);
            }
        }
        sort_unique(levels[t]);
    }
    return levels;
}

}  // namespace semistatic
