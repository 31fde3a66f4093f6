#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <omp.h>

#include "semistatic/claims.hpp"
#include "semistatic/grid.hpp"
#include "semistatic/instruments.hpp"
#include "semistatic/synthetic.hpp"
#include "semistatic/vg.hpp"

using namespace semistatic;

namespace {

std::vector<std::vector<double>> chain_strikes() {
    Market m;
    m.quotes = synthetic_chain();
    return m.strike_sets();
}

std::vector<std::vector<Breakpoint>> five_claim_breaks() {
    std::vector<std::vector<Breakpoint>> all(2);
    for (const auto& c : standard_claims(2350, 2400)) {
        const auto b = claim_breakpoints(c);
        for (std::size_t t = 0; t < 2; ++t) {
            all[t].insert(all[t].end(), b[t].begin(), b[t].end());
        }
    }
    return all;
}

}  // namespace

TEST_CASE("midpoint cells clipped to the truncation box") {
    const std::vector<double> nodes{2000, 2200, 2400};
    const auto w = cell_widths(nodes, 1900, 2500);
    CHECK(w == std::vector<double>{200, 200, 200});
    const auto uneven = cell_widths(std::vector<double>{1100, 1200, 2000}, 1000, 3000);
    CHECK(uneven == std::vector<double>{150, 450, 1400});
}

TEST_CASE("tensor grid of 3 x 2 nodes") {
    VGParams p;
    GridOptions o;
    o.lo = 1900;
    o.hi = 2700;
    o.tail_nodes = false;
    const auto g = build_grid({{2000, 2200, 2400}, {2300, 2500}}, {}, o, p);
    REQUIRE(g.size() == 6);
    CHECK(grid_size(g.nodes) == 6);
    const std::vector<double> w1{200, 200, 400};
    const std::vector<double> w2{500, 300};
    for (std::size_t i = 0; i < 6; ++i) {
        const auto x = g.point(i);
        CHECK(x[0] == g.nodes[0][i / 2]);
        CHECK(x[1] == g.nodes[1][i % 2]);
        CHECK(g.weights[i] == w1[i / 2] * w2[i % 2]);
        CHECK(g.density[i] == doctest::Approx(path_density(p, x)).epsilon(1e-14));
    }
}

TEST_CASE("masses are a probability vector and points are inside the box") {
    const auto g = build_grid(chain_strikes(), five_claim_breaks(), GridOptions{}, VGParams{});
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(g.weights[i] > 0.0);
        CHECK(g.masses[i] >= 0.0);
        total += g.masses[i];
        for (double x : g.point(i)) {
            CHECK(x > g.lo);
            CHECK(x < g.hi);
        }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("raw mass on the synthetic chain is within 5e-3 of one") {
    const auto g = build_grid(chain_strikes(), five_claim_breaks(), GridOptions{}, VGParams{});
    CHECK(std::abs(g.raw_mass - 1.0) <= 5e-3);
}

TEST_CASE("first-period marginal agrees with simulation") {
    const VGParams p;
    const auto g = build_grid(chain_strikes(), five_claim_breaks(), GridOptions{}, p);
    const std::size_t n = 1000000;
    const auto paths = simulate_paths(p, n, 99);
    const auto& nodes = g.nodes[0];
    const std::size_t n2 = g.nodes[1].size();
    // compare cumulative probabilities at the cell boundaries
    std::vector<double> grid(nodes.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        grid[i / n2] += g.masses[i] * g.raw_mass;
    }
    std::vector<double> x1(n);
    for (std::size_t k = 0; k < n; ++k) {
        x1[k] = paths[2 * k];
    }
    std::sort(x1.begin(), x1.end());
    double worst = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        acc += grid[k];
        const double edge = 0.5 * (nodes[k] + nodes[k + 1]);
        const double empirical =
            static_cast<double>(std::upper_bound(x1.begin(), x1.end(), edge) - x1.begin()) / static_cast<double>(n);
        worst = std::max(worst, std::abs(acc - empirical));
    }
    // midpoint-rule error of the cumulative sums on 50-point cells
    CHECK(worst < 1e-2);

    // the total matches the simulated probability of the truncation box
    std::size_t inside = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = paths[2 * k];
        const double b = paths[2 * k + 1];
        inside += (a > g.lo && a < g.hi && b > g.lo && b < g.hi) ? 1 : 0;
    }
    CHECK(std::abs(g.raw_mass - static_cast<double>(inside) / static_cast<double>(n)) < 5e-3);
}

TEST_CASE("widening the truncation box adds mass") {
    GridOptions narrow;
    narrow.lo = 1800;
    narrow.hi = 2800;
    GridOptions wide;
    const auto a = build_grid(chain_strikes(), {}, narrow, VGParams{});
    const auto b = build_grid(chain_strikes(), {}, wide, VGParams{});
    CHECK(b.raw_mass > a.raw_mass);
}

TEST_CASE("breakpoints enter the nodes and jumps are bracketed") {
    GridOptions o;
    o.tail_nodes = false;
    const auto nodes = grid_nodes({{2300, 2500}, {2300, 2500}},
                                  {{{2400, BreakKind::jump}}, {{2350, BreakKind::kink}, {4000, BreakKind::kink}}}, o);
    CHECK(nodes[0] == std::vector<double>{2300, 2400 * (1 - 1e-9), 2400 * (1 + 1e-9), 2500});
    CHECK(nodes[1] == std::vector<double>{2300, 2350, 2500});
}

TEST_CASE("tail nodes continue the strike spacing and then widen") {
    GridOptions o;
    o.lo = 1000;
    o.hi = 3000;
    const auto nodes = grid_nodes({{2300, 2350, 2400}}, {}, o);
    const auto& n = nodes[0];
    // 4 uniform steps of 50 above 2400, then 75, 112.5, ...
    const auto at = std::find(n.begin(), n.end(), 2400.0);
    REQUIRE(at != n.end());
    CHECK(*(at + 1) == 2450.0);
    CHECK(*(at + 4) == 2600.0);
    CHECK(*(at + 5) == 2675.0);
    CHECK(*(at + 6) == 2787.5);
    CHECK(n.back() < 3000.0);
    CHECK(n.front() > 1000.0);
    CHECK(std::is_sorted(n.begin(), n.end()));
}

TEST_CASE("constraint levels add bounds, kinks and left limits") {
    GridOptions o;
    o.tail_nodes = false;
    const auto g = build_grid({{2300, 2500}, {2300, 2500}}, {}, o, VGParams{});
    const auto levels = constraint_levels(g, {{}, {2350}}, {{2400}, {}}, 1e-9);
    CHECK(levels[0] == std::vector<double>{1000, 2300, 2400 * (1 - 1e-9), 2400, 2500, 3000});
    CHECK(levels[1] == std::vector<double>{1000, 2300, 2350, 2500, 3000});
    const auto pts = tensor_points(levels);
    CHECK(pts.size() == 6 * 5 * 2);
}

TEST_CASE("grid construction errors") {
    GridOptions o;
    o.lo = 2000;
    o.hi = 1000;
    CHECK_THROWS(grid_nodes({{1500}}, {}, o));
    GridOptions ok;
    ok.tail_nodes = false;
    CHECK_THROWS(grid_nodes({{500}}, {}, ok));
    CHECK_THROWS(cell_widths(std::vector<double>{}, 0, 1));
}

TEST_CASE("grid does not depend on the thread count") {
    omp_set_num_threads(1);
    const auto a = build_grid(chain_strikes(), five_claim_breaks(), GridOptions{}, VGParams{});
    omp_set_num_threads(4);
    const auto b = build_grid(chain_strikes(), five_claim_breaks(), GridOptions{}, VGParams{});
    CHECK(a.density == b.density);
    CHECK(a.masses == b.masses);
    CHECK(a.raw_mass == b.raw_mass);
}
