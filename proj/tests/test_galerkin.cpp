#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <json.hpp>

#include "semistatic/galerkin.hpp"
#include "semistatic/pricing.hpp"
#include "semistatic/solver.hpp"
#include "semistatic/synthetic.hpp"

using namespace semistatic;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Quote make_quote(OptionKind kind, double strike, int period, double bid, double ask, double bq, double aq) {
    Quote q;
    q.kind = kind;
    q.strike = strike;
    q.maturity = period;
    q.bid_price = bid;
    q.ask_price = ask;
    q.bid_qty = bq;
    q.ask_qty = aq;
    q.id = (kind == OptionKind::call ? "C" : "P") + std::to_string(static_cast<int>(strike)) + "_" +
           std::to_string(period);
    return q;
}

// Two grid points, one call, basis cells split at 2300.
HedgingSetup two_point_setup() {
    HedgingSetup s;
    s.market.quotes = {make_quote(OptionKind::call, 2300, 2, 79.5, 81.8, 48, 51)};
    s.basis_strikes = {{2300}};
    s.spot = 2360;
    auto& g = s.grid;
    g.lo = 1000;
    g.hi = 3000;
    g.nodes = {{2300, 2400}, {2200, 2400}};
    g.points = {2300, 2400, 2400, 2200};
    g.weights = {1, 1};
    g.density = {0.4, 0.6};
    g.masses = {0.4, 0.6};
    g.raw_mass = 1.0;
    return s;
}

// Straightforward terminal wealth with the layout's column numbering.
// `scale` receives the sum of the absolute terms, the size of the rounding
// error any summation order makes.
double direct_wealth(const DecisionLayout& layout, const HedgingSetup& setup, double delta,
                     const std::vector<double>& x, std::span<const double> path, double& scale) {
    double w = x[static_cast<std::size_t>(layout.cash)];
    scale = std::abs(w);
    for (std::size_t j = 0; j < layout.quotes.size(); ++j) {
        const auto& q = setup.market.quotes[j];
        const double s = path[static_cast<std::size_t>(q.maturity - 1)];
        const double pay = q.kind == OptionKind::call ? std::max(s - q.strike, 0.0) : std::max(q.strike - s, 0.0);
        const auto& c = layout.quotes[j];
        const double pos = c.merged >= 0 ? x[static_cast<std::size_t>(c.merged)]
                                         : x[static_cast<std::size_t>(c.plus)] - x[static_cast<std::size_t>(c.minus)];
        w += pos * pay;
        scale += std::abs(pos * pay);
    }
    const double x1 = path[0];
    const double x2 = path[1];
    const auto& k = setup.basis_strikes[0];
    std::size_t cell = 0;
    while (cell < k.size() && x1 >= k[cell]) {
        ++cell;
    }
    if (layout.z0 >= 0) {
        const double a = x[static_cast<std::size_t>(layout.z0)] * (x1 - setup.spot);
        const double b = x[static_cast<std::size_t>(layout.cells[0][cell])] * (x2 - x1);
        w += a + b;
        scale += std::abs(a) + std::abs(b);
    } else if (layout.dz0_plus >= 0) {
        const auto at = [&](int c) { return x[static_cast<std::size_t>(c)]; };
        // buy/sell at t = 0 and t = 1 with proportional cost, unwind at X2
        const double t0 = (1 + delta) * setup.spot * at(layout.dz0_plus) -
                          (1 - delta) * setup.spot * at(layout.dz0_minus);
        const double t1 = (1 + delta) * x1 * at(layout.cells_plus[0][cell]) -
                          (1 - delta) * x1 * at(layout.cells_minus[0][cell]);
        const double held = at(layout.dz0_plus) - at(layout.dz0_minus) + at(layout.cells_plus[0][cell]) -
                            at(layout.cells_minus[0][cell]);
        w += held * x2 - t0 - t1;
        scale += std::abs(held * x2) + std::abs(t0) + std::abs(t1);
    }
    return w;
}

std::vector<double> random_point(std::mt19937_64& rng, const std::vector<double>& lo, const std::vector<double>& up) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(lo.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double a = std::isfinite(lo[k]) ? lo[k] : -1e5;
        const double b = std::isfinite(up[k]) ? std::min(up[k], a + 1e4) : a + 1e4;
        x[k] = a + (b - a) * u(rng);
    }
    return x;
}

Market chain_market() {
    Market m;
    m.quotes = synthetic_chain();
    return m;
}

std::vector<std::vector<double>> coarse_strikes() {
    std::vector<double> k;
    for (double s = 2000; s <= 2600; s += 100) {
        k.push_back(s);
    }
    return {k, k};
}

// A few quotes of the synthetic chain drawn at random.
Market random_market(std::mt19937_64& rng) {
    const auto all = synthetic_chain();
    std::vector<Quote> pool;
    for (const auto& q : all) {
        if (q.strike >= 2100 && q.strike <= 2500) {
            pool.push_back(q);
        }
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    std::uniform_int_distribution<int> count(1, 5);
    Market m;
    m.quotes.assign(pool.begin(), pool.begin() + count(rng));
    return m;
}

}  // namespace

TEST_CASE("basis value examples") {
    const auto cells = basis_elements(1, std::vector<double>{2000, 2400});
    REQUIRE(cells.size() == 3);
    CHECK(cells[0].left == 0.0);
    CHECK(cells[1].left == 2000.0);
    CHECK(cells[1].right == 2400.0);
    CHECK(cells[2].right == kInf);
    CHECK(basis_value(cells[1], 1, 2200) == 1);
    CHECK(basis_value(cells[1], 2, 2200) == 0);
    CHECK(basis_value(cells[2], 1, 9999) == 1);
    CHECK(basis_value(cells[1], 1, 2400) == 0);
    CHECK(basis_value(cells[2], 1, 2400) == 1);
    // the cells partition the positive axis
    for (double x : {1.0, 1999.99, 2000.0, 2300.0, 2400.0, 1e7}) {
        int hits = 0;
        for (const auto& b : cells) {
            hits += basis_value(b, 1, x);
        }
        CHECK(hits == 1);
    }
}

TEST_CASE("strategy position is piecewise constant with left-closed cells") {
    const std::vector<double> strikes{2000, 2200, 2400};
    CHECK(strategy_position(std::vector<double>{0, 0, 0, 0}, strikes, 2300) == 0.0);
    const std::vector<double> coeffs{0, 0, 5, 0};
    CHECK(strategy_position(coeffs, strikes, 2300) == 5.0);
    CHECK(strategy_position(coeffs, strikes, 2200) == 5.0);
    CHECK(strategy_position(coeffs, strikes, std::nextafter(2200.0, 0.0)) == 0.0);
    CHECK(strategy_position(coeffs, strikes, 2400) == 0.0);
    CHECK(cell_index(strikes, 100) == 0);
    CHECK(cell_index(strikes, 2400) == 3);
}

TEST_CASE("layout of the frictionless and transaction-cost variants") {
    const auto s = two_point_setup();
    const auto fl = make_layout(s, Frictions{});
    CHECK(fl.num_variables == 6);  // cash, x+, x-, z0, two cells
    CHECK(fl.names == std::vector<std::string>{"cash", "C2300_2+", "C2300_2-", "z0", "z1_0", "z1_1"});
    Frictions tc;
    tc.transaction_costs = true;
    tc.delta_pct = 0.1;
    const auto tl = make_layout(s, tc);
    CHECK(tl.num_variables == 9);
    Frictions stat;
    stat.dynamic_trading = false;
    CHECK(make_layout(s, stat).num_variables == 3);

    std::vector<double> lo;
    std::vector<double> up;
    layout_bounds(fl, s, Frictions{}, lo, up);
    CHECK(lo[0] == -kInf);
    CHECK(up[1] == 5100.0);
    CHECK(up[2] == 4800.0);
    CHECK(lo[3] == -1e6);
    layout_bounds(tl, s, tc, lo, up);
    for (int c : {tl.dz0_plus, tl.dz0_minus, tl.cells_plus[0][1], tl.cells_minus[0][0]}) {
        CHECK(lo[static_cast<std::size_t>(c)] == 0.0);
    }
}

TEST_CASE("two-point instance matches the hand-assembled objective and gradient") {
    const auto s = two_point_setup();
    AgentSpec agent;
    const double w = 100000;
    const auto a = assemble_frictionless(s, {}, agent, w);
    const auto& p = a.program;
    const std::vector<double> x{1000, 30, 10, 2, -3, 4};  // cash, x+, x-, z0, z1_0, z1_1
    const double k = 2.0 / 100000;
    // point (2300, 2400): call pays 100 at period 2, X1 in the upper cell
    const double w1 = 1000 + 100 * (30 - 10) + 2 * (2300 - 2360) + 4 * (2400 - 2300);
    // point (2400, 2200): call pays nothing, X1 in the upper cell
    const double w2 = 1000 + 0 + 2 * (2400 - 2360) + 4 * (2200 - 2400);
    const double e1 = 0.4 * std::exp(-k * w1);
    const double e2 = 0.6 * std::exp(-k * w2);
    const auto vg = objective_and_gradient(p, x);
    CHECK(vg.value == doctest::Approx(e1 + e2).epsilon(1e-14));
    CHECK(vg.log_exp_sum == doctest::Approx(std::log(e1 + e2)).epsilon(1e-14));
    const std::vector<double> grad{-k * (e1 + e2),
                                   -k * 100 * e1,
                                   k * 100 * e1,
                                   -k * (e1 * (2300 - 2360) + e2 * (2400 - 2360)),
                                   0.0,
                                   -k * (e1 * 100 + e2 * (-200))};
    for (std::size_t j = 0; j < grad.size(); ++j) {
        CHECK(vg.gradient[j] == doctest::Approx(grad[j]).epsilon(1e-12).scale(1e-20));
    }
    // budget row: 81.8 x+ - 79.5 x- + cash - w <= 0
    REQUIRE(p.inequalities.rows() == 1);
    std::vector<double> r(1);
    kernels::evaluate_rows(p.inequalities, x, r);
    CHECK(r[0] == doctest::Approx(81.8 * 30 - 79.5 * 10 + 1000 - w));
}

TEST_CASE("payout rows agree with a direct evaluator") {
    std::mt19937_64 rng(5);
    const auto market = chain_market();
    const Liability liab{{make_knockout(2350, 2400), 2.0}, {make_asian(2350), -1.0}};
    const auto setup = build_setup(market, market.strike_sets(), liab, VGParams{}, GridOptions{});
    for (double delta : {-1.0, 0.0, 0.1, 1.0}) {
        AgentSpec agent;
        Frictions f;
        if (delta >= 0) {
            f.transaction_costs = true;
            f.delta_pct = delta;
        }
        const auto a = assemble(setup, liab, agent, 1e5, f);
        const auto& rows = a.program.exp_objective->rows;
        REQUIRE(rows.rows() == setup.grid.size());
        for (int trial = 0; trial < 3; ++trial) {
            const auto x = random_point(rng, a.program.lower, a.program.upper);
            std::vector<double> vals(rows.rows());
            kernels::evaluate_rows(rows, x, vals);
            double worst = 0.0;
            for (std::size_t i = 0; i < rows.rows(); ++i) {
                const auto path = setup.grid.point(i);
                double scale = 0.0;
                const double wealth = direct_wealth(a.layout, setup, f.delta(), x, path, scale);
                const double claim = 2.0 * 100 * claim_payout(make_knockout(2350, 2400), path) -
                                     100 * claim_payout(make_asian(2350), path);
                const double expected = claim - wealth;
                scale += std::abs(claim);
                worst = std::max(worst, std::abs(vals[i] - expected) / std::max(1.0, scale));
            }
            CHECK(worst <= 1e-12);
        }
    }
}

TEST_CASE("index purchase cost with transaction costs") {
    auto s = two_point_setup();
    s.market.quotes.clear();
    Frictions f;
    f.transaction_costs = true;
    f.delta_pct = 0.1;
    const auto layout = make_layout(s, f);
    std::vector<double> x(layout.num_variables, 0.0);
    x[static_cast<std::size_t>(layout.cells_plus[0][1])] = 1.0;
    // buy 1 unit at X1 = 2360 and unwind at X2 = X1: the cost is the fee
    const std::vector<double> path{2360, 2360};
    CHECK(terminal_wealth(layout, s, f, x, path) == doctest::Approx(2360 - 2362.36).epsilon(1e-12));
    CHECK(1.001 * 2360 == doctest::Approx(2362.36));
    CHECK_THROWS(assemble_transaction_cost(s, {}, AgentSpec{}, 1e5, -0.1));
}

TEST_CASE("transaction costs at zero reproduce the frictionless optimum") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const auto market = random_market(rng);
        PricingProblem pb;
        pb.setup = build_setup(market, coarse_strikes(), {}, VGParams{}, GridOptions{});
        const auto fl = solve_value(pb, {}, 1e5);
        pb.frictions.transaction_costs = true;
        pb.frictions.delta_pct = 0.0;
        const auto tc = solve_value(pb, {}, 1e5);
        REQUIRE(fl.ok());
        REQUIRE(tc.ok());
        CHECK(std::abs(tc.value() / fl.value() - 1.0) <= 1e-6);
    }
}

TEST_CASE("cash only program returns exp(-lambda)") {
    Market none;
    PricingProblem pb;
    pb.setup = build_setup(none, coarse_strikes(), {}, VGParams{}, GridOptions{});
    pb.frictions.dynamic_trading = false;
    const auto r = solve_value(pb, {}, 1e5);
    REQUIRE(r.ok());
    CHECK(r.log_value == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(r.solution.x[static_cast<std::size_t>(r.layout.cash)] == doctest::Approx(1e5).epsilon(1e-9));
}

TEST_CASE("simultaneous purchase and sale of a quote does not occur at the optimum") {
    const auto market = chain_market();
    PricingProblem pb;
    pb.setup = build_setup(market, market.strike_sets(), {}, VGParams{}, GridOptions{});
    const auto r = solve_value(pb, {}, 1e5);
    REQUIRE(r.ok());
    CHECK(r.log_value < -2.0);
    double worst = 0.0;
    for (const auto& c : r.layout.quotes) {
        if (c.plus >= 0) {
            worst = std::max(worst, std::min(r.solution.x[static_cast<std::size_t>(c.plus)],
                                             r.solution.x[static_cast<std::size_t>(c.minus)]));
        }
    }
    CHECK(worst <= 1e-7);
}

TEST_CASE("large transaction costs shut down dynamic trading") {
    const auto market = chain_market();
    PricingProblem pb;
    pb.setup = build_setup(market, market.strike_sets(), {}, VGParams{}, GridOptions{});
    pb.frictions.transaction_costs = true;
    pb.frictions.delta_pct = 10.0;
    const auto r = solve_value(pb, {}, 1e5);
    REQUIRE(r.ok());
    const auto rows = strategy_table(r.layout, r.solution.x);
    CHECK(std::abs(rows[0].units) <= 1e-6);  // z0
    // cells whose grid mass is negligible carry no information about the
    // optimum, so the held position is averaged over the grid masses
    const auto& g = pb.setup.grid;
    const auto& strikes = pb.setup.basis_strikes[0];
    double expected_position = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& row = rows[1 + cell_index(strikes, g.point(i)[0])];
        expected_position += g.masses[i] * std::abs(row.units);
    }
    CHECK(expected_position <= 1e-6);
}

TEST_CASE("a 5-point strike chain gives a program with thousands of variables") {
    Market m;
    SyntheticChainOptions o;
    for (int t = 1; t <= 2; ++t) {
        const double tau = o.horizons[static_cast<std::size_t>(t - 1)];
        auto add = [&](OptionKind kind, double k) {
            const double mid = black_scholes(kind, o.spot, k, smile_volatility(o, k), tau);
            m.quotes.push_back(make_quote(kind, k, t, std::max(0.0, mid - 0.5), mid + 0.5, 50, 50));
        };
        for (double k = 500; k <= 2500; k += 5) {
            add(OptionKind::call, k);
        }
        for (double k = 1555; k <= 2500; k += 5) {
            add(OptionKind::put, k);
        }
    }
    const auto strikes = m.strike_sets();
    const auto nodes = grid_nodes(strikes, {}, GridOptions{});
    const auto shape = program_shape(m, {strikes[0]}, nodes, Frictions{});
    CHECK(shape.variables > 1700);
    CHECK(shape.constraints() > 2700);
    CHECK(shape.grid_points == nodes[0].size() * nodes[1].size());
}

TEST_CASE("program shape matches the assembled program") {
    const auto market = chain_market();
    const auto setup = build_setup(market, market.strike_sets(), {}, VGParams{}, GridOptions{});
    for (bool tc : {false, true}) {
        Frictions f;
        f.transaction_costs = tc;
        const auto a = assemble(setup, {}, AgentSpec{}, 1e5, f);
        const auto shape = program_shape(market, setup.basis_strikes, setup.grid.nodes, f);
        CHECK(shape.variables == a.program.num_variables);
        CHECK(shape.grid_points == a.program.exp_objective->rows.rows());
        CHECK(shape.inequality_rows == a.program.inequalities.rows());
    }
}

TEST_CASE("program dump lists variables, bounds and rows") {
    const auto s = two_point_setup();
    const auto a = assemble_frictionless(s, {}, AgentSpec{}, 1e5);
    const auto j = nlohmann::json::parse(program_json(a));
    CHECK(j["num_variables"] == 6);
    CHECK(j["variables"][0]["name"] == "cash");
    CHECK(j["variables"][0]["lower"] == "-inf");
    CHECK(j["payout_rows"].size() == 2);
    CHECK(j["inequalities"].size() == 1);
    CHECK(j["budget"] == 1e5);
    CHECK(program_json(a) == program_json(assemble_frictionless(s, {}, AgentSpec{}, 1e5)));
}

TEST_CASE("basis strikes must be grid nodes") {
    auto s = two_point_setup();
    s.basis_strikes = {{2350}};
    CHECK_THROWS_AS(assemble_frictionless(s, {}, AgentSpec{}, 1e5), std::invalid_argument);
}
