#include "semistatic/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace semistatic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Liability with_baseline(const AgentSpec& agent, const Liability& extra) {
    Liability out = agent.baseline;
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
}

double option_count(const Claim& claim, double units) {
    const double n = units * claim.contract_size;
    if (n == 0.0) {
        throw std::invalid_argument("claim position must be nonzero");
    }
    return n;
}

// Quote and strategy variables at an interior start, cash left at zero.
std::vector<double> start_without_cash(const DecisionLayout& layout, const HedgingSetup& setup,
                                       const std::vector<double>& lower, const std::vector<double>& upper) {
    auto x = interior_point(layout, setup, lower, upper, 0.0, 0.0);
    x[static_cast<std::size_t>(layout.cash)] = 0.0;
    return x;
}

enum class HedgeSide { super, sub };

HedgeResult hedge_lp(const PricingProblem& problem, const Claim& claim, double units, HedgeSide side) {
    claim.validate();
    const auto& setup = problem.setup;
    HedgeResult out;
    out.layout = make_layout(setup, problem.frictions);
    const auto& layout = out.layout;
    const std::size_t n = layout.num_variables;
    ConvexProgram p(n);
    p.names = layout.names;
    layout_bounds(layout, setup, problem.frictions, p.lower, p.upper);
    p.linear = cost_vector(layout, setup);

    const Liability liability{{claim, units}};
    const double sign = side == HedgeSide::super ? 1.0 : -1.0;
    const auto points = tensor_points(setup.constraint_levels);
    const std::size_t T = static_cast<std::size_t>(setup.periods());
    out.constraint_points = points.size() / T;

    // payout rows: sign * claim - W <= 0
    auto x0 = start_without_cash(layout, setup, p.lower, p.upper);
    double cash = -kInf;
    std::vector<int> cols;
    std::vector<double> vals;
    for (std::size_t i = 0; i < out.constraint_points; ++i) {
        const std::span<const double> path(points.data() + i * T, T);
        wealth_coefficients(layout, setup, problem.frictions, path, cols, vals);
        const double target = sign * liability_value(liability, path);
        double w = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            w += vals[k] * x0[static_cast<std::size_t>(cols[k])];
            vals[k] = -vals[k];
        }
        cash = std::max(cash, target - w);
        p.inequalities.add_row(cols, vals, target);
        p.row_names.push_back(fmt::format("point{}", i));
    }
    p.inequalities.finalize();
    x0[static_cast<std::size_t>(layout.cash)] = cash + 1.0;
    p.start = std::move(x0);

    out.solution = solve_lp(p, problem.solver);
    const double scale = option_count(claim, units);
    switch (out.solution.status) {
        case SolveStatus::optimal:
            out.feasible = true;
            out.total = sign * out.solution.objective;
            break;
        case SolveStatus::unbounded:
            out.feasible = true;
            out.total = -sign * kInf;
            break;
        case SolveStatus::infeasible:
            out.feasible = false;
            out.total = sign * kInf;
            break;
        case SolveStatus::max_iter:
            throw std::runtime_error(fmt::format("hedging program for {} did not converge", claim.id));
    }
    out.per_option = out.total / scale;
    return out;
}

LegReport leg(const std::string& name, const Solution& s, bool active) {
    LegReport r;
    r.name = name;
    r.status = s.status;
    r.objective = s.objective;
    r.gap = s.gap;
    r.max_violation = s.max_violation;
    r.outer_iterations = s.outer_iterations;
    r.newton_steps = s.newton_steps;
    r.bounds_active = active;
    return r;
}

nlohmann::ordered_json number(double v) {
    if (std::isnan(v)) {
        return nullptr;
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

}  // namespace

HedgingSetup build_setup(const Market& tradable, const std::vector<std::vector<double>>& strike_sets,
                         const Liability& liability, const VGParams& model, const GridOptions& grid_options) {
    tradable.validate();
    model.validate();
    const int T = tradable.periods;
    if (model.periods() != T || static_cast<int>(strike_sets.size()) != T) {
        throw std::invalid_argument("market, model and strike sets disagree on the number of periods");
    }
    HedgingSetup setup;
    setup.market = tradable;
    setup.spot = model.spot;
    const auto breaks = liability_breakpoints(liability, T);
    setup.grid = build_grid(strike_sets, breaks, grid_options, model);
    for (int s = 1; s < T; ++s) {
        setup.basis_strikes.push_back(strike_sets[static_cast<std::size_t>(s - 1)]);
    }
    const bool custom = std::any_of(liability.begin(), liability.end(),
                                    [](const ClaimPosition& p) { return p.claim.is_custom() && p.units != 0.0; });
    if (custom) {
        // tables are only known on the grid itself
        setup.constraint_levels = setup.grid.nodes;
    } else {
        std::vector<std::vector<double>> kinks(static_cast<std::size_t>(T));
        std::vector<std::vector<double>> jumps(static_cast<std::size_t>(T));
        for (std::size_t t = 0; t < breaks.size(); ++t) {
            for (const auto& b : breaks[t]) {
                (b.kind == BreakKind::kink ? kinks : jumps)[t].push_back(b.level);
            }
        }
        setup.constraint_levels = constraint_levels(setup.grid, kinks, jumps, grid_options.jump_offset);
    }
    return setup;
}

Market exclude_strike(const Market& market, double strike, int period) {
    Market out = market;
    out.quotes.clear();
    for (const auto& q : market.quotes) {
        if (!(q.kind == OptionKind::call && q.strike == strike && q.maturity == period)) {
            out.quotes.push_back(q);
        }
    }
    return out;
}

double ValueResult::value() const { return std::exp(log_value); }

ValueResult solve_value(const PricingProblem& problem, const Liability& extra, double budget) {
    const auto assembled =
        assemble(problem.setup, with_baseline(problem.agent, extra), problem.agent, budget, problem.frictions);
    ValueResult out;
    out.solution = minimize(assembled.program, problem.solver);
    out.layout = assembled.layout;
    out.log_value = out.solution.objective;
    return out;
}

double optimal_value(const PricingProblem& problem, const Liability& extra, double budget) {
    const auto r = solve_value(problem, extra, budget);
    if (!r.ok()) {
        throw std::runtime_error(fmt::format("expected-loss program ended with status {}", to_string(r.solution.status)));
    }
    return r.value();
}

namespace {

IndifferencePrice closed_form(const PricingProblem& problem, const Claim& claim, double units, Side side) {
    problem.agent.validate();
    claim.validate();
    const double w = problem.agent.wealth;
    IndifferencePrice out;
    out.reference = solve_value(problem, {}, w);
    const double sign = side == Side::sell ? 1.0 : -1.0;
    out.shifted = solve_value(problem, {{claim, sign * units}}, w);
    for (const auto* r : {&out.reference, &out.shifted}) {
        if (!r->ok()) {
            throw std::runtime_error(
                fmt::format("expected-loss program ended with status {}", to_string(r->solution.status)));
        }
    }
    out.total = sign * (w / problem.agent.risk_aversion) * (out.shifted.log_value - out.reference.log_value);
    out.per_option = out.total / option_count(claim, units);
    return out;
}

}  // namespace

IndifferencePrice indifference_sell(const PricingProblem& problem, const Claim& claim, double units) {
    return closed_form(problem, claim, units, Side::sell);
}

IndifferencePrice indifference_buy(const PricingProblem& problem, const Claim& claim, double units) {
    return closed_form(problem, claim, units, Side::buy);
}

BisectionResult indifference_bisection(const PricingProblem& problem, const Claim& claim, double units, Side side,
                                       const BisectionSettings& settings) {
    problem.agent.validate();
    claim.validate();
    const double w = problem.agent.wealth;
    const double tol = settings.width_tolerance * w;
    const auto reference = solve_value(problem, {}, w);
    if (!reference.ok()) {
        throw std::runtime_error("reference expected-loss program failed");
    }
    const double sign = side == Side::sell ? 1.0 : -1.0;
    const Liability shifted{{claim, sign * units}};
    BisectionResult out;
    out.evaluations = 1;
    // h(p) decreases in p for both sides: a higher price is better for the
    // seller and worse for the buyer
    auto h = [&](double p) {
        ++out.evaluations;
        if (out.evaluations > settings.max_evaluations) {
            throw std::runtime_error("indifference search exceeded its evaluation budget");
        }
        const auto r = solve_value(problem, shifted, w + sign * p);
        if (!r.ok()) {
            throw std::runtime_error("expected-loss program failed during the price search");
        }
        return sign * (r.log_value - reference.log_value);
    };
    double a = -settings.initial_step * w;
    double b = settings.initial_step * w;
    double ha = h(a);
    double hb = h(b);
    int doublings = 0;
    while (ha < 0.0 || hb > 0.0) {
        if (++doublings > settings.max_doublings) {
            throw std::runtime_error("no price bracket found");
        }
        const double width = b - a;
        if (ha < 0.0) {
            b = a;
            hb = ha;
            a -= 2.0 * width;
            ha = h(a);
        } else {
            a = b;
            ha = hb;
            b += 2.0 * width;
            hb = h(b);
        }
    }
    // Illinois regula falsi; each secant point is paired with a probe half a
    // tolerance away so the bracket can close as soon as the root is hit
    int retained = 0;
    double fa = ha;
    double fb = hb;
    while (b - a > tol) {
        double c = fa == fb ? 0.5 * (a + b) : (a * fb - b * fa) / (fb - fa);
        c = std::clamp(c, a + 0.25 * tol, b - 0.25 * tol);
        const double hc = h(c);
        if (hc == 0.0) {
            a = b = c;
            break;
        }
        if (hc > 0.0) {
            a = c;
            fa = hc;
            if (retained == 1) {
                fb *= 0.5;
            }
            retained = 1;
            const double probe = std::min(c + 0.5 * tol, b);
            if (probe < b) {
                const double hp = h(probe);
                if (hp <= 0.0) {
                    b = probe;
                    fb = hp;
                } else {
                    a = probe;
                    fa = hp;
                }
            }
        } else {
            b = c;
            fb = hc;
            if (retained == -1) {
                fa *= 0.5;
            }
            retained = -1;
            const double probe = std::max(c - 0.5 * tol, a);
            if (probe > a) {
                const double hp = h(probe);
                if (hp >= 0.0) {
                    a = probe;
                    fa = hp;
                } else {
                    b = probe;
                    fb = hp;
                }
            }
        }
    }
    out.lower = a;
    out.upper = b;
    out.total = 0.5 * (a + b);
    out.per_option = out.total / option_count(claim, units);
    return out;
}

HedgeResult superhedge_cost(const PricingProblem& problem, const Claim& claim, double units) {
    return hedge_lp(problem, claim, units, HedgeSide::super);
}

HedgeResult subhedge_cost(const PricingProblem& problem, const Claim& claim, double units) {
    return hedge_lp(problem, claim, units, HedgeSide::sub);
}

ArbitrageResult find_arbitrage(const PricingProblem& problem, double w) {
    const auto& setup = problem.setup;
    AgentSpec agent = problem.agent;
    agent.baseline.clear();
    const auto assembled = assemble(setup, {}, agent, w, problem.frictions);
    const auto& base = assembled.program;
    const std::size_t n = base.num_variables;
    const int eps = static_cast<int>(n);

    ConvexProgram p(n + 1);
    std::copy(base.lower.begin(), base.lower.end(), p.lower.begin());
    std::copy(base.upper.begin(), base.upper.end(), p.upper.begin());
    p.lower[n] = 0.0;
    p.names = base.names;
    p.names.push_back("shortfall");
    ExpSumObjective objective = *base.exp_objective;
    objective.rows = objective.rows.with_extra_column(0.0);
    // exact penalty on the shortfall, worth far more than any plausible
    // certainty-equivalent gain per dollar
    p.linear[n] = 1e4 * objective.kappa;
    p.exp_objective = std::move(objective);

    auto x0 = base.start;
    x0.push_back(0.0);
    {
        auto c = base.inequalities.row_cols(0);
        auto v = base.inequalities.row_vals(0);
        p.inequalities.add_row(std::vector<int>(c.begin(), c.end()), std::vector<double>(v.begin(), v.end()),
                               base.inequalities.offset(0));
        p.row_names.push_back("budget");
    }
    const auto& grid = setup.grid;
    std::vector<int> cols;
    std::vector<double> vals;
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        wealth_coefficients(assembled.layout, setup, problem.frictions, grid.point(i), cols, vals);
        double wealth = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            wealth += vals[k] * x0[static_cast<std::size_t>(cols[k])];
            vals[k] = -vals[k];
        }
        worst = std::max(worst, w - wealth);
        cols.push_back(eps);
        vals.push_back(-1.0);
        p.inequalities.add_row(cols, vals, w);
        p.row_names.push_back(fmt::format("point{}", i));
    }
    p.inequalities.finalize();
    x0[n] = worst + 1.0;
    p.start = std::move(x0);

    ArbitrageResult out;
    out.layout = assembled.layout;
    out.solution = minimize(p, problem.solver);
    if (out.solution.status != SolveStatus::optimal) {
        if (out.solution.status == SolveStatus::infeasible) {
            return out;
        }
        throw std::runtime_error(
            fmt::format("arbitrage program ended with status {}", to_string(out.solution.status)));
    }
    const auto& x = out.solution.x;
    out.min_excess = kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double excess = terminal_wealth(out.layout, setup, problem.frictions, x, grid.point(i)) - w;
        out.min_excess = std::min(out.min_excess, excess);
        out.expected_excess += grid.masses[i] * excess;
    }
    for (std::size_t j = 0; j < out.layout.quotes.size(); ++j) {
        const auto& q = setup.market.quotes[j];
        const auto& qc = out.layout.quotes[j];
        if (q.crossed() && qc.plus >= 0) {
            const double pairs = std::min(x[static_cast<std::size_t>(qc.plus)], x[static_cast<std::size_t>(qc.minus)]);
            out.riskless_crossed += pairs * (q.bid_price - q.ask_price);
        }
    }
    out.found = out.min_excess >= -1e-8 * w && out.expected_excess > 1e-6 * w;
    return out;
}

bool bounds_active(const DecisionLayout& layout, const HedgingSetup& setup, const Frictions& frictions,
                   const std::vector<double>& x) {
    std::vector<double> lower;
    std::vector<double> upper;
    layout_bounds(layout, setup, frictions, lower, upper);
    auto near = [](double v, double bound) {
        return std::isfinite(bound) && bound != 0.0 && std::abs(v - bound) <= 1e-6 * std::max(1.0, std::abs(bound));
    };
    for (std::size_t k = 0; k < x.size() && k < lower.size(); ++k) {
        if (static_cast<int>(k) == layout.cash || lower[k] == upper[k]) {
            continue;
        }
        if (near(x[k], lower[k]) || near(x[k], upper[k])) {
            return true;
        }
    }
    return false;
}

PriceReport price_claim(const PricingProblem& problem, const Claim& claim, double units, bool check_arbitrage) {
    PriceReport r;
    r.claim_id = claim.id;
    r.units = units;
    r.contract_size = claim.contract_size;
    r.domain_lo = problem.setup.grid.lo;
    r.domain_hi = problem.setup.grid.hi;
    r.transaction_costs = problem.frictions.transaction_costs;
    r.delta_pct = problem.frictions.transaction_costs ? problem.frictions.delta_pct : 0.0;
    const auto& setup = problem.setup;
    const auto& fr = problem.frictions;

    const auto sell = indifference_sell(problem, claim, units);
    const auto buy = indifference_buy(problem, claim, units);
    r.seller_total = sell.total;
    r.seller = sell.per_option;
    r.buyer_total = buy.total;
    r.buyer = buy.per_option;
    auto active = [&](const ValueResult& v) { return bounds_active(v.layout, setup, fr, v.solution.x); };
    r.legs.push_back(leg("reference", sell.reference.solution, active(sell.reference)));
    r.legs.push_back(leg("sell", sell.shifted.solution, active(sell.shifted)));
    r.legs.push_back(leg("buy", buy.shifted.solution, active(buy.shifted)));

    const auto sup = superhedge_cost(problem, claim, units);
    const auto sub = subhedge_cost(problem, claim, units);
    r.superhedge_total = sup.total;
    r.superhedge = sup.per_option;
    r.superhedge_feasible = sup.feasible;
    r.subhedge_total = sub.total;
    r.subhedge = sub.per_option;
    r.subhedge_feasible = sub.feasible;
    auto hedge_active = [&](const HedgeResult& h) {
        return h.solution.ok() && bounds_active(h.layout, setup, fr, h.solution.x);
    };
    r.legs.push_back(leg("superhedge", sup.solution, hedge_active(sup)));
    r.legs.push_back(leg("subhedge", sub.solution, hedge_active(sub)));

    if (check_arbitrage) {
        const auto arb = find_arbitrage(problem, problem.agent.wealth);
        r.arbitrage_checked = true;
        r.arbitrage_detected = arb.found;
        r.legs.push_back(leg("arbitrage", arb.solution, false));
    }
    for (const auto& l : r.legs) {
        r.quantity_constraints_active = r.quantity_constraints_active || l.bounds_active;
    }
    r.ordering_tolerance = 1e-6 * problem.agent.wealth;
    const double tol = r.ordering_tolerance;
    r.ordering_holds = r.subhedge_total <= r.buyer_total + tol && r.buyer_total <= r.seller_total + tol &&
                       r.seller_total <= r.superhedge_total + tol;
    return r;
}

std::string report_json(const PriceReport& r) {
    nlohmann::ordered_json j;
    j["claim"] = r.claim_id;
    j["units"] = r.units;
    j["contract_size"] = r.contract_size;
    j["prices"] = {{"buyer", number(r.buyer)},
                   {"seller", number(r.seller)},
                   {"subhedge", number(r.subhedge)},
                   {"superhedge", number(r.superhedge)}};
    j["totals"] = {{"buyer", number(r.buyer_total)},
                   {"seller", number(r.seller_total)},
                   {"subhedge", number(r.subhedge_total)},
                   {"superhedge", number(r.superhedge_total)}};
    j["flags"] = {{"ordering_holds", r.ordering_holds},
                  {"ordering_tolerance", r.ordering_tolerance},
                  {"quantity_constraints_active", r.quantity_constraints_active},
                  {"arbitrage_checked", r.arbitrage_checked},
                  {"arbitrage_detected", r.arbitrage_detected},
                  {"superhedge_feasible", r.superhedge_feasible},
                  {"subhedge_feasible", r.subhedge_feasible},
                  {"hedge_domain_truncated", true}};
    j["domain"] = {{"lo", r.domain_lo}, {"hi", r.domain_hi}};
    j["transaction_costs"] = {{"enabled", r.transaction_costs}, {"delta_pct", r.delta_pct}};
    nlohmann::ordered_json legs = nlohmann::ordered_json::array();
    for (const auto& l : r.legs) {
        legs.push_back({{"name", l.name},
                        {"status", to_string(l.status)},
                        {"objective", number(l.objective)},
                        {"gap", number(l.gap)},
                        {"max_violation", number(l.max_violation)},
                        {"outer_iterations", l.outer_iterations},
                        {"newton_steps", l.newton_steps},
                        {"bounds_active", l.bounds_active}});
    }
    j["legs"] = legs;
    return j.dump(2) + "\n";
}

}  // namespace semistatic
