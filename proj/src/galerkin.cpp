#include "semistatic/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace semistatic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double path_at(std::span<const double> path, int t) { return path[static_cast<std::size_t>(t - 1)]; }

int add_column(DecisionLayout& layout, std::string name) {
    layout.names.push_back(std::move(name));
    return static_cast<int>(layout.num_variables++);
}

void check_basis_on_grid(const HedgingSetup& setup) {
    const auto& grid = setup.grid;
    for (int s = 1; s < setup.periods(); ++s) {
        const auto& nodes = grid.nodes[static_cast<std::size_t>(s - 1)];
        for (double k : setup.basis_strikes[static_cast<std::size_t>(s - 1)]) {
            if (k <= grid.lo || k >= grid.hi) {
                continue;
            }
            if (!std::binary_search(nodes.begin(), nodes.end(), k)) {
                throw std::invalid_argument(
                    fmt::format("basis strike {} at period {} is not a grid node", k, s));
            }
        }
    }
}

}  // namespace

double liability_value(const Liability& liability, std::span<const double> path) {
    double total = 0.0;
    for (const auto& pos : liability) {
        if (pos.units != 0.0) {
            total += pos.units * pos.claim.contract_size * claim_payout(pos.claim, path);
        }
    }
    return total;
}

std::vector<std::vector<Breakpoint>> liability_breakpoints(const Liability& liability, int periods) {
    std::vector<std::vector<Breakpoint>> out(static_cast<std::size_t>(periods));
    for (const auto& pos : liability) {
        if (pos.units == 0.0) {
            continue;
        }
        const auto b = claim_breakpoints(pos.claim, periods);
        for (std::size_t t = 0; t < b.size(); ++t) {
            out[t].insert(out[t].end(), b[t].begin(), b[t].end());
        }
    }
    for (auto& v : out) {
        std::sort(v.begin(), v.end(), [](const Breakpoint& a, const Breakpoint& b) {
            return a.level < b.level || (a.level == b.level && a.kind < b.kind);
        });
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return out;
}

void AgentSpec::validate() const {
    if (!(wealth > 0.0) || !(risk_aversion > 0.0)) {
        throw std::invalid_argument("agent needs positive wealth and risk aversion");
    }
    for (const auto& pos : baseline) {
        pos.claim.validate();
    }
}

void Frictions::validate() const {
    if (!(delta_pct >= 0.0) || !std::isfinite(delta_pct)) {
        throw std::invalid_argument("transaction cost must be nonnegative");
    }
    if (!(strategy_bound > 0.0)) {
        throw std::invalid_argument("strategy bound must be positive");
    }
}

int basis_value(const BasisElement& b, int t, double x) {
    return (t == b.s && x >= b.left && x < b.right) ? 1 : 0;
}

std::size_t cell_index(std::span<const double> strikes, double x) {
    return static_cast<std::size_t>(std::upper_bound(strikes.begin(), strikes.end(), x) - strikes.begin());
}

std::vector<BasisElement> basis_elements(int s, std::span<const double> strikes) {
    std::vector<BasisElement> out;
    for (std::size_t n = 0; n <= strikes.size(); ++n) {
        out.push_back({s, static_cast<int>(n), n == 0 ? 0.0 : strikes[n - 1],
                       n == strikes.size() ? kInf : strikes[n]});
    }
    return out;
}

double strategy_position(std::span<const double> coeffs, std::span<const double> strikes, double x) {
    if (coeffs.size() != strikes.size() + 1) {
        throw std::invalid_argument("need one coefficient per cell");
    }
    return coeffs[cell_index(strikes, x)];
}

DecisionLayout make_layout(const HedgingSetup& setup, const Frictions& frictions) {
    frictions.validate();
    const int T = setup.periods();
    if (setup.basis_strikes.size() < static_cast<std::size_t>(std::max(T - 1, 0))) {
        throw std::invalid_argument("basis strikes missing for some rebalance period");
    }
    DecisionLayout layout;
    layout.periods = T;
    layout.transaction_costs = frictions.transaction_costs;
    layout.cash = add_column(layout, "cash");
    for (const auto& q : setup.market.quotes) {
        QuoteColumns cols;
        if (q.zero_spread()) {
            cols.merged = add_column(layout, q.id);
        } else {
            cols.plus = add_column(layout, q.id + "+");
            cols.minus = add_column(layout, q.id + "-");
        }
        layout.quotes.push_back(cols);
    }
    if (!frictions.dynamic_trading) {
        return layout;
    }
    for (int s = 1; s < T; ++s) {
        layout.basis_strikes.push_back(setup.basis_strikes[static_cast<std::size_t>(s - 1)]);
    }
    if (!frictions.transaction_costs) {
        layout.z0 = add_column(layout, "z0");
        for (int s = 1; s < T; ++s) {
            std::vector<int> cols;
            for (std::size_t n = 0; n <= layout.basis_strikes[static_cast<std::size_t>(s - 1)].size(); ++n) {
                cols.push_back(add_column(layout, fmt::format("z{}_{}", s, n)));
            }
            layout.cells.push_back(std::move(cols));
        }
    } else {
        layout.dz0_plus = add_column(layout, "dz0+");
        layout.dz0_minus = add_column(layout, "dz0-");
        for (int s = 1; s < T; ++s) {
            std::vector<int> plus;
            std::vector<int> minus;
            for (std::size_t n = 0; n <= layout.basis_strikes[static_cast<std::size_t>(s - 1)].size(); ++n) {
                plus.push_back(add_column(layout, fmt::format("dz{}_{}+", s, n)));
                minus.push_back(add_column(layout, fmt::format("dz{}_{}-", s, n)));
            }
            layout.cells_plus.push_back(std::move(plus));
            layout.cells_minus.push_back(std::move(minus));
        }
    }
    return layout;
}

void wealth_coefficients(const DecisionLayout& layout, const HedgingSetup& setup, const Frictions& frictions,
                         std::span<const double> path, std::vector<int>& cols, std::vector<double>& vals) {
    cols.clear();
    vals.clear();
    const int T = layout.periods;
    cols.push_back(layout.cash);
    vals.push_back(1.0);
    for (std::size_t j = 0; j < layout.quotes.size(); ++j) {
        const double pay = quoted_payoff(setup.market.quotes[j], path).amount;
        if (pay == 0.0) {
            continue;
        }
        const auto& qc = layout.quotes[j];
        if (qc.merged >= 0) {
            cols.push_back(qc.merged);
            vals.push_back(pay);
        } else {
            cols.push_back(qc.plus);
            vals.push_back(pay);
            cols.push_back(qc.minus);
            vals.push_back(-pay);
        }
    }
    if (layout.z0 >= 0) {
        // sum_t z_t(X_t) (X_{t+1} - X_t) with X_0 the spot
        cols.push_back(layout.z0);
        vals.push_back(path_at(path, 1) - setup.spot);
        for (int s = 1; s < T; ++s) {
            const auto& strikes = layout.basis_strikes[static_cast<std::size_t>(s - 1)];
            const double xs = path_at(path, s);
            cols.push_back(layout.cells[static_cast<std::size_t>(s - 1)][cell_index(strikes, xs)]);
            vals.push_back(path_at(path, s + 1) - xs);
        }
    } else if (layout.dz0_plus >= 0) {
        // trades at t = 0..T-1 pay (1 +- delta) X_t; the position is
        // liquidated at X_T free of charge
        const double delta = frictions.delta();
        const double xT = path_at(path, T);
        cols.push_back(layout.dz0_plus);
        vals.push_back(xT - (1.0 + delta) * setup.spot);
        cols.push_back(layout.dz0_minus);
        vals.push_back((1.0 - delta) * setup.spot - xT);
        for (int s = 1; s < T; ++s) {
            const auto& strikes = layout.basis_strikes[static_cast<std::size_t>(s - 1)];
            const double xs = path_at(path, s);
            const std::size_t n = cell_index(strikes, xs);
            cols.push_back(layout.cells_plus[static_cast<std::size_t>(s - 1)][n]);
            vals.push_back(xT - (1.0 + delta) * xs);
            cols.push_back(layout.cells_minus[static_cast<std::size_t>(s - 1)][n]);
            vals.push_back((1.0 - delta) * xs - xT);
        }
    }
}

double terminal_wealth(const DecisionLayout& layout, const HedgingSetup& setup, const Frictions& frictions,
                       std::span<const double> x, std::span<const double> path) {
    std::vector<int> cols;
    std::vector<double> vals;
    wealth_coefficients(layout, setup, frictions, path, cols, vals);
    double w = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        w += vals[k] * x[static_cast<std::size_t>(cols[k])];
    }
    return w;
}

std::vector<double> cost_vector(const DecisionLayout& layout, const HedgingSetup& setup) {
    std::vector<double> c(layout.num_variables, 0.0);
    c[static_cast<std::size_t>(layout.cash)] = CashAsset::unit_price;
    for (std::size_t j = 0; j < layout.quotes.size(); ++j) {
        const auto& q = setup.market.quotes[j];
        const auto& qc = layout.quotes[j];
        if (qc.merged >= 0) {
            c[static_cast<std::size_t>(qc.merged)] = q.ask_price;
        } else {
            c[static_cast<std::size_t>(qc.plus)] = q.ask_price;
            c[static_cast<std::size_t>(qc.minus)] = -q.bid_price;
        }
    }
    return c;
}

void layout_bounds(const DecisionLayout& layout, const HedgingSetup& setup, const Frictions& frictions,
                   std::vector<double>& lower, std::vector<double>& upper) {
    lower.assign(layout.num_variables, -kInf);
    upper.assign(layout.num_variables, kInf);
    for (std::size_t j = 0; j < layout.quotes.size(); ++j) {
        const auto box = position_bounds(setup.market.quotes[j], setup.market.lot_size);
        const auto& qc = layout.quotes[j];
        if (qc.merged >= 0) {
            lower[static_cast<std::size_t>(qc.merged)] = box.lower;
            upper[static_cast<std::size_t>(qc.merged)] = box.upper;
        } else {
            lower[static_cast<std::size_t>(qc.plus)] = 0.0;
            upper[static_cast<std::size_t>(qc.plus)] = box.upper;
            lower[static_cast<std::size_t>(qc.minus)] = 0.0;
            upper[static_cast<std::size_t>(qc.minus)] = -box.lower;
        }
    }
    const double zmax = frictions.strategy_bound;
    auto boxed = [&](int col, double lo) {
        if (col >= 0) {
            lower[static_cast<std::size_t>(col)] = lo;
            upper[static_cast<std::size_t>(col)] = zmax;
        }
    };
    boxed(layout.z0, -zmax);
    for (const auto& s : layout.cells) {
        for (int c : s) {
            boxed(c, -zmax);
        }
    }
    boxed(layout.dz0_plus, 0.0);
    boxed(layout.dz0_minus, 0.0);
    for (const auto& s : layout.cells_plus) {
        for (int c : s) {
            boxed(c, 0.0);
        }
    }
    for (const auto& s : layout.cells_minus) {
        for (int c : s) {
            boxed(c, 0.0);
        }
    }
}

std::vector<double> quote_positions(const DecisionLayout& layout, std::span<const double> x) {
    std::vector<double> out;
    for (const auto& qc : layout.quotes) {
        if (qc.merged >= 0) {
            out.push_back(x[static_cast<std::size_t>(qc.merged)]);
        } else {
            out.push_back(x[static_cast<std::size_t>(qc.plus)] - x[static_cast<std::size_t>(qc.minus)]);
        }
    }
    return out;
}

std::vector<StrategyRow> strategy_table(const DecisionLayout& layout, std::span<const double> x) {
    std::vector<StrategyRow> rows;
    auto at = [&](int c) { return x[static_cast<std::size_t>(c)]; };
    if (layout.z0 >= 0) {
        rows.push_back({0, 0.0, kInf, at(layout.z0)});
        for (std::size_t s = 0; s < layout.cells.size(); ++s) {
            const auto cells = basis_elements(static_cast<int>(s) + 1, layout.basis_strikes[s]);
            for (std::size_t n = 0; n < cells.size(); ++n) {
                rows.push_back({cells[n].s, cells[n].left, cells[n].right, at(layout.cells[s][n])});
            }
        }
    } else if (layout.dz0_plus >= 0) {
        const double z0 = at(layout.dz0_plus) - at(layout.dz0_minus);
        rows.push_back({0, 0.0, kInf, z0});
        for (std::size_t s = 0; s < layout.cells_plus.size(); ++s) {
            const auto cells = basis_elements(static_cast<int>(s) + 1, layout.basis_strikes[s]);
            for (std::size_t n = 0; n < cells.size(); ++n) {
                const double trade = at(layout.cells_plus[s][n]) - at(layout.cells_minus[s][n]);
                // with more than one rebalance date the held position depends
                // on the earlier cells, so only the trade is well defined
                const double held = s == 0 ? z0 + trade : std::numeric_limits<double>::quiet_NaN();
                rows.push_back({cells[n].s, cells[n].left, cells[n].right, held});
            }
        }
    }
    return rows;
}

std::vector<double> interior_point(const DecisionLayout& layout, const HedgingSetup& setup,
                                   const std::vector<double>& lower, const std::vector<double>& upper, double budget,
                                   double margin) {
    std::vector<double> x(layout.num_variables, 0.0);
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (static_cast<int>(k) == layout.cash) {
            continue;
        }
        const double lo = lower[k];
        const double up = upper[k];
        if (lo == up) {
            x[k] = lo;
        } else if (lo >= 0.0) {
            x[k] = lo + std::min(1.0, 0.5 * (up - lo));
        } else if (up <= 0.0) {
            x[k] = up - std::min(1.0, 0.5 * (up - lo));
        }
    }
    const auto c = cost_vector(layout, setup);
    double cost = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (static_cast<int>(k) != layout.cash) {
            cost += c[k] * x[k];
        }
    }
    x[static_cast<std::size_t>(layout.cash)] = budget - cost - margin;
    return x;
}

namespace {

AssembledProgram assemble_impl(const HedgingSetup& setup, const Liability& liability, const AgentSpec& agent,
                               double budget, const Frictions& frictions) {
    agent.validate();
    setup.market.validate();
    if (frictions.dynamic_trading) {
        check_basis_on_grid(setup);
    }
    AssembledProgram out;
    out.frictions = frictions;
    out.budget = budget;
    out.layout = make_layout(setup, frictions);
    const auto& layout = out.layout;
    const std::size_t n = layout.num_variables;

    ConvexProgram p(n);
    p.names = layout.names;
    layout_bounds(layout, setup, frictions, p.lower, p.upper);

    const auto& grid = setup.grid;
    ExpSumObjective objective;
    objective.kappa = agent.kappa();
    objective.masses = grid.masses;
    objective.rows = kernels::SparseRows(n);
    std::vector<int> cols;
    std::vector<double> vals;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto path = grid.point(i);
        wealth_coefficients(layout, setup, frictions, path, cols, vals);
        for (double& v : vals) {
            v = -v;
        }
        objective.rows.add_row(cols, vals, liability_value(liability, path));
    }
    objective.rows.finalize();
    p.exp_objective = std::move(objective);

    // budget: static cost + cash <= w
    const auto c = cost_vector(layout, setup);
    cols.clear();
    vals.clear();
    for (std::size_t k = 0; k < n; ++k) {
        if (c[k] != 0.0) {
            cols.push_back(static_cast<int>(k));
            vals.push_back(c[k]);
        }
    }
    p.inequalities.add_row(cols, vals, -budget);
    p.inequalities.finalize();
    p.row_names = {"budget"};
    out.budget_row = 0;
    p.start = interior_point(layout, setup, p.lower, p.upper, budget, std::max(1.0, 1e-6 * std::abs(budget)));
    out.program = std::move(p);
    return out;
}

}  // namespace

AssembledProgram assemble_frictionless(const HedgingSetup& setup, const Liability& liability,
                                       const AgentSpec& agent, double budget, bool dynamic_trading) {
    Frictions f;
    f.dynamic_trading = dynamic_trading;
    return assemble_impl(setup, liability, agent, budget, f);
}

AssembledProgram assemble_transaction_cost(const HedgingSetup& setup, const Liability& liability,
                                           const AgentSpec& agent, double budget, double delta_pct) {
    if (!(delta_pct >= 0.0)) {
        throw std::invalid_argument("transaction cost must be nonnegative");
    }
    Frictions f;
    f.transaction_costs = true;
    f.delta_pct = delta_pct;
    return assemble_impl(setup, liability, agent, budget, f);
}

AssembledProgram assemble(const HedgingSetup& setup, const Liability& liability, const AgentSpec& agent,
                          double budget, const Frictions& frictions) {
    return assemble_impl(setup, liability, agent, budget, frictions);
}

ProgramShape program_shape(const Market& market, const std::vector<std::vector<double>>& basis_strikes,
                           const std::vector<std::vector<double>>& grid_nodes, const Frictions& frictions) {
    ProgramShape shape;
    shape.grid_points = grid_size(grid_nodes);
    shape.variables = 1;  // cash
    for (const auto& q : market.quotes) {
        const std::size_t cols = q.zero_spread() ? 1 : 2;
        shape.variables += cols;
        const bool fixed = q.bid_qty == 0.0 && q.ask_qty == 0.0;
        if (!fixed) {
            shape.bound_constraints += 2 * cols;
        }
    }
    if (frictions.dynamic_trading) {
        const std::size_t per = frictions.transaction_costs ? 2 : 1;
        std::size_t cells = 1;
        for (int s = 1; s < market.periods; ++s) {
            cells += basis_strikes[static_cast<std::size_t>(s - 1)].size() + 1;
        }
        shape.variables += per * cells;
        shape.bound_constraints += 2 * per * cells;
    }
    shape.inequality_rows = 1;
    return shape;
}

std::string program_json(const AssembledProgram& assembled) {
    const auto& p = assembled.program;
    nlohmann::ordered_json j;
    j["num_variables"] = p.num_variables;
    auto bound = [](double v) -> nlohmann::ordered_json {
        if (std::isinf(v)) {
            return v > 0 ? "inf" : "-inf";
        }
        return v;
    };
    nlohmann::ordered_json vars = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < p.num_variables; ++k) {
        vars.push_back({{"name", p.names[k]}, {"lower", bound(p.lower[k])}, {"upper", bound(p.upper[k])},
                        {"cost", p.linear[k]}});
    }
    j["variables"] = vars;
    auto dump_rows = [](const kernels::SparseRows& rows) {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < rows.rows(); ++i) {
            auto c = rows.row_cols(i);
            auto v = rows.row_vals(i);
            out.push_back({{"cols", std::vector<int>(c.begin(), c.end())},
                           {"vals", std::vector<double>(v.begin(), v.end())},
                           {"offset", rows.offset(i)}});
        }
        return out;
    };
    if (p.exp_objective) {
        j["kappa"] = p.exp_objective->kappa;
        j["masses"] = p.exp_objective->masses;
        j["payout_rows"] = dump_rows(p.exp_objective->rows);
    }
    j["inequalities"] = dump_rows(p.inequalities);
    j["budget"] = assembled.budget;
    return j.dump(1);
}

}  // namespace semistatic
