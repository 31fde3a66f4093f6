#include "semistatic/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "semistatic/quotes_csv.hpp"
#include "semistatic/vg.hpp"

namespace semistatic {

namespace {

using ojson = nlohmann::ordered_json;

ojson number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

class Artifacts {
public:
    Artifacts(std::string dir, CommandResult& result) : dir_(std::move(dir)), result_(result) {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& text) {
        const auto path = std::filesystem::path(dir_) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error(fmt::format("cannot write {}", path.string()));
        }
        out << text;
        result_.files.push_back(name);
    }

private:
    std::string dir_;
    CommandResult& result_;
};

std::string csv_row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k > 0) {
            line += ',';
        }
        line += cells[k];
    }
    line += '\n';
    return line;
}

std::vector<std::string> path_header(int periods) {
    std::vector<std::string> h;
    for (int t = 1; t <= periods; ++t) {
        h.push_back(fmt::format("X{}", t));
    }
    return h;
}

void append_path(std::vector<std::string>& row, std::span<const double> path) {
    for (double v : path) {
        row.push_back(format_number(v));
    }
}

const char* kind_name(OptionKind k) { return k == OptionKind::call ? "call" : "put"; }

// One row per quote plus cash; cost is what the position pays at t = 0.
std::string portfolio_csv(const DecisionLayout& layout, const HedgingSetup& setup, std::span<const double> x) {
    std::string text = csv_row({"id", "kind", "strike", "maturity", "position", "cost"});
    const auto positions = quote_positions(layout, x);
    const auto& quotes = setup.market.quotes;
    for (std::size_t j = 0; j < quotes.size(); ++j) {
        const auto& q = quotes[j];
        const auto& qc = layout.quotes[j];
        double cost = 0.0;
        if (qc.merged >= 0) {
            cost = acquisition_cost(q, x[static_cast<std::size_t>(qc.merged)]);
        } else {
            cost = q.ask_price * x[static_cast<std::size_t>(qc.plus)] - q.bid_price * x[static_cast<std::size_t>(qc.minus)];
        }
        text += csv_row({q.id, kind_name(q.kind), format_number(q.strike), std::to_string(q.maturity),
                         format_number(positions[j]), format_number(cost)});
    }
    const double cash = x[static_cast<std::size_t>(layout.cash)];
    text += csv_row({"cash", "cash", "", "", format_number(cash), format_number(cash)});
    return text;
}

std::string strategy_csv(const DecisionLayout& layout, std::span<const double> x) {
    std::string text = csv_row({"period", "left", "right", "units"});
    for (const auto& r : strategy_table(layout, x)) {
        text += csv_row({std::to_string(r.period), format_number(r.left), format_number(r.right),
                         format_number(r.units)});
    }
    return text;
}

ojson solve_json(const Solution& s) {
    return {{"status", to_string(s.status)},         {"objective", number(s.objective)},
            {"gap", number(s.gap)},                  {"max_violation", number(s.max_violation)},
            {"outer_iterations", s.outer_iterations}, {"newton_steps", s.newton_steps}};
}

Liability total_liability(const Workspace& ws) {
    Liability out = ws.baseline;
    out.insert(out.end(), ws.claim.begin(), ws.claim.end());
    return out;
}

const ClaimPosition& require_claim(const Workspace& ws, const std::string& command) {
    if (!ws.has_claim()) {
        throw std::invalid_argument(fmt::format("{} needs a claim in the configuration", command));
    }
    return ws.claim.front();
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

void run_optimize(const Workspace& ws, const CommandOptions& options, Artifacts& out, CommandResult& result) {
    const auto problem = make_problem(ws);
    const double w = ws.config.agent.wealth;
    const auto v = solve_value(problem, ws.claim, w);
    const auto& setup = problem.setup;
    const auto& fr = problem.frictions;

    ojson j;
    j["command"] = "optimize";
    j["log_objective"] = number(v.log_value);
    j["objective"] = number(v.value());
    j["certainty_equivalent_loss"] = number(v.log_value * w / ws.config.agent.risk_aversion);
    j["solve"] = solve_json(v.solution);
    j["variables"] = v.layout.num_variables;
    j["grid_points"] = setup.grid.size();
    j["raw_mass"] = number(setup.grid.raw_mass);
    j["quotes"] = setup.market.quotes.size();
    j["bounds_active"] = v.ok() && bounds_active(v.layout, setup, fr, v.solution.x);
    if (!v.ok()) {
        result.exit_code = kExitFlagged;
    }
    result.summary = dump(j);
    out.write("optimize.json", result.summary);
    if (v.ok()) {
        const auto& x = v.solution.x;
        out.write("portfolio.csv", portfolio_csv(v.layout, setup, x));
        out.write("strategy.csv", strategy_csv(v.layout, x));
        const auto liability = total_liability(ws);
        auto header = path_header(setup.periods());
        header.insert(header.end(), {"payout", "liability", "value"});
        std::string text = csv_row(header);
        for (std::size_t i = 0; i < setup.grid.size(); ++i) {
            const auto p = setup.grid.point(i);
            const double wealth = terminal_wealth(v.layout, setup, fr, x, p);
            const double owed = liability_value(liability, p);
            std::vector<std::string> row;
            append_path(row, p);
            row.insert(row.end(), {format_number(wealth), format_number(owed), format_number(wealth - owed)});
            text += csv_row(row);
        }
        out.write("surface.csv", text);
    }
    if (options.dump_program) {
        AgentSpec agent = problem.agent;
        const auto assembled = assemble(setup, total_liability(ws), agent, w, fr);
        out.write("program.json", program_json(assembled));
    }
}

void run_price(const Workspace& ws, Artifacts& out, CommandResult& result) {
    const auto& c = require_claim(ws, "price");
    const auto problem = make_problem(ws);
    const auto report = price_claim(problem, c.claim, c.units);
    result.summary = report_json(report);
    out.write("price.json", result.summary);
}

void run_hedge(const Workspace& ws, Artifacts& out, CommandResult& result) {
    const auto& c = require_claim(ws, "hedge");
    const auto problem = make_problem(ws);
    const auto sell = indifference_sell(problem, c.claim, c.units);
    const auto& ref = sell.reference;
    const auto& with = sell.shifted;
    const auto& setup = problem.setup;
    const auto& fr = problem.frictions;

    ojson j;
    j["command"] = "hedge";
    j["claim"] = c.claim.id;
    j["units"] = c.units;
    j["seller_total"] = number(sell.total);
    j["seller_per_option"] = number(sell.per_option);
    j["reference"] = solve_json(ref.solution);
    j["with_claim"] = solve_json(with.solution);
    const bool ok = ref.ok() && with.ok();
    if (!ok) {
        result.exit_code = kExitFlagged;
        result.summary = dump(j);
        out.write("hedge.json", result.summary);
        return;
    }
    const auto& xr = ref.solution.x;
    const auto& xc = with.solution.x;

    // x - xbar per quote
    const auto pr = quote_positions(ref.layout, xr);
    const auto pc = quote_positions(with.layout, xc);
    std::string port = csv_row({"id", "kind", "strike", "maturity", "reference", "with_claim", "difference"});
    for (std::size_t k = 0; k < setup.market.quotes.size(); ++k) {
        const auto& q = setup.market.quotes[k];
        port += csv_row({q.id, kind_name(q.kind), format_number(q.strike), std::to_string(q.maturity),
                         format_number(pr[k]), format_number(pc[k]), format_number(pc[k] - pr[k])});
    }
    const double cr = xr[static_cast<std::size_t>(ref.layout.cash)];
    const double cc = xc[static_cast<std::size_t>(with.layout.cash)];
    port += csv_row({"cash", "cash", "", "", format_number(cr), format_number(cc), format_number(cc - cr)});
    out.write("hedge_portfolio.csv", port);

    // z - zbar per cell
    const auto sr = strategy_table(ref.layout, xr);
    const auto sc = strategy_table(with.layout, xc);
    std::string strat = csv_row({"period", "left", "right", "reference", "with_claim", "difference"});
    for (std::size_t k = 0; k < sr.size() && k < sc.size(); ++k) {
        strat += csv_row({std::to_string(sr[k].period), format_number(sr[k].left), format_number(sr[k].right),
                          format_number(sr[k].units), format_number(sc[k].units),
                          format_number(sc[k].units - sr[k].units)});
    }
    out.write("hedge_strategy.csv", strat);

    // hedge error: difference portfolio plus the premium, minus the claim
    const Liability claim_only{c};
    auto header = path_header(setup.periods());
    header.insert(header.end(), {"hedge_payout", "claim", "error"});
    std::string surf = csv_row(header);
    double worst = 0.0;
    double expected = 0.0;
    for (std::size_t i = 0; i < setup.grid.size(); ++i) {
        const auto p = setup.grid.point(i);
        const double h = terminal_wealth(with.layout, setup, fr, xc, p) - terminal_wealth(ref.layout, setup, fr, xr, p);
        const double owed = liability_value(claim_only, p);
        const double err = h + sell.total - owed;
        worst = std::min(worst, err);
        expected += setup.grid.masses[i] * err;
        std::vector<std::string> row;
        append_path(row, p);
        row.insert(row.end(), {format_number(h), format_number(owed), format_number(err)});
        surf += csv_row(row);
    }
    out.write("hedge_surface.csv", surf);
    j["expected_error"] = number(expected);
    j["worst_error"] = number(worst);
    result.summary = dump(j);
    out.write("hedge.json", result.summary);
}

void run_bound(const Workspace& ws, bool super, Artifacts& out, CommandResult& result) {
    const std::string name = super ? "superhedge" : "subhedge";
    const auto& c = require_claim(ws, name);
    const auto problem = make_problem(ws);
    const auto h = super ? superhedge_cost(problem, c.claim, c.units) : subhedge_cost(problem, c.claim, c.units);
    ojson j;
    j["command"] = name;
    j["claim"] = c.claim.id;
    j["units"] = c.units;
    j["feasible"] = h.feasible;
    j["total"] = number(h.total);
    j["per_option"] = number(h.per_option);
    j["constraint_points"] = h.constraint_points;
    j["solve"] = solve_json(h.solution);
    j["bounds_active"] = h.solution.ok() && bounds_active(h.layout, problem.setup, problem.frictions, h.solution.x);
    if (!h.feasible) {
        result.exit_code = kExitFlagged;
    }
    result.summary = dump(j);
    out.write(name + ".json", result.summary);
    if (h.solution.ok()) {
        out.write(name + "_portfolio.csv", portfolio_csv(h.layout, problem.setup, h.solution.x));
        out.write(name + "_strategy.csv", strategy_csv(h.layout, h.solution.x));
    }
}

void run_arbitrage(const Workspace& ws, const CommandOptions& options, Artifacts& out, CommandResult& result) {
    const auto problem = make_problem(ws);
    const double w = ws.config.agent.wealth;
    const auto a = find_arbitrage(problem, w);
    ojson j;
    j["command"] = "arbitrage";
    j["found"] = a.found;
    j["expected_excess"] = number(a.expected_excess);
    j["min_excess"] = number(a.min_excess);
    j["riskless_crossed"] = number(a.riskless_crossed);
    j["solve"] = solve_json(a.solution);
    if (a.found && !options.expect_arbitrage) {
        result.exit_code = kExitFlagged;
    }
    result.summary = dump(j);
    out.write("arbitrage.json", result.summary);
    if (a.found) {
        out.write("arbitrage_portfolio.csv", portfolio_csv(a.layout, problem.setup, a.solution.x));
        out.write("arbitrage_strategy.csv", strategy_csv(a.layout, a.solution.x));
    }
}

void run_simulate(const Workspace& ws, Artifacts& out, CommandResult& result) {
    const auto problem = make_problem(ws);
    const double w = ws.config.agent.wealth;
    const auto v = solve_value(problem, ws.claim, w);
    ojson j;
    j["command"] = "simulate";
    j["solve"] = solve_json(v.solution);
    if (!v.ok()) {
        result.exit_code = kExitFlagged;
        result.summary = dump(j);
        out.write("simulate.json", result.summary);
        return;
    }
    const auto& cfg = ws.config;
    const auto paths = simulate_paths(cfg.model, cfg.paths, cfg.seed);
    const auto T = static_cast<std::size_t>(cfg.model.periods());
    const auto liability = total_liability(ws);
    const double kappa = problem.agent.kappa();
    auto header = path_header(static_cast<int>(T));
    header.insert(header.begin(), "path");
    header.insert(header.end(), {"wealth", "liability", "net"});
    std::string text = csv_row(header);
    double sum = 0.0;
    double sum_sq = 0.0;
    double worst = std::numeric_limits<double>::infinity();
    double loss = 0.0;
    std::size_t outside = 0;
    for (std::size_t k = 0; k < cfg.paths; ++k) {
        const std::span<const double> p(paths.data() + k * T, T);
        const double wealth = terminal_wealth(v.layout, problem.setup, problem.frictions, v.solution.x, p);
        const double owed = liability_value(liability, p);
        const double net = wealth - owed;
        sum += net;
        sum_sq += net * net;
        worst = std::min(worst, net);
        loss += std::exp(-kappa * net);
        if (std::any_of(p.begin(), p.end(), [&](double s) { return s < cfg.grid.lo || s > cfg.grid.hi; })) {
            ++outside;
        }
        std::vector<std::string> row{std::to_string(k)};
        append_path(row, p);
        row.insert(row.end(), {format_number(wealth), format_number(owed), format_number(net)});
        text += csv_row(row);
    }
    const double n = static_cast<double>(cfg.paths);
    const double mean = sum / n;
    j["paths"] = cfg.paths;
    j["seed"] = cfg.seed;
    j["in_sample_log_objective"] = number(v.log_value);
    j["out_of_sample_log_objective"] = number(std::log(loss / n));
    j["mean_net"] = number(mean);
    j["std_net"] = number(std::sqrt(std::max(0.0, sum_sq / n - mean * mean)));
    j["worst_net"] = number(worst);
    j["paths_outside_domain"] = outside;
    result.summary = dump(j);
    out.write("simulate.json", result.summary);
    out.write("simulate.csv", text);
}

void run_grid(const Workspace& ws, Artifacts& out, CommandResult& result) {
    const auto problem = make_problem(ws);
    const auto& g = problem.setup.grid;
    auto header = path_header(g.periods());
    header.insert(header.end(), {"weight", "density", "mass"});
    std::string text = csv_row(header);
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::vector<std::string> row;
        append_path(row, g.point(i));
        row.insert(row.end(), {format_number(g.weights[i]), format_number(g.density[i]), format_number(g.masses[i])});
        text += csv_row(row);
    }
    ojson j;
    j["command"] = "grid";
    j["points"] = g.size();
    j["raw_mass"] = number(g.raw_mass);
    j["domain"] = {{"lo", g.lo}, {"hi", g.hi}};
    ojson nodes = ojson::array();
    for (const auto& per : g.nodes) {
        nodes.push_back(per.size());
    }
    j["nodes_per_period"] = nodes;
    result.summary = dump(j);
    out.write("grid.json", result.summary);
    out.write("grid.csv", text);
}

}  // namespace

Workspace load_workspace(const RunConfig& config) {
    config.validate();
    Workspace ws;
    ws.config = config;
    ws.market.periods = config.model.periods();
    ws.market.lot_size = config.lot_size;
    if (!config.quotes.empty()) {
        ws.market.quotes = ingest_quotes(config.quotes, config.maturities);
    }
    ws.market.validate();
    ws.strike_sets = config.grid_strikes.empty() ? ws.market.strike_sets() : config.grid_strikes;
    // periods without quotes borrow the strikes of the other periods, or an
    // even ladder over the truncation box when nothing is quoted at all
    std::vector<double> pooled;
    for (const auto& set : ws.strike_sets) {
        pooled.insert(pooled.end(), set.begin(), set.end());
    }
    std::sort(pooled.begin(), pooled.end());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());
    if (pooled.empty()) {
        constexpr int kCells = 40;
        for (int k = 1; k < kCells; ++k) {
            pooled.push_back(config.grid.lo + (config.grid.hi - config.grid.lo) * k / kCells);
        }
    }
    for (auto& set : ws.strike_sets) {
        if (set.empty()) {
            set = pooled;
        }
    }
    for (const auto& b : config.baseline) {
        if (!b.empty()) {
            ws.baseline.push_back({make_claim(b), b.units});
        }
    }
    if (!config.claim.empty()) {
        ws.claim.push_back({make_claim(config.claim), config.claim.units});
    }
    return ws;
}

PricingProblem make_problem(const Workspace& ws) {
    const auto& cfg = ws.config;
    Market tradable = ws.market;
    if (cfg.exclude_claim_strike && ws.has_claim()) {
        tradable = exclude_strike(tradable, ws.claim.front().claim.strike(), tradable.periods);
    }
    Liability all = ws.baseline;
    all.insert(all.end(), ws.claim.begin(), ws.claim.end());
    PricingProblem p;
    p.setup = build_setup(tradable, ws.strike_sets, all, cfg.model, cfg.grid);
    p.agent = cfg.agent;
    p.agent.baseline = ws.baseline;
    p.frictions = cfg.frictions();
    p.solver = cfg.solver;
    return p;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"optimize", "price",     "hedge",    "superhedge",
                                                "subhedge", "arbitrage", "simulate", "grid"};
    return names;
}

CommandResult run_command(const std::string& name, const Workspace& ws, const CommandOptions& options) {
    CommandResult result;
    Artifacts out(options.out_dir, result);
    if (name == "optimize") {
        run_optimize(ws, options, out, result);
    } else if (name == "price") {
        run_price(ws, out, result);
    } else if (name == "hedge") {
        run_hedge(ws, out, result);
    } else if (name == "superhedge" || name == "subhedge") {
        run_bound(ws, name == "superhedge", out, result);
    } else if (name == "arbitrage") {
        run_arbitrage(ws, options, out, result);
    } else if (name == "simulate") {
        run_simulate(ws, out, result);
    } else if (name == "grid") {
        run_grid(ws, out, result);
    } else {
        throw std::invalid_argument(fmt::format("unknown command '{}'", name));
    }
    return result;
}

std::string error_json(const std::string& message) {
    ojson j;
    j["error"] = message;
    j["exit_code"] = kExitError;
    return j.dump() + "\n";
}

}  // namespace semistatic
