#include "semistatic/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace semistatic {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::invalid_argument(fmt::format("config {}: {}", where, what));
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
        fail(where, "must be an object");
    }
    for (const auto& item : j.items()) {
        if (!allowed.contains(item.key())) {
            fail(where, fmt::format("unknown key '{}'", item.key()));
        }
    }
}

void read(const json& j, const std::string& where, const char* key, double& out) {
    if (!j.contains(key)) {
        return;
    }
    if (!j.at(key).is_number()) {
        fail(where + "." + key, "must be a number");
    }
    out = j.at(key).get<double>();
}

void read(const json& j, const std::string& where, const char* key, int& out) {
    if (!j.contains(key)) {
        return;
    }
    if (!j.at(key).is_number_integer()) {
        fail(where + "." + key, "must be an integer");
    }
    out = j.at(key).get<int>();
}

void read(const json& j, const std::string& where, const char* key, std::size_t& out) {
    if (!j.contains(key)) {
        return;
    }
    if (!j.at(key).is_number_unsigned()) {
        fail(where + "." + key, "must be a nonnegative integer");
    }
    out = j.at(key).get<std::size_t>();
}

void read(const json& j, const std::string& where, const char* key, bool& out) {
    if (!j.contains(key)) {
        return;
    }
    if (!j.at(key).is_boolean()) {
        fail(where + "." + key, "must be true or false");
    }
    out = j.at(key).get<bool>();
}

void read(const json& j, const std::string& where, const char* key, std::string& out) {
    if (!j.contains(key)) {
        return;
    }
    if (!j.at(key).is_string()) {
        fail(where + "." + key, "must be a string");
    }
    out = j.at(key).get<std::string>();
}

void read(const json& j, const std::string& where, const char* key, std::vector<double>& out) {
    if (!j.contains(key)) {
        return;
    }
    const auto& a = j.at(key);
    if (!a.is_array()) {
        fail(where + "." + key, "must be an array of numbers");
    }
    out.clear();
    for (const auto& v : a) {
        if (!v.is_number()) {
            fail(where + "." + key, "must be an array of numbers");
        }
        out.push_back(v.get<double>());
    }
}

void read(const json& j, const std::string& where, const char* key, std::vector<std::string>& out) {
    if (!j.contains(key)) {
        return;
    }
    const auto& a = j.at(key);
    if (!a.is_array()) {
        fail(where + "." + key, "must be an array of strings");
    }
    out.clear();
    for (const auto& v : a) {
        if (!v.is_string()) {
            fail(where + "." + key, "must be an array of strings");
        }
        out.push_back(v.get<std::string>());
    }
}

std::string resolve(const std::string& path, const std::string& base_dir) {
    if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) {
        return path;
    }
    return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

ClaimSpec read_claim(const json& j, const std::string& where, const std::string& base_dir) {
    check_keys(j, where, {"type", "id", "strike", "barrier", "level", "units", "contract_size", "table"});
    ClaimSpec c;
    read(j, where, "type", c.type);
    read(j, where, "id", c.id);
    read(j, where, "strike", c.strike);
    read(j, where, "barrier", c.barrier);
    read(j, where, "level", c.level);
    read(j, where, "units", c.units);
    read(j, where, "contract_size", c.contract_size);
    read(j, where, "table", c.table);
    c.table = resolve(c.table, base_dir);
    static const std::set<std::string> types{"none", "vanilla", "knockout", "asian", "lookback", "digital", "custom"};
    if (!types.contains(c.type)) {
        fail(where + ".type", fmt::format("unknown claim type '{}'", c.type));
    }
    return c;
}

nlohmann::ordered_json claim_json(const ClaimSpec& c) {
    nlohmann::ordered_json j;
    j["type"] = c.type;
    j["id"] = c.id;
    j["strike"] = c.strike;
    j["barrier"] = c.barrier;
    j["level"] = c.level;
    j["units"] = c.units;
    j["contract_size"] = c.contract_size;
    j["table"] = c.table;
    return j;
}

}  // namespace

Claim make_claim(const ClaimSpec& spec) {
    Claim c;
    if (spec.type == "vanilla") {
        c = make_vanilla(spec.strike);
    } else if (spec.type == "knockout") {
        c = make_knockout(spec.strike, spec.barrier);
    } else if (spec.type == "asian") {
        c = make_asian(spec.strike);
    } else if (spec.type == "lookback") {
        c = make_lookback(spec.strike);
    } else if (spec.type == "digital") {
        c = make_digital(spec.strike, spec.level);
    } else if (spec.type == "custom") {
        c = load_custom_claim(spec.table, spec.id.empty() ? "custom" : spec.id);
    } else {
        throw std::invalid_argument(fmt::format("cannot build a claim of type '{}'", spec.type));
    }
    if (!spec.id.empty()) {
        c.id = spec.id;
    }
    c.contract_size = spec.contract_size;
    c.validate();
    return c;
}

void RunConfig::validate() const {
    AgentSpec a = agent;
    a.baseline.clear();
    a.validate();
    model.validate();
    if (!(lot_size > 0.0)) {
        throw std::invalid_argument("config market.lot_size must be positive");
    }
    if (!(delta_pct >= 0.0)) {
        throw std::invalid_argument("config market.delta_pct must be nonnegative");
    }
    if (maturities.size() != model.horizons.size()) {
        throw std::invalid_argument("config needs one model horizon per maturity date");
    }
    if (!grid_strikes.empty() && grid_strikes.size() != maturities.size()) {
        throw std::invalid_argument("config grid.strikes needs one list per maturity");
    }
    if (!(grid.lo > 0.0) || !(grid.hi > grid.lo)) {
        throw std::invalid_argument("config market.truncation must satisfy 0 < lo < hi");
    }
    if (!(grid.tail_growth >= 1.0) || grid.tail_uniform_nodes < 0) {
        throw std::invalid_argument("config grid tail settings are invalid");
    }
    solver.validate();
    frictions().validate();
    if (paths == 0) {
        throw std::invalid_argument("config simulation.paths must be positive");
    }
}

Frictions RunConfig::frictions() const {
    Frictions f;
    f.transaction_costs = !frictionless;
    f.delta_pct = delta_pct;
    f.dynamic_trading = dynamic_trading;
    f.strategy_bound = strategy_bound;
    return f;
}

RunConfig parse_config(const std::string& json_text, const std::string& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(fmt::format("config is not valid JSON: {}", e.what()));
    }
    check_keys(root, "root", {"agent", "model", "market", "grid", "solver", "claim", "baseline", "flags", "simulation"});
    RunConfig c;
    if (root.contains("agent")) {
        const auto& j = root["agent"];
        check_keys(j, "agent", {"wealth", "risk_aversion"});
        read(j, "agent", "wealth", c.agent.wealth);
        read(j, "agent", "risk_aversion", c.agent.risk_aversion);
    }
    if (root.contains("model")) {
        const auto& j = root["model"];
        check_keys(j, "model", {"theta", "sigma", "nu", "spot", "horizons"});
        read(j, "model", "theta", c.model.theta);
        read(j, "model", "sigma", c.model.sigma);
        read(j, "model", "nu", c.model.nu);
        read(j, "model", "spot", c.model.spot);
        read(j, "model", "horizons", c.model.horizons);
    }
    if (root.contains("market")) {
        const auto& j = root["market"];
        check_keys(j, "market", {"quotes", "maturities", "lot_size", "delta_pct", "truncation"});
        read(j, "market", "quotes", c.quotes);
        c.quotes = resolve(c.quotes, base_dir);
        read(j, "market", "maturities", c.maturities);
        read(j, "market", "lot_size", c.lot_size);
        read(j, "market", "delta_pct", c.delta_pct);
        // a stated cost switches index costs on unless the flags say otherwise
        c.frictionless = !j.contains("delta_pct");
        std::vector<double> box{c.grid.lo, c.grid.hi};
        read(j, "market", "truncation", box);
        if (box.size() != 2) {
            fail("market.truncation", "must be [lo, hi]");
        }
        c.grid.lo = box[0];
        c.grid.hi = box[1];
    }
    if (root.contains("grid")) {
        const auto& j = root["grid"];
        check_keys(j, "grid", {"tail_nodes", "tail_uniform_nodes", "tail_growth", "jump_offset", "strikes"});
        read(j, "grid", "tail_nodes", c.grid.tail_nodes);
        read(j, "grid", "tail_uniform_nodes", c.grid.tail_uniform_nodes);
        read(j, "grid", "tail_growth", c.grid.tail_growth);
        read(j, "grid", "jump_offset", c.grid.jump_offset);
        if (j.contains("strikes")) {
            const auto& s = j["strikes"];
            if (!s.is_array()) {
                fail("grid.strikes", "must be an array of arrays of numbers");
            }
            for (const auto& per : s) {
                if (!per.is_array()) {
                    fail("grid.strikes", "must be an array of arrays of numbers");
                }
                std::vector<double> levels;
                for (const auto& v : per) {
                    if (!v.is_number()) {
                        fail("grid.strikes", "must be an array of arrays of numbers");
                    }
                    levels.push_back(v.get<double>());
                }
                c.grid_strikes.push_back(std::move(levels));
            }
        }
    }
    if (root.contains("solver")) {
        const auto& j = root["solver"];
        check_keys(j, "solver",
                   {"newton_tolerance", "gap_tolerance", "stalled_gap_tolerance", "barrier_reduction", "max_outer",
                    "max_newton", "backtrack", "sufficient_decrease", "objective_floor", "phase_one_margin",
                    "phase_one_radius", "trace_path"});
        auto& s = c.solver;
        read(j, "solver", "newton_tolerance", s.newton_tolerance);
        read(j, "solver", "gap_tolerance", s.gap_tolerance);
        read(j, "solver", "stalled_gap_tolerance", s.stalled_gap_tolerance);
        read(j, "solver", "barrier_reduction", s.barrier_reduction);
        read(j, "solver", "max_outer", s.max_outer);
        read(j, "solver", "max_newton", s.max_newton);
        read(j, "solver", "backtrack", s.backtrack);
        read(j, "solver", "sufficient_decrease", s.sufficient_decrease);
        read(j, "solver", "objective_floor", s.objective_floor);
        read(j, "solver", "phase_one_margin", s.phase_one_margin);
        read(j, "solver", "phase_one_radius", s.phase_one_radius);
        read(j, "solver", "trace_path", s.trace_path);
        s.trace_path = resolve(s.trace_path, base_dir);
    }
    if (root.contains("claim")) {
        c.claim = read_claim(root["claim"], "claim", base_dir);
    }
    if (root.contains("baseline")) {
        const auto& b = root["baseline"];
        if (!b.is_array()) {
            fail("baseline", "must be an array of claims");
        }
        for (std::size_t k = 0; k < b.size(); ++k) {
            c.baseline.push_back(read_claim(b[k], fmt::format("baseline[{}]", k), base_dir));
        }
    }
    if (root.contains("flags")) {
        const auto& j = root["flags"];
        check_keys(j, "flags", {"frictionless", "dynamic_trading", "exclude_claim_strike", "strategy_bound"});
        read(j, "flags", "frictionless", c.frictionless);
        read(j, "flags", "dynamic_trading", c.dynamic_trading);
        read(j, "flags", "exclude_claim_strike", c.exclude_claim_strike);
        read(j, "flags", "strategy_bound", c.strategy_bound);
    }
    if (root.contains("simulation")) {
        const auto& j = root["simulation"];
        check_keys(j, "simulation", {"paths", "seed"});
        read(j, "simulation", "paths", c.paths);
        read(j, "simulation", "seed", c.seed);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot read config {}", path));
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::filesystem::path(path).parent_path().string());
}

std::string config_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["agent"] = {{"wealth", c.agent.wealth}, {"risk_aversion", c.agent.risk_aversion}};
    j["model"] = {{"theta", c.model.theta},
                  {"sigma", c.model.sigma},
                  {"nu", c.model.nu},
                  {"spot", c.model.spot},
                  {"horizons", c.model.horizons}};
    j["market"] = {{"quotes", c.quotes},
                   {"maturities", c.maturities},
                   {"lot_size", c.lot_size},
                   {"delta_pct", c.delta_pct},
                   {"truncation", {c.grid.lo, c.grid.hi}}};
    j["grid"] = {{"tail_nodes", c.grid.tail_nodes},
                 {"tail_uniform_nodes", c.grid.tail_uniform_nodes},
                 {"tail_growth", c.grid.tail_growth},
                 {"jump_offset", c.grid.jump_offset},
                 {"strikes", c.grid_strikes}};
    const auto& s = c.solver;
    j["solver"] = {{"newton_tolerance", s.newton_tolerance},
                   {"gap_tolerance", s.gap_tolerance},
                   {"stalled_gap_tolerance", s.stalled_gap_tolerance},
                   {"barrier_reduction", s.barrier_reduction},
                   {"max_outer", s.max_outer},
                   {"max_newton", s.max_newton},
                   {"backtrack", s.backtrack},
                   {"sufficient_decrease", s.sufficient_decrease},
                   {"objective_floor", s.objective_floor},
                   {"phase_one_margin", s.phase_one_margin},
                   {"phase_one_radius", s.phase_one_radius},
                   {"trace_path", s.trace_path}};
    j["claim"] = claim_json(c.claim);
    j["baseline"] = nlohmann::ordered_json::array();
    for (const auto& b : c.baseline) {
        j["baseline"].push_back(claim_json(b));
    }
    j["flags"] = {{"frictionless", c.frictionless},
                  {"dynamic_trading", c.dynamic_trading},
                  {"exclude_claim_strike", c.exclude_claim_strike},
                  {"strategy_bound", c.strategy_bound}};
    j["simulation"] = {{"paths", c.paths}, {"seed", c.seed}};
    return j.dump(2) + "\n";
}

}  // namespace semistatic
