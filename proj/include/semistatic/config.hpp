#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semistatic/claims.hpp"
#include "semistatic/galerkin.hpp"
#include "semistatic/grid.hpp"
#include "semistatic/solver.hpp"
#include "semistatic/vg.hpp"

namespace semistatic {

struct ClaimSpec {
    std::string type = "none";  // none, vanilla, knockout, asian, lookback, digital, custom
    std::string id;
    double strike = 2350.0;
    double barrier = 2400.0;
    double level = 10.0;
    double units = 1.0;
    double contract_size = 100.0;
    std::string table;  // custom payout CSV

    [[nodiscard]] bool empty() const { return type == "none"; }
};

/// Builds the claim; paths are taken as given.
Claim make_claim(const ClaimSpec& spec);

struct RunConfig {
    AgentSpec agent;  // baseline is filled from `baseline`
    std::vector<ClaimSpec> baseline;
    VGParams model;

    std::string quotes;  // CSV path; empty means no quoted options
    std::vector<std::string> maturities{"4/21/2017", "5/19/2017"};
    double lot_size = 100.0;
    double delta_pct = 0.0;

    GridOptions grid;
    /// Per-period grid strikes; empty means the strikes of the quote file.
    std::vector<std::vector<double>> grid_strikes;

    SolveSettings solver;
    ClaimSpec claim;

    /// Defaults to false when the market section states delta_pct.
    bool frictionless = true;
    bool dynamic_trading = true;
    bool exclude_claim_strike = false;
    double strategy_bound = 1e6;

    std::size_t paths = 100000;
    std::uint64_t seed = 42;

    void validate() const;
    [[nodiscard]] Frictions frictions() const;
};

/// Parses and schema-checks a JSON document. Unknown keys and wrong types are
/// errors; missing keys keep their defaults. Relative file paths are resolved
/// against `base_dir` when it is not empty.
RunConfig parse_config(const std::string& json_text, const std::string& base_dir = "");

RunConfig load_config(const std::string& path);

/// The effective configuration as JSON (defaults included).
std::string config_json(const RunConfig& config);

}  // namespace semistatic
