#pragma once

#include <string>
#include <vector>

#include "semistatic/config.hpp"
#include "semistatic/galerkin.hpp"
#include "semistatic/instruments.hpp"
#include "semistatic/pricing.hpp"

namespace semistatic {

/// Exit statuses of the batch front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFlagged = 2;  // infeasible, or arbitrage found when not expected

/// Inputs shared by every subcommand, loaded once from the configuration.
struct Workspace {
    RunConfig config;
    Market market;  // full quote list
    std::vector<std::vector<double>> strike_sets;
    Liability baseline;
    /// The configured claim as a position; empty when the claim type is none.
    Liability claim;

    [[nodiscard]] bool has_claim() const { return !claim.empty(); }
};

Workspace load_workspace(const RunConfig& config);

/// Problem whose grid carries the breakpoints of the baseline and the claim.
/// With `exclude_claim_strike` the calls at the claim strike and last
/// maturity are removed from the tradable set.
PricingProblem make_problem(const Workspace& ws);

struct CommandOptions {
    std::string out_dir = ".";
    bool expect_arbitrage = false;
    /// optimize: also write the assembled program as JSON.
    bool dump_program = false;
};

struct CommandResult {
    int exit_code = kExitOk;
    /// Main JSON document, also written to <out_dir>/<command>.json.
    std::string summary;
    std::vector<std::string> files;  // names relative to out_dir
};

/// optimize, price, hedge, superhedge, subhedge, arbitrage, simulate, grid.
const std::vector<std::string>& command_names();

/// Runs one subcommand and writes its artifacts. Throws on errors.
CommandResult run_command(const std::string& name, const Workspace& ws, const CommandOptions& options);

/// {"error": message, "exit_code": 1}
std::string error_json(const std::string& message);

}  // namespace semistatic
