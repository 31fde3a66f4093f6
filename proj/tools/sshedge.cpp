// Batch front end: loads a JSON run configuration, applies command-line
// overrides and runs one subcommand, writing its artifacts to --out.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "semistatic/commands.hpp"
#include "semistatic/config.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string quotes;
    std::string claim;
    std::optional<double> strike;
    std::optional<double> barrier;
    std::optional<double> level;
    std::optional<double> units;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<double> delta_pct;
    bool frictionless = false;
    bool static_only = false;
    bool exclude_strike = false;
};

semistatic::RunConfig effective_config(const Overrides& o) {
    auto c = o.config_path.empty() ? semistatic::RunConfig{} : semistatic::load_config(o.config_path);
    if (!o.quotes.empty()) {
        c.quotes = o.quotes;
    }
    if (!o.claim.empty()) {
        c.claim.type = o.claim;
        c.claim.id.clear();
    }
    if (o.strike) {
        c.claim.strike = *o.strike;
    }
    if (o.barrier) {
        c.claim.barrier = *o.barrier;
    }
    if (o.level) {
        c.claim.level = *o.level;
    }
    if (o.units) {
        c.claim.units = *o.units;
    }
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (o.paths) {
        c.paths = *o.paths;
    }
    if (o.delta_pct) {
        c.delta_pct = *o.delta_pct;
        c.frictionless = false;
    }
    if (o.frictionless) {
        c.frictionless = true;
    }
    if (o.static_only) {
        c.dynamic_trading = false;
    }
    if (o.exclude_strike) {
        c.exclude_claim_strike = true;
    }
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-static hedging and indifference pricing against a quoted option chain"};
    app.fallthrough();
    app.require_subcommand(1);

    Overrides o;
    semistatic::CommandOptions options;
    bool error_as_json = false;

    app.add_option("--config", o.config_path, "JSON run configuration")->envname("SSHEDGE_CONFIG");
    app.add_option("--quotes", o.quotes, "quote CSV (overrides the configuration)");
    app.add_option("--claim", o.claim, "claim type: vanilla, knockout, asian, lookback, digital");
    app.add_option("--strike", o.strike, "claim strike");
    app.add_option("--barrier", o.barrier, "knockout barrier");
    app.add_option("--level", o.level, "digital payout level");
    app.add_option("--units", o.units, "claim contracts (negative means owned)");
    app.add_option("--seed", o.seed, "simulation seed");
    app.add_option("--paths", o.paths, "simulated paths");
    auto* delta = app.add_option("--delta-pct", o.delta_pct, "proportional index transaction cost in percent");
    app.add_flag("--frictionless", o.frictionless, "trade the index without costs")->excludes(delta);
    app.add_flag("--static-only", o.static_only, "no dynamic index trading");
    app.add_flag("--exclude-strike", o.exclude_strike, "drop the calls at the claim strike from the hedge");
    app.add_flag("--expect-arbitrage", options.expect_arbitrage, "finding an arbitrage is not an error");
    app.add_flag("--dump-program", options.dump_program, "optimize: write the assembled program");
    app.add_option("--out", options.out_dir, "output directory");
    app.add_flag("--error-json", error_as_json, "report errors as JSON on stdout");

    std::string command;
    for (const auto& name : semistatic::command_names()) {
        app.add_subcommand(name)->callback([&command, name] { command = name; });
    }
    app.add_subcommand("config", "print the effective configuration")->callback([&command] { command = "config"; });

    auto fail = [&](const std::string& message) {
        if (error_as_json) {
            std::cout << semistatic::error_json(message);
        } else {
            std::cerr << "sshedge: " << message << "\n";
        }
        return semistatic::kExitError;
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        return fail(e.what());
    }

    try {
        const auto config = effective_config(o);
        if (command == "config") {
            std::cout << semistatic::config_json(config);
            return semistatic::kExitOk;
        }
        const auto ws = semistatic::load_workspace(config);
        const auto result = semistatic::run_command(command, ws, options);
        std::cout << result.summary;
        return result.exit_code;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}
