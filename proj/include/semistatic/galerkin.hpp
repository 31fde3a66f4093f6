#pragma once

#include <span>
#include <string>
#include <vector>

#include "semistatic/claims.hpp"
#include "semistatic/grid.hpp"
#include "semistatic/instruments.hpp"
#include "semistatic/program.hpp"

namespace semistatic {

/// A held quantity of a claim; the liability it creates is
/// units * contract_size * payout. Negative units mean the claim is owned.
struct ClaimPosition {
    Claim claim;
    double units = 0.0;
};

using Liability = std::vector<ClaimPosition>;

double liability_value(const Liability& liability, std::span<const double> path);

/// Breakpoints of every claim in the liability, merged per period.
std::vector<std::vector<Breakpoint>> liability_breakpoints(const Liability& liability, int periods);

struct AgentSpec {
    double wealth = 100000.0;
    double risk_aversion = 2.0;
    Liability baseline;

    void validate() const;
    /// Loss scale lambda / wealth, frozen at the reference wealth.
    [[nodiscard]] double kappa() const { return risk_aversion / wealth; }
};

struct Frictions {
    bool transaction_costs = false;
    double delta_pct = 0.0;
    bool dynamic_trading = true;
    /// Box on strategy coefficients, in index units.
    double strategy_bound = 1e6;

    void validate() const;
    [[nodiscard]] double delta() const { return transaction_costs ? delta_pct / 100.0 : 0.0; }
};

/// Everything about the market side that the assembled programs share.
struct HedgingSetup {
    Market market;  // tradable quotes
    /// Cell boundaries of the strategy basis per period (only 1..T-1 used).
    std::vector<std::vector<double>> basis_strikes;
    double spot = 0.0;
    QuadratureGrid grid;
    /// Per-period levels whose tensor product carries pointwise constraints.
    std::vector<std::vector<double>> constraint_levels;

    [[nodiscard]] int periods() const { return market.periods; }
};

/// Left-closed strike interval [left, right) on which a strategy coefficient
/// is active at rebalance period s; right is +inf for the top cell.
struct BasisElement {
    int s = 1;
    int n = 0;
    double left = 0.0;
    double right = 0.0;
};

int basis_value(const BasisElement& b, int t, double x);

/// Number of strikes <= x, i.e. the index of the cell containing x.
std::size_t cell_index(std::span<const double> strikes, double x);

/// Basis elements of period s: cells [K_n, K_{n+1}) with K_0 = 0, K_{N+1} = inf.
std::vector<BasisElement> basis_elements(int s, std::span<const double> strikes);

/// sum_n coeffs[n] * basis value at x.
double strategy_position(std::span<const double> coeffs, std::span<const double> strikes, double x);

struct QuoteColumns {
    int plus = -1;    // bought at the ask
    int minus = -1;   // sold at the bid
    int merged = -1;  // single signed column for zero-spread quotes
};

/// Column layout: cash, quote columns, then the dynamic strategy.
struct DecisionLayout {
    int periods = 2;
    bool transaction_costs = false;
    int cash = 0;
    std::vector<QuoteColumns> quotes;
    std::vector<std::vector<double>> basis_strikes;  // index s-1 for s = 1..T-1
    // frictionless strategy
    int z0 = -1;
    std::vector<std::vector<int>> cells;
    // transaction-cost strategy: purchases and sales
    int dz0_plus = -1;
    int dz0_minus = -1;
    std::vector<std::vector<int>> cells_plus;
    std::vector<std::vector<int>> cells_minus;
    std::size_t num_variables = 0;
    std::vector<std::string> names;
};

DecisionLayout make_layout(const HedgingSetup& setup, const Frictions& frictions);

/// Terminal wealth W(x, X) = sum vals[k] * x[cols[k]] at the path. Includes
/// cash, quoted payoffs and the dynamic gains net of transaction costs.
void wealth_coefficients(const DecisionLayout& layout, const HedgingSetup& setup, const Frictions& frictions,
                         std::span<const double> path, std::vector<int>& cols, std::vector<double>& vals);

double terminal_wealth(const DecisionLayout& layout, const HedgingSetup& setup, const Frictions& frictions,
                       std::span<const double> x, std::span<const double> path);

/// Linear acquisition cost at t = 0 of the static part (quotes and cash).
std::vector<double> cost_vector(const DecisionLayout& layout, const HedgingSetup& setup);

void layout_bounds(const DecisionLayout& layout, const HedgingSetup& setup, const Frictions& frictions,
                   std::vector<double>& lower, std::vector<double>& upper);

/// Net option position per quote (x+ - x-) in options.
std::vector<double> quote_positions(const DecisionLayout& layout, std::span<const double> x);

struct StrategyRow {
    int period = 0;
    double left = 0.0;
    double right = 0.0;
    double units = 0.0;  // position held after rebalancing at `period`
};

/// Index position per period and cell. In the transaction-cost layout the
/// held position is the running sum of trades along the cells of each path,
/// reported here per cell as z_0 + dz_s for T = 2.
std::vector<StrategyRow> strategy_table(const DecisionLayout& layout, std::span<const double> x);

struct AssembledProgram {
    ConvexProgram program;
    DecisionLayout layout;
    Frictions frictions;
    double budget = 0.0;
    int budget_row = 0;
};

AssembledProgram assemble_frictionless(const HedgingSetup& setup, const Liability& liability,
                                       const AgentSpec& agent, double budget, bool dynamic_trading = true);

AssembledProgram assemble_transaction_cost(const HedgingSetup& setup, const Liability& liability,
                                           const AgentSpec& agent, double budget, double delta_pct);

/// Dispatch on frictions.
AssembledProgram assemble(const HedgingSetup& setup, const Liability& liability, const AgentSpec& agent,
                          double budget, const Frictions& frictions);

/// Start point strictly inside every box, with cash leaving slack `margin`
/// in the budget row.
std::vector<double> interior_point(const DecisionLayout& layout, const HedgingSetup& setup,
                                   const std::vector<double>& lower, const std::vector<double>& upper, double budget,
                                   double margin);

struct ProgramShape {
    std::size_t variables = 0;
    std::size_t grid_points = 0;
    std::size_t inequality_rows = 0;
    std::size_t bound_constraints = 0;
    [[nodiscard]] std::size_t constraints() const { return inequality_rows + bound_constraints; }
};

/// Size of the (SSP) program without materializing the grid rows.
ProgramShape program_shape(const Market& market, const std::vector<std::vector<double>>& basis_strikes,
                           const std::vector<std::vector<double>>& grid_nodes, const Frictions& frictions);

/// Variables, bounds and rows for regression diffs.
std::string program_json(const AssembledProgram& assembled);

}  // namespace semistatic
