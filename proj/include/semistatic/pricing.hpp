#pragma once

#include <string>
#include <vector>

#include "semistatic/galerkin.hpp"
#include "semistatic/grid.hpp"
#include "semistatic/solver.hpp"
#include "semistatic/vg.hpp"

namespace semistatic {

/// Builds the grid, strategy basis and constraint lattice. `strike_sets`
/// fixes the grid nodes and the basis cells; it is usually the strike set of
/// the full chain, so that dropping quotes from `tradable` keeps the grid.
/// Breakpoints of every claim in `liability` enter the grid.
HedgingSetup build_setup(const Market& tradable, const std::vector<std::vector<double>>& strike_sets,
                         const Liability& liability, const VGParams& model, const GridOptions& grid_options);

/// Copy of the market without the call quotes struck at `strike` maturing at
/// `period`.
Market exclude_strike(const Market& market, double strike, int period);

struct PricingProblem {
    HedgingSetup setup;
    AgentSpec agent;
    Frictions frictions;
    SolveSettings solver;
};

struct ValueResult {
    Solution solution;
    DecisionLayout layout;
    double log_value = 0.0;  // log of the optimal expected loss
    [[nodiscard]] bool ok() const { return solution.ok(); }
    [[nodiscard]] double value() const;
};

/// Minimizes expected loss with the baseline liability plus `extra` and the
/// given budget.
ValueResult solve_value(const PricingProblem& problem, const Liability& extra, double budget);

/// phi(budget, baseline + extra); throws std::runtime_error when the solve fails.
double optimal_value(const PricingProblem& problem, const Liability& extra, double budget);

struct IndifferencePrice {
    double total = 0.0;       // USD for the whole position
    double per_option = 0.0;  // total / (units * contract_size)
    ValueResult reference;    // phi(w, baseline)
    ValueResult shifted;      // phi(w, baseline +- claim)
};

/// Seller's price: (w / lambda) (log phi(w, cbar + c) - log phi(w, cbar)).
IndifferencePrice indifference_sell(const PricingProblem& problem, const Claim& claim, double units);
/// Buyer's price: (w / lambda) (log phi(w, cbar) - log phi(w, cbar - c)).
IndifferencePrice indifference_buy(const PricingProblem& problem, const Claim& claim, double units);

enum class Side { sell, buy };

struct BisectionSettings {
    /// Terminal bracket width relative to the reference wealth.
    double width_tolerance = 1e-8;
    int max_doublings = 60;
    int max_evaluations = 200;
    /// Initial half-width of the search bracket relative to the wealth.
    double initial_step = 1e-3;
};

struct BisectionResult {
    double total = 0.0;
    double per_option = 0.0;
    double lower = 0.0;  // final bracket on the total price
    double upper = 0.0;
    int evaluations = 0;
};

/// Solves phi(w + p, cbar + c) = phi(w, cbar) (sell) or
/// phi(w - p, cbar - c) = phi(w, cbar) (buy) for p by bracketing on the
/// budget. Uses no closed form; throws std::runtime_error when no bracket is
/// found within max_doublings.
BisectionResult indifference_bisection(const PricingProblem& problem, const Claim& claim, double units, Side side,
                                       const BisectionSettings& settings = {});

struct HedgeResult {
    bool feasible = false;
    double total = 0.0;  // +inf when infeasible
    double per_option = 0.0;
    Solution solution;
    DecisionLayout layout;
    std::size_t constraint_points = 0;
};

/// Least cost of quotes, cash and index trading whose payout dominates the
/// claim at every constraint-lattice point of the truncated domain.
HedgeResult superhedge_cost(const PricingProblem& problem, const Claim& claim, double units);

/// Greatest revenue from a portfolio whose payout plus the claim stays
/// nonnegative on the lattice.
HedgeResult subhedge_cost(const PricingProblem& problem, const Claim& claim, double units);

struct ArbitrageResult {
    bool found = false;
    double expected_excess = 0.0;   // sum_i m_i (W_i - w)
    double min_excess = 0.0;        // min_i (W_i - w)
    double riskless_crossed = 0.0;  // profit from buying and selling crossed quotes
    Solution solution;
    DecisionLayout layout;
};

/// Expected-loss program with the extra requirement that terminal wealth is
/// at least w at every grid point. Reports a strategy when one exists with
/// expected excess above 1e-6 w.
ArbitrageResult find_arbitrage(const PricingProblem& problem, double w);

struct LegReport {
    std::string name;
    SolveStatus status = SolveStatus::optimal;
    double objective = 0.0;
    double gap = 0.0;
    double max_violation = 0.0;
    int outer_iterations = 0;
    int newton_steps = 0;
    bool bounds_active = false;
};

struct PriceReport {
    std::string claim_id;
    double units = 1.0;
    double contract_size = 100.0;
    // per option
    double buyer = 0.0;
    double seller = 0.0;
    double subhedge = 0.0;
    double superhedge = 0.0;
    // whole position
    double buyer_total = 0.0;
    double seller_total = 0.0;
    double subhedge_total = 0.0;
    double superhedge_total = 0.0;
    bool superhedge_feasible = true;
    bool subhedge_feasible = true;
    bool quantity_constraints_active = false;
    bool arbitrage_checked = false;
    bool arbitrage_detected = false;
    bool ordering_holds = false;
    double ordering_tolerance = 0.0;
    double domain_lo = 0.0;
    double domain_hi = 0.0;
    double delta_pct = 0.0;
    bool transaction_costs = false;
    std::vector<LegReport> legs;
};

PriceReport price_claim(const PricingProblem& problem, const Claim& claim, double units, bool check_arbitrage = true);

/// Deterministic JSON (no timings).
std::string report_json(const PriceReport& report);

/// True when some quote or strategy variable sits on a finite nonzero bound.
bool bounds_active(const DecisionLayout& layout, const HedgingSetup& setup, const Frictions& frictions,
                   const std::vector<double>& x);

}  // namespace semistatic
