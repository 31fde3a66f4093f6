#pragma once

#include <span>
#include <string>
#include <vector>

#include "semistatic/program.hpp"

namespace semistatic {

struct SolveSettings {
    /// Centering stops when half the squared Newton decrement drops below this.
    double newton_tolerance = 1e-10;
    /// Barrier stages stop once (barrier terms / t) <= gap_tolerance * max(1, |objective|).
    double gap_tolerance = 1e-11;
    /// Gap accepted when the line search can no longer make progress.
    double stalled_gap_tolerance = 1e-7;
    double barrier_reduction = 0.2;
    int max_outer = 60;
    int max_newton = 50;
    double backtrack = 0.5;
    double sufficient_decrease = 1e-4;
    /// An objective below this value is reported as unbounded.
    double objective_floor = -1e12;
    /// Phase one stops as soon as every scaled row has this much slack.
    double phase_one_margin = 1e-6;
    /// Box half-width, relative to max(1, |start|), imposed on unbounded
    /// variables during phase one only.
    double phase_one_radius = 1e9;
    /// Iteration trace CSV; empty disables it.
    std::string trace_path;

    void validate() const;
};

enum class SolveStatus { optimal, infeasible, unbounded, max_iter };

const char* to_string(SolveStatus status);

struct OuterRecord {
    int iteration = 0;
    double objective = 0.0;
    double step = 0.0;
    double barrier_weight = 0.0;
    int newton_steps = 0;
};

struct Solution {
    SolveStatus status = SolveStatus::max_iter;
    std::vector<double> x;
    /// Program objective at x: log of the exponential sum (if any) plus c.x.
    double objective = 0.0;
    /// objective - (barrier terms)/t at the last centered point.
    double dual_bound = 0.0;
    /// One multiplier per inequality row, in the units of the original row.
    std::vector<double> multipliers;
    std::vector<double> lower_multipliers;
    std::vector<double> upper_multipliers;
    double max_violation = 0.0;
    double gap = 0.0;
    int outer_iterations = 0;
    int newton_steps = 0;
    double wall_seconds = 0.0;
    std::vector<OuterRecord> trace;

    [[nodiscard]] bool ok() const { return status == SolveStatus::optimal; }
};

/// Primal log-barrier method with damped Newton centering. Programs without
/// a strictly feasible start go through a slack-minimizing phase one first.
Solution minimize(const ConvexProgram& program, const SolveSettings& settings = {});

/// Same method for programs with a linear objective only.
Solution solve_lp(const ConvexProgram& program, const SolveSettings& settings = {});

struct ValueGradient {
    /// sum_i m_i exp(kappa a_i(x)) + c.x
    double value = 0.0;
    /// log of the exponential sum; -inf without an exponential objective
    double log_exp_sum = 0.0;
    std::vector<double> gradient;
};

ValueGradient objective_and_gradient(const ConvexProgram& program, std::span<const double> x);

/// Largest violation of boxes and inequality rows at x, in original units.
double max_violation(const ConvexProgram& program, std::span<const double> x);

}  // namespace semistatic
