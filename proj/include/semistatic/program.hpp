#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semistatic/kernels.hpp"

namespace semistatic {

/// sum_i m_i exp(kappa * a_i(x)) with a_i affine.
struct ExpSumObjective {
    double kappa = 1.0;
    std::vector<double> masses;
    kernels::SparseRows rows;
};

/// Minimize  log(sum_i m_i exp(kappa a_i(x))) + c.x   (the log term only when
/// `exp_objective` is set)  subject to  lower <= x <= upper  and
/// A x + b <= 0 row by row. Bounds may be infinite.
///
/// The log is taken so that shifting every a_i by a constant moves the value
/// by exactly kappa times that constant; the minimizer is the one of the plain
/// exponential sum.
struct ConvexProgram {
    std::size_t num_variables = 0;
    std::vector<double> lower;
    std::vector<double> upper;
    std::optional<ExpSumObjective> exp_objective;
    std::vector<double> linear;
    kernels::SparseRows inequalities;
    std::vector<std::string> names;
    std::vector<std::string> row_names;
    /// Optional starting point; moved into the interior when needed.
    std::vector<double> start;

    explicit ConvexProgram(std::size_t n = 0);
    void validate() const;
};

}  // namespace semistatic
