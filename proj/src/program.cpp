#include "semistatic/program.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace semistatic {

ConvexProgram::ConvexProgram(std::size_t n)
    : num_variables(n),
      lower(n, -std::numeric_limits<double>::infinity()),
      upper(n, std::numeric_limits<double>::infinity()),
      linear(n, 0.0),
      inequalities(n) {}

void ConvexProgram::validate() const {
    const std::size_t n = num_variables;
    if (lower.size() != n || upper.size() != n || linear.size() != n) {
        throw std::invalid_argument("program vectors do not match the variable count");
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j]) {
            throw std::invalid_argument(fmt::format("variable {} has an empty box", j));
        }
        if (!std::isfinite(linear[j])) {
            throw std::invalid_argument(fmt::format("variable {} has a non-finite cost", j));
        }
    }
    if (inequalities.columns() != n || !inequalities.finalized()) {
        throw std::invalid_argument("inequality rows are not finalized for this variable count");
    }
    if (exp_objective) {
        const auto& e = *exp_objective;
        if (e.rows.columns() != n || !e.rows.finalized() || e.masses.size() != e.rows.rows()) {
            throw std::invalid_argument("objective rows are inconsistent with the program");
        }
        if (!(e.kappa > 0.0)) {
            throw std::invalid_argument("objective scale must be positive");
        }
        for (double m : e.masses) {
            if (!(m >= 0.0)) {
                throw std::invalid_argument("objective masses must be nonnegative");
            }
        }
    }
    if (!start.empty() && start.size() != n) {
        throw std::invalid_argument("start point has the wrong length");
    }
}

}  // namespace semistatic
