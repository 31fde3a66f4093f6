#pragma once

// Brute-force reference computations used only by the tests. None of these
// touch the library's solver or quadrature code.

#include <functional>
#include <vector>

namespace oracle {

double golden_section(const std::function<double(double)>& f, double a, double b, double tol = 1e-13);

struct SearchResult {
    std::vector<double> x;
    double value = 0.0;
};

/// Dense grid over a box followed by repeated local refinement around the
/// best point.
SearchResult grid_search(const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& lo,
                         const std::vector<double>& hi, int points = 41, int refinements = 30);

/// Convex f over the box intersected with one half-space row . x <= rhs.
/// When the box minimizer violates the row, the minimum lies on the
/// hyperplane; the variable with the largest coefficient is eliminated so the
/// search runs over the remaining coordinates with the row held exactly.
SearchResult half_space_search(const std::function<double(const std::vector<double>&)>& f,
                               const std::vector<double>& lo, const std::vector<double>& hi,
                               const std::vector<double>& row, double rhs);

/// Coordinate-wise golden-section descent, for smooth convex functions.
SearchResult coordinate_descent(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& lo, const std::vector<double>& hi, int sweeps = 200);

struct LpResult {
    bool feasible = false;
    double value = 0.0;
    std::vector<double> x;
    int optimal_vertices = 0;  // distinct vertices attaining the optimum
};

/// min c.x subject to A x <= b by enumerating every basic solution. The
/// feasible set must be bounded (give explicit box rows).
LpResult vertex_enumeration(const std::vector<double>& c, const std::vector<std::vector<double>>& A,
                            const std::vector<double>& b);

/// Composite Simpson rule with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace oracle
