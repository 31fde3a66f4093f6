#include "oracles/instances.hpp"

#include <cmath>

namespace oracle {

namespace {

semistatic::kernels::SparseRows to_rows(const std::vector<std::vector<double>>& M, const std::vector<double>& off,
                                        std::size_t n) {
    semistatic::kernels::SparseRows rows(n);
    for (std::size_t i = 0; i < M.size(); ++i) {
        std::vector<int> cols;
        for (std::size_t k = 0; k < n; ++k) {
            cols.push_back(static_cast<int>(k));
        }
        rows.add_row(cols, M[i], off[i]);
    }
    rows.finalize();
    return rows;
}

}  // namespace

semistatic::ConvexProgram to_program(const Dense& d) {
    const std::size_t n = d.lo.size();
    semistatic::ConvexProgram p(n);
    p.lower = d.lo;
    p.upper = d.hi;
    p.linear = d.c.empty() ? std::vector<double>(n, 0.0) : d.c;
    if (!d.obj.empty()) {
        p.exp_objective = semistatic::ExpSumObjective{d.kappa, d.masses, to_rows(d.obj, d.obj_offset, n)};
    }
    p.inequalities = to_rows(d.A, d.b, n);
    return p;
}

double raw_objective(const Dense& d, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.obj.size(); ++i) {
        double a = d.obj_offset[i];
        for (std::size_t k = 0; k < x.size(); ++k) {
            a += d.obj[i][k] * x[k];
        }
        s += d.masses[i] * std::exp(d.kappa * a);
    }
    for (std::size_t k = 0; k < d.c.size(); ++k) {
        s += d.c[k] * x[k];
    }
    return s;
}

bool feasible(const Dense& d, const std::vector<double>& x) {
    for (std::size_t r = 0; r < d.A.size(); ++r) {
        double s = d.b[r];
        for (std::size_t k = 0; k < x.size(); ++k) {
            s += d.A[r][k] * x[k];
        }
        if (s > 0.0) {
            return false;
        }
    }
    return true;
}

Dense random_exp_instance(std::mt19937_64& rng, std::size_t n, std::size_t m, bool with_row) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Dense d;
    d.kappa = 0.5 + 2.5 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> row(n);
        for (auto& v : row) {
            v = u(rng);
        }
        d.obj.push_back(row);
        d.obj_offset.push_back(0.5 * u(rng));
        d.masses.push_back(0.1 + std::uniform_real_distribution<double>(0.0, 1.0)(rng));
        total += d.masses.back();
    }
    for (auto& mi : d.masses) {
        mi /= total;
    }
    d.lo.assign(n, -1.0);
    d.hi.assign(n, 1.0);
    if (with_row) {
        std::vector<double> row(n);
        for (auto& v : row) {
            v = u(rng);
        }
        d.A.push_back(row);
        d.b.push_back(-0.3);  // the origin stays strictly feasible
    }
    return d;
}


Dense random_lp_instance(std::mt19937_64& rng, std::size_t n, int rows) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Dense d;
    d.lo.assign(n, -2.0);
    d.hi.assign(n, 2.0);
    d.c.resize(n);
    for (auto& v : d.c) {
        v = u(rng);
    }
    for (int r = 0; r < rows; ++r) {
        std::vector<double> row(n);
        for (auto& v : row) {
            v = u(rng);
        }
        d.A.push_back(row);
        d.b.push_back(-0.2 - 0.8 * std::abs(u(rng)));
    }
    return d;
}

void lp_rows(const Dense& d, std::vector<std::vector<double>>& rows, std::vector<double>& rhs) {
    const std::size_t n = d.lo.size();
    rows = d.A;
    rhs.clear();
    for (double v : d.b) {
        rhs.push_back(-v);
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> e(n, 0.0);
        e[k] = 1.0;
        rows.push_back(e);
        rhs.push_back(d.hi[k]);
        e[k] = -1.0;
        rows.push_back(e);
        rhs.push_back(-d.lo[k]);
    }
}

}  // namespace oracle
