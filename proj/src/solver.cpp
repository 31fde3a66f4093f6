#include "semistatic/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>

#include <fmt/format.h>

namespace semistatic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Program after fixed variables are folded into the offsets and inequality
// rows are scaled to unit max-norm.
struct Reduced {
    std::size_t n = 0;
    std::vector<int> free;
    std::vector<double> base;
    std::vector<double> lo, up, c;
    double c_const = 0.0;
    bool has_exp = false;
    double kappa = 1.0;
    std::vector<double> masses;
    kernels::SparseRows obj;
    kernels::SparseRows A;
    std::vector<int> row_orig;
    std::vector<double> row_scale;
    bool infeasible_constant_row = false;
};

Reduced reduce(const ConvexProgram& p) {
    Reduced r;
    r.base.assign(p.num_variables, 0.0);
    for (std::size_t j = 0; j < p.num_variables; ++j) {
        if (p.lower[j] == p.upper[j]) {
            r.base[j] = p.lower[j];
            r.c_const += p.linear[j] * p.lower[j];
        } else {
            r.free.push_back(static_cast<int>(j));
            r.lo.push_back(p.lower[j]);
            r.up.push_back(p.upper[j]);
            r.c.push_back(p.linear[j]);
        }
    }
    r.n = r.free.size();
    if (p.exp_objective) {
        r.has_exp = true;
        r.kappa = p.exp_objective->kappa;
        r.masses = p.exp_objective->masses;
        r.obj = p.exp_objective->rows.restrict_columns(r.free, r.base);
    }
    kernels::SparseRows all = p.inequalities.restrict_columns(r.free, r.base);
    kernels::SparseRows kept(r.n);
    for (std::size_t i = 0; i < all.rows(); ++i) {
        auto vals = all.row_vals(i);
        double norm = 0.0;
        for (double v : vals) {
            norm = std::max(norm, std::abs(v));
        }
        if (norm == 0.0) {
            if (all.offset(i) > 0.0) {
                r.infeasible_constant_row = true;
            }
            continue;
        }
        const double scale = 1.0 / norm;
        std::vector<double> scaled(vals.begin(), vals.end());
        for (double& v : scaled) {
            v *= scale;
        }
        kept.add_row(all.row_cols(i), scaled, all.offset(i) * scale);
        r.row_orig.push_back(static_cast<int>(i));
        r.row_scale.push_back(scale);
    }
    kept.finalize();
    r.A = std::move(kept);
    return r;
}

std::vector<double> interior_start(const Reduced& r, const std::vector<double>& full_start) {
    std::vector<double> x(r.n, 0.0);
    for (std::size_t k = 0; k < r.n; ++k) {
        if (!full_start.empty()) {
            x[k] = full_start[static_cast<std::size_t>(r.free[k])];
        }
        const double lo = r.lo[k];
        const double up = r.up[k];
        const double room = std::isfinite(lo) && std::isfinite(up) ? 0.5 * (up - lo) : kInf;
        const double margin = std::min(room, 1.0);
        if (std::isfinite(lo) && !(x[k] > lo)) {
            x[k] = lo + margin;
        }
        if (std::isfinite(up) && !(x[k] < up)) {
            x[k] = up - margin;
        }
        if (std::isfinite(lo) && std::isfinite(up) && !(x[k] > lo && x[k] < up)) {
            x[k] = 0.5 * (lo + up);
        }
    }
    return x;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

struct StageOutcome {
    int steps = 0;
    bool stalled = false;
    bool unbounded = false;
    bool stop = false;
    double last_step = 0.0;
};

class BarrierMethod {
public:
    BarrierMethod(const Reduced& r, const SolveSettings& s) : r_(r), s_(s) {
        barrier_terms_ = r_.A.rows();
        for (std::size_t k = 0; k < r_.n; ++k) {
            barrier_terms_ += std::isfinite(r_.lo[k]) ? 1 : 0;
            barrier_terms_ += std::isfinite(r_.up[k]) ? 1 : 0;
        }
        a_.resize(r_.has_exp ? r_.obj.rows() : 0);
        p_.resize(a_.size());
        da_.resize(a_.size());
        work_.resize(a_.size());
        slack_.resize(r_.A.rows());
        ds_.resize(r_.A.rows());
    }

    std::function<bool(const std::vector<double>&)> stop;

    [[nodiscard]] double merit(const std::vector<double>& x) {
        double value = dot(r_.c, x) + r_.c_const;
        if (r_.has_exp) {
            kernels::evaluate_rows(r_.obj, x, a_);
            value += kernels::log_sum_exp(r_.masses, a_, r_.kappa);
        }
        return value;
    }

    SolveStatus run(std::vector<double>& x, Solution& out, std::ofstream* trace) {
        t_ = initial_weight(x);
        int stalls = 0;
        for (int outer = 1; outer <= s_.max_outer; ++outer) {
            const StageOutcome stage = center(x);
            out.newton_steps += stage.steps;
            out.outer_iterations = outer;
            const double value = merit(x);
            const double gap = barrier_terms_ == 0 ? 0.0 : static_cast<double>(barrier_terms_) / t_;
            out.gap = gap;
            out.dual_bound = value - gap;
            out.trace.push_back({outer, value, stage.last_step, t_, stage.steps});
            if (trace != nullptr) {
                *trace << fmt::format("{},{:.17g},{:.6g},{:.6g},{}\n", outer, value, stage.last_step, t_,
                                      stage.steps);
            }
            if (stage.unbounded) {
                return SolveStatus::unbounded;
            }
            if (stage.stop) {
                return SolveStatus::optimal;
            }
            const double scale = std::max(1.0, std::abs(value));
            if (snapshot_.empty() && gap <= 1e-8 * scale) {
                snapshot_ = x;
                snapshot_t_ = t_;
            }
            if (gap <= s_.gap_tolerance * scale) {
                return SolveStatus::optimal;
            }
            if (stage.stalled) {
                if (gap <= s_.stalled_gap_tolerance * scale) {
                    return SolveStatus::optimal;
                }
                if (++stalls >= 3) {
                    return SolveStatus::max_iter;
                }
            } else {
                stalls = 0;
            }
            t_ /= s_.barrier_reduction;
        }
        return SolveStatus::max_iter;
    }

    [[nodiscard]] double weight() const { return t_; }
    [[nodiscard]] const std::vector<double>& snapshot() const { return snapshot_; }
    [[nodiscard]] double snapshot_weight() const { return snapshot_t_; }
    [[nodiscard]] const std::vector<double>& slacks() const { return slack_; }

    void refresh_slacks(const std::vector<double>& x) {
        kernels::evaluate_rows(r_.A, x, slack_);
        for (double& v : slack_) {
            v = -v;
        }
    }

private:
    double initial_weight(const std::vector<double>& x) {
        if (barrier_terms_ == 0) {
            return 1.0;
        }
        std::vector<double> gf(r_.n), gb(r_.n);
        objective_gradient(x, gf);
        barrier_gradient(x, gb);
        const double nf = std::sqrt(dot(gf, gf));
        const double nb = std::sqrt(dot(gb, gb));
        if (nf == 0.0 || !std::isfinite(nf)) {
            return 1.0;
        }
        return std::clamp(nb / nf, 1e-8, 1e8);
    }

    // gradient of the program objective; leaves p_ holding normalized weights
    void objective_gradient(const std::vector<double>& x, std::vector<double>& g) {
        std::copy(r_.c.begin(), r_.c.end(), g.begin());
        if (!r_.has_exp) {
            return;
        }
        kernels::evaluate_rows(r_.obj, x, a_);
        lse_ = kernels::log_sum_exp(r_.masses, a_, r_.kappa);
        const auto m = static_cast<std::int64_t>(a_.size());
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < m; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            p_[iu] = r_.masses[iu] > 0.0 ? r_.masses[iu] * std::exp(r_.kappa * a_[iu] - lse_) : 0.0;
        }
        pbar_.assign(r_.n, 0.0);
        kernels::weighted_row_sum(r_.obj, p_, pbar_);
        for (std::size_t k = 0; k < r_.n; ++k) {
            g[k] += r_.kappa * pbar_[k];
        }
    }

    void barrier_gradient(const std::vector<double>& x, std::vector<double>& g) {
        refresh_slacks(x);
        inv_.resize(slack_.size());
        for (std::size_t k = 0; k < slack_.size(); ++k) {
            inv_[k] = 1.0 / slack_[k];
        }
        kernels::weighted_row_sum(r_.A, inv_, g);
        for (std::size_t k = 0; k < r_.n; ++k) {
            if (std::isfinite(r_.lo[k])) {
                g[k] -= 1.0 / (x[k] - r_.lo[k]);
            }
            if (std::isfinite(r_.up[k])) {
                g[k] += 1.0 / (r_.up[k] - x[k]);
            }
        }
    }

    bool newton_direction(const std::vector<double>& x, std::vector<double>& g, std::vector<double>& dx) {
        const auto n = static_cast<Eigen::Index>(r_.n);
        std::vector<double> gf(r_.n), gb(r_.n);
        objective_gradient(x, gf);
        barrier_gradient(x, gb);
        for (std::size_t k = 0; k < r_.n; ++k) {
            g[k] = t_ * gf[k] + gb[k];
        }
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
        if (r_.has_exp) {
            const double w = t_ * r_.kappa * r_.kappa;
            std::vector<double> wp(p_.size());
            for (std::size_t i = 0; i < p_.size(); ++i) {
                wp[i] = w * p_[i];
            }
            kernels::weighted_gram(r_.obj, wp, H);
        }
        std::vector<double> inv2(slack_.size());
        for (std::size_t k = 0; k < slack_.size(); ++k) {
            inv2[k] = inv_[k] * inv_[k];
        }
        kernels::weighted_gram(r_.A, inv2, H);
        H.triangularView<Eigen::StrictlyLower>() = H.transpose();
        if (r_.has_exp) {
            const Eigen::Map<const Eigen::VectorXd> pb(pbar_.data(), n);
            H.noalias() -= (t_ * r_.kappa * r_.kappa) * pb * pb.transpose();
        }
        for (std::size_t k = 0; k < r_.n; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            if (std::isfinite(r_.lo[k])) {
                const double d = x[k] - r_.lo[k];
                H(kk, kk) += 1.0 / (d * d);
            }
            if (std::isfinite(r_.up[k])) {
                const double d = r_.up[k] - x[k];
                H(kk, kk) += 1.0 / (d * d);
            }
        }
        Eigen::VectorXd D(n);
        double max_diag = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            max_diag = std::max(max_diag, H(k, k));
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            const double h = H(k, k);
            D(k) = h > 1e-300 * std::max(1.0, max_diag) ? 1.0 / std::sqrt(h) : 1.0;
        }
        Eigen::MatrixXd S = D.asDiagonal() * H * D.asDiagonal();
        const Eigen::Map<const Eigen::VectorXd> gv(g.data(), n);
        const Eigen::VectorXd rhs = -(D.asDiagonal() * gv);
        Eigen::VectorXd y;
        double ridge = 0.0;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::MatrixXd Sr = S;
            if (ridge > 0.0) {
                Sr.diagonal().array() += ridge;
            }
            Eigen::LLT<Eigen::MatrixXd> llt(Sr);
            if (llt.info() == Eigen::Success) {
                y = llt.solve(rhs);
                if (y.allFinite()) {
                    break;
                }
            }
            y.resize(0);
            ridge = ridge == 0.0 ? 1e-14 : ridge * 100.0;
        }
        if (y.size() == 0) {
            return false;
        }
        const Eigen::VectorXd d = D.asDiagonal() * y;
        for (std::size_t k = 0; k < r_.n; ++k) {
            dx[k] = d(static_cast<Eigen::Index>(k));
        }
        return true;
    }

    // barrier-objective change for step alpha, computed from differences
    double change(double alpha, const std::vector<double>& x, const std::vector<double>& dx) {
        double df = alpha * dot(r_.c, dx);
        if (r_.has_exp) {
            const auto m = static_cast<std::int64_t>(da_.size());
            const double k = r_.kappa * alpha;
#pragma omp parallel for schedule(static)
            for (std::int64_t i = 0; i < m; ++i) {
                const auto iu = static_cast<std::size_t>(i);
                work_[iu] = p_[iu] > 0.0 ? p_[iu] * std::expm1(k * da_[iu]) : 0.0;
            }
            df += std::log1p(kernels::sum(work_));
        }
        double db = 0.0;
        for (std::size_t k = 0; k < slack_.size(); ++k) {
            db -= std::log1p(-alpha * ds_[k] / slack_[k]);
        }
        for (std::size_t k = 0; k < r_.n; ++k) {
            if (std::isfinite(r_.lo[k])) {
                db -= std::log1p(alpha * dx[k] / (x[k] - r_.lo[k]));
            }
            if (std::isfinite(r_.up[k])) {
                db -= std::log1p(-alpha * dx[k] / (r_.up[k] - x[k]));
            }
        }
        return t_ * df + db;
    }

    StageOutcome center(std::vector<double>& x) {
        StageOutcome out;
        std::vector<double> g(r_.n), dx(r_.n);
        std::array<double, 3> recent{kInf, kInf, kInf};
        for (int step = 0; step < s_.max_newton; ++step) {
            if (!newton_direction(x, g, dx)) {
                out.stalled = true;
                return out;
            }
            const double decrement = -dot(g, dx);
            if (!(decrement > 0.0)) {
                out.stalled = !(decrement >= 0.0);
                return out;
            }
            // At large t rounding keeps the decrement from reaching the
            // tolerance; once it stops shrinking and is already tiny relative
            // to the barrier size, the point is as centered as it gets.
            recent[static_cast<std::size_t>(step % 3)] = decrement;
            const bool plateau = step >= 3 && decrement > 0.5 * *std::min_element(recent.begin(), recent.end()) &&
                                 0.5 * decrement <= 1e-6 * static_cast<double>(std::max<std::size_t>(barrier_terms_, 1));
            // centered: take the remaining full Newton step when it is safe
            const bool last = 0.5 * decrement <= s_.newton_tolerance || plateau;
            if (r_.has_exp) {
                kernels::evaluate_rows(r_.obj, dx, da_, false);
            }
            kernels::evaluate_rows(r_.A, dx, ds_, false);
            double alpha_max = kInf;
            for (std::size_t k = 0; k < slack_.size(); ++k) {
                if (ds_[k] > 0.0) {
                    alpha_max = std::min(alpha_max, slack_[k] / ds_[k]);
                }
            }
            for (std::size_t k = 0; k < r_.n; ++k) {
                if (dx[k] < 0.0 && std::isfinite(r_.lo[k])) {
                    alpha_max = std::min(alpha_max, (x[k] - r_.lo[k]) / -dx[k]);
                }
                if (dx[k] > 0.0 && std::isfinite(r_.up[k])) {
                    alpha_max = std::min(alpha_max, (r_.up[k] - x[k]) / dx[k]);
                }
            }
            if (last) {
                if (alpha_max > 1.0 && std::isfinite(change(1.0, x, dx))) {
                    for (std::size_t k = 0; k < r_.n; ++k) {
                        x[k] += dx[k];
                    }
                    refresh_slacks(x);
                }
                return out;
            }
            double alpha = std::min(1.0, 0.99 * alpha_max);
            bool accepted = false;
            for (int bt = 0; bt < 80 && alpha > 0.0; ++bt) {
                const double df = change(alpha, x, dx);
                if (std::isfinite(df) && df <= -s_.sufficient_decrease * alpha * decrement) {
                    accepted = true;
                    break;
                }
                alpha *= s_.backtrack;
            }
            ++out.steps;
            if (!accepted) {
                out.stalled = true;
                return out;
            }
            double moved = 0.0;
            for (std::size_t k = 0; k < r_.n; ++k) {
                const double before = x[k];
                x[k] += alpha * dx[k];
                if (std::isfinite(r_.lo[k]) && !(x[k] > r_.lo[k])) {
                    x[k] = before;  // rounding pushed onto the bound
                }
                if (std::isfinite(r_.up[k]) && !(x[k] < r_.up[k])) {
                    x[k] = before;
                }
                moved = std::max(moved, std::abs(x[k] - before) / (1.0 + std::abs(before)));
            }
            out.last_step = alpha;
            refresh_slacks(x);
            if (stop && stop(x)) {
                out.stop = true;
                return out;
            }
            if (merit(x) < s_.objective_floor) {
                out.unbounded = true;
                return out;
            }
            if (moved < 1e-17) {
                out.stalled = true;
                return out;
            }
        }
        return out;
    }

    const Reduced& r_;
    const SolveSettings& s_;
    std::size_t barrier_terms_ = 0;
    double t_ = 1.0;
    double lse_ = 0.0;
    std::vector<double> snapshot_;
    double snapshot_t_ = 1.0;
    std::vector<double> a_, p_, da_, work_, slack_, ds_, inv_, pbar_;
};

// For linear objectives: project the barrier point onto the face spanned by
// the constraints that are numerically active (slack below its multiplier),
// keeping the projection only when it stays feasible and does not cost more.
void polish_linear(const Reduced& r, std::vector<double>& x, double t) {
    if (r.has_exp || r.n == 0) {
        return;
    }
    const double threshold = 1.0 / std::sqrt(t);
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<double> slack(r.A.rows());
    kernels::evaluate_rows(r.A, x, slack);
    for (std::size_t k = 0; k < slack.size(); ++k) {
        if (-slack[k] < threshold) {
            std::vector<double> dense(r.n, 0.0);
            auto cols = r.A.row_cols(k);
            auto vals = r.A.row_vals(k);
            for (std::size_t q = 0; q < cols.size(); ++q) {
                dense[static_cast<std::size_t>(cols[q])] = vals[q];
            }
            rows.push_back(std::move(dense));
            rhs.push_back(-r.A.offset(k));
        }
    }
    for (std::size_t k = 0; k < r.n; ++k) {
        for (int side = 0; side < 2; ++side) {
            const double bound = side == 0 ? r.lo[k] : r.up[k];
            if (std::isfinite(bound) && std::abs(x[k] - bound) < threshold) {
                std::vector<double> dense(r.n, 0.0);
                dense[k] = 1.0;
                rows.push_back(std::move(dense));
                rhs.push_back(bound);
            }
        }
    }
    if (rows.empty()) {
        return;
    }
    const auto m = static_cast<Eigen::Index>(rows.size());
    const auto n = static_cast<Eigen::Index>(r.n);
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd res(m);
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            A(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        }
        res(i) = rhs[static_cast<std::size_t>(i)];
    }
    res -= A * xv;
    const Eigen::VectorXd step = A.completeOrthogonalDecomposition().solve(res);
    if (!step.allFinite()) {
        return;
    }
    std::vector<double> y(r.n);
    for (std::size_t k = 0; k < r.n; ++k) {
        y[k] = x[k] + step(static_cast<Eigen::Index>(k));
    }
    const double tol = 1e-12;
    for (std::size_t k = 0; k < r.n; ++k) {
        const double scale = 1.0 + std::abs(y[k]);
        if (y[k] < r.lo[k] - tol * scale || y[k] > r.up[k] + tol * scale) {
            return;
        }
        y[k] = std::clamp(y[k], r.lo[k], r.up[k]);
    }
    kernels::evaluate_rows(r.A, y, slack);
    for (std::size_t k = 0; k < slack.size(); ++k) {
        if (slack[k] > tol * (1.0 + std::abs(r.A.offset(k)))) {
            return;
        }
    }
    const double before = dot(r.c, x);
    const double after = dot(r.c, y);
    if (after <= before + tol * (1.0 + std::abs(before))) {
        x = std::move(y);
    }
}

// Multipliers 1/(t * slack) are read at `xm`, a centered point from a stage
// where the slacks are still well above rounding level of x.
Solution finish(const ConvexProgram& program, const Reduced& r, const std::vector<double>& xr, SolveStatus status,
                Solution sol, double t, const std::vector<double>& xm) {
    sol.status = status;
    sol.x = r.base;
    for (std::size_t k = 0; k < r.n; ++k) {
        sol.x[static_cast<std::size_t>(r.free[k])] = xr[k];
    }
    const auto vg = objective_and_gradient(program, sol.x);
    sol.objective = program.exp_objective ? vg.log_exp_sum + dot(program.linear, sol.x) : vg.value;
    sol.multipliers.assign(program.inequalities.rows(), 0.0);
    std::vector<double> slack(r.A.rows());
    kernels::evaluate_rows(r.A, xm, slack);
    for (std::size_t k = 0; k < slack.size(); ++k) {
        sol.multipliers[static_cast<std::size_t>(r.row_orig[k])] = r.row_scale[k] / (t * -slack[k]);
    }
    sol.lower_multipliers.assign(program.num_variables, 0.0);
    sol.upper_multipliers.assign(program.num_variables, 0.0);
    for (std::size_t k = 0; k < r.n; ++k) {
        const auto j = static_cast<std::size_t>(r.free[k]);
        if (std::isfinite(r.lo[k])) {
            sol.lower_multipliers[j] = 1.0 / (t * (xm[k] - r.lo[k]));
        }
        if (std::isfinite(r.up[k])) {
            sol.upper_multipliers[j] = 1.0 / (t * (r.up[k] - xm[k]));
        }
    }
    sol.max_violation = max_violation(program, sol.x);
    return sol;
}

}  // namespace

void SolveSettings::validate() const {
    const bool ok = newton_tolerance > 0.0 && newton_tolerance < 1.0 && gap_tolerance > 0.0 && gap_tolerance < 1.0 &&
                    stalled_gap_tolerance > 0.0 && barrier_reduction > 0.0 && barrier_reduction < 1.0 &&
                    max_outer > 0 && max_newton > 0 && backtrack > 0.0 && backtrack < 1.0 &&
                    sufficient_decrease > 0.0 && sufficient_decrease < 0.5 && phase_one_margin > 0.0 &&
                    phase_one_radius > 0.0;
    if (!ok) {
        throw std::invalid_argument("solver settings out of range");
    }
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal:
            return "optimal";
        case SolveStatus::infeasible:
            return "infeasible";
        case SolveStatus::unbounded:
            return "unbounded";
        case SolveStatus::max_iter:
            return "max_iter";
    }
    return "unknown";
}

ValueGradient objective_and_gradient(const ConvexProgram& program, std::span<const double> x) {
    ValueGradient out;
    out.gradient.assign(program.linear.begin(), program.linear.end());
    out.value = dot(program.linear, x);
    out.log_exp_sum = -kInf;
    if (program.exp_objective) {
        const auto& e = *program.exp_objective;
        std::vector<double> a(e.rows.rows());
        kernels::evaluate_rows(e.rows, x, a);
        out.log_exp_sum = kernels::log_sum_exp(e.masses, a, e.kappa);
        const double total = std::exp(out.log_exp_sum);
        std::vector<double> w(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            w[i] = e.masses[i] > 0.0 ? e.masses[i] * std::exp(e.kappa * a[i] - out.log_exp_sum) : 0.0;
        }
        std::vector<double> g(program.num_variables, 0.0);
        kernels::weighted_row_sum(e.rows, w, g);
        for (std::size_t j = 0; j < g.size(); ++j) {
            out.gradient[j] += total * e.kappa * g[j];
        }
        out.value += total;
    }
    return out;
}

double max_violation(const ConvexProgram& program, std::span<const double> x) {
    double worst = 0.0;
    for (std::size_t j = 0; j < program.num_variables; ++j) {
        worst = std::max({worst, program.lower[j] - x[j], x[j] - program.upper[j]});
    }
    std::vector<double> v(program.inequalities.rows());
    kernels::evaluate_rows(program.inequalities, x, v);
    for (double r : v) {
        worst = std::max(worst, r);
    }
    return worst;
}

Solution minimize(const ConvexProgram& program, const SolveSettings& settings) {
    const auto t_start = std::chrono::steady_clock::now();
    program.validate();
    settings.validate();
    std::unique_ptr<std::ofstream> trace;
    if (!settings.trace_path.empty()) {
        trace = std::make_unique<std::ofstream>(settings.trace_path);
        if (!*trace) {
            throw std::runtime_error(fmt::format("cannot write trace {}", settings.trace_path));
        }
        *trace << "iteration,objective,step,barrier_weight,newton_steps\n";
    }
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    const Reduced r = reduce(program);
    Solution sol;
    if (r.infeasible_constant_row) {
        {
            const auto x0 = interior_start(r, program.start);
            sol = finish(program, r, x0, SolveStatus::infeasible, sol, 1.0, x0);
        }
        sol.wall_seconds = elapsed();
        return sol;
    }
    std::vector<double> x = interior_start(r, program.start);

    std::vector<double> rows(r.A.rows());
    kernels::evaluate_rows(r.A, x, rows);
    const double worst = rows.empty() ? -kInf : *std::max_element(rows.begin(), rows.end());
    if (worst >= 0.0) {
        // phase one: minimize a common slack sigma over rows(x) <= sigma
        Reduced p1;
        p1.n = r.n + 1;
        p1.lo = r.lo;
        p1.up = r.up;
        for (std::size_t k = 0; k < r.n; ++k) {
            const double radius = settings.phase_one_radius * std::max(1.0, std::abs(x[k]));
            if (!std::isfinite(p1.lo[k])) {
                p1.lo[k] = x[k] - radius;
            }
            if (!std::isfinite(p1.up[k])) {
                p1.up[k] = x[k] + radius;
            }
        }
        p1.lo.push_back(-1.0);
        p1.up.push_back(kInf);
        p1.c.assign(p1.n, 0.0);
        p1.c.back() = 1.0;
        p1.A = r.A.with_extra_column(-1.0);
        std::vector<double> y = x;
        y.push_back(worst + 1.0);
        SolveSettings s1 = settings;
        s1.objective_floor = -kInf;
        BarrierMethod phase1(p1, s1);
        const double margin = settings.phase_one_margin;
        phase1.stop = [margin](const std::vector<double>& v) { return v.back() <= -margin; };
        Solution scratch;
        phase1.run(y, scratch, nullptr);
        sol.newton_steps += scratch.newton_steps;
        y.pop_back();
        kernels::evaluate_rows(r.A, y, rows);
        const double now = rows.empty() ? -kInf : *std::max_element(rows.begin(), rows.end());
        if (!(now < 0.0)) {
            sol = finish(program, r, y, SolveStatus::infeasible, sol, 1.0, y);
            sol.wall_seconds = elapsed();
            return sol;
        }
        x = std::move(y);
    }

    BarrierMethod method(r, settings);
    const SolveStatus status = method.run(x, sol, trace.get());
    const double t_final = method.weight();
    if (status == SolveStatus::optimal) {
        polish_linear(r, x, t_final);
    }
    const bool snapped = !method.snapshot().empty();
    sol = finish(program, r, x, status, sol, snapped ? method.snapshot_weight() : t_final,
                 snapped ? method.snapshot() : x);
    sol.wall_seconds = elapsed();
    return sol;
}

Solution solve_lp(const ConvexProgram& program, const SolveSettings& settings) {
    if (program.exp_objective) {
        throw std::invalid_argument("solve_lp expects a linear objective");
    }
    return minimize(program, settings);
}

}  // namespace semistatic
