#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <omp.h>

#include "semistatic/kernels.hpp"

using namespace semistatic;
using kernels::SparseRows;

namespace {

struct Fixture {
    std::vector<std::vector<double>> dense;  // rows x cols
    std::vector<double> offsets;
    SparseRows rows;
};

Fixture random_rows(std::size_t m, std::size_t n, double density, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> p(0.0, 1.0);
    Fixture f;
    f.rows = SparseRows(n);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> row(n, 0.0);
        std::vector<int> cols;
        std::vector<double> vals;
        for (std::size_t j = 0; j < n; ++j) {
            if (p(rng) < density) {
                row[j] = u(rng);
                cols.push_back(static_cast<int>(j));
                vals.push_back(row[j]);
            }
        }
        f.dense.push_back(row);
        f.offsets.push_back(u(rng));
        f.rows.add_row(cols, vals, f.offsets.back());
    }
    f.rows.finalize();
    return f;
}

std::vector<double> random_vector(std::size_t n, unsigned seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = u(rng);
    }
    return v;
}

}  // namespace

TEST_CASE("row evaluation matches a dense product") {
    auto f = random_rows(500, 40, 0.3, 1);
    const auto x = random_vector(40, 2, -2, 2);
    std::vector<double> out(500);
    kernels::evaluate_rows(f.rows, x, out);
    for (std::size_t i = 0; i < 500; ++i) {
        double s = f.offsets[i];
        for (std::size_t j = 0; j < 40; ++j) {
            s += f.dense[i][j] * x[j];
        }
        CHECK(out[i] == doctest::Approx(s).epsilon(1e-13));
    }
    kernels::evaluate_rows(f.rows, x, out, false);
    double s0 = 0.0;
    for (std::size_t j = 0; j < 40; ++j) {
        s0 += f.dense[0][j] * x[j];
    }
    CHECK(out[0] == doctest::Approx(s0).epsilon(1e-13));
}

TEST_CASE("weighted row sum and Gram match dense formulas") {
    auto f = random_rows(300, 12, 0.5, 3);
    const auto w = random_vector(300, 4, 0, 1);
    std::vector<double> g(12);
    kernels::weighted_row_sum(f.rows, w, g);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(12, 12);
    kernels::weighted_gram(f.rows, w, H);
    for (std::size_t j = 0; j < 12; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < 300; ++i) {
            s += w[i] * f.dense[i][j];
        }
        CHECK(g[j] == doctest::Approx(s).epsilon(1e-12));
        for (std::size_t k = j; k < 12; ++k) {
            double h = 0.0;
            for (std::size_t i = 0; i < 300; ++i) {
                h += w[i] * f.dense[i][j] * f.dense[i][k];
            }
            CHECK(H(static_cast<int>(j), static_cast<int>(k)) == doctest::Approx(h).epsilon(1e-12));
        }
    }
}

TEST_CASE("log-sum-exp is stable and skips zero masses") {
    std::vector<double> m{0.25, 0.75, 0.0};
    std::vector<double> a{1000.0, 1001.0, 1e308};
    const double ref = 1001.0 + std::log(0.25 * std::exp(-1.0) + 0.75);
    CHECK(kernels::log_sum_exp(m, a, 1.0) == doctest::Approx(ref).epsilon(1e-15));
    CHECK(kernels::log_sum_exp_serial(m, a, 1.0) == doctest::Approx(ref).epsilon(1e-15));
}

TEST_CASE("duplicate columns are summed and zeros dropped") {
    SparseRows r(3);
    r.add_row(std::vector<int>{0, 2, 0, 1}, std::vector<double>{1.0, 2.0, 3.0, 0.0}, 0.5);
    r.finalize();
    CHECK(r.nonzeros() == 2);
    std::vector<double> out(1);
    kernels::evaluate_rows(r, std::vector<double>{1.0, 1.0, 1.0}, out);
    CHECK(out[0] == 6.5);
}

TEST_CASE("parallel kernels equal their serial references bitwise") {
    auto f = random_rows(20011, 64, 0.2, 5);
    const auto x = random_vector(64, 6, -1, 1);
    const auto w = random_vector(20011, 7, 0, 1);
    for (int threads : {1, 2, 3, 8}) {
        omp_set_num_threads(threads);
        std::vector<double> a(20011), b(20011);
        kernels::evaluate_rows(f.rows, x, a);
        kernels::evaluate_rows_serial(f.rows, x, b);
        CHECK(a == b);

        std::vector<double> g1(64), g2(64);
        kernels::weighted_row_sum(f.rows, w, g1);
        kernels::weighted_row_sum_serial(f.rows, w, g2);
        CHECK(g1 == g2);

        Eigen::MatrixXd H1 = Eigen::MatrixXd::Zero(64, 64);
        Eigen::MatrixXd H2 = Eigen::MatrixXd::Zero(64, 64);
        kernels::weighted_gram(f.rows, w, H1);
        kernels::weighted_gram_serial(f.rows, w, H2);
        CHECK(H1 == H2);

    }
}

TEST_CASE("scalar reductions are thread independent and match the plain loop to rounding") {
    const auto a = random_vector(100003, 11, -1, 1);
    const auto w = random_vector(100003, 12, 0, 1);
    omp_set_num_threads(1);
    const double s1 = kernels::sum(a);
    const double l1 = kernels::log_sum_exp(w, a, 0.7);
    for (int threads : {2, 3, 8}) {
        omp_set_num_threads(threads);
        CHECK(kernels::sum(a) == s1);
        CHECK(kernels::log_sum_exp(w, a, 0.7) == l1);
    }
    // the chunked order differs from the sequential one only by rounding
    CHECK(std::abs(s1 - kernels::sum_serial(a)) < 1e-10);
    CHECK(l1 == doctest::Approx(kernels::log_sum_exp_serial(w, a, 0.7)).epsilon(1e-14));
}

TEST_CASE("restricting columns folds fixed values into the offsets") {
    auto f = random_rows(50, 6, 0.8, 9);
    const auto x = random_vector(6, 10, -1, 1);
    const std::vector<int> keep{0, 2, 5};
    const auto r = f.rows.restrict_columns(keep, x);
    std::vector<double> full(50), part(50);
    kernels::evaluate_rows(f.rows, x, full);
    kernels::evaluate_rows(r, std::vector<double>{x[0], x[2], x[5]}, part);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(part[i] == doctest::Approx(full[i]).epsilon(1e-13));
    }
    const auto e = f.rows.with_extra_column(-1.0);
    CHECK(e.columns() == 7);
    auto xe = x;
    xe.push_back(2.0);
    std::vector<double> ext(50);
    kernels::evaluate_rows(e, xe, ext);
    CHECK(ext[3] == doctest::Approx(full[3] - 2.0).epsilon(1e-13));
}
