#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <omp.h>

#include "semistatic/vg.hpp"

using namespace semistatic;

namespace {

double normal_pdf(double u, double var) { return std::exp(-0.5 * u * u / var) / std::sqrt(2.0 * std::numbers::pi * var); }

// Mixture density on an even number of uniform panels over [-half, half].
struct Table {
    double lo = 0.0;
    double h = 0.0;
    std::vector<double> f;

    [[nodiscard]] double u(std::size_t i) const { return lo + static_cast<double>(i) * h; }

    // Simpson sum of g(u) f(u)
    template <class G>
    [[nodiscard]] double integrate(G g) const {
        double s = 0.0;
        for (std::size_t i = 0; i + 2 < f.size(); i += 2) {
            s += g(u(i)) * f[i] + 4.0 * g(u(i + 1)) * f[i + 1] + g(u(i + 2)) * f[i + 2];
        }
        return s * h / 3.0;
    }
};

Table tabulate(const VGParams& p, double dt, double half, int panels) {
    Table t;
    t.lo = -half;
    t.h = 2.0 * half / panels;
    for (int i = 0; i <= panels; ++i) {
        t.f.push_back(vg_density_mixture(p, dt, t.u(static_cast<std::size_t>(i))));
    }
    return t;
}

}  // namespace

TEST_CASE("density is symmetric when theta is zero") {
    VGParams p;
    for (double dt : {1.0 / 52, 1.0 / 12, 0.25}) {
        for (double u : {0.001, 0.01, 0.03, 0.08, 0.2}) {
            CHECK(vg_log_increment_density(p, dt, u) == doctest::Approx(vg_log_increment_density(p, dt, -u)).epsilon(1e-12));
        }
    }
    p.theta = -0.2;
    CHECK(vg_log_increment_density(p, 1.0 / 12, 0.05) != doctest::Approx(vg_log_increment_density(p, 1.0 / 12, -0.05)));
}

TEST_CASE("density integrates to one") {
    const VGParams p;
    const double dt = 1.0 / 12;
    const auto t = tabulate(p, dt, 16 * p.sigma * std::sqrt(dt), 1600);
    CHECK(std::abs(t.integrate([](double) { return 1.0; }) - 1.0) < 1e-6);
    // the sampled range holds all but a negligible tail
    CHECK(t.f.front() < 1e-12);
    CHECK(t.f.back() < 1e-12);
}

TEST_CASE("small nu approaches the normal density") {
    VGParams p;
    p.nu = 1e-10;
    const double dt = 1.0 / 12;
    const double ref = normal_pdf(0.0, p.sigma * p.sigma * dt);
    CHECK(std::abs(vg_density_mixture(p, dt, 0.0) / ref - 1.0) < 1e-4);
    CHECK(std::abs(vg_log_increment_density(p, dt, 0.0) / ref - 1.0) < 1e-4);
}

TEST_CASE("closed form agrees with the mixture integral") {
    for (double theta : {0.0, -0.14, 0.1}) {
        VGParams p;
        p.theta = theta;
        for (double dt : {31.0 / 365, 28.0 / 365, 0.5}) {
            for (double u = -0.3; u <= 0.3; u += 0.0125) {
                const double mix = vg_density_mixture(p, dt, u);
                const double closed = vg_density_closed(p, dt, u);
                CHECK(std::abs(closed - mix) <= 1e-8 * std::max(1.0, mix));
            }
        }
    }
}

TEST_CASE("moments of the mixture match the moment formula") {
    VGParams p;
    p.theta = -0.1;
    const double dt = 31.0 / 365;
    const auto t = tabulate(p, dt, 16 * p.sigma * std::sqrt(dt), 1600);
    const double m1 = t.integrate([](double u) { return u; });
    const double m2 = t.integrate([&](double u) { return (u - m1) * (u - m1); });
    const auto m = vg_moments(p, dt);
    CHECK(m1 == doctest::Approx(m.mean).epsilon(1e-6));
    CHECK(m2 == doctest::Approx(m.variance).epsilon(1e-6));
}

TEST_CASE("path density is the Markov product of transitions") {
    VGParams one;
    one.horizons = {31.0 / 365};
    const std::vector<double> x1{2400.0};
    CHECK(path_density(one, x1) == transition_density(one, 1, one.spot, 2400.0));

    const VGParams two;
    const std::vector<double> x{2400.0, 2300.0};
    CHECK(path_density(two, x) ==
          doctest::Approx(transition_density(two, 1, two.spot, 2400.0) * transition_density(two, 2, 2400.0, 2300.0)));
    // in log coordinates the transition is symmetric when theta is zero
    const double u = 0.04;
    const double up = transition_density(two, 2, 2400.0, 2400.0 * std::exp(u)) * 2400.0 * std::exp(u);
    const double down = transition_density(two, 2, 2400.0, 2400.0 * std::exp(-u)) * 2400.0 * std::exp(-u);
    CHECK(up == doctest::Approx(down).epsilon(1e-12));
    CHECK_THROWS(transition_density(two, 1, two.spot, 0.0));
}

TEST_CASE("simulation is deterministic and thread independent") {
    const VGParams p;
    const auto a = simulate_paths(p, 5000, 7);
    const auto b = simulate_paths(p, 5000, 7);
    CHECK(a == b);
    const auto serial = simulate_paths_serial(p, 5000, 7);
    CHECK(a == serial);
    omp_set_num_threads(3);
    const auto three = simulate_paths(p, 5000, 7);
    omp_set_num_threads(1);
    const auto single = simulate_paths(p, 5000, 7);
    CHECK(three == single);
    CHECK(simulate_paths(p, 10, 8) != simulate_paths(p, 10, 7));
    // stream k does not depend on n
    const auto few = simulate_paths(p, 10, 7);
    CHECK(std::equal(few.begin(), few.end(), a.begin()));
}

TEST_CASE("simulated log returns match the model moments and distribution") {
    const VGParams p;
    const std::size_t n = 1000000;
    const auto paths = simulate_paths(p, n, 2024);
    const double tau = p.horizons[0];
    std::vector<double> u(n);
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        u[k] = std::log(paths[2 * k] / p.spot);
        mean += u[k];
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : u) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(n - 1);
    const double sd = p.sigma * std::sqrt(tau);
    CHECK(std::abs(mean) <= 3.0 * sd / 1000.0);
    CHECK(std::abs(var / (sd * sd) - 1.0) < 0.01);

    // Kolmogorov distance against the integrated density
    std::sort(u.begin(), u.end());
    const auto t = tabulate(p, tau, 16 * sd, 1600);
    std::vector<double> cdf{0.0};  // at the even table nodes
    for (std::size_t i = 0; i + 2 < t.f.size(); i += 2) {
        cdf.push_back(cdf.back() + (t.f[i] + 4.0 * t.f[i + 1] + t.f[i + 2]) * t.h / 3.0);
    }
    const double step = 2.0 * t.h;
    const auto last = static_cast<int>(cdf.size()) - 2;
    double ks = 0.0;
    for (std::size_t k = 0; k < n; k += 97) {
        const double pos = (u[k] - t.lo) / step;
        const int i = std::clamp(static_cast<int>(pos), 0, last);
        const double frac = std::clamp(pos - i, 0.0, 1.0);
        const double model = cdf[i] + frac * (cdf[i + 1] - cdf[i]);
        const double below = static_cast<double>(k) / static_cast<double>(n);
        const double above = static_cast<double>(k + 1) / static_cast<double>(n);
        ks = std::max({ks, std::abs(model - below), std::abs(model - above)});
    }
    CHECK(ks < 0.005);
}

TEST_CASE("parameter validation") {
    VGParams p;
    p.sigma = 0.0;
    CHECK_THROWS(p.validate());
    p = VGParams{};
    p.horizons = {0.2, 0.1};
    CHECK_THROWS(p.validate());
    p = VGParams{};
    CHECK(p.period_length(2) == doctest::Approx(28.0 / 365));
    CHECK_THROWS(p.period_length(3));
}
