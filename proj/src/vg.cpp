#include "semistatic/vg.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <fmt/format.h>

namespace semistatic {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

// Log of the mixture integrand in s = log g, including the ds Jacobian.
struct MixtureIntegrand {
    double theta, sigma2, nu, a, u, log_norm_gamma;

    [[nodiscard]] double operator()(double s) const {
        const double g = std::exp(s);
        const double d = u - theta * g;
        const double log_normal = -0.5 * (kLogTwoPi + std::log(sigma2) + s) - d * d / (2.0 * sigma2 * g);
        return log_normal + (a - 1.0) * s - g / nu - log_norm_gamma + s;
    }

    [[nodiscard]] double slope(double s) const {
        const double g = std::exp(s);
        return -0.5 + (u * u / g - theta * theta * g) / (2.0 * sigma2) + a - g / nu;
    }
};

double bisect_decreasing(const auto& f, double lo, double hi, double target) {
    // f decreasing on [lo, hi]; returns s with f(s) ~ target.
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double bisect_increasing(const auto& f, double lo, double hi, double target) {
    return bisect_decreasing([&](double s) { return -f(s); }, lo, hi, -target);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void simulate_one(const VGParams& params, std::uint64_t seed, std::size_t k, double* out) {
    std::mt19937_64 engine(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(k))));
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    double level = params.spot;
    for (int t = 1; t <= params.periods(); ++t) {
        const double dt = params.period_length(t);
        boost::random::gamma_distribution<double> gamma(dt / params.nu, params.nu);
        const double g = gamma(engine);
        const double z = normal(engine);
        level *= std::exp(params.theta * g + params.sigma * std::sqrt(g) * z);
        out[t - 1] = level;
    }
}

}  // namespace

void VGParams::validate() const {
    if (!(sigma > 0.0) || !(nu > 0.0) || !(spot > 0.0) || !std::isfinite(theta)) {
        throw std::invalid_argument("VG parameters need sigma > 0, nu > 0, spot > 0, finite theta");
    }
    if (horizons.empty()) {
        throw std::invalid_argument("at least one horizon is required");
    }
    double prev = 0.0;
    for (double h : horizons) {
        if (!(h > prev)) {
            throw std::invalid_argument("horizons must be positive and strictly increasing");
        }
        prev = h;
    }
}

double VGParams::period_length(int t) const {
    if (t < 1 || t > periods()) {
        throw std::out_of_range(fmt::format("period {} outside 1..{}", t, periods()));
    }
    const auto i = static_cast<std::size_t>(t - 1);
    return t == 1 ? horizons[0] : horizons[i] - horizons[i - 1];
}

double vg_density_mixture(const VGParams& params, double dt, double u) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dt must be positive");
    }
    const double a = dt / params.nu;
    const MixtureIntegrand L{params.theta,
                             params.sigma * params.sigma,
                             params.nu,
                             a,
                             u,
                             std::lgamma(a) + a * std::log(params.nu)};

    double s_lo = -700.0;
    double s_hi = 50.0;
    double mode = s_lo;
    if (L.slope(s_lo) > 0.0) {
        mode = L.slope(s_hi) < 0.0 ? bisect_decreasing([&](double s) { return L.slope(s); }, s_lo, s_hi, 0.0)
                                   : s_hi;
    }
    const double peak = L(mode);
    if (!std::isfinite(peak)) {
        return mode == s_lo ? std::numeric_limits<double>::infinity() : 0.0;
    }
    const double cut = peak - 50.0;
    const double left = L(s_lo) < cut ? bisect_increasing(L, s_lo, mode, cut) : s_lo;
    const double right = L(s_hi) < cut ? bisect_decreasing(L, mode, s_hi, cut) : s_hi;

    auto integrand = [&](double s) { return std::exp(L(s) - peak); };
    double error = 0.0;
    double value = 0.0;
    if (mode > left) {
        value += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, left, mode, 15, 1e-14,
                                                                               &error);
    }
    if (right > mode) {
        value += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, mode, right, 15, 1e-14,
                                                                               &error);
    }
    return value * std::exp(peak);
}

double vg_density_closed(const VGParams& params, double dt, double u) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dt must be positive");
    }
    const double a = dt / params.nu;
    const double v = a - 0.5;
    const double sigma2 = params.sigma * params.sigma;
    const double c = 2.0 * sigma2 / params.nu + params.theta * params.theta;
    const double log_prefix = std::log(2.0) + params.theta * u / sigma2 - a * std::log(params.nu) -
                              0.5 * kLogTwoPi - std::log(params.sigma) - std::lgamma(a);
    if (u == 0.0) {
        if (v <= 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        // small-argument limit of |u|^v K_v(|u| sqrt(c) / sigma^2)
        return std::exp(log_prefix + std::lgamma(v) - std::log(2.0) + v * std::log(2.0 * sigma2 / c));
    }
    const double z = std::abs(u) * std::sqrt(c) / sigma2;
    double bessel = 0.0;
    try {
        bessel = boost::math::cyl_bessel_k(v, z);
    } catch (const std::exception&) {
        return vg_density_mixture(params, dt, u);
    }
    if (!std::isfinite(bessel) || bessel < 1e-290) {
        return vg_density_mixture(params, dt, u);
    }
    const double value = std::exp(log_prefix + 0.5 * v * std::log(u * u / c) + std::log(bessel));
    if (!std::isfinite(value)) {
        return vg_density_mixture(params, dt, u);
    }
    return value;
}

double vg_log_increment_density(const VGParams& params, double dt, double u) {
    const double value = vg_density_closed(params, dt, u);
    if (std::isnan(value)) {
        throw std::runtime_error(fmt::format("VG density evaluation failed at u={}", u));
    }
    return value;
}

LogReturnMoments vg_moments(const VGParams& params, double dt) {
    return {params.theta * dt, (params.sigma * params.sigma + params.theta * params.theta * params.nu) * dt};
}

double transition_density(const VGParams& params, int t, double previous, double x) {
    if (!(x > 0.0) || !(previous > 0.0)) {
        throw std::invalid_argument("index levels must be positive");
    }
    return vg_log_increment_density(params, params.period_length(t), std::log(x / previous)) / x;
}

double path_density(const VGParams& params, std::span<const double> path) {
    if (path.size() != static_cast<std::size_t>(params.periods())) {
        throw std::invalid_argument("path length does not match the number of periods");
    }
    double density = 1.0;
    double previous = params.spot;
    for (int t = 1; t <= params.periods(); ++t) {
        const double x = path[static_cast<std::size_t>(t - 1)];
        density *= transition_density(params, t, previous, x);
        previous = x;
    }
    return density;
}

std::vector<double> simulate_paths(const VGParams& params, std::size_t n, std::uint64_t seed) {
    params.validate();
    const auto T = static_cast<std::size_t>(params.periods());
    std::vector<double> out(n * T);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < count; ++k) {
        simulate_one(params, seed, static_cast<std::size_t>(k), out.data() + static_cast<std::size_t>(k) * T);
    }
    return out;
}

std::vector<double> simulate_paths_serial(const VGParams& params, std::size_t n, std::uint64_t seed) {
    params.validate();
    const auto T = static_cast<std::size_t>(params.periods());
    std::vector<double> out(n * T);
    for (std::size_t k = 0; k < n; ++k) {
        simulate_one(params, seed, k, out.data() + k * T);
    }
    return out;
}

}  // namespace semistatic
