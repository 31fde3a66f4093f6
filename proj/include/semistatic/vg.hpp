#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace semistatic {

/// Variance gamma model of the index: X_t = X_0 exp(theta G_t + sigma W(G_t)),
/// G a gamma subordinator with unit mean rate and variance rate nu.
struct VGParams {
    double theta = 0.0;
    double sigma = 0.1206;
    double nu = 0.0031;
    double spot = 2360.0;
    std::vector<double> horizons{31.0 / 365.0, 59.0 / 365.0};

    void validate() const;
    [[nodiscard]] int periods() const { return static_cast<int>(horizons.size()); }
    /// Length of period t in years (t = 1..T).
    [[nodiscard]] double period_length(int t) const;
};

/// Gamma mixture of normals integrated numerically in log-time. Reference
/// implementation.
double vg_density_mixture(const VGParams& params, double dt, double u);

/// Bessel-function closed form; falls back to the mixture integral when the
/// Bessel evaluation leaves floating-point range.
double vg_density_closed(const VGParams& params, double dt, double u);

/// Density of log(X_{t+dt} / X_t).
double vg_log_increment_density(const VGParams& params, double dt, double u);

struct LogReturnMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Closed-form first two moments of the log increment over dt.
LogReturnMoments vg_moments(const VGParams& params, double dt);

/// Density of the level x at the end of period t given level `previous` at its
/// start.
double transition_density(const VGParams& params, int t, double previous, double x);

/// Joint density of (X_1..X_T); path.size() must equal the number of periods.
double path_density(const VGParams& params, std::span<const double> path);

/// Row-major n x T matrix of simulated levels. Path k draws from its own
/// generator seeded from (seed, k), so results do not depend on threading.
std::vector<double> simulate_paths(const VGParams& params, std::size_t n, std::uint64_t seed);

/// Serial loop over the same per-path streams; kept as the test reference.
std::vector<double> simulate_paths_serial(const VGParams& params, std::size_t n, std::uint64_t seed);

}  // namespace semistatic
