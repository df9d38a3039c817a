#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mfgnet/fields.hpp"

namespace mfgnet {

struct SimPosition {
    int edge = -1;
    double y = 0.0;
};

struct SimConfig {
    long paths = 100000;
    double delta = 1e-4;
    std::uint64_t seed = 1;
    int threads = 1;
    /// Velocity a(edge, y, t) of the particles, i.e. -b; empty means zero.
    std::function<double(int, double, double)> velocity;
    double velocity_bound = 0.0;  // sup |a|, used by the step-size guard
    /// Initial law as a jump field on the grid; particles start uniformly inside each dual bin.
    Vector initial_density;
    std::vector<double> times;
    bool keep_positions = false;
};

struct SimResult {
    std::vector<double> times;
    std::vector<EdgeArrays> histograms;  // per time, per edge, N_a + 1 dual bins of mass
    std::vector<std::vector<SimPosition>> positions;  // per time, per path, when requested
};

/// Euler-Maruyama paths on the edges. A step that overshoots an interior vertex by e enters
/// edge b with probability proportional to p_b / sqrt(mu_b) at depth e sqrt(mu_b / mu_a)
/// (repeated while it overshoots); boundary vertices reflect. Paths are processed in fixed
/// chunks with their own seeded streams, so results do not depend on the thread count.
[[nodiscard]] SimResult simulate(const Grid& grid, const SimConfig& cfg);

/// Largest delta accepted by the step-size guard.
[[nodiscard]] double max_time_step(const MetricNetwork& net, double velocity_bound);

/// Masses of a jump field in the dual bins used by simulate().
[[nodiscard]] EdgeArrays fp_histogram(const Grid& grid, const Vector& m);

[[nodiscard]] double total_variation(const EdgeArrays& p, const EdgeArrays& q);

/// Total variation between an empirical histogram and a FP density on the same grid.
[[nodiscard]] double compare_to_fp(const Grid& grid, const EdgeArrays& empirical, const Vector& m);

/// Two-sample Kolmogorov-Smirnov statistic and the asymptotic critical value at level alpha.
[[nodiscard]] double ks_statistic(std::vector<double> a, std::vector<double> b);
[[nodiscard]] double ks_critical_value(std::size_t n, std::size_t m, double alpha);

}  // namespace mfgnet
