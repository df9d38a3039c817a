#pragma once

#include <functional>
#include <vector>

#include "mfgnet/fields.hpp"

namespace mfgnet {

enum class Transport { upwind, centered };

struct FPOptions {
    double theta = 1.0;  // 1: backward Euler, 0.5: Crank-Nicolson
    Transport transport = Transport::upwind;
    bool explicit_transport = false;  // diffusion implicit, transport from the previous level
};

/// Forward problem d_t m - mu d^2 m - d(b m) = 0 with reflecting boundaries.
struct FPProblem {
    Grid grid;
    /// Drift b at time t as nodal per-edge values; empty means b = 0.
    std::function<EdgeArrays(double)> drift;
    bool static_drift = true;
    Vector m0;  // jump field (latent vertex values)
};

/// Flux part A = K^T - Q_a^T M of M dm/dt + A m = 0, with velocity a = -b.
struct FPStepOperator {
    SparseMatrix flux;
    SparseMatrix diffusion;  // K^T
    SparseMatrix transport;  // Q_a^T M
    Vector mass;
};

[[nodiscard]] FPStepOperator assemble_fp(const Grid& grid, const EdgeArrays& b,
                                         Transport transport = Transport::upwind);

/// One theta step (M + theta dt A) m1 = (M - (1 - theta) dt A) m0.
[[nodiscard]] Vector step(const Vector& m, const FPStepOperator& op, double dt, double theta = 1.0);

struct FPTrajectory {
    std::vector<Vector> m;           // m[n] at t_n, n = 0..steps
    std::vector<double> mass;        // integral of m[n]
    std::vector<double> min_value;   // smallest trace of m[n]
    std::vector<double> jump;        // max jump residual of m[n]
};

[[nodiscard]] FPTrajectory solve_fp(const FPProblem& problem, const FPOptions& options = {});

/// Steps (M + dt K^T) m[n+1] = (M + dt Q[n]^T M) m[n] with prescribed generators.
[[nodiscard]] FPTrajectory solve_fp_with_generators(const Grid& grid, const Vector& m0,
                                                    const std::vector<SparseMatrix>& generators);

/// Discrete L2(0,T; H1) distance between two trajectories on the same grid.
[[nodiscard]] double stability_gap(const Grid& grid, const FPTrajectory& a, const FPTrajectory& b);

/// Nullspace of the zero-drift operator normalized to unit mass.
[[nodiscard]] Vector stationary_density(const Grid& grid);

}  // namespace mfgnet
