#pragma once

#include <vector>

#include "mfgnet/coupling.hpp"
#include "mfgnet/fp_solver.hpp"
#include "mfgnet/hjb_solver.hpp"

namespace mfgnet {

enum class InitialGuess { zero, terminal };

struct MFGConfig {
    double omega = 0.5;
    int max_iterations = 100;
    double tolerance = 1e-8;
    /// Monotone HJB paired with the adjoint explicit-transport FP scheme.
    bool duality_pairing = true;
    GradientMode mode = GradientMode::monotone;  // used when duality_pairing is off
    InitialGuess initial_guess = InitialGuess::zero;
};

struct MFGSolution {
    std::vector<Vector> v;  // continuous fields at t_0..t_N
    std::vector<Vector> m;  // jump fields at t_0..t_N
    std::vector<double> residual_v;
    std::vector<double> residual_m;
    bool converged = false;
    int iterations = 0;
    double max_mass_drift = 0.0;
    double min_density = 0.0;
    double max_kirchhoff = 0.0;  // over t_0..t_{N-1}
};

/// A fully specified coupled problem on one grid.
struct MFGProblem {
    Grid grid;
    HamiltonianModel hamiltonian;
    CouplingOperator coupling;
    Vector m0;
    Vector vT;
};

/// The map v -> m -> v~ from the existence argument, discretized consistently.
class MFGMap {
public:
    MFGMap(const MFGProblem& problem, const MFGConfig& config);

    [[nodiscard]] FPTrajectory density(const std::vector<Vector>& v) const;
    [[nodiscard]] std::vector<EdgeArrays> cost(const std::vector<Vector>& m) const;
    [[nodiscard]] std::vector<Vector> value(const std::vector<EdgeArrays>& f) const;
    [[nodiscard]] std::vector<Vector> operator()(const std::vector<Vector>& v) const;

    [[nodiscard]] const HJBStepper& stepper() const noexcept { return stepper_; }
    [[nodiscard]] const MFGProblem& problem() const noexcept { return *problem_; }

private:
    const MFGProblem* problem_;
    MFGConfig config_;
    HJBStepper stepper_;
    PreparedCoupling coupling_;
};

/// Discrete L2(0,T; H1) norm of a trajectory difference, with continuous or jump traces.
[[nodiscard]] double trajectory_distance(const Grid& grid, const std::vector<Vector>& a,
                                         const std::vector<Vector>& b, TraceKind kind);

[[nodiscard]] MFGSolution picard_solve(const MFGProblem& problem, const MFGConfig& config);

struct DualityComponents {
    double coupling = 0.0;
    double bregman_1 = 0.0;
    double bregman_2 = 0.0;
    double total = 0.0;
};

/// Discrete uniqueness identity for two solutions on the same grid; all terms vanish when
/// they coincide, and the total vanishes for any two exact discrete solutions of the paired
/// scheme.
[[nodiscard]] DualityComponents duality_residual(const MFGProblem& problem,
                                                 const MFGSolution& s1, const MFGSolution& s2);

/// Same identity with explicit right-hand sides f_k[n] (n = 0..N) in place of V[m_k].
[[nodiscard]] DualityComponents duality_components(const Grid& grid,
                                                   const DiscreteHamiltonian& H,
                                                   const std::vector<Vector>& v1,
                                                   const std::vector<Vector>& m1,
                                                   const std::vector<EdgeArrays>& f1,
                                                   const std::vector<Vector>& v2,
                                                   const std::vector<Vector>& m2,
                                                   const std::vector<EdgeArrays>& f2);

/// Distance between v and one undamped application of the map to v.
[[nodiscard]] double fixed_point_residual(const MFGProblem& problem, const MFGSolution& s,
                                          const MFGConfig& config);

}  // namespace mfgnet
