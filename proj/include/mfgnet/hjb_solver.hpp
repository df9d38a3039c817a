#pragma once

#include <Eigen/SparseLU>
#include <functional>
#include <vector>

#include "mfgnet/fields.hpp"
#include "mfgnet/hamiltonian.hpp"

namespace mfgnet {

enum class GradientMode {
    monotone,  // control-upwind numerical Hamiltonian, first order, comparison principle
    centered,  // centered interior and 3-point vertex gradients, second order
};

struct HJBOptions {
    GradientMode mode = GradientMode::monotone;
    bool implicit_hamiltonian = false;  // fixed-point iteration on H inside each step
    int inner_max_iterations = 200;
    double inner_tolerance = 1e-13;
};

/// Backward problem -d_t v - mu d^2 v + H(x, dv) = f, continuous at vertices with Kirchhoff
/// conditions, v(T) = vT.
struct HJBProblem {
    Grid grid;
    HamiltonianModel hamiltonian;
    /// Right-hand side at time index n as per-edge values; empty means f = 0.
    std::function<EdgeArrays(int)> f;
    Vector vT;
};

/// Discrete Hamiltonian term L_H(v) of one grid and mode, with its linearization.
class DiscreteHamiltonian {
public:
    DiscreteHamiltonian(const Grid& grid, const HamiltonianModel& model, GradientMode mode);

    /// Gradient used at every node, per edge (the selected one-sided value in monotone mode).
    [[nodiscard]] EdgeArrays gradient(const Vector& v) const;
    /// H(x, gradient) per edge.
    [[nodiscard]] EdgeArrays values(const Vector& v) const;
    /// Lumped load of values(v) against W test functions.
    [[nodiscard]] Vector load(const Vector& v) const;
    /// H_p(x, gradient) per edge, the FP drift b.
    [[nodiscard]] EdgeArrays drift(const Vector& v) const;
    /// Generator Q with d/ds load(v + s w) = -M Q w at s = 0 (the feedback velocity -H_p).
    [[nodiscard]] SparseMatrix generator(const Vector& v) const;

    [[nodiscard]] const Grid& grid() const noexcept { return *grid_; }
    [[nodiscard]] const HamiltonianModel& model() const noexcept { return *model_; }
    [[nodiscard]] GradientMode mode() const noexcept { return mode_; }

private:
    struct Branch {
        double p = 0.0;
        int dir = 0;  // -1: depends on the left difference, +1: right difference, 0: clamped
    };
    [[nodiscard]] std::vector<std::vector<Branch>> select(const Vector& v) const;

    const Grid* grid_;
    const HamiltonianModel* model_;
    GradientMode mode_;
    EdgeArrays p_min_;
};

/// Implicit diffusion operator of the backward equation (the stiffness K).
[[nodiscard]] SparseMatrix assemble_hjb_diffusion(const Grid& grid);

/// dt limit h_min / C0; throws with a suggested step count when violated.
void check_time_step(const Grid& grid, double C0);

/// (M + dt K) v[n] = M v[n+1] - dt L_H(v[n+1]) + dt L_f(f[n+1]).
class HJBStepper {
public:
    HJBStepper(const Grid& grid, const HamiltonianModel& model, const HJBOptions& options = {});
    [[nodiscard]] Vector step_back(const Vector& v_next, const EdgeArrays& f) const;
    [[nodiscard]] Vector step_back_load(const Vector& v_next, const Vector& f_load) const;
    [[nodiscard]] const DiscreteHamiltonian& hamiltonian() const noexcept { return H_; }

private:
    const Grid* grid_;
    HJBOptions options_;
    DiscreteHamiltonian H_;
    Eigen::SparseLU<SparseMatrix> lu_;
};

struct HJBTrajectory {
    std::vector<Vector> v;          // v[n] at t_n
    std::vector<Vector> kirchhoff;  // per-vertex Kirchhoff residual of v[n]
};

[[nodiscard]] HJBTrajectory solve_hjb(const HJBProblem& problem, const HJBOptions& options = {});

/// Residuals of the system satisfied by u = dv: the flux condition and the spread of
/// mu du - H(x, u) + f across the edges of each vertex. Rows are times, columns vertices.
struct GradientSystemResidual {
    Eigen::MatrixXd flux;
    Eigen::MatrixXd robin;
};

[[nodiscard]] GradientSystemResidual gradient_system_residual(
    const Grid& grid, const HamiltonianModel& model, const std::vector<Vector>& v,
    const std::function<EdgeArrays(int)>& f);

/// Integral of dv around each fundamental cycle of the network.
[[nodiscard]] std::vector<double> loop_integrals(const Grid& grid, const Vector& v);

}  // namespace mfgnet
