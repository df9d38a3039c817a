#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "mfgnet/network.hpp"

namespace mfgnet {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Per-edge nodal values y_0..y_N, endpoint entries are the one-sided traces of that edge.
using EdgeArrays = std::vector<Vector>;

/// Uniform per-edge space grid plus a uniform time grid.
///
/// Unknowns are laid out as one entry per vertex (index = vertex id) followed by the interior
/// nodes of each edge in edge order. Continuous fields store the shared vertex value there;
/// jump fields store the latent c_i with trace gamma_{i,a} c_i on edge a.
class Grid {
public:
    Grid(std::shared_ptr<const MetricNetwork> net, std::vector<int> cells, double T = 1.0,
         int steps = 1);

    /// N_a = max(2, round(length / h)) on every edge.
    static Grid with_spacing(std::shared_ptr<const MetricNetwork> net, double h, double T = 1.0,
                             int steps = 1);

    [[nodiscard]] const MetricNetwork& network() const noexcept { return *net_; }
    [[nodiscard]] const std::shared_ptr<const MetricNetwork>& network_ptr() const noexcept {
        return net_;
    }
    [[nodiscard]] int edge_count() const noexcept { return static_cast<int>(cells_.size()); }
    [[nodiscard]] int cells(int a) const { return cells_.at(a); }
    [[nodiscard]] const std::vector<int>& cells() const noexcept { return cells_; }
    [[nodiscard]] double h(int a) const { return h_.at(a); }
    [[nodiscard]] double h_min() const;
    [[nodiscard]] double y(int a, int j) const { return j * h_.at(a); }

    [[nodiscard]] double T() const noexcept { return T_; }
    [[nodiscard]] int steps() const noexcept { return steps_; }
    [[nodiscard]] double dt() const noexcept { return T_ / steps_; }
    [[nodiscard]] double time(int n) const noexcept { return n * dt(); }
    [[nodiscard]] Grid with_time(double T, int steps) const;

    [[nodiscard]] int dof_count() const noexcept { return dofs_; }
    [[nodiscard]] int interior_offset(int a) const { return offset_.at(a); }
    /// Unknown holding node j of edge a (a vertex id at j = 0 or j = N_a).
    [[nodiscard]] int node_dof(int a, int j) const;

    /// Lumped mass pairing V with W: h at interior nodes, sum_a gamma_{i,a} h_a / 2 at vertices.
    [[nodiscard]] const Vector& dual_mass() const noexcept { return dual_mass_; }
    /// Trapezoid weights for continuous fields: h at interior nodes, sum_a h_a / 2 at vertices.
    [[nodiscard]] const Vector& trapezoid_weights() const noexcept { return trapezoid_; }

private:
    std::shared_ptr<const MetricNetwork> net_;
    std::vector<int> cells_;
    std::vector<double> h_;
    std::vector<int> offset_;
    double T_;
    int steps_;
    int dofs_ = 0;
    Vector dual_mass_;
    Vector trapezoid_;
};

enum class TraceKind { continuous, jump };

/// Per-edge traces of a dof vector.
[[nodiscard]] EdgeArrays traces(const Grid& grid, const Vector& dofs, TraceKind kind);

/// Continuous field from per-edge samples; vertex values are taken from the first incident edge.
[[nodiscard]] Vector sample_continuous(const Grid& grid,
                                       const std::function<double(int, double)>& fn);
[[nodiscard]] EdgeArrays sample_edges(const Grid& grid,
                                      const std::function<double(int, double)>& fn);

/// Jump field matching `fn` at interior nodes. The vertex latent value keeps the trapezoid
/// mass of the sampled vertex traces, so it is exact when those traces are proportional to gamma.
[[nodiscard]] Vector sample_jump(const Grid& grid, const std::function<double(int, double)>& fn);

[[nodiscard]] double integrate(const Grid& grid, const EdgeArrays& f);
[[nodiscard]] double integrate(const Grid& grid, const Vector& dofs, TraceKind kind);

/// Nodal derivative in edge coordinates: centered inside, 3-point one-sided at both ends.
[[nodiscard]] EdgeArrays derivative(const Grid& grid, const EdgeArrays& f);

/// sum_a gamma_{i,a} mu_a n_{i,a} d_y v at each vertex, with 3-point one-sided derivatives.
[[nodiscard]] Vector kirchhoff_residual(const Grid& grid, const Vector& v);

/// max over incident pairs of |m_a / gamma_a - m_b / gamma_b| at each vertex.
[[nodiscard]] Vector jump_residual(const Grid& grid, const EdgeArrays& m);
[[nodiscard]] Vector jump_residual(const Grid& grid, const Vector& latent);

[[nodiscard]] double l2_norm_sq(const Grid& grid, const EdgeArrays& f);
/// Trapezoid L2 part plus cellwise squared difference quotients.
[[nodiscard]] double h1_norm_sq(const Grid& grid, const EdgeArrays& f);

/// Affine-per-edge weight given by its values at y = 0 and y = length.
struct Weight {
    std::vector<std::array<double, 2>> ends;

    [[nodiscard]] double at(const MetricNetwork& net, int a, double y) const;
    [[nodiscard]] double min() const;
    [[nodiscard]] double max() const;
};

/// gamma_{i,a} at interior vertices, constant on edges touching the boundary, 1 on an isolated edge.
[[nodiscard]] Weight weight_phi(const MetricNetwork& net);
/// Same construction with mu_a gamma_{i,a}.
[[nodiscard]] Weight weight_psi(const MetricNetwork& net);

/// Diffusion stiffness with W test functions and V trial functions. K * 1 = 0.
[[nodiscard]] SparseMatrix stiffness(const Grid& grid);

/// Lumped load of a per-edge function against W test functions.
[[nodiscard]] Vector load(const Grid& grid, const EdgeArrays& g);

/// Upwind generator of the drift `velocity` (nodal per edge). Rows sum to zero, off-diagonals
/// are nonnegative. At vertices only velocities pointing into an edge contribute.
[[nodiscard]] SparseMatrix upwind_generator(const Grid& grid, const EdgeArrays& velocity);

/// Centered counterpart: a d_y w with centered interior and 3-point one-sided vertex stencils.
[[nodiscard]] SparseMatrix centered_generator(const Grid& grid, const EdgeArrays& velocity);

}  // namespace mfgnet
