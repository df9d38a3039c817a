#pragma once

#include <string>

#include "mfgnet/fields.hpp"

namespace mfgnet {

enum class LocalMap {
    identity,         // F(m) = m
    scaled_identity,  // F(m) = lambda m
    bounded,          // F(m) = lambda tanh(m)
    zero,
};

/// Cost operator m -> V[m] on densities given as jump fields.
///
/// The nonlocal kind averages m against a cosine bump of radius `bandwidth` measured along
/// paths of the network. Kernel mass reaching a vertex from edge b continues into each other
/// edge c with weight p_c / (1 - p_b) and is folded back at boundary vertices; every row is
/// then normalized so the discrete kernel integrates to one.
struct CouplingOperator {
    enum class Kind { local, nonlocal };

    Kind kind = Kind::local;
    LocalMap map = LocalMap::identity;
    double lambda = 1.0;
    double bandwidth = 0.1;
    double amplitude = 1.0;

    [[nodiscard]] static CouplingOperator local(LocalMap map, double lambda = 1.0);
    [[nodiscard]] static CouplingOperator nonlocal(double bandwidth, double amplitude = 1.0);

    [[nodiscard]] double F(double m) const;
    [[nodiscard]] bool is_zero() const noexcept;
    [[nodiscard]] std::string describe() const;
};

/// Per-edge values of V[m]; may jump at vertices.
[[nodiscard]] EdgeArrays apply(const CouplingOperator& op, const Grid& grid, const Vector& m);

/// Coupling bound to one grid; the kernel matrix is assembled once.
class PreparedCoupling {
public:
    PreparedCoupling(CouplingOperator op, const Grid& grid);
    [[nodiscard]] EdgeArrays operator()(const Vector& m) const;
    [[nodiscard]] const CouplingOperator& op() const noexcept { return op_; }

private:
    CouplingOperator op_;
    const Grid* grid_;
    Eigen::MatrixXd kernel_;
    std::vector<int> base_;
};

/// Dense smoothing matrix acting on stacked edge traces (nonlocal kind only).
[[nodiscard]] Eigen::MatrixXd nonlocal_matrix(const CouplingOperator& op, const Grid& grid);

/// Discrete L2 Lipschitz constant: |lambda| for local maps, a Schur bound for the kernel.
[[nodiscard]] double lipschitz_constant(const CouplingOperator& op, const Grid& grid);

/// Trapezoid integral of (m1 - m2)(V[m1] - V[m2]) over the network.
[[nodiscard]] double monotonicity_gap(const CouplingOperator& op, const Grid& grid,
                                      const Vector& m1, const Vector& m2);

}  // namespace mfgnet
