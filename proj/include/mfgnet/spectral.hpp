#pragma once

#include <functional>
#include <vector>

#include "mfgnet/fields.hpp"

namespace mfgnet {

/// Eigenpairs of -mu d(phi dv) = lambda v with continuity and phi-weighted Kirchhoff conditions.
struct EigenBasis {
    Vector values;             // ascending
    Eigen::MatrixXd vectors;   // columns are continuous fields, orthonormal in trapezoid L2
};

/// Stiffness weighted by the affine weight phi, integrated exactly per cell.
[[nodiscard]] SparseMatrix weighted_stiffness(const Grid& grid, const Weight& phi);

/// The k smallest eigenpairs (dense symmetric solve).
[[nodiscard]] EigenBasis eigenbasis(const Grid& grid, int k);

/// Galerkin solution of the linear backward equation -d_t v - mu d^2 v = f on span(basis),
/// tested against phi times the basis. Each time slab is integrated exactly with f frozen at
/// the later time level. Returns v at t_0..t_N.
[[nodiscard]] std::vector<Vector> evolve_by_expansion(const Grid& grid, const EigenBasis& basis,
                                                      const Vector& vT,
                                                      const std::function<EdgeArrays(int)>& f = {});

}  // namespace mfgnet
