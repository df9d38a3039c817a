#include "mfgnet/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace mfgnet {

SparseMatrix weighted_stiffness(const Grid& grid, const Weight& phi) {
    const MetricNetwork& net = grid.network();
    std::vector<Eigen::Triplet<double>> t;
    for (int a = 0; a < grid.edge_count(); ++a) {
        const int n = grid.cells(a);
        const double h = grid.h(a);
        const double len = net.edge(a).length;
        for (int c = 0; c < n; ++c) {
            const double y0 = c * h;
            const double y1 = c + 1 == n ? len : (c + 1) * h;
            const double mean = 0.5 * (phi.at(net, a, y0) + phi.at(net, a, y1));
            const double k = net.edge(a).mu * mean / h;
            const int l = grid.node_dof(a, c);
            const int r = grid.node_dof(a, c + 1);
            t.emplace_back(l, l, k);
            t.emplace_back(r, r, k);
            t.emplace_back(l, r, -k);
            t.emplace_back(r, l, -k);
        }
    }
    SparseMatrix S(grid.dof_count(), grid.dof_count());
    S.setFromTriplets(t.begin(), t.end());
    return S;
}

EigenBasis eigenbasis(const Grid& grid, int k) {
    const int n = grid.dof_count();
    if (k < 1 || k > n)
        fail(ErrorCode::invalid_argument,
             "requested " + std::to_string(k) + " eigenpairs but the grid has " + std::to_string(n) + " unknowns");
    const Vector isw = grid.trapezoid_weights().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd S = Eigen::MatrixXd(weighted_stiffness(grid, weight_phi(grid.network())));
    const Eigen::MatrixXd A = isw.asDiagonal() * S * isw.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
    if (es.info() != Eigen::Success) fail(ErrorCode::solve, "eigensolver failed");
    EigenBasis b;
    b.values = es.eigenvalues().head(k);
    b.vectors = isw.asDiagonal() * es.eigenvectors().leftCols(k);
    for (int j = 0; j < k; ++j) {
        // fix the sign so results are reproducible
        Eigen::Index idx;
        b.vectors.col(j).cwiseAbs().maxCoeff(&idx);
        if (b.vectors(idx, j) < 0) b.vectors.col(j) *= -1.0;
    }
    return b;
}

std::vector<Vector> evolve_by_expansion(const Grid& grid, const EigenBasis& basis, const Vector& vT,
                                        const std::function<EdgeArrays(int)>& f) {
    const MetricNetwork& net = grid.network();
    if (vT.size() != grid.dof_count()) fail(ErrorCode::invalid_argument, "terminal value does not match the grid");
    const Eigen::MatrixXd& V = basis.vectors;
    const int k = static_cast<int>(V.cols());

    // test functions phi * v_k as jump fields: vertex latent value phi / gamma
    const Weight phi = weight_phi(net);
    Vector d(grid.dof_count());
    for (int i = 0; i < net.vertex_count(); ++i) {
        const Incidence& inc = net.incident(i).front();
        const double y = inc.sign < 0 ? 0.0 : net.edge(inc.edge).length;
        d[i] = phi.at(net, inc.edge, y) / inc.gamma;
    }
    for (int a = 0; a < grid.edge_count(); ++a)
        for (int j = 1; j < grid.cells(a); ++j) d[grid.node_dof(a, j)] = phi.at(net, a, grid.y(a, j));
    const Eigen::MatrixXd Z = d.asDiagonal() * V;

    const Eigen::MatrixXd Mn = Z.transpose() * grid.dual_mass().asDiagonal() * V;
    const Eigen::MatrixXd B = Z.transpose() * (stiffness(grid) * V);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Mn);
    const Eigen::MatrixXd A = lu.solve(B);

    // exp(dt [[-A, I], [0, 0]]) = [[E, Phi], [0, I]] with Phi = int_0^dt exp(-sA) ds
    const double dt = grid.dt();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * k, 2 * k);
    aug.topLeftCorner(k, k) = -dt * A;
    aug.topRightCorner(k, k) = dt * Eigen::MatrixXd::Identity(k, k);
    const Eigen::MatrixXd X = aug.exp();
    const Eigen::MatrixXd E = X.topLeftCorner(k, k);
    const Eigen::MatrixXd Phi = X.topRightCorner(k, k);

    const int N = grid.steps();
    std::vector<Vector> out(N + 1);
    Vector Y = V.transpose() * grid.trapezoid_weights().cwiseProduct(vT);
    out[N] = V * Y;
    for (int n = N - 1; n >= 0; --n) {
        Y = E * Y;
        if (f) {
            const Vector F = Z.transpose() * load(grid, f(n + 1));
            Y += Phi * lu.solve(F);
        }
        out[n] = V * Y;
    }
    return out;
}

}  // namespace mfgnet
