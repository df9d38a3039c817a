#include "mfgnet/fp_solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace mfgnet {

namespace {

using LU = Eigen::SparseLU<SparseMatrix>;

void factor(LU& lu, const SparseMatrix& A) {
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        fail(ErrorCode::solve, "Fokker-Planck system is singular: " + lu.lastErrorMessage());
}

Vector solve(const LU& lu, const Vector& rhs) {
    Vector x = lu.solve(rhs);
    if (!x.allFinite()) fail(ErrorCode::solve, "Fokker-Planck solve produced non-finite values");
    return x;
}

SparseMatrix diag(const Vector& d) {
    SparseMatrix D(d.size(), d.size());
    D.reserve(Eigen::VectorXi::Ones(d.size()));
    for (int k = 0; k < d.size(); ++k) D.insert(k, k) = d[k];
    return D;
}

void record(const Grid& grid, FPTrajectory& t, Vector m) {
    t.mass.push_back(integrate(grid, m, TraceKind::jump));
    double lo = std::numeric_limits<double>::infinity();
    for (const Vector& e : traces(grid, m, TraceKind::jump)) lo = std::min(lo, e.minCoeff());
    t.min_value.push_back(lo);
    t.jump.push_back(jump_residual(grid, m).maxCoeff());
    t.m.push_back(std::move(m));
}

}  // namespace

FPStepOperator assemble_fp(const Grid& grid, const EdgeArrays& b, Transport transport) {
    FPStepOperator op;
    op.mass = grid.dual_mass();
    op.diffusion = SparseMatrix(stiffness(grid).transpose());
    bool any = false;
    EdgeArrays a(grid.edge_count());
    for (int e = 0; e < grid.edge_count(); ++e) {
        if (!b.empty()) {
            if (b.at(e).size() != grid.cells(e) + 1)
                fail(ErrorCode::invalid_argument, "drift size does not match the grid");
            if (!b[e].allFinite()) fail(ErrorCode::invalid_argument, "drift is not finite");
            a[e] = -b[e];
            any = any || b[e].cwiseAbs().maxCoeff() > 0.0;
        } else {
            a[e] = Vector::Zero(grid.cells(e) + 1);
        }
    }
    if (any) {
        const SparseMatrix Q = transport == Transport::upwind ? upwind_generator(grid, a)
                                                               : centered_generator(grid, a);
        op.transport = SparseMatrix(Q.transpose()) * diag(op.mass);
    } else {
        op.transport = SparseMatrix(grid.dof_count(), grid.dof_count());
    }
    op.flux = op.diffusion - op.transport;
    return op;
}

Vector step(const Vector& m, const FPStepOperator& op, double dt, double theta) {
    const SparseMatrix M = diag(op.mass);
    LU lu;
    factor(lu, M + theta * dt * op.flux);
    Vector rhs = op.mass.cwiseProduct(m);
    if (theta < 1.0) rhs -= (1.0 - theta) * dt * (op.flux * m);
    return solve(lu, rhs);
}

FPTrajectory solve_fp(const FPProblem& p, const FPOptions& o) {
    const Grid& g = p.grid;
    if (p.m0.size() != g.dof_count())
        fail(ErrorCode::invalid_argument, "initial density size does not match the grid");
    if (!(o.theta >= 0.5 && o.theta <= 1.0))
        fail(ErrorCode::invalid_argument, "theta must lie in [0.5, 1]");
    const double dt = g.dt();
    const SparseMatrix M = diag(g.dual_mass());
    auto op_at = [&](double t) { return assemble_fp(g, p.drift ? p.drift(t) : EdgeArrays{}, o.transport); };

    FPTrajectory out;
    record(g, out, p.m0);
    Vector m = p.m0;
    LU lu;
    FPStepOperator prev = op_at(0.0);
    bool factored = false;
    for (int n = 0; n < g.steps(); ++n) {
        FPStepOperator next = p.static_drift ? prev : op_at(g.time(n + 1));
        Vector rhs = g.dual_mass().cwiseProduct(m);
        SparseMatrix lhs;
        if (o.explicit_transport) {
            lhs = M + o.theta * dt * next.diffusion;
            rhs += dt * (prev.transport * m);
            if (o.theta < 1.0) rhs -= (1.0 - o.theta) * dt * (prev.diffusion * m);
        } else {
            lhs = M + o.theta * dt * next.flux;
            if (o.theta < 1.0) rhs -= (1.0 - o.theta) * dt * (prev.flux * m);
        }
        if (!factored || !p.static_drift) {
            factor(lu, lhs);
            factored = true;
        }
        m = solve(lu, rhs);
        record(g, out, m);
        prev = std::move(next);
    }
    return out;
}

FPTrajectory solve_fp_with_generators(const Grid& g, const Vector& m0,
                                      const std::vector<SparseMatrix>& generators) {
    if (static_cast<int>(generators.size()) != g.steps())
        fail(ErrorCode::invalid_argument, "need one generator per time step");
    const double dt = g.dt();
    const Vector& mass = g.dual_mass();
    LU lu;
    factor(lu, diag(mass) + dt * SparseMatrix(stiffness(g).transpose()));
    FPTrajectory out;
    record(g, out, m0);
    Vector m = m0;
    for (int n = 0; n < g.steps(); ++n) {
        const Vector mm = mass.cwiseProduct(m);
        m = solve(lu, mm + dt * (generators[n].transpose() * mm));
        record(g, out, m);
    }
    return out;
}

double stability_gap(const Grid& g, const FPTrajectory& a, const FPTrajectory& b) {
    if (a.m.size() != b.m.size()) fail(ErrorCode::invalid_argument, "trajectories differ in length");
    double s = 0.0;
    for (std::size_t n = 1; n < a.m.size(); ++n)
        s += g.dt() * h1_norm_sq(g, traces(g, a.m[n] - b.m[n], TraceKind::jump));
    return std::sqrt(s);
}

Vector stationary_density(const Grid& g) {
    // K^T m = 0 is rank deficient by one; replace the first equation by the mass constraint.
    SparseMatrix A = stiffness(g).transpose();
    A.prune([](Eigen::Index r, Eigen::Index, double) { return r != 0; });
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < g.dof_count(); ++k) t.emplace_back(0, k, g.dual_mass()[k]);
    SparseMatrix B(g.dof_count(), g.dof_count());
    B.setFromTriplets(t.begin(), t.end());
    LU lu;
    factor(lu, B);
    Vector rhs = Vector::Zero(g.dof_count());
    rhs[0] = 1.0;
    return solve(lu, rhs);
}

}  // namespace mfgnet
