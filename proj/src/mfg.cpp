#include "mfgnet/mfg.hpp"

#include <cmath>
#include <limits>

#include "mfgnet/log.hpp"

namespace mfgnet {

namespace {

HJBOptions hjb_options(const MFGConfig& c) {
    HJBOptions o;
    o.mode = c.duality_pairing ? GradientMode::monotone : c.mode;
    return o;
}

}  // namespace

MFGMap::MFGMap(const MFGProblem& problem, const MFGConfig& config)
    : problem_(&problem),
      config_(config),
      stepper_(problem.grid, problem.hamiltonian, hjb_options(config)),
      coupling_(problem.coupling, problem.grid) {
    const Grid& g = problem.grid;
    if (problem.m0.size() != g.dof_count() || problem.vT.size() != g.dof_count())
        fail(ErrorCode::invalid_argument, "initial density or terminal value does not match the grid");
}

FPTrajectory MFGMap::density(const std::vector<Vector>& v) const {
    const Grid& g = problem_->grid;
    const DiscreteHamiltonian& H = stepper_.hamiltonian();
    if (config_.duality_pairing) {
        std::vector<SparseMatrix> Q;
        Q.reserve(g.steps());
        for (int n = 0; n < g.steps(); ++n) Q.push_back(H.generator(v[n]));
        return solve_fp_with_generators(g, problem_->m0, Q);
    }
    FPProblem p{g, {}, false, problem_->m0};
    p.drift = [&](double t) {
        const int n = static_cast<int>(std::lround(t / g.dt()));
        return H.drift(v.at(n));
    };
    return solve_fp(p, FPOptions{});
}

std::vector<EdgeArrays> MFGMap::cost(const std::vector<Vector>& m) const {
    std::vector<EdgeArrays> f;
    f.reserve(m.size());
    for (const Vector& mn : m) f.push_back(coupling_(mn));
    return f;
}

std::vector<Vector> MFGMap::value(const std::vector<EdgeArrays>& f) const {
    const int N = problem_->grid.steps();
    std::vector<Vector> v(N + 1);
    v[N] = problem_->vT;
    for (int n = N - 1; n >= 0; --n) v[n] = stepper_.step_back(v[n + 1], f.at(n + 1));
    return v;
}

std::vector<Vector> MFGMap::operator()(const std::vector<Vector>& v) const {
    return value(cost(density(v).m));
}

double trajectory_distance(const Grid& g, const std::vector<Vector>& a,
                           const std::vector<Vector>& b, TraceKind kind) {
    if (a.size() != b.size()) fail(ErrorCode::invalid_argument, "trajectories differ in length");
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) s += g.dt() * h1_norm_sq(g, traces(g, a[n] - b[n], kind));
    return std::sqrt(s);
}

MFGSolution picard_solve(const MFGProblem& problem, const MFGConfig& cfg) {
    if (!(cfg.omega > 0.0 && cfg.omega <= 1.0)) fail(ErrorCode::invalid_argument, "damping must lie in (0, 1]");
    if (!(cfg.tolerance > 0.0)) fail(ErrorCode::invalid_argument, "tolerance must be positive");
    if (cfg.max_iterations < 1) fail(ErrorCode::invalid_argument, "need at least one iteration");
    const Grid& g = problem.grid;
    const MFGMap T(problem, cfg);
    const int N = g.steps();

    MFGSolution s;
    std::vector<Vector> v(N + 1, cfg.initial_guess == InitialGuess::terminal
                                     ? problem.vT
                                     : Vector::Zero(g.dof_count()));
    v[N] = problem.vT;
    if (problem.coupling.is_zero()) {
        // the map does not depend on its argument, so its value is the fixed point
        v = T.value(T.cost(T.density(v).m));
        const FPTrajectory m = T.density(v);
        s.residual_v.push_back(trajectory_distance(g, T.value(T.cost(m.m)), v, TraceKind::continuous));
        s.residual_m.push_back(0.0);
        s.iterations = 1;
        s.converged = s.residual_v.back() <= cfg.tolerance;
    } else {
        std::vector<Vector> m_prev;
        for (int k = 0; k < cfg.max_iterations; ++k) {
            const FPTrajectory m = T.density(v);
            const std::vector<Vector> vt = T.value(T.cost(m.m));
            std::vector<Vector> next(N + 1);
            for (int n = 0; n <= N; ++n) next[n] = (1.0 - cfg.omega) * v[n] + cfg.omega * vt[n];
            const double rv = trajectory_distance(g, next, v, TraceKind::continuous);
            const double rm = m_prev.empty() ? std::numeric_limits<double>::infinity()
                                             : trajectory_distance(g, m.m, m_prev, TraceKind::jump);
            s.residual_v.push_back(rv);
            s.residual_m.push_back(rm);
            v = std::move(next);
            m_prev = m.m;
            s.iterations = k + 1;
            log_debug("picard iteration " + std::to_string(k + 1) + ": dv=" + std::to_string(rv) +
                      " dm=" + std::to_string(rm));
            if (!std::isfinite(rv)) fail(ErrorCode::solve, "Picard iteration diverged");
            if (rv < cfg.tolerance && rm < cfg.tolerance) {
                s.converged = true;
                break;
            }
        }
    }

    const FPTrajectory m = T.density(v);
    s.v = std::move(v);
    s.m = m.m;
    s.min_density = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < m.m.size(); ++n) {
        s.max_mass_drift = std::max(s.max_mass_drift, std::abs(m.mass[n] - m.mass[0]));
        s.min_density = std::min(s.min_density, m.min_value[n]);
    }
    // the terminal level is data and need not satisfy the vertex condition
    for (int n = 0; n < N; ++n)
        s.max_kirchhoff = std::max(s.max_kirchhoff, kirchhoff_residual(g, s.v[n]).cwiseAbs().maxCoeff());
    return s;
}

DualityComponents duality_components(const Grid& g, const DiscreteHamiltonian& H,
                                     const std::vector<Vector>& v1, const std::vector<Vector>& m1,
                                     const std::vector<EdgeArrays>& f1,
                                     const std::vector<Vector>& v2, const std::vector<Vector>& m2,
                                     const std::vector<EdgeArrays>& f2) {
    const int N = g.steps();
    const double dt = g.dt();
    const Vector& M = g.dual_mass();
    DualityComponents d;
    for (int n = 1; n <= N; ++n)
        d.coupling += dt * (m1.at(n) - m2.at(n)).dot(load(g, f1.at(n)) - load(g, f2.at(n)));
    for (int n = 0; n < N; ++n) {
        const Vector vb = v1.at(n) - v2.at(n);
        const Vector L1 = H.load(v1[n]);
        const Vector L2 = H.load(v2[n]);
        const Vector D1 = -M.cwiseProduct(H.generator(v1[n]) * vb);
        const Vector D2 = -M.cwiseProduct(H.generator(v2[n]) * vb);
        d.bregman_1 += dt * m1.at(n).dot(L2 - L1 + D1);
        d.bregman_2 += dt * m2.at(n).dot(L1 - L2 - D2);
    }
    d.total = d.coupling + d.bregman_1 + d.bregman_2;
    return d;
}

DualityComponents duality_residual(const MFGProblem& problem, const MFGSolution& s1,
                                   const MFGSolution& s2) {
    const Grid& g = problem.grid;
    const DiscreteHamiltonian H(g, problem.hamiltonian, GradientMode::monotone);
    const PreparedCoupling V(problem.coupling, g);
    std::vector<EdgeArrays> f1, f2;
    for (const Vector& m : s1.m) f1.push_back(V(m));
    for (const Vector& m : s2.m) f2.push_back(V(m));
    return duality_components(g, H, s1.v, s1.m, f1, s2.v, s2.m, f2);
}

double fixed_point_residual(const MFGProblem& problem, const MFGSolution& s, const MFGConfig& cfg) {
    const MFGMap T(problem, cfg);
    return trajectory_distance(problem.grid, T(s.v), s.v, TraceKind::continuous);
}

}  // namespace mfgnet
