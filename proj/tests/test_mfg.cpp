#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "mfgnet/mfg.hpp"

using namespace mfgnet;

namespace {

Vector unit_mass(const Grid& g, Vector m) { return m / integrate(g, m, TraceKind::jump); }

MFGProblem star_problem(CouplingOperator coupling = CouplingOperator::local(LocalMap::identity)) {
    const auto net = gen::star({0.5, 0.25, 0.25});
    const Grid g(net, {16, 16, 16}, 1.0, 32);
    const Vector m0 = unit_mass(g, sample_jump(g, [](int a, double y) { return a == 0 ? 1.0 + std::sin(3 * y) : 0.2; }));
    const Vector vT = sample_continuous(g, [](int a, double y) { return a == 1 ? 1.0 - y : 1.0 + y; });
    return {g, HamiltonianModel(3, std::make_shared<ClippedQuadratic>(2.0)), coupling, m0, vT};
}

}  // namespace

TEST_CASE("decoupled problem converges in one evaluation") {
    MFGProblem p = star_problem(CouplingOperator::local(LocalMap::zero));
    p.hamiltonian = HamiltonianModel(3, std::make_shared<ZeroHamiltonian>());
    const MFGSolution s = picard_solve(p, {});
    CHECK(s.converged);
    CHECK(s.iterations == 1);

    const HJBTrajectory heat = solve_hjb({p.grid, p.hamiltonian, {}, p.vT});
    const FPTrajectory fp = solve_fp({p.grid, {}, true, p.m0});
    for (int n = 0; n <= p.grid.steps(); ++n) {
        CHECK((s.v[n] - heat.v[n]).cwiseAbs().maxCoeff() <= 1e-13);
        CHECK((s.m[n] - fp.m[n]).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("symmetric two-edge star keeps its symmetry") {
    const auto net = gen::star({0.5, 0.5});
    const Grid g(net, {12, 12}, 1.0, 24);
    const Vector m0 = unit_mass(g, sample_jump(g, [](int, double y) { return 1.0 + y; }));
    const Vector vT = sample_continuous(g, [](int, double y) { return y * y; });
    const MFGProblem p{g, HamiltonianModel(2, std::make_shared<ClippedQuadratic>(2.0)),
                       CouplingOperator::local(LocalMap::identity), m0, vT};
    const MFGSolution s = picard_solve(p, {});
    REQUIRE(s.converged);
    for (int n = 0; n <= g.steps(); ++n) {
        const EdgeArrays v = traces(g, s.v[n], TraceKind::continuous);
        const EdgeArrays m = traces(g, s.m[n], TraceKind::jump);
        CHECK((v[0] - v[1]).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((m[0] - m[1]).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("increasing coupling: both initial guesses reach the same solution") {
    const MFGProblem p = star_problem();
    MFGConfig c;
    const MFGSolution a = picard_solve(p, c);
    c.initial_guess = InitialGuess::terminal;
    const MFGSolution b = picard_solve(p, c);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(trajectory_distance(p.grid, a.v, b.v, TraceKind::continuous) <= 10 * c.tolerance);
    CHECK(trajectory_distance(p.grid, a.m, b.m, TraceKind::jump) <= 10 * c.tolerance);
    CHECK(fixed_point_residual(p, a, c) <= 10 * c.tolerance);

    const DualityComponents d = duality_residual(p, a, b);
    CHECK(std::abs(d.total) <= 1e-8);

    // recorded slices keep unit mass and stay nonnegative
    for (const Vector& m : a.m) {
        CHECK(std::abs(integrate(p.grid, m, TraceKind::jump) - 1.0) <= 1e-10);
        for (const Vector& e : traces(p.grid, m, TraceKind::jump)) CHECK(e.minCoeff() >= -1e-12);
    }
    CHECK(a.max_mass_drift <= 1e-10);
    CHECK(a.min_density >= -1e-12);
    CHECK(a.v.back() == p.vT);
    CHECK(a.m.front() == p.m0);
}

TEST_CASE("Picard history") {
    const MFGProblem p = star_problem();
    MFGConfig c;
    const MFGSolution s = picard_solve(p, c);
    REQUIRE(s.converged);
    // after a short burn-in the damped iteration contracts
    for (std::size_t k = 4; k < s.residual_v.size(); ++k) CHECK(s.residual_v[k] <= s.residual_v[k - 1] * (1 + 1e-9));

    // deterministic: the history repeats bit for bit
    const MFGSolution again = picard_solve(p, c);
    CHECK(again.residual_v == s.residual_v);
    CHECK(again.residual_m == s.residual_m);

    // a truncated coupled run is far from the fixed point
    c.max_iterations = 1;
    const MFGSolution one = picard_solve(p, c);
    CHECK_FALSE(one.converged);
    CHECK(fixed_point_residual(p, one, c) > c.tolerance);
}

TEST_CASE("duality components") {
    const MFGProblem p = star_problem();
    const MFGSolution s = picard_solve(p, {});
    const DualityComponents same = duality_residual(p, s, s);
    CHECK(same.coupling == 0.0);
    CHECK(same.bregman_1 == 0.0);
    CHECK(same.bregman_2 == 0.0);

    const Grid& g = p.grid;
    const DiscreteHamiltonian H(g, p.hamiltonian, GradientMode::monotone);
    gen::Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vector> v1, v2, m1, m2;
        std::vector<EdgeArrays> f1, f2;
        for (int n = 0; n <= g.steps(); ++n) {
            v1.push_back(gen::value(rng, g, 1.0));
            v2.push_back(gen::value(rng, g, 1.0));
            m1.push_back(gen::density(rng, g));
            m2.push_back(gen::density(rng, g));
            f1.push_back(traces(g, m1.back(), TraceKind::jump));
            f2.push_back(traces(g, m2.back(), TraceKind::jump));
        }
        const DualityComponents d = duality_components(g, H, v1, m1, f1, v2, m2, f2);
        CHECK(d.bregman_1 >= -1e-10);
        CHECK(d.bregman_2 >= -1e-10);

        // with F(m) = m the coupling term is the squared L2 distance of the densities
        double dist = 0.0;
        for (int n = 1; n <= g.steps(); ++n) dist += g.dt() * l2_norm_sq(g, traces(g, m1[n] - m2[n], TraceKind::jump));
        CHECK(d.coupling == doctest::Approx(dist).epsilon(1e-12));
    }
}

TEST_CASE("bounded and nonlocal couplings converge") {
    for (const auto& op : {CouplingOperator::local(LocalMap::bounded, 2.0), CouplingOperator::nonlocal(0.3)}) {
        const MFGProblem p = star_problem(op);
        const MFGSolution s = picard_solve(p, {});
        CHECK(s.converged);
        CHECK(s.max_mass_drift <= 1e-10);
    }
}
