#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "mfgnet/fields.hpp"

using namespace mfgnet;

namespace {

Grid grid_of(std::shared_ptr<const MetricNetwork> net, int cells) {
    return Grid(net, std::vector<int>(net->edge_count(), cells));
}

}  // namespace

TEST_CASE("grid layout") {
    const auto net = gen::star({0.5, 0.25, 0.25});
    const Grid g = grid_of(net, 4);
    CHECK(g.dof_count() == 4 + 3 * 3);
    CHECK(g.node_dof(0, 0) == 0);
    CHECK(g.node_dof(1, 4) == 2);
    CHECK(g.node_dof(1, 1) == g.interior_offset(1));
    CHECK(g.h(0) == 0.25);
    CHECK(g.dt() == 1.0);
    CHECK_THROWS_AS(Grid(net, {4, 1, 4}), Error);
    CHECK_THROWS_AS(Grid(net, {4, 4}), Error);
    CHECK_THROWS_AS(Grid(net, {4, 4, 4}, 0.0, 3), Error);
    CHECK(Grid::with_spacing(gen::segment(1.0), 0.3).cells(0) == 3);
    CHECK(Grid::with_spacing(gen::segment(1.0), 0.9).cells(0) == 2);
}

TEST_CASE("integrate") {
    const Grid star = grid_of(gen::star({0.5, 0.25, 0.25}), 10);
    CHECK(integrate(star, sample_edges(star, [](int, double) { return 1.0; })) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(integrate(star, sample_edges(star, [](int, double) { return 0.0; })) == 0.0);
    const Grid edge = grid_of(gen::segment(), 100);
    CHECK(std::abs(integrate(edge, sample_edges(edge, [](int, double y) { return y; })) - 0.5) <= 1e-12);
    // continuous and jump dof integrals agree with the trapezoid rule on traces
    const Vector v = sample_continuous(star, [](int a, double y) { return 1.0 + a * y; });
    CHECK(integrate(star, v, TraceKind::continuous) ==
          doctest::Approx(integrate(star, traces(star, v, TraceKind::continuous))).epsilon(1e-14));
}

TEST_CASE("derivative") {
    const Grid g = grid_of(gen::segment(), 64);
    const EdgeArrays c = derivative(g, sample_edges(g, [](int, double) { return 3.0; }));
    CHECK(c[0].cwiseAbs().maxCoeff() <= 1e-12);
    const EdgeArrays lin = derivative(g, sample_edges(g, [](int, double y) { return y; }));
    CHECK((lin[0].array() - 1.0).abs().maxCoeff() <= 1e-12);
    const EdgeArrays sq = derivative(g, sample_edges(g, [](int, double y) { return y * y; }));
    CHECK(std::abs(sq[0][64] - 2.0) <= 1e-12);
    CHECK(std::abs(sq[0][0]) <= 1e-12);
}

TEST_CASE("derivative is exact on affine fields of random networks") {
    gen::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto net = gen::network(rng);
        std::vector<int> cells;
        for (int a = 0; a < net->edge_count(); ++a) cells.push_back(gen::integer(rng, 2, 20));
        const Grid g(net, cells);
        std::vector<double> slope, shift;
        for (int a = 0; a < net->edge_count(); ++a) {
            slope.push_back(gen::uniform(rng, -3, 3));
            shift.push_back(gen::uniform(rng, -3, 3));
        }
        const EdgeArrays d = derivative(g, sample_edges(g, [&](int a, double y) { return shift[a] + slope[a] * y; }));
        for (int a = 0; a < net->edge_count(); ++a) CHECK((d[a].array() - slope[a]).abs().maxCoeff() <= 1e-11);
    }
}

TEST_CASE("kirchhoff residual") {
    const Grid star = grid_of(gen::star({0.5, 0.25, 0.25}), 8);
    CHECK(kirchhoff_residual(star, Vector::Constant(star.dof_count(), 2.0)).cwiseAbs().maxCoeff() <= 1e-13);

    // a - b - c with v affine in arclength: the outward derivatives at b cancel
    const Grid path = grid_of(gen::path2(), 8);
    const Vector v = sample_continuous(path, [](int a, double y) { return a == 0 ? y : 1.0 + y; });
    CHECK(std::abs(kirchhoff_residual(path, v)[1]) <= 1e-12);

    const Grid edge = grid_of(gen::segment(), 8);
    const Vector lin = sample_continuous(edge, [](int, double y) { return y; });
    const Vector r = kirchhoff_residual(edge, lin);
    const double gm = edge.network().jump_weight(0, 0) * edge.network().edge(0).mu;
    CHECK(r[0] == doctest::Approx(-gm));
    CHECK(r[1] == doctest::Approx(gm));
}

TEST_CASE("jump residual") {
    const Grid star = grid_of(gen::star({0.5, 0.25, 0.25}), 4);
    gen::Rng rng(3);
    const Vector latent = gen::density(rng, star);
    CHECK(jump_residual(star, latent).cwiseAbs().maxCoeff() == 0.0);
    CHECK(jump_residual(star, traces(star, latent, TraceKind::jump)).cwiseAbs().maxCoeff() <= 1e-15);

    EdgeArrays raw(3, Vector::Ones(5));
    for (int a = 0; a < 3; ++a) raw[a][0] = (a == 0 ? 2.0 : 1.0) * 0.7;
    CHECK(jump_residual(star, raw)[0] == doctest::Approx(0.0));
    for (int a = 0; a < 3; ++a) raw[a][0] = 1.0;
    CHECK(jump_residual(star, raw)[0] == doctest::Approx(2.0));
}

TEST_CASE("discrete integration by parts has second order vertex terms") {
    auto defect = [](int n) {
        const Grid g = grid_of(gen::segment(), n);
        const EdgeArrays f = sample_edges(g, [](int, double y) { return std::sin(2 * y); });
        const EdgeArrays h = sample_edges(g, [](int, double y) { return std::exp(y); });
        const EdgeArrays df = derivative(g, f), dh = derivative(g, h);
        EdgeArrays sum(1);
        sum[0] = df[0].cwiseProduct(h[0]) + f[0].cwiseProduct(dh[0]);
        return std::abs(integrate(g, sum) - std::sin(2.0) * std::exp(1.0));
    };
    const double e1 = defect(32), e2 = defect(64);
    CHECK(e2 < 1e-3);
    CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("weights phi and psi") {
    const auto star = gen::star({0.5, 0.25, 0.25}, {1.0, 2.0, 0.5});
    const Weight phi = weight_phi(*star);
    const Weight psi = weight_psi(*star);
    for (int a = 0; a < 3; ++a) {
        // every edge touches the boundary, so the weights are constant
        CHECK(phi.at(*star, a, 0.0) == star->jump_weight(0, a));
        CHECK(phi.at(*star, a, 1.0) == star->jump_weight(0, a));
        CHECK(psi.at(*star, a, 0.3) == doctest::Approx(star->entry_prob(0, a)));
    }
    CHECK(weight_phi(*gen::segment()).at(*gen::segment(), 0, 0.4) == 1.0);

    gen::Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto net = gen::network(rng, 3, 9, 3);
        const Weight w = weight_phi(*net);
        CHECK(w.min() > 0.0);
        CHECK(std::isfinite(w.max()));
        for (int i = 0; i < net->vertex_count(); ++i) {
            if (net->is_boundary(i)) continue;
            for (const Incidence& inc : net->incident(i)) {
                const double y = inc.sign < 0 ? 0.0 : net->edge(inc.edge).length;
                CHECK(w.at(*net, inc.edge, y) == doctest::Approx(inc.gamma).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("operator structure on random networks") {
    gen::Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const auto net = gen::network(rng);
        std::vector<int> cells;
        for (int a = 0; a < net->edge_count(); ++a) cells.push_back(gen::integer(rng, 2, 12));
        const Grid g(net, cells);
        const Vector ones = Vector::Ones(g.dof_count());

        // constants are in the kernel of the stiffness and load(1) is the dual mass
        CHECK((stiffness(g) * ones).cwiseAbs().maxCoeff() <= 1e-10);
        const EdgeArrays one = sample_edges(g, [](int, double) { return 1.0; });
        CHECK((load(g, one) - g.dual_mass()).cwiseAbs().maxCoeff() <= 1e-14);

        // sampling a jump field keeps the trapezoid mass
        const double c = gen::uniform(rng, 0.5, 2.0);
        auto fn = [&](int a, double y) { return 1.0 + std::sin(c * y + a); };
        CHECK(integrate(g, sample_jump(g, fn), TraceKind::jump) ==
              doctest::Approx(integrate(g, sample_edges(g, fn))).epsilon(1e-13));

        // generators: zero row sums, nonnegative off-diagonal rates
        const SparseMatrix Q = upwind_generator(g, gen::edge_field(rng, g, 2.0));
        CHECK((Q * ones).cwiseAbs().maxCoeff() <= 1e-10);
        for (int k = 0; k < Q.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(Q, k); it; ++it)
                if (it.row() != it.col()) CHECK(it.value() >= 0.0);
        const SparseMatrix C = centered_generator(g, gen::edge_field(rng, g, 2.0));
        CHECK((C * ones).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("norms") {
    const Grid g = grid_of(gen::segment(), 50);
    const EdgeArrays f = sample_edges(g, [](int, double y) { return y; });
    CHECK(l2_norm_sq(g, f) == doctest::Approx(1.0 / 3).epsilon(1e-3));
    CHECK(h1_norm_sq(g, f) == doctest::Approx(1.0 / 3 + 1.0).epsilon(1e-3));
}
