#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "mfgnet/fp_solver.hpp"
#include "mfgnet/montecarlo.hpp"

using namespace mfgnet;

namespace {

Grid grid_of(std::shared_ptr<const MetricNetwork> net, int cells) {
    return Grid(net, std::vector<int>(net->edge_count(), cells));
}

Vector on_edge(const Grid& g, int edge) {
    Vector m = Vector::Zero(g.dof_count());
    for (int j = 1; j < g.cells(edge); ++j) m[g.node_dof(edge, j)] = 1.0;
    return m / integrate(g, m, TraceKind::jump);
}

double total_mass(const EdgeArrays& h) {
    double s = 0.0;
    for (const auto& e : h) s += e.sum();
    return s;
}

}  // namespace

TEST_CASE("single edge without drift relaxes to the uniform law") {
    const Grid g = grid_of(gen::segment(), 10);
    SimConfig c;
    c.paths = 100000;
    c.delta = 1e-3;
    c.seed = 5;
    c.initial_density = on_edge(g, 0);
    c.times = {1.0};
    const SimResult r = simulate(g, c);
    const EdgeArrays& h = r.histograms.at(0);
    CHECK(std::abs(total_mass(h) - 1.0) <= 1e-12);
    double worst = 0.0, bound = 0.0;
    for (int j = 0; j <= 10; ++j) {
        const double width = (j == 0 || j == 10) ? 0.05 : 0.1;
        worst = std::max(worst, std::abs(h[0][j] / width - 1.0));
        bound = std::max(bound, 3.0 / std::sqrt(c.paths * width));
    }
    CHECK(worst <= bound);
}

TEST_CASE("star without drift splits its mass by gamma") {
    const Grid g = grid_of(gen::star({0.5, 0.25, 0.25}), 8);
    SimConfig c;
    c.paths = 100000;
    c.delta = 4e-3;
    c.seed = 11;
    c.threads = 2;
    c.initial_density = on_edge(g, 1);
    c.times = {3.0};
    const SimResult r = simulate(g, c);
    const EdgeArrays st = fp_histogram(g, stationary_density(g));
    double tv = 0.0;
    for (int a = 0; a < 3; ++a) tv += 0.5 * std::abs(r.histograms[0][a].sum() - st[a].sum());
    CHECK(tv <= 0.02);
}

TEST_CASE("an artificial vertex is invisible to the particles") {
    const auto whole = gen::segment(2.0);
    const auto split = std::make_shared<const MetricNetwork>(
        std::vector<Vertex>{{"a"}, {"mid", true}, {"b"}},
        std::vector<Edge>{{"e.1", 0, 1, 1.0, 1.0}, {"e.2", 1, 2, 1.0, 1.0}},
        std::vector<EntryProb>{{1, 0, 0.5}, {1, 1, 0.5}});
    SimConfig c;
    c.paths = 20000;
    c.delta = 1e-3;
    c.times = {0.3};
    c.keep_positions = true;
    c.velocity = [](int, double, double) { return 0.5; };
    c.velocity_bound = 0.5;

    const Grid gw = grid_of(whole, 20);
    c.seed = 1;
    c.initial_density = sample_jump(gw, [](int, double y) { return y < 0.8 ? 1.0 : 0.0; });
    const SimResult rw = simulate(gw, c);

    const Grid gs = grid_of(split, 10);
    c.seed = 2;
    c.initial_density = sample_jump(gs, [](int a, double y) { return a == 0 && y < 0.8 ? 1.0 : 0.0; });
    const SimResult rs = simulate(gs, c);

    std::vector<double> xw, xs;
    for (const SimPosition& p : rw.positions[0]) xw.push_back(p.y);
    for (const SimPosition& p : rs.positions[0]) xs.push_back(p.edge == 0 ? p.y : 1.0 + p.y);
    CHECK(ks_statistic(xw, xs) < ks_critical_value(xw.size(), xs.size(), 0.01));
}

TEST_CASE("seeded runs repeat and do not depend on the thread count") {
    const Grid g = grid_of(gen::star({0.5, 0.25, 0.25}), 6);
    SimConfig c;
    c.paths = 5000;
    c.delta = 1e-3;
    c.seed = 42;
    c.initial_density = on_edge(g, 0);
    c.times = {0.1, 0.2};
    c.velocity = [](int a, double y, double) { return a == 0 ? -1.0 + y : 0.3; };
    c.velocity_bound = 1.0;
    const SimResult a = simulate(g, c);
    c.threads = 3;
    const SimResult b = simulate(g, c);
    for (std::size_t k = 0; k < a.histograms.size(); ++k)
        for (int e = 0; e < 3; ++e) CHECK(a.histograms[k][e] == b.histograms[k][e]);
    c.seed = 43;
    const SimResult other = simulate(g, c);
    CHECK(total_variation(a.histograms[1], other.histograms[1]) > 0.0);
}

TEST_CASE("total variation") {
    gen::Rng rng(2);
    const Grid g = grid_of(gen::star({0.5, 0.25, 0.25}), 6);
    const EdgeArrays p = fp_histogram(g, on_edge(g, 0));
    const EdgeArrays q = fp_histogram(g, on_edge(g, 2));
    CHECK(total_variation(p, p) == 0.0);
    CHECK(total_variation(p, q) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(compare_to_fp(g, p, on_edge(g, 0)) == 0.0);
    CHECK(total_mass(p) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("step-size guard") {
    gen::Rng rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        const auto net = gen::network(rng);
        const double a = gen::uniform(rng, 0.0, 3.0);
        const double d = max_time_step(*net, a);
        double len = INFINITY, mu = 0.0;
        for (const Edge& e : net->edges()) {
            len = std::min(len, e.length);
            mu = std::max(mu, e.mu);
        }
        CHECK(6 * (std::sqrt(2 * mu * d) + a * d) == doctest::Approx(len).epsilon(1e-10));
    }
    const Grid g = grid_of(gen::segment(), 4);
    SimConfig c;
    c.delta = 0.1;
    c.initial_density = on_edge(g, 0);
    c.times = {0.5};
    CHECK_THROWS_AS((void)simulate(g, c), Error);
}

TEST_CASE("empirical law approaches the FP solution") {
    const auto net = gen::star({0.5, 0.25, 0.25});
    const Grid g(net, {32, 32, 32}, 0.5, 500);
    const Vector m0 = on_edge(g, 0);
    const FPTrajectory fp = solve_fp({g, {}, true, m0});
    std::vector<double> tv;
    for (long n : {1000L, 10000L, 100000L}) {
        SimConfig c;
        c.paths = n;
        c.delta = 1e-3;
        c.seed = 7;
        c.initial_density = m0;
        c.times = {0.5};
        tv.push_back(compare_to_fp(g, simulate(g, c).histograms[0], fp.m.back()));
    }
    CHECK(tv[1] < tv[0]);
    CHECK(tv[2] < tv[1]);
    // sampling error dominates at these sizes, so the slope is close to -1/2
    CHECK(std::log10(tv[0] / tv[2]) / 2 > 0.3);
}
