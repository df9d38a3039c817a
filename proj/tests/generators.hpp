#pragma once

#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mfgnet/fields.hpp"

namespace gen {

using mfgnet::Edge;
using mfgnet::EntryProb;
using mfgnet::MetricNetwork;
using mfgnet::Vertex;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int integer(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Star with edges from the center "c" to leaves "l1".."lk".
inline std::shared_ptr<const MetricNetwork> star(const std::vector<double>& p, const std::vector<double>& mu = {},
                                                 const std::vector<double>& length = {}) {
    std::vector<Vertex> vs{{"c"}};
    std::vector<Edge> es;
    std::vector<EntryProb> probs;
    for (std::size_t a = 0; a < p.size(); ++a) {
        vs.push_back({"l" + std::to_string(a + 1)});
        es.push_back({"e" + std::to_string(a + 1), 0, static_cast<int>(a + 1), length.empty() ? 1.0 : length[a],
                      mu.empty() ? 1.0 : mu[a]});
        probs.push_back({0, static_cast<int>(a), p[a]});
    }
    return std::make_shared<const MetricNetwork>(vs, es, probs);
}

inline std::shared_ptr<const MetricNetwork> segment(double length = 1.0, double mu = 1.0) {
    return std::make_shared<const MetricNetwork>(std::vector<Vertex>{{"a"}, {"b"}},
                                                 std::vector<Edge>{{"e", 0, 1, length, mu}});
}

/// Path a - b - c of two edges.
inline std::shared_ptr<const MetricNetwork> path2(double l1 = 1.0, double l2 = 1.0, double mu1 = 1.0,
                                                  double mu2 = 1.0) {
    return std::make_shared<const MetricNetwork>(std::vector<Vertex>{{"a"}, {"b"}, {"c"}},
                                                 std::vector<Edge>{{"x", 0, 1, l1, mu1}, {"y", 1, 2, l2, mu2}});
}

inline std::shared_ptr<const MetricNetwork> cycle3() {
    return std::make_shared<const MetricNetwork>(
        std::vector<Vertex>{{"a"}, {"b"}, {"c"}},
        std::vector<Edge>{{"ab", 0, 1, 1.0, 1.0}, {"bc", 1, 2, 0.8, 0.5}, {"ca", 2, 0, 1.2, 1.5}});
}

/// Random connected network: a random tree plus a few chords, random orientation,
/// lengths, diffusions and entry probabilities.
inline std::shared_ptr<const MetricNetwork> network(Rng& rng, int min_vertices = 2, int max_vertices = 7,
                                                    int max_chords = 2) {
    const int nv = integer(rng, min_vertices, max_vertices);
    std::vector<Vertex> vs;
    for (int i = 0; i < nv; ++i) vs.push_back({"v" + std::to_string(i)});
    std::vector<Edge> es;
    std::set<std::pair<int, int>> used;
    auto add = [&](int u, int w) {
        if (u == w || used.count(std::minmax(u, w))) return;
        used.insert(std::minmax(u, w));
        if (integer(rng, 0, 1)) std::swap(u, w);
        es.push_back({"e" + std::to_string(es.size()), u, w, uniform(rng, 0.5, 1.5), uniform(rng, 0.5, 2.0)});
    };
    for (int i = 1; i < nv; ++i) add(integer(rng, 0, i - 1), i);
    const int chords = integer(rng, 0, max_chords);
    for (int k = 0; k < chords; ++k) add(integer(rng, 0, nv - 1), integer(rng, 0, nv - 1));

    std::vector<std::vector<int>> inc(nv);
    for (int a = 0; a < static_cast<int>(es.size()); ++a) {
        inc[es[a].from].push_back(a);
        inc[es[a].to].push_back(a);
    }
    std::vector<EntryProb> probs;
    for (int i = 0; i < nv; ++i) {
        std::vector<double> w;
        double total = 0.0;
        for (std::size_t k = 0; k < inc[i].size(); ++k) {
            w.push_back(uniform(rng, 0.2, 1.0));
            total += w.back();
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < inc[i].size(); ++k) {
            // last entry closes the sum so rounding cannot push it away from one
            const double p = k + 1 == inc[i].size() ? 1.0 - acc : w[k] / total;
            acc += p;
            probs.push_back({i, inc[i][k], p});
        }
    }
    return std::make_shared<const MetricNetwork>(vs, es, probs);
}

/// Nonnegative jump field with random traces (not normalized).
inline mfgnet::Vector density(Rng& rng, const mfgnet::Grid& grid) {
    mfgnet::Vector m(grid.dof_count());
    for (int k = 0; k < m.size(); ++k) m[k] = uniform(rng, 0.0, 1.0) * (integer(rng, 0, 4) == 0 ? 0.0 : 1.0);
    return m;
}

/// Random bounded nodal per-edge field with |values| <= bound.
inline mfgnet::EdgeArrays edge_field(Rng& rng, const mfgnet::Grid& grid, double bound) {
    mfgnet::EdgeArrays f(grid.edge_count());
    for (int a = 0; a < grid.edge_count(); ++a) {
        f[a].resize(grid.cells(a) + 1);
        for (int j = 0; j <= grid.cells(a); ++j) f[a][j] = uniform(rng, -bound, bound);
    }
    return f;
}

/// Random continuous field.
inline mfgnet::Vector value(Rng& rng, const mfgnet::Grid& grid, double bound) {
    mfgnet::Vector v(grid.dof_count());
    for (int k = 0; k < v.size(); ++k) v[k] = uniform(rng, -bound, bound);
    return v;
}

}  // namespace gen
