#include "mfgnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace mfgnet {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

MetricNetwork::MetricNetwork(std::vector<Vertex> vertices, std::vector<Edge> edges,
                             std::vector<EntryProb> entry_probs)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), incidence_(vertices_.size()) {
    const int nv = vertex_count();
    for (int a = 0; a < edge_count(); ++a) {
        const Edge& e = edges_[a];
        if (e.from < 0 || e.from >= nv || e.to < 0 || e.to >= nv)
            fail(ErrorCode::invalid_argument, "edge '" + e.name + "' references an unknown vertex");
        incidence_[e.from].push_back({a, -1, 0.0, 0.0});
        if (e.to != e.from) incidence_[e.to].push_back({a, +1, 0.0, 0.0});
    }

    std::vector<bool> explicit_probs(nv, false);
    for (const EntryProb& ep : entry_probs) {
        if (ep.vertex < 0 || ep.vertex >= nv)
            fail(ErrorCode::invalid_argument, "entry probability references an unknown vertex");
        bool found = false;
        for (Incidence& inc : incidence_[ep.vertex]) {
            if (inc.edge == ep.edge) {
                inc.prob = ep.p;
                found = true;
            }
        }
        if (!found)
            fail(ErrorCode::invalid_argument, "entry probability for vertex '" +
                                                  vertices_[ep.vertex].name +
                                                  "' names an edge that does not touch it");
        explicit_probs[ep.vertex] = true;
    }

    for (int i = 0; i < nv; ++i) {
        if (!explicit_probs[i]) {
            double total = 0.0;
            for (const Incidence& inc : incidence_[i]) total += edges_[inc.edge].mu;
            for (Incidence& inc : incidence_[i])
                inc.prob = total > 0.0 ? edges_[inc.edge].mu / total : 0.0;
        }
        for (Incidence& inc : incidence_[i]) {
            const double mu = edges_[inc.edge].mu;
            inc.gamma = mu > 0.0 ? inc.prob / mu : 0.0;
        }
    }
}

const Incidence& MetricNetwork::incidence(int i, int a) const {
    for (const Incidence& inc : incidence_.at(i))
        if (inc.edge == a) return inc;
    fail(ErrorCode::invalid_argument,
         "edge " + std::to_string(a) + " is not incident to vertex " + std::to_string(i));
}

double MetricNetwork::total_length() const {
    double s = 0.0;
    for (const Edge& e : edges_) s += e.length;
    return s;
}

std::optional<int> MetricNetwork::find_vertex(const std::string& name) const {
    for (int i = 0; i < vertex_count(); ++i)
        if (vertices_[i].name == name) return i;
    return std::nullopt;
}

std::optional<int> MetricNetwork::find_edge(const std::string& name) const {
    for (int a = 0; a < edge_count(); ++a)
        if (edges_[a].name == name) return a;
    return std::nullopt;
}

bool MetricNetwork::is_oriented() const {
    for (const auto& incs : incidence_) {
        for (const Incidence& inc : incs)
            if (inc.sign != incs.front().sign) return false;
    }
    return true;
}

ValidationReport validate(const MetricNetwork& net) {
    ValidationReport r;
    const int nv = net.vertex_count();
    if (nv == 0) {
        r.add("network has no vertices");
        return r;
    }
    if (net.edge_count() == 0) r.add("network has no edges");

    std::set<std::string> names;
    for (const Vertex& v : net.vertices())
        if (!names.insert(v.name).second) r.add("duplicate vertex name '" + v.name + "'");
    names.clear();
    for (const Edge& e : net.edges())
        if (!names.insert(e.name).second) r.add("duplicate edge name '" + e.name + "'");

    std::set<std::pair<int, int>> pairs;
    for (const Edge& e : net.edges()) {
        if (e.from == e.to) r.add("edge '" + e.name + "' has identical endpoints");
        if (!(e.length > 0.0) || !std::isfinite(e.length))
            r.add("edge '" + e.name + "' has non-positive length " + fmt(e.length));
        if (!(e.mu > 0.0) || !std::isfinite(e.mu))
            r.add("edge '" + e.name + "' has non-positive diffusion " + fmt(e.mu));
        const auto key = std::minmax(e.from, e.to);
        if (e.from != e.to && !pairs.insert(key).second)
            r.add("edge '" + e.name + "' duplicates another edge between the same vertices");
    }

    for (int i = 0; i < nv; ++i) {
        const auto incs = net.incident(i);
        const std::string& name = net.vertex(i).name;
        if (incs.empty()) {
            r.add("vertex '" + name + "' has no incident edge");
            continue;
        }
        double sum = 0.0;
        for (const Incidence& inc : incs) {
            sum += inc.prob;
            if (!(inc.prob > 0.0) || inc.prob > 1.0)
                r.add("entry probability at vertex '" + name + "' on edge '" +
                      net.edge(inc.edge).name + "' is outside (0,1]: " + fmt(inc.prob));
        }
        if (std::abs(sum - 1.0) > 1e-12)
            r.add("probabilities sum != 1 at vertex '" + name + "' (sum = " + fmt(sum) + ")");
    }

    std::vector<bool> seen(nv, false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    int reached = 1;
    while (!q.empty()) {
        const int i = q.front();
        q.pop();
        for (const Incidence& inc : net.incident(i)) {
            const Edge& e = net.edge(inc.edge);
            const int j = e.from == i ? e.to : e.from;
            if (!seen[j]) {
                seen[j] = true;
                ++reached;
                q.push(j);
            }
        }
    }
    if (reached != nv) r.add("network is not connected");
    return r;
}

std::pair<int, double> Normalization::forward(int original_edge, double y) const {
    const auto& ps = pieces.at(original_edge);
    for (std::size_t k = 0; k < ps.size(); ++k) {
        const EdgePiece& piece = ps[k];
        const bool last = k + 1 == ps.size();
        if (y <= piece.offset + piece.length || last) {
            double s = std::clamp(y - piece.offset, 0.0, piece.length);
            return {piece.edge, piece.reversed ? piece.length - s : s};
        }
    }
    fail(ErrorCode::invalid_argument, "edge has no pieces");
}

std::pair<int, double> Normalization::backward(int edge, double s) const {
    for (std::size_t a = 0; a < pieces.size(); ++a) {
        for (const EdgePiece& piece : pieces[a]) {
            if (piece.edge == edge)
                return {static_cast<int>(a), piece.offset + (piece.reversed ? piece.length - s : s)};
        }
    }
    fail(ErrorCode::invalid_argument, "edge " + std::to_string(edge) + " is not part of the normalization");
}

Normalization normalize_orientation(const MetricNetwork& net) {
    const int nv = net.vertex_count();
    // color 0: every incident edge starts at the vertex; color 1: every incident edge ends there.
    std::vector<int> color(nv, -1);
    for (int root = 0; root < nv; ++root) {
        if (color[root] >= 0) continue;
        int starts = 0;
        for (const Incidence& inc : net.incident(root)) starts += inc.sign < 0 ? 1 : 0;
        color[root] = 2 * starts >= net.degree(root) ? 0 : 1;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            const int i = q.front();
            q.pop();
            for (const Incidence& inc : net.incident(i)) {
                const Edge& e = net.edge(inc.edge);
                const int j = e.from == i ? e.to : e.from;
                if (color[j] < 0) {
                    color[j] = 1 - color[i];
                    q.push(j);
                }
            }
        }
    }

    std::vector<Vertex> vertices = net.vertices();
    std::vector<Edge> edges;
    std::vector<std::vector<EdgePiece>> pieces(net.edge_count());
    // probability at (vertex, new edge) inherited from the original incidence
    std::vector<EntryProb> probs;

    auto add_edge = [&](const std::string& name, int u, int w, double len, double mu) {
        // orient from the color-0 endpoint to the color-1 endpoint
        const bool flip = color[u] != 0;
        Edge e{name, flip ? w : u, flip ? u : w, len, mu};
        edges.push_back(e);
        return std::make_pair(static_cast<int>(edges.size()) - 1, flip);
    };

    for (int a = 0; a < net.edge_count(); ++a) {
        const Edge& e = net.edge(a);
        const double pf = net.entry_prob(e.from, a);
        const double pt = net.entry_prob(e.to, a);
        if (color[e.from] != color[e.to]) {
            auto [id, flip] = add_edge(e.name, e.from, e.to, e.length, e.mu);
            pieces[a].push_back({id, 0.0, e.length, flip});
            probs.push_back({e.from, id, pf});
            probs.push_back({e.to, id, pt});
            continue;
        }
        const int mid = static_cast<int>(vertices.size());
        vertices.push_back({e.name + ".mid", true});
        color.push_back(1 - color[e.from]);
        const double half = 0.5 * e.length;
        auto [id1, flip1] = add_edge(e.name + ".1", e.from, mid, half, e.mu);
        auto [id2, flip2] = add_edge(e.name + ".2", mid, e.to, half, e.mu);
        pieces[a].push_back({id1, 0.0, half, flip1});
        pieces[a].push_back({id2, half, half, flip2});
        probs.push_back({e.from, id1, pf});
        probs.push_back({e.to, id2, pt});
        probs.push_back({mid, id1, 0.5});
        probs.push_back({mid, id2, 0.5});
    }

    return Normalization{MetricNetwork(std::move(vertices), std::move(edges), std::move(probs)),
                         std::move(pieces)};
}

double edge_coordinate(const MetricNetwork& net, int a, const NetworkPoint& x) {
    const Edge& e = net.edge(a);
    if (const auto* v = std::get_if<VertexPoint>(&x)) {
        if (v->vertex == e.from) return 0.0;
        if (v->vertex == e.to) return e.length;
        fail(ErrorCode::invalid_argument, "vertex is not an endpoint of edge '" + e.name + "'");
    }
    const auto& p = std::get<EdgePoint>(x);
    if (p.edge != a)
        fail(ErrorCode::invalid_argument, "point does not lie on edge '" + e.name + "'");
    if (!(p.y >= 0.0 && p.y <= e.length))
        fail(ErrorCode::invalid_argument,
             "coordinate " + fmt(p.y) + " is outside edge '" + e.name + "'");
    return p.y;
}

}  // namespace mfgnet
