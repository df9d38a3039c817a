#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mfgnet/error.hpp"

namespace mfgnet {

struct Vertex {
    std::string name;
    bool artificial = false;
};

/// Oriented edge parametrized by y in [0, length], y = 0 at `from`.
struct Edge {
    std::string name;
    int from = -1;
    int to = -1;
    double length = 1.0;
    double mu = 1.0;
};

/// One (vertex, edge) incidence with its transmission coefficients.
struct Incidence {
    int edge = -1;
    int sign = 0;        // +1 if the vertex is the terminal point of the edge, -1 if it is the start
    double prob = 0.0;   // vertex-entry probability p
    double gamma = 0.0;  // jump weight p / mu
};

/// Explicit entry probability, as found in network files.
struct EntryProb {
    int vertex = -1;
    int edge = -1;
    double p = 0.0;
};

/// Immutable metric graph with diffusion coefficients and vertex-entry probabilities.
///
/// Vertices without any explicit entry probability default to p = mu / (sum of incident mu).
/// A vertex that lists some but not all of its incident edges keeps p = 0 on the missing
/// ones; validate() reports it.
class MetricNetwork {
public:
    MetricNetwork(std::vector<Vertex> vertices, std::vector<Edge> edges,
                  std::vector<EntryProb> entry_probs = {});

    [[nodiscard]] int vertex_count() const noexcept { return static_cast<int>(vertices_.size()); }
    [[nodiscard]] int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    [[nodiscard]] const Vertex& vertex(int i) const { return vertices_.at(i); }
    [[nodiscard]] const Edge& edge(int a) const { return edges_.at(a); }
    [[nodiscard]] const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }

    [[nodiscard]] std::span<const Incidence> incident(int i) const { return incidence_.at(i); }
    [[nodiscard]] int degree(int i) const { return static_cast<int>(incidence_.at(i).size()); }
    [[nodiscard]] bool is_boundary(int i) const { return degree(i) == 1; }

    /// Incidence record of edge `a` at vertex `i`; throws if `a` does not touch `i`.
    [[nodiscard]] const Incidence& incidence(int i, int a) const;
    [[nodiscard]] double entry_prob(int i, int a) const { return incidence(i, a).prob; }
    [[nodiscard]] double jump_weight(int i, int a) const { return incidence(i, a).gamma; }
    [[nodiscard]] int sign(int i, int a) const { return incidence(i, a).sign; }

    [[nodiscard]] double total_length() const;
    [[nodiscard]] std::optional<int> find_vertex(const std::string& name) const;
    [[nodiscard]] std::optional<int> find_edge(const std::string& name) const;

    /// Every vertex is either the start of all its edges or the end of all of them.
    [[nodiscard]] bool is_oriented() const;

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> incidence_;
};

[[nodiscard]] ValidationReport validate(const MetricNetwork& net);

/// Piece of an original edge inside a normalized network.
struct EdgePiece {
    int edge = -1;        // edge id in the normalized network
    double offset = 0.0;  // original coordinate where the piece begins
    double length = 0.0;
    bool reversed = false;  // piece coordinate runs against the original one
};

struct Normalization {
    MetricNetwork network;
    std::vector<std::vector<EdgePiece>> pieces;  // indexed by original edge, ordered along it

    /// Map an original (edge, y) to (normalized edge, coordinate).
    [[nodiscard]] std::pair<int, double> forward(int original_edge, double y) const;
    /// Map a normalized (edge, coordinate) back to the original (edge, y).
    [[nodiscard]] std::pair<int, double> backward(int edge, double s) const;
};

/// Reorients edges and splits odd-cycle edges at artificial midpoints so every vertex is
/// all-incoming or all-outgoing. Artificial vertices get p = 1/2 on both halves.
[[nodiscard]] Normalization normalize_orientation(const MetricNetwork& net);

struct VertexPoint {
    int vertex = -1;
};
struct EdgePoint {
    int edge = -1;
    double y = 0.0;
};
using NetworkPoint = std::variant<VertexPoint, EdgePoint>;

/// Inverse parametrization of edge `a` at point `x`; throws if the point is not on the edge.
[[nodiscard]] double edge_coordinate(const MetricNetwork& net, int a, const NetworkPoint& x);

}  // namespace mfgnet
