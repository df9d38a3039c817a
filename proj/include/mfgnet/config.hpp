#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfgnet/coupling.hpp"
#include "mfgnet/fp_solver.hpp"
#include "mfgnet/hamiltonian.hpp"
#include "mfgnet/hjb_solver.hpp"
#include "mfgnet/mfg.hpp"
#include "mfgnet/network.hpp"

namespace mfgnet {

using Json = nlohmann::json;

/// Network document. Strict: unknown keys are rejected.
///
///   { "vertices": ["v1", {"name": "v5", "artificial": true}],
///     "edges": [{"name": "e1", "from": "v1", "to": "v2", "length": 1, "mu": 1}],
///     "entry_probabilities": {"v1": {"e1": 0.5, ...}} }
[[nodiscard]] MetricNetwork parse_network(const Json& doc);
[[nodiscard]] MetricNetwork parse_network_text(const std::string& text);
[[nodiscard]] Json network_to_json(const MetricNetwork& net);

[[nodiscard]] std::string read_file(const std::string& path);

struct GridSpec {
    double h = 0.0;  // used when > 0
    int cells = 32;
    std::map<std::string, int> edge_cells;
};

struct HamiltonianSpec {
    std::string kind = "clipped_quadratic";
    double amax = 1.0;
    double c = 0.0;
    // legendre: L(y, a) = quadratic a^2 / 2 + linear a + constant on [a_min, a_max]
    double a_min = -1.0;
    double a_max = 1.0;
    double quadratic = 1.0;
    double linear = 0.0;
    double constant = 0.0;
    int control_grid = 64;
};

/// Scalar field on the network, used for m0, vT and f.
struct FieldSpec {
    std::string kind = "zero";  // zero, constant, vertex_distance, uniform, stationary, edge, bump
    double value = 0.0;
    double scale = 1.0;
    std::string vertex;
    std::string edge;
    double y = 0.0;
    double width = 0.1;

    [[nodiscard]] static FieldSpec of(std::string kind) {
        FieldSpec f;
        f.kind = std::move(kind);
        return f;
    }
};

/// Constant FP drift b per edge.
struct DriftSpec {
    double value = 0.0;
    std::map<std::string, double> edges;
};

struct SimSpec {
    long paths = 100000;
    double delta = 1e-4;
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<double> times;  // empty means {T}
    bool compare_fp = true;
};

struct RunConfig {
    GridSpec grid;
    double T = 1.0;
    int steps = 100;
    HamiltonianSpec hamiltonian;
    std::map<std::string, HamiltonianSpec> hamiltonian_edges;
    CouplingOperator coupling = CouplingOperator::local(LocalMap::identity);
    FieldSpec initial_density = FieldSpec::of("uniform");
    FieldSpec terminal_value = FieldSpec::of("zero");
    FieldSpec running_cost = FieldSpec::of("zero");
    DriftSpec drift;
    FPOptions fp;
    HJBOptions hjb;
    MFGConfig mfg;
    SimSpec simulate;
    int eig_k = 5;
    int output_every = 1;
    bool normalize = false;
};

/// Parses a run configuration; every section is optional and unknown keys are errors.
[[nodiscard]] RunConfig parse_config(const Json& doc);
[[nodiscard]] RunConfig parse_config_text(const std::string& text);
/// Fully resolved configuration, defaults included.
[[nodiscard]] Json config_to_json(const RunConfig& cfg);

[[nodiscard]] Grid make_grid(const RunConfig& cfg, std::shared_ptr<const MetricNetwork> net);
[[nodiscard]] HamiltonianModel make_hamiltonian(const RunConfig& cfg, const MetricNetwork& net);
/// Unit-mass jump field. With a normalization, edge names and coordinates in `spec` refer to
/// the original network.
[[nodiscard]] Vector make_density(const FieldSpec& spec, const Grid& grid,
                                  const MetricNetwork* original = nullptr,
                                  const Normalization* norm = nullptr);
/// Continuous field.
[[nodiscard]] Vector make_value(const FieldSpec& spec, const Grid& grid);
[[nodiscard]] EdgeArrays make_edge_field(const FieldSpec& spec, const Grid& grid);
[[nodiscard]] EdgeArrays make_drift(const DriftSpec& spec, const Grid& grid);

/// Shortest path distance from a vertex to every node, per edge.
[[nodiscard]] EdgeArrays vertex_distance(const Grid& grid, int vertex);

}  // namespace mfgnet
