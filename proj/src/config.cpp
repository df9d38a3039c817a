#include "mfgnet/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

namespace mfgnet {

namespace {

/// Strict view of one JSON object: every key must be read before finish().
class Reader {
public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(ErrorCode::parse, path_ + ": expected an object");
    }

    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

    const Json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    bool number(const std::string& key, double& out) {
        if (!has(key)) return false;
        const Json& v = raw(key);
        if (!v.is_number()) fail(ErrorCode::parse, where(key) + ": expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) fail(ErrorCode::parse, where(key) + ": must be finite");
        return true;
    }

    template <class Int>
    bool integer(const std::string& key, Int& out) {
        if (!has(key)) return false;
        const Json& v = raw(key);
        if (!v.is_number_integer()) fail(ErrorCode::parse, where(key) + ": expected an integer");
        out = v.get<Int>();
        return true;
    }

    bool boolean(const std::string& key, bool& out) {
        if (!has(key)) return false;
        const Json& v = raw(key);
        if (!v.is_boolean()) fail(ErrorCode::parse, where(key) + ": expected true or false");
        out = v.get<bool>();
        return true;
    }

    bool string(const std::string& key, std::string& out) {
        if (!has(key)) return false;
        const Json& v = raw(key);
        if (!v.is_string()) fail(ErrorCode::parse, where(key) + ": expected a string");
        out = v.get<std::string>();
        return true;
    }

    [[nodiscard]] std::string where(const std::string& key) const { return path_ + "." + key; }
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail(ErrorCode::parse, path_ + ": unknown key '" + it.key() + "'");
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& where, const std::string& what) {
    if (!ok) fail(ErrorCode::validation, where + ": " + what);
}

template <class T>
T pick(const std::string& where, const std::string& value,
       std::initializer_list<std::pair<const char*, T>> options) {
    std::string names;
    for (const auto& [name, v] : options) {
        if (value == name) return v;
        names += names.empty() ? name : std::string(", ") + name;
    }
    fail(ErrorCode::parse, where + ": unknown value '" + value + "' (expected one of " + names + ")");
}

Json parse_json(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        fail(ErrorCode::parse, what + ": " + e.what());
    }
}

HamiltonianSpec read_hamiltonian(Reader& r, HamiltonianSpec h) {
    r.string("kind", h.kind);
    pick<int>(r.where("kind"), h.kind,
              {{"clipped_quadratic", 0}, {"clipped_linear", 1}, {"zero", 2}, {"legendre", 3}});
    r.number("amax", h.amax);
    r.number("c", h.c);
    r.number("a_min", h.a_min);
    r.number("a_max", h.a_max);
    r.number("quadratic", h.quadratic);
    r.number("linear", h.linear);
    r.number("constant", h.constant);
    r.integer("control_grid", h.control_grid);
    require(h.amax > 0.0, r.where("amax"), "must be positive");
    require(h.c >= 0.0, r.where("c"), "must be nonnegative");
    require(h.a_min < h.a_max, r.path(), "a_min must be below a_max");
    require(h.control_grid >= 8, r.where("control_grid"), "must be at least 8");
    return h;
}

FieldSpec read_field(Reader& r, FieldSpec f, std::initializer_list<const char*> kinds) {
    r.string("kind", f.kind);
    bool known = false;
    for (const char* k : kinds) known = known || f.kind == k;
    if (!known) {
        std::string names;
        for (const char* k : kinds) names += names.empty() ? k : std::string(", ") + k;
        fail(ErrorCode::parse, r.where("kind") + ": unknown value '" + f.kind + "' (expected one of " + names + ")");
    }
    r.number("value", f.value);
    r.number("scale", f.scale);
    r.string("vertex", f.vertex);
    r.string("edge", f.edge);
    r.number("y", f.y);
    r.number("width", f.width);
    require(f.width > 0.0, r.where("width"), "must be positive");
    if (f.kind == "vertex_distance") require(!f.vertex.empty(), r.path(), "vertex_distance needs 'vertex'");
    if (f.kind == "edge" || f.kind == "bump") require(!f.edge.empty(), r.path(), f.kind + " needs 'edge'");
    return f;
}

Json field_json(const FieldSpec& f) {
    Json j = {{"kind", f.kind}};
    if (f.kind == "constant") j["value"] = f.value;
    if (f.kind == "vertex_distance") {
        j["vertex"] = f.vertex;
        j["scale"] = f.scale;
    }
    if (f.kind == "edge") j["edge"] = f.edge;
    if (f.kind == "bump") {
        j["edge"] = f.edge;
        j["y"] = f.y;
        j["width"] = f.width;
    }
    return j;
}

Json hamiltonian_json(const HamiltonianSpec& h) {
    Json j = {{"kind", h.kind}};
    if (h.kind == "clipped_quadratic") j["amax"] = h.amax;
    if (h.kind == "clipped_linear") {
        j["amax"] = h.amax;
        j["c"] = h.c;
    }
    if (h.kind == "legendre") {
        j["a_min"] = h.a_min;
        j["a_max"] = h.a_max;
        j["quadratic"] = h.quadratic;
        j["linear"] = h.linear;
        j["constant"] = h.constant;
        j["control_grid"] = h.control_grid;
    }
    return j;
}

std::shared_ptr<const EdgeHamiltonian> build_hamiltonian(const HamiltonianSpec& h, double length) {
    if (h.kind == "clipped_quadratic") return std::make_shared<ClippedQuadratic>(h.amax);
    if (h.kind == "clipped_linear") return std::make_shared<ClippedLinear>(h.amax, h.c);
    if (h.kind == "zero") return std::make_shared<ZeroHamiltonian>();
    LagrangianSpec spec;
    spec.a_min = h.a_min;
    spec.a_max = h.a_max;
    spec.length = length;
    const double q = h.quadratic, l = h.linear, c = h.constant;
    spec.L = [q, l, c](double, double a) { return 0.5 * q * a * a + l * a + c; };
    return legendre(spec, h.control_grid);
}

int vertex_id(const MetricNetwork& net, const std::string& name, const std::string& where) {
    auto v = net.find_vertex(name);
    if (!v) fail(ErrorCode::validation, where + ": unknown vertex '" + name + "'");
    return *v;
}

int edge_id(const MetricNetwork& net, const std::string& name, const std::string& where) {
    auto e = net.find_edge(name);
    if (!e) fail(ErrorCode::validation, where + ": unknown edge '" + name + "'");
    return *e;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

MetricNetwork parse_network(const Json& doc) {
    Reader r(doc, "network");
    if (!r.has("vertices") || !r.has("edges")) fail(ErrorCode::parse, "network: needs 'vertices' and 'edges'");

    std::vector<Vertex> vertices;
    std::map<std::string, int> vid;
    const Json& vs = r.raw("vertices");
    if (!vs.is_array()) fail(ErrorCode::parse, "network.vertices: expected an array");
    for (std::size_t k = 0; k < vs.size(); ++k) {
        Vertex v;
        if (vs[k].is_string()) {
            v.name = vs[k].get<std::string>();
        } else {
            Reader vr(vs[k], "network.vertices[" + std::to_string(k) + "]");
            if (!vr.string("name", v.name)) fail(ErrorCode::parse, vr.path() + ": needs 'name'");
            vr.boolean("artificial", v.artificial);
            vr.finish();
        }
        vid.emplace(v.name, static_cast<int>(vertices.size()));
        vertices.push_back(v);
    }

    std::vector<Edge> edges;
    std::map<std::string, int> eid;
    const Json& es = r.raw("edges");
    if (!es.is_array()) fail(ErrorCode::parse, "network.edges: expected an array");
    for (std::size_t k = 0; k < es.size(); ++k) {
        Reader er(es[k], "network.edges[" + std::to_string(k) + "]");
        Edge e;
        std::string from, to;
        if (!er.string("name", e.name) || !er.string("from", from) || !er.string("to", to))
            fail(ErrorCode::parse, er.path() + ": needs 'name', 'from' and 'to'");
        er.number("length", e.length);
        er.number("mu", e.mu);
        er.finish();
        auto f = vid.find(from), t = vid.find(to);
        if (f == vid.end()) fail(ErrorCode::parse, er.where("from") + ": unknown vertex '" + from + "'");
        if (t == vid.end()) fail(ErrorCode::parse, er.where("to") + ": unknown vertex '" + to + "'");
        e.from = f->second;
        e.to = t->second;
        eid.emplace(e.name, static_cast<int>(edges.size()));
        edges.push_back(e);
    }

    std::vector<EntryProb> probs;
    if (r.has("entry_probabilities")) {
        const Json& ps = r.raw("entry_probabilities");
        if (!ps.is_object()) fail(ErrorCode::parse, "network.entry_probabilities: expected an object");
        for (auto it = ps.begin(); it != ps.end(); ++it) {
            const std::string where = "network.entry_probabilities." + it.key();
            auto v = vid.find(it.key());
            if (v == vid.end()) fail(ErrorCode::parse, where + ": unknown vertex");
            if (!it->is_object()) fail(ErrorCode::parse, where + ": expected an object");
            for (auto jt = it->begin(); jt != it->end(); ++jt) {
                auto e = eid.find(jt.key());
                if (e == eid.end()) fail(ErrorCode::parse, where + ": unknown edge '" + jt.key() + "'");
                if (!jt->is_number()) fail(ErrorCode::parse, where + "." + jt.key() + ": expected a number");
                probs.push_back({v->second, e->second, jt->get<double>()});
            }
        }
    }
    r.finish();
    try {
        return MetricNetwork(std::move(vertices), std::move(edges), std::move(probs));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(ErrorCode::parse, std::string("network: ") + e.what());
    }
}

MetricNetwork parse_network_text(const std::string& text) { return parse_network(parse_json(text, "network")); }

Json network_to_json(const MetricNetwork& net) {
    Json vs = Json::array();
    for (const Vertex& v : net.vertices()) {
        if (v.artificial) vs.push_back({{"name", v.name}, {"artificial", true}});
        else vs.push_back(v.name);
    }
    Json es = Json::array();
    for (const Edge& e : net.edges())
        es.push_back({{"name", e.name},
                      {"from", net.vertex(e.from).name},
                      {"to", net.vertex(e.to).name},
                      {"length", e.length},
                      {"mu", e.mu}});
    Json ps = Json::object();
    for (int i = 0; i < net.vertex_count(); ++i)
        for (const Incidence& inc : net.incident(i)) ps[net.vertex(i).name][net.edge(inc.edge).name] = inc.prob;
    return {{"vertices", vs}, {"edges", es}, {"entry_probabilities", ps}};
}

RunConfig parse_config(const Json& doc) {
    RunConfig cfg;
    Reader r(doc, "config");

    if (r.has("grid")) {
        Reader g(r.raw("grid"), "config.grid");
        g.number("h", cfg.grid.h);
        g.integer("cells", cfg.grid.cells);
        if (g.has("edge_cells")) {
            const Json& c = g.raw("edge_cells");
            if (!c.is_object()) fail(ErrorCode::parse, "config.grid.edge_cells: expected an object");
            for (auto it = c.begin(); it != c.end(); ++it) {
                if (!it->is_number_integer())
                    fail(ErrorCode::parse, "config.grid.edge_cells." + it.key() + ": expected an integer");
                cfg.grid.edge_cells[it.key()] = it->get<int>();
            }
        }
        g.finish();
        require(cfg.grid.h >= 0.0, "config.grid.h", "must be positive");
        require(cfg.grid.cells >= 2, "config.grid.cells", "must be at least 2");
        for (const auto& [name, n] : cfg.grid.edge_cells) require(n >= 2, "config.grid.edge_cells." + name, "must be at least 2");
    }

    if (r.has("time")) {
        Reader t(r.raw("time"), "config.time");
        t.number("T", cfg.T);
        t.integer("steps", cfg.steps);
        t.finish();
        require(cfg.T > 0.0, "config.time.T", "must be positive");
        require(cfg.steps >= 1, "config.time.steps", "must be at least 1");
    }

    if (r.has("hamiltonian")) {
        Reader h(r.raw("hamiltonian"), "config.hamiltonian");
        if (h.has("edges")) {
            const Json& es = h.raw("edges");
            if (!es.is_object()) fail(ErrorCode::parse, "config.hamiltonian.edges: expected an object");
            for (auto it = es.begin(); it != es.end(); ++it) {
                Reader er(*it, "config.hamiltonian.edges." + it.key());
                cfg.hamiltonian_edges[it.key()] = read_hamiltonian(er, HamiltonianSpec{});
                er.finish();
            }
        }
        cfg.hamiltonian = read_hamiltonian(h, cfg.hamiltonian);
        h.finish();
    }

    if (r.has("coupling")) {
        Reader c(r.raw("coupling"), "config.coupling");
        std::string kind = "local", map = "identity";
        double lambda = 1.0, bandwidth = 0.1, amplitude = 1.0;
        c.string("kind", kind);
        c.string("map", map);
        c.number("lambda", lambda);
        c.number("bandwidth", bandwidth);
        c.number("amplitude", amplitude);
        c.finish();
        const int k = pick<int>("config.coupling.kind", kind, {{"local", 0}, {"nonlocal", 1}, {"none", 2}});
        if (k == 0) {
            cfg.coupling = CouplingOperator::local(
                pick<LocalMap>("config.coupling.map", map,
                               {{"identity", LocalMap::identity},
                                {"scaled", LocalMap::scaled_identity},
                                {"bounded", LocalMap::bounded},
                                {"zero", LocalMap::zero}}),
                lambda);
            require(lambda >= 0.0, "config.coupling.lambda", "must be nonnegative");
        } else if (k == 1) {
            require(bandwidth > 0.0, "config.coupling.bandwidth", "must be positive");
            require(amplitude >= 0.0, "config.coupling.amplitude", "must be nonnegative");
            cfg.coupling = CouplingOperator::nonlocal(bandwidth, amplitude);
        } else {
            cfg.coupling = CouplingOperator::local(LocalMap::zero);
        }
    }

    if (r.has("initial_density")) {
        Reader f(r.raw("initial_density"), "config.initial_density");
        cfg.initial_density = read_field(f, cfg.initial_density, {"uniform", "stationary", "edge", "bump"});
        f.finish();
    }
    if (r.has("terminal_value")) {
        Reader f(r.raw("terminal_value"), "config.terminal_value");
        cfg.terminal_value = read_field(f, cfg.terminal_value, {"zero", "constant", "vertex_distance"});
        f.finish();
    }
    if (r.has("running_cost")) {
        Reader f(r.raw("running_cost"), "config.running_cost");
        cfg.running_cost = read_field(f, cfg.running_cost, {"zero", "constant", "vertex_distance"});
        f.finish();
    }

    if (r.has("drift")) {
        Reader d(r.raw("drift"), "config.drift");
        d.number("value", cfg.drift.value);
        if (d.has("edges")) {
            const Json& es = d.raw("edges");
            if (!es.is_object()) fail(ErrorCode::parse, "config.drift.edges: expected an object");
            for (auto it = es.begin(); it != es.end(); ++it) {
                if (!it->is_number()) fail(ErrorCode::parse, "config.drift.edges." + it.key() + ": expected a number");
                cfg.drift.edges[it.key()] = it->get<double>();
            }
        }
        d.finish();
    }

    if (r.has("fp")) {
        Reader f(r.raw("fp"), "config.fp");
        std::string transport = "upwind";
        f.number("theta", cfg.fp.theta);
        f.string("transport", transport);
        f.boolean("explicit_transport", cfg.fp.explicit_transport);
        f.finish();
        cfg.fp.transport = pick<Transport>("config.fp.transport", transport,
                                           {{"upwind", Transport::upwind}, {"centered", Transport::centered}});
        require(cfg.fp.theta >= 0.5 && cfg.fp.theta <= 1.0, "config.fp.theta", "must lie in [0.5, 1]");
    }

    if (r.has("hjb")) {
        Reader h(r.raw("hjb"), "config.hjb");
        std::string mode = "monotone";
        h.string("mode", mode);
        h.boolean("implicit_hamiltonian", cfg.hjb.implicit_hamiltonian);
        h.integer("inner_max_iterations", cfg.hjb.inner_max_iterations);
        h.number("inner_tolerance", cfg.hjb.inner_tolerance);
        h.finish();
        cfg.hjb.mode = pick<GradientMode>("config.hjb.mode", mode,
                                          {{"monotone", GradientMode::monotone}, {"centered", GradientMode::centered}});
        require(cfg.hjb.inner_max_iterations >= 1, "config.hjb.inner_max_iterations", "must be at least 1");
        require(cfg.hjb.inner_tolerance > 0.0, "config.hjb.inner_tolerance", "must be positive");
    }

    if (r.has("mfg")) {
        Reader m(r.raw("mfg"), "config.mfg");
        std::string mode = "monotone", guess = "zero";
        m.number("omega", cfg.mfg.omega);
        m.integer("max_iterations", cfg.mfg.max_iterations);
        m.number("tolerance", cfg.mfg.tolerance);
        m.boolean("duality_pairing", cfg.mfg.duality_pairing);
        m.string("mode", mode);
        m.string("initial_guess", guess);
        m.finish();
        cfg.mfg.mode = pick<GradientMode>("config.mfg.mode", mode,
                                          {{"monotone", GradientMode::monotone}, {"centered", GradientMode::centered}});
        cfg.mfg.initial_guess = pick<InitialGuess>("config.mfg.initial_guess", guess,
                                                   {{"zero", InitialGuess::zero}, {"terminal", InitialGuess::terminal}});
        require(cfg.mfg.omega > 0.0 && cfg.mfg.omega <= 1.0, "config.mfg.omega", "must lie in (0, 1]");
        require(cfg.mfg.max_iterations >= 1, "config.mfg.max_iterations", "must be at least 1");
        require(cfg.mfg.tolerance > 0.0, "config.mfg.tolerance", "must be positive");
    }

    if (r.has("simulate")) {
        Reader s(r.raw("simulate"), "config.simulate");
        s.integer("paths", cfg.simulate.paths);
        s.number("delta", cfg.simulate.delta);
        s.integer("seed", cfg.simulate.seed);
        s.integer("threads", cfg.simulate.threads);
        s.boolean("compare_fp", cfg.simulate.compare_fp);
        if (s.has("times")) {
            const Json& ts = s.raw("times");
            if (!ts.is_array()) fail(ErrorCode::parse, "config.simulate.times: expected an array");
            for (const Json& t : ts) {
                if (!t.is_number()) fail(ErrorCode::parse, "config.simulate.times: expected numbers");
                cfg.simulate.times.push_back(t.get<double>());
            }
        }
        s.finish();
        require(cfg.simulate.paths >= 1, "config.simulate.paths", "must be at least 1");
        require(cfg.simulate.delta > 0.0, "config.simulate.delta", "must be positive");
        require(cfg.simulate.threads >= 1, "config.simulate.threads", "must be at least 1");
        for (double t : cfg.simulate.times) require(t >= 0.0, "config.simulate.times", "must be nonnegative");
    }

    if (r.has("eig")) {
        Reader e(r.raw("eig"), "config.eig");
        e.integer("k", cfg.eig_k);
        e.finish();
        require(cfg.eig_k >= 1, "config.eig.k", "must be at least 1");
    }

    if (r.has("output")) {
        Reader o(r.raw("output"), "config.output");
        o.integer("every", cfg.output_every);
        o.finish();
        require(cfg.output_every >= 1, "config.output.every", "must be at least 1");
    }

    r.boolean("normalize", cfg.normalize);
    r.finish();
    return cfg;
}

RunConfig parse_config_text(const std::string& text) { return parse_config(parse_json(text, "config")); }

Json config_to_json(const RunConfig& cfg) {
    Json j;
    j["grid"] = {{"h", cfg.grid.h}, {"cells", cfg.grid.cells}};
    if (!cfg.grid.edge_cells.empty()) j["grid"]["edge_cells"] = cfg.grid.edge_cells;
    j["time"] = {{"T", cfg.T}, {"steps", cfg.steps}};
    j["hamiltonian"] = hamiltonian_json(cfg.hamiltonian);
    if (!cfg.hamiltonian_edges.empty())
        for (const auto& [name, h] : cfg.hamiltonian_edges) j["hamiltonian"]["edges"][name] = hamiltonian_json(h);

    const CouplingOperator& c = cfg.coupling;
    if (c.kind == CouplingOperator::Kind::nonlocal) {
        j["coupling"] = {{"kind", "nonlocal"}, {"bandwidth", c.bandwidth}, {"amplitude", c.amplitude}};
    } else {
        const char* map = c.map == LocalMap::identity          ? "identity"
                          : c.map == LocalMap::scaled_identity ? "scaled"
                          : c.map == LocalMap::bounded         ? "bounded"
                                                               : "zero";
        j["coupling"] = {{"kind", "local"}, {"map", map}, {"lambda", c.lambda}};
    }

    j["initial_density"] = field_json(cfg.initial_density);
    j["terminal_value"] = field_json(cfg.terminal_value);
    j["running_cost"] = field_json(cfg.running_cost);
    j["drift"] = {{"value", cfg.drift.value}};
    if (!cfg.drift.edges.empty()) j["drift"]["edges"] = cfg.drift.edges;
    j["fp"] = {{"theta", cfg.fp.theta},
               {"transport", cfg.fp.transport == Transport::upwind ? "upwind" : "centered"},
               {"explicit_transport", cfg.fp.explicit_transport}};
    j["hjb"] = {{"mode", cfg.hjb.mode == GradientMode::monotone ? "monotone" : "centered"},
                {"implicit_hamiltonian", cfg.hjb.implicit_hamiltonian},
                {"inner_max_iterations", cfg.hjb.inner_max_iterations},
                {"inner_tolerance", cfg.hjb.inner_tolerance}};
    j["mfg"] = {{"omega", cfg.mfg.omega},
                {"max_iterations", cfg.mfg.max_iterations},
                {"tolerance", cfg.mfg.tolerance},
                {"duality_pairing", cfg.mfg.duality_pairing},
                {"mode", cfg.mfg.mode == GradientMode::monotone ? "monotone" : "centered"},
                {"initial_guess", cfg.mfg.initial_guess == InitialGuess::zero ? "zero" : "terminal"}};
    j["simulate"] = {{"paths", cfg.simulate.paths},
                     {"delta", cfg.simulate.delta},
                     {"seed", cfg.simulate.seed},
                     {"threads", cfg.simulate.threads},
                     {"times", cfg.simulate.times},
                     {"compare_fp", cfg.simulate.compare_fp}};
    j["eig"] = {{"k", cfg.eig_k}};
    j["output"] = {{"every", cfg.output_every}};
    j["normalize"] = cfg.normalize;
    return j;
}

Grid make_grid(const RunConfig& cfg, std::shared_ptr<const MetricNetwork> net) {
    std::vector<int> cells(net->edge_count());
    for (int a = 0; a < net->edge_count(); ++a) {
        const Edge& e = net->edge(a);
        cells[a] = cfg.grid.h > 0.0 ? std::max(2, static_cast<int>(std::lround(e.length / cfg.grid.h)))
                                    : cfg.grid.cells;
    }
    for (const auto& [name, n] : cfg.grid.edge_cells) cells[edge_id(*net, name, "config.grid.edge_cells")] = n;
    return Grid(std::move(net), std::move(cells), cfg.T, cfg.steps);
}

HamiltonianModel make_hamiltonian(const RunConfig& cfg, const MetricNetwork& net) {
    std::vector<std::shared_ptr<const EdgeHamiltonian>> per_edge;
    for (int a = 0; a < net.edge_count(); ++a) per_edge.push_back(build_hamiltonian(cfg.hamiltonian, net.edge(a).length));
    for (const auto& [name, h] : cfg.hamiltonian_edges) {
        const int a = edge_id(net, name, "config.hamiltonian.edges");
        per_edge[a] = build_hamiltonian(h, net.edge(a).length);
    }
    return HamiltonianModel(std::move(per_edge));
}

EdgeArrays vertex_distance(const Grid& grid, int vertex) {
    const MetricNetwork& net = grid.network();
    std::vector<double> d(net.vertex_count(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
    d.at(vertex) = 0.0;
    q.emplace(0.0, vertex);
    while (!q.empty()) {
        auto [du, u] = q.top();
        q.pop();
        if (du > d[u]) continue;
        for (const Incidence& inc : net.incident(u)) {
            const Edge& e = net.edge(inc.edge);
            const int w = e.from == u ? e.to : e.from;
            if (du + e.length < d[w]) {
                d[w] = du + e.length;
                q.emplace(d[w], w);
            }
        }
    }
    return sample_edges(grid, [&](int a, double y) {
        const Edge& e = net.edge(a);
        return std::min(d[e.from] + y, d[e.to] + e.length - y);
    });
}

EdgeArrays make_edge_field(const FieldSpec& spec, const Grid& grid) {
    if (spec.kind == "zero") return sample_edges(grid, [](int, double) { return 0.0; });
    if (spec.kind == "constant") return sample_edges(grid, [&](int, double) { return spec.value; });
    if (spec.kind == "vertex_distance") {
        EdgeArrays d = vertex_distance(grid, vertex_id(grid.network(), spec.vertex, "vertex_distance"));
        for (Vector& x : d) x *= spec.scale;
        return d;
    }
    fail(ErrorCode::invalid_argument, "field kind '" + spec.kind + "' is not a value field");
}

Vector make_value(const FieldSpec& spec, const Grid& grid) {
    const EdgeArrays f = make_edge_field(spec, grid);
    return sample_continuous(grid, [&](int a, double y) {
        const int j = static_cast<int>(std::lround(y / grid.h(a)));
        return f[a][j];
    });
}

Vector make_density(const FieldSpec& spec, const Grid& grid, const MetricNetwork* original,
                    const Normalization* norm) {
    const MetricNetwork& names = original && norm ? *original : grid.network();
    auto pull = [&](int a, double y) {
        return original && norm ? norm->backward(a, y) : std::make_pair(a, y);
    };
    Vector m;
    if (spec.kind == "stationary") {
        m = stationary_density(grid);
    } else if (spec.kind == "uniform") {
        m = sample_jump(grid, [](int, double) { return 1.0; });
    } else if (spec.kind == "edge") {
        const int e = edge_id(names, spec.edge, "initial_density");
        m = sample_jump(grid, [&](int a, double y) { return pull(a, y).first == e ? 1.0 : 0.0; });
    } else if (spec.kind == "bump") {
        const int e = edge_id(names, spec.edge, "initial_density");
        if (spec.y < 0.0 || spec.y > names.edge(e).length)
            fail(ErrorCode::validation, "initial_density.y: outside edge " + spec.edge);
        m = sample_jump(grid, [&](int a, double y) {
            const auto [oa, oy] = pull(a, y);
            if (oa != e || std::abs(oy - spec.y) >= spec.width) return 0.0;
            return 1.0 + std::cos(M_PI * (oy - spec.y) / spec.width);
        });
    } else {
        fail(ErrorCode::invalid_argument, "field kind '" + spec.kind + "' is not a density");
    }
    const double mass = integrate(grid, m, TraceKind::jump);
    if (!(mass > 0.0)) fail(ErrorCode::validation, "initial density has no mass on this grid");
    return m / mass;
}

EdgeArrays make_drift(const DriftSpec& spec, const Grid& grid) {
    std::vector<double> b(grid.edge_count(), spec.value);
    for (const auto& [name, value] : spec.edges) b[edge_id(grid.network(), name, "config.drift.edges")] = value;
    return sample_edges(grid, [&](int a, double) { return b[a]; });
}

}  // namespace mfgnet
