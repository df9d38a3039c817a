#include "mfgnet/run.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "mfgnet/log.hpp"
#include "mfgnet/montecarlo.hpp"
#include "mfgnet/spectral.hpp"

#ifndef MFGNET_VERSION
#define MFGNET_VERSION "0.0.0"
#endif

namespace mfgnet {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Collects output files; nothing touches the disk when the directory is empty.
class Output {
public:
    explicit Output(std::string dir) : dir_(std::move(dir)) {
        if (dir_.empty()) return;
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) fail(ErrorCode::io, "cannot create output directory " + dir_ + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        if (dir_.empty()) return;
        const std::string path = (std::filesystem::path(dir_) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) fail(ErrorCode::io, "cannot write " + path);
        out << content;
        if (!out) fail(ErrorCode::io, "write failed for " + path);
        files_.emplace_back(name, sha256_hex(content));
    }

    [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& files() const noexcept { return files_; }

private:
    std::string dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string field_csv(const Grid& grid, const std::vector<Vector>& traj, TraceKind kind, const char* column,
                      int every) {
    std::ostringstream os;
    os << "n,t,edge,j,y," << column << "\n";
    const int N = static_cast<int>(traj.size()) - 1;
    for (int n = 0; n <= N; ++n) {
        if (n % every != 0 && n != N) continue;
        const EdgeArrays t = traces(grid, traj[n], kind);
        for (int a = 0; a < grid.edge_count(); ++a) {
            const std::string& name = grid.network().edge(a).name;
            for (int j = 0; j <= grid.cells(a); ++j)
                os << n << ',' << num(grid.time(n)) << ',' << name << ',' << j << ',' << num(grid.y(a, j)) << ','
                   << num(t[a][j]) << "\n";
        }
    }
    return os.str();
}

struct Context {
    RunConfig cfg;
    std::shared_ptr<const MetricNetwork> original;
    std::shared_ptr<const MetricNetwork> net;
    std::optional<Normalization> norm;
    std::optional<Grid> grid;

    [[nodiscard]] Vector density() const {
        return norm ? make_density(cfg.initial_density, *grid, original.get(), &*norm)
                    : make_density(cfg.initial_density, *grid);
    }
};

Context prepare(const RunInputs& in, bool build_grid) {
    Context c;
    c.cfg = in.config.value_or(RunConfig{});
    c.original = in.network;
    c.net = in.network;
    if (!build_grid) return c;
    const ValidationReport rep = validate(*c.original);
    if (!rep.ok()) fail(ErrorCode::validation, "invalid network: " + rep.violations.front());
    if (c.cfg.normalize) {
        c.norm = normalize_orientation(*c.original);
        c.cfg = remap_config(c.cfg, *c.original, *c.norm);
        c.net = std::make_shared<const MetricNetwork>(c.norm->network);
    }
    c.grid = make_grid(c.cfg, c.net);
    return c;
}

std::string normalization_csv(const Context& c) {
    std::ostringstream os;
    os << "original_edge,edge,offset,length,reversed\n";
    for (int a = 0; a < c.original->edge_count(); ++a)
        for (const EdgePiece& p : c.norm->pieces[a])
            os << c.original->edge(a).name << ',' << c.net->edge(p.edge).name << ',' << num(p.offset) << ','
               << num(p.length) << ',' << (p.reversed ? 1 : 0) << "\n";
    return os.str();
}

/// Largest entry over all time levels except the terminal one, which holds data.
double max_abs_before_terminal(const std::vector<Vector>& xs) {
    double m = 0.0;
    for (std::size_t n = 0; n + 1 < xs.size(); ++n)
        if (xs[n].size()) m = std::max(m, xs[n].cwiseAbs().maxCoeff());
    return m;
}

struct Outcome {
    bool passed = true;
    std::optional<ErrorCode> failure;
    Json summary = Json::object();
    std::string table;  // extra text appended to the summary
};

Outcome cmd_validate(const Context& c, Output& out) {
    Outcome o;
    const MetricNetwork& net = *c.original;
    const ValidationReport rep = validate(net);
    int boundary = 0, artificial = 0;
    std::ostringstream vs, es;
    vs << "vertex,degree,boundary,artificial\n";
    for (int i = 0; i < net.vertex_count(); ++i) {
        boundary += net.is_boundary(i) ? 1 : 0;
        artificial += net.vertex(i).artificial ? 1 : 0;
        vs << net.vertex(i).name << ',' << net.degree(i) << ',' << (net.is_boundary(i) ? 1 : 0) << ','
           << (net.vertex(i).artificial ? 1 : 0) << "\n";
    }
    es << "edge,from,to,length,mu,p_from,p_to\n";
    for (int a = 0; a < net.edge_count(); ++a) {
        const Edge& e = net.edge(a);
        es << e.name << ',' << net.vertex(e.from).name << ',' << net.vertex(e.to).name << ',' << num(e.length) << ','
           << num(e.mu) << ',' << num(net.entry_prob(e.from, a)) << ',' << num(net.entry_prob(e.to, a)) << "\n";
    }
    out.write("vertices.csv", vs.str());
    out.write("edges.csv", es.str());
    o.summary["vertices"] = net.vertex_count();
    o.summary["edges"] = net.edge_count();
    o.summary["boundary_vertices"] = boundary;
    o.summary["artificial_vertices"] = artificial;
    o.summary["total_length"] = net.total_length();
    o.summary["oriented"] = net.is_oriented();
    o.summary["violations"] = rep.violations;
    if (rep.ok() && !net.is_oriented()) {
        const Normalization norm = normalize_orientation(net);
        o.summary["normalization_added_vertices"] = norm.network.vertex_count() - net.vertex_count();
    }
    o.passed = rep.ok();
    if (!o.passed) o.failure = ErrorCode::validation;
    return o;
}

Outcome cmd_solve_fp(const Context& c, Output& out) {
    Outcome o;
    const Grid& grid = *c.grid;
    const EdgeArrays b = make_drift(c.cfg.drift, grid);
    FPProblem prob{grid, [b](double) { return b; }, true, c.density()};
    const FPTrajectory traj = solve_fp(prob, c.cfg.fp);
    std::ostringstream diag;
    diag << "n,t,mass,min,jump\n";
    double drift = 0.0, step_drift = 0.0, minv = std::numeric_limits<double>::infinity(), jump = 0.0;
    for (std::size_t n = 0; n < traj.m.size(); ++n) {
        diag << n << ',' << num(grid.time(static_cast<int>(n))) << ',' << num(traj.mass[n]) << ','
             << num(traj.min_value[n]) << ',' << num(traj.jump[n]) << "\n";
        drift = std::max(drift, std::abs(traj.mass[n] - traj.mass[0]));
        if (n > 0) step_drift = std::max(step_drift, std::abs(traj.mass[n] - traj.mass[n - 1]));
        minv = std::min(minv, traj.min_value[n]);
        jump = std::max(jump, traj.jump[n]);
    }
    out.write("m.csv", field_csv(grid, traj.m, TraceKind::jump, "m", c.cfg.output_every));
    out.write("fp_diagnostics.csv", diag.str());
    o.summary["initial_mass"] = traj.mass.front();
    o.summary["final_mass"] = traj.mass.back();
    o.summary["max_mass_drift"] = drift;
    o.summary["max_step_mass_drift"] = step_drift;
    o.summary["min_density"] = minv;
    o.summary["max_jump_residual"] = jump;
    return o;
}

Outcome cmd_solve_hjb(const Context& c, Output& out) {
    Outcome o;
    const Grid& grid = *c.grid;
    const HamiltonianModel model = make_hamiltonian(c.cfg, *c.net);
    const EdgeArrays f = make_edge_field(c.cfg.running_cost, grid);
    HJBProblem prob{grid, model, [f](int) { return f; }, make_value(c.cfg.terminal_value, grid)};
    const HJBTrajectory traj = solve_hjb(prob, c.cfg.hjb);
    std::ostringstream kr;
    kr << "n,t,vertex,residual\n";
    for (std::size_t n = 0; n < traj.kirchhoff.size(); ++n)
        for (int i = 0; i < c.net->vertex_count(); ++i)
            kr << n << ',' << num(grid.time(static_cast<int>(n))) << ',' << c.net->vertex(i).name << ','
               << num(traj.kirchhoff[n][i]) << "\n";
    out.write("v.csv", field_csv(grid, traj.v, TraceKind::continuous, "v", c.cfg.output_every));
    out.write("kirchhoff.csv", kr.str());
    o.summary["v0_min"] = traj.v.front().minCoeff();
    o.summary["v0_max"] = traj.v.front().maxCoeff();
    o.summary["max_kirchhoff_residual"] = max_abs_before_terminal(traj.kirchhoff);
    o.summary["C0"] = model.C0();
    o.summary["dt"] = grid.dt();
    return o;
}

MFGProblem mfg_problem(const Context& c) {
    return MFGProblem{*c.grid, make_hamiltonian(c.cfg, *c.net), c.cfg.coupling, c.density(),
                      make_value(c.cfg.terminal_value, *c.grid)};
}

Outcome cmd_solve_mfg(const Context& c, Output& out) {
    Outcome o;
    const MFGProblem prob = mfg_problem(c);
    const MFGSolution sol = picard_solve(prob, c.cfg.mfg);
    std::ostringstream pic;
    pic << "iteration,residual_v,residual_m\n";
    for (std::size_t k = 0; k < sol.residual_v.size(); ++k)
        pic << k + 1 << ',' << num(sol.residual_v[k]) << ','
            << num(k < sol.residual_m.size() ? sol.residual_m[k] : std::nan("")) << "\n";
    out.write("v.csv", field_csv(prob.grid, sol.v, TraceKind::continuous, "v", c.cfg.output_every));
    out.write("m.csv", field_csv(prob.grid, sol.m, TraceKind::jump, "m", c.cfg.output_every));
    out.write("picard.csv", pic.str());
    o.summary["converged"] = sol.converged;
    o.summary["iterations"] = sol.iterations;
    o.summary["residual_v"] = sol.residual_v.empty() ? 0.0 : sol.residual_v.back();
    const double rm = sol.residual_m.empty() ? 0.0 : sol.residual_m.back();
    o.summary["residual_m"] = std::isfinite(rm) ? Json(rm) : Json(nullptr);
    o.summary["fixed_point_residual"] = fixed_point_residual(prob, sol, c.cfg.mfg);
    o.summary["max_mass_drift"] = sol.max_mass_drift;
    o.summary["min_density"] = sol.min_density;
    o.summary["max_kirchhoff_residual"] = sol.max_kirchhoff;
    o.passed = sol.converged;
    if (!o.passed) o.failure = ErrorCode::not_converged;
    return o;
}

Outcome cmd_eig(const Context& c, Output& out, int k) {
    Outcome o;
    const Grid& grid = *c.grid;
    const EigenBasis basis = eigenbasis(grid, k);
    std::ostringstream ev;
    ev << "k,lambda\n";
    std::vector<Vector> cols;
    for (int j = 0; j < k; ++j) {
        ev << j << ',' << num(basis.values[j]) << "\n";
        cols.push_back(basis.vectors.col(j));
    }
    std::string vec = field_csv(grid, cols, TraceKind::continuous, "value", 1);
    // the first column is a mode index here, not a time level
    std::ostringstream fixed;
    std::istringstream lines(vec);
    std::string line;
    std::getline(lines, line);
    fixed << "k,edge,j,y,value\n";
    while (std::getline(lines, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        fixed << line.substr(0, c1) << line.substr(c2) << "\n";
    }
    out.write("eigenvalues.csv", ev.str());
    out.write("eigenvectors.csv", fixed.str());
    std::vector<double> vals(basis.values.data(), basis.values.data() + k);
    o.summary["k"] = k;
    o.summary["eigenvalues"] = vals;
    return o;
}

Outcome cmd_simulate(const Context& c, Output& out, const RunInputs& in) {
    Outcome o;
    const Grid& grid = *c.grid;
    const SimSpec& s = c.cfg.simulate;
    const EdgeArrays b = make_drift(c.cfg.drift, grid);
    std::vector<double> bconst(grid.edge_count());
    double bound = 0.0;
    for (int a = 0; a < grid.edge_count(); ++a) {
        bconst[a] = b[a][0];
        bound = std::max(bound, std::abs(bconst[a]));
    }
    SimConfig sc;
    sc.paths = s.paths;
    sc.delta = s.delta;
    sc.seed = in.seed.value_or(s.seed);
    sc.threads = in.threads.value_or(s.threads);
    sc.velocity = [bconst](int e, double, double) { return -bconst[e]; };
    sc.velocity_bound = bound;
    sc.initial_density = c.density();
    sc.times = s.times.empty() ? std::vector<double>{c.cfg.T} : s.times;
    const SimResult res = simulate(grid, sc);

    std::ostringstream hist;
    hist << "t,edge,bin,y,mass\n";
    for (std::size_t k = 0; k < res.times.size(); ++k)
        for (int a = 0; a < grid.edge_count(); ++a)
            for (int j = 0; j <= grid.cells(a); ++j)
                hist << num(res.times[k]) << ',' << grid.network().edge(a).name << ',' << j << ','
                     << num(grid.y(a, j)) << ',' << num(res.histograms[k][a][j]) << "\n";
    out.write("histogram.csv", hist.str());
    o.summary["paths"] = sc.paths;
    o.summary["delta"] = sc.delta;
    o.summary["seed"] = sc.seed;
    o.summary["threads"] = sc.threads;
    o.summary["times"] = res.times;

    if (s.compare_fp) {
        FPProblem prob{grid, [b](double) { return b; }, true, sc.initial_density};
        const FPTrajectory fp = solve_fp(prob, c.cfg.fp);
        std::ostringstream cmp;
        cmp << "t,tv\n";
        std::vector<double> tvs;
        for (std::size_t k = 0; k < res.times.size(); ++k) {
            const double t = res.times[k];
            const long n = std::lround(t / grid.dt());
            if (n > grid.steps() || std::abs(n * grid.dt() - t) > 1e-9 * std::max(1.0, grid.T()))
                fail(ErrorCode::invalid_argument,
                     "simulate time " + num(t) + " is not a level of the FP time grid; adjust time.steps");
            const double tv = compare_to_fp(grid, res.histograms[k], fp.m[n]);
            tvs.push_back(tv);
            cmp << num(t) << ',' << num(tv) << "\n";
        }
        out.write("comparison.csv", cmp.str());
        o.summary["tv"] = tvs;
    }
    return o;
}

struct CheckRow {
    std::string group;
    std::string name;
    double value;
    double limit;
    std::string status;  // pass, fail, info, skip
};

Outcome cmd_check(const Context& c, Output& out) {
    Outcome o;
    std::vector<CheckRow> rows;
    auto expect_le = [&](const char* g, const char* n, double v, double lim) {
        rows.push_back({g, n, v, lim, v <= lim ? "pass" : "fail"});
    };
    auto expect_ge = [&](const char* g, const char* n, double v, double lim) {
        rows.push_back({g, n, v, lim, v >= lim ? "pass" : "fail"});
    };
    auto skip = [&](const char* g, const char* n) { rows.push_back({g, n, std::nan(""), std::nan(""), "skip"}); };

    const Grid& grid = *c.grid;
    const MetricNetwork& net = *c.net;
    const ValidationReport rep = validate(net);
    expect_le("network", "violations", static_cast<double>(rep.violations.size()), 0.0);
    rows.push_back({"network", "oriented", net.is_oriented() ? 1.0 : 0.0, std::nan(""), "info"});

    const HamiltonianModel model = make_hamiltonian(c.cfg, net);
    const AssumptionReport ar = check_assumptions(model, net);
    expect_le("hamiltonian", "growth", ar.worst_growth, 1e-9);
    expect_le("hamiltonian", "slope", ar.worst_slope, 1e-9);
    expect_le("hamiltonian", "x_variation", ar.worst_x_variation, 1e-9);
    expect_ge("hamiltonian", "convexity", ar.worst_convexity, -1e-9);

    const Vector m0 = c.density();
    {
        const EdgeArrays b = make_drift(c.cfg.drift, grid);
        const FPTrajectory fp = solve_fp(FPProblem{grid, [b](double) { return b; }, true, m0}, c.cfg.fp);
        double drift = 0.0, minv = std::numeric_limits<double>::infinity(), jump = 0.0;
        for (std::size_t n = 0; n < fp.m.size(); ++n) {
            drift = std::max(drift, std::abs(fp.mass[n] - fp.mass[0]));
            minv = std::min(minv, fp.min_value[n]);
            jump = std::max(jump, fp.jump[n]);
        }
        expect_le("fp", "mass_drift", drift, 1e-10);
        if (c.cfg.fp.theta == 1.0) expect_ge("fp", "min_density", minv, -1e-12);
        else rows.push_back({"fp", "min_density", minv, -1e-12, "info"});
        expect_le("fp", "jump_residual", jump, 1e-12);
    }

    const double C0 = model.C0();
    const double ratio = C0 > 0.0 ? grid.dt() * C0 / grid.h_min() : 0.0;
    expect_le("hjb", "time_step_ratio", ratio, 1.0 + 1e-12);
    const bool steppable = ratio <= 1.0 + 1e-12;
    if (steppable) {
        const EdgeArrays f1 = make_edge_field(c.cfg.running_cost, grid);
        EdgeArrays f2 = f1;
        for (Vector& x : f2) x.array() += 1.0;
        const Vector vT = make_value(c.cfg.terminal_value, grid);
        HJBOptions ho = c.cfg.hjb;
        ho.mode = GradientMode::monotone;
        const HJBTrajectory v1 = solve_hjb(HJBProblem{grid, model, [f1](int) { return f1; }, vT}, ho);
        const HJBTrajectory v2 = solve_hjb(HJBProblem{grid, model, [f2](int) { return f2; }, vT}, ho);
        double gap = 0.0;
        for (std::size_t n = 0; n < v1.v.size(); ++n) gap = std::max(gap, (v1.v[n] - v2.v[n]).maxCoeff());
        expect_le("hjb", "comparison_violation", gap, 1e-10);
        rows.push_back({"hjb", "kirchhoff_residual", max_abs_before_terminal(v1.kirchhoff), std::nan(""), "info"});
    } else {
        skip("hjb", "comparison_violation");
    }

    if (steppable) {
        const MFGProblem prob{grid, model, c.cfg.coupling, m0, make_value(c.cfg.terminal_value, grid)};
        MFGConfig mc = c.cfg.mfg;
        const MFGSolution s1 = picard_solve(prob, mc);
        const double tol = mc.tolerance;
        expect_le("mfg", "picard_residual", s1.residual_v.empty() ? 0.0 : s1.residual_v.back(), tol);
        expect_le("mfg", "fixed_point_residual", fixed_point_residual(prob, s1, mc), 10 * tol);
        expect_le("mfg", "mass_drift", s1.max_mass_drift, 1e-10);
        expect_ge("mfg", "min_density", s1.min_density, -1e-12);
        if (!c.cfg.coupling.is_zero()) {
            mc.initial_guess = mc.initial_guess == InitialGuess::zero ? InitialGuess::terminal : InitialGuess::zero;
            const MFGSolution s2 = picard_solve(prob, mc);
            const double dv = trajectory_distance(grid, s1.v, s2.v, TraceKind::continuous);
            const double dm = trajectory_distance(grid, s1.m, s2.m, TraceKind::jump);
            const bool monotone = c.cfg.coupling.kind == CouplingOperator::Kind::local;
            if (monotone) {
                expect_le("mfg", "uniqueness_v", dv, 10 * tol);
                expect_le("mfg", "uniqueness_m", dm, 10 * tol);
            } else {
                rows.push_back({"mfg", "uniqueness_v", dv, 10 * tol, "info"});
                rows.push_back({"mfg", "uniqueness_m", dm, 10 * tol, "info"});
            }
            if (mc.duality_pairing) {
                const DualityComponents d = duality_residual(prob, s1, s2);
                expect_le("mfg", "duality_total", std::abs(d.total), 1e-8);
            } else {
                skip("mfg", "duality_total");
            }
        }
    } else {
        skip("mfg", "picard_residual");
    }

    if (grid.dof_count() <= 2500) {
        const int k = std::min(5, grid.dof_count());
        const EigenBasis basis = eigenbasis(grid, k);
        const double scale = std::max(1.0, std::abs(basis.values[k - 1]));
        expect_le("spectral", "ground_value", std::abs(basis.values[0]) / scale, 1e-8);
        const Eigen::MatrixXd G =
            basis.vectors.transpose() * grid.trapezoid_weights().asDiagonal() * basis.vectors;
        expect_le("spectral", "orthonormality", (G - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-10);
    } else {
        skip("spectral", "ground_value");
    }

    std::ostringstream csv, table;
    csv << "group,check,value,limit,status\n";
    table << std::left << std::setw(12) << "group" << std::setw(24) << "check" << std::setw(16) << "value"
          << std::setw(12) << "limit" << "status\n";
    Json js = Json::array();
    int failed = 0;
    for (const CheckRow& r : rows) {
        csv << r.group << ',' << r.name << ',' << num(r.value) << ',' << num(r.limit) << ',' << r.status << "\n";
        std::ostringstream v, l;
        v << std::setprecision(4) << r.value;
        l << std::setprecision(4) << r.limit;
        table << std::left << std::setw(12) << r.group << std::setw(24) << r.name << std::setw(16) << v.str()
              << std::setw(12) << l.str() << r.status << "\n";
        js.push_back({{"group", r.group},
                      {"check", r.name},
                      {"value", std::isfinite(r.value) ? Json(r.value) : Json(nullptr)},
                      {"limit", std::isfinite(r.limit) ? Json(r.limit) : Json(nullptr)},
                      {"status", r.status}});
        failed += r.status == "fail" ? 1 : 0;
    }
    out.write("check.csv", csv.str());
    o.summary["checks"] = js;
    o.summary["failed"] = failed;
    o.table = table.str();
    o.passed = failed == 0;
    if (!o.passed) o.failure = ErrorCode::validation;
    return o;
}

std::string render(const RunReport& r, const std::string& table) {
    std::ostringstream os;
    os << r.command << ": " << (r.passed ? "ok" : "FAILED") << "\n";
    for (auto it = r.summary.begin(); it != r.summary.end(); ++it) {
        if (it.key() == "checks") continue;
        os << "  " << it.key() << ": " << it->dump() << "\n";
    }
    if (!table.empty()) os << table;
    return os.str();
}

HamiltonianSpec mirrored(HamiltonianSpec h) {
    if (h.kind == "legendre") {
        h.linear = -h.linear;
        const double lo = -h.a_max, hi = -h.a_min;
        h.a_min = lo;
        h.a_max = hi;
    }
    return h;
}

}  // namespace

std::vector<std::string> run_commands() {
    return {"validate", "solve-fp", "solve-hjb", "solve-mfg", "eig", "simulate", "check"};
}

const char* library_version() { return MFGNET_VERSION; }

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        fail(ErrorCode::io, "SHA-256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

RunConfig remap_config(const RunConfig& cfg, const MetricNetwork& original, const Normalization& norm) {
    RunConfig out = cfg;
    out.grid.edge_cells.clear();
    out.hamiltonian_edges.clear();
    out.drift.edges.clear();
    const MetricNetwork& net = norm.network;
    for (int a = 0; a < original.edge_count(); ++a) {
        const Edge& e = original.edge(a);
        auto cells = cfg.grid.edge_cells.find(e.name);
        std::optional<int> n;
        if (cells != cfg.grid.edge_cells.end()) n = cells->second;
        else if (cfg.grid.h <= 0.0) n = cfg.grid.cells;
        auto ham = cfg.hamiltonian_edges.find(e.name);
        const HamiltonianSpec h = ham == cfg.hamiltonian_edges.end() ? cfg.hamiltonian : ham->second;
        auto drift = cfg.drift.edges.find(e.name);
        const double b = drift == cfg.drift.edges.end() ? cfg.drift.value : drift->second;
        for (const EdgePiece& p : norm.pieces.at(a)) {
            const std::string& name = net.edge(p.edge).name;
            if (n) out.grid.edge_cells[name] = std::max(2, static_cast<int>(std::lround(*n * p.length / e.length)));
            out.hamiltonian_edges[name] = p.reversed ? mirrored(h) : h;
            out.drift.edges[name] = p.reversed ? -b : b;
        }
    }
    return out;
}

RunReport run(const RunInputs& in) {
    const auto cmds = run_commands();
    if (std::find(cmds.begin(), cmds.end(), in.command) == cmds.end())
        fail(ErrorCode::invalid_argument, "unknown command '" + in.command + "'");
    if (!in.network) fail(ErrorCode::invalid_argument, "no network given");
    if (in.threads && *in.threads < 1) fail(ErrorCode::invalid_argument, "threads must be at least 1");
    if (in.k && *in.k < 1) fail(ErrorCode::invalid_argument, "k must be at least 1");

    log_info("running " + in.command);
    const Context c = prepare(in, in.command != "validate");
    Output out(in.out_dir);
    if (c.norm) out.write("normalization.csv", normalization_csv(c));

    Outcome o;
    if (in.command == "validate") o = cmd_validate(c, out);
    else if (in.command == "solve-fp") o = cmd_solve_fp(c, out);
    else if (in.command == "solve-hjb") o = cmd_solve_hjb(c, out);
    else if (in.command == "solve-mfg") o = cmd_solve_mfg(c, out);
    else if (in.command == "eig") o = cmd_eig(c, out, in.k.value_or(c.cfg.eig_k));
    else if (in.command == "simulate") o = cmd_simulate(c, out, in);
    else o = cmd_check(c, out);

    RunReport r;
    r.command = in.command;
    r.passed = o.passed;
    r.failure = o.failure;
    r.summary = o.summary;
    r.text = render(r, o.table);

    Json manifest;
    manifest["tool"] = "mfgnet";
    manifest["version"] = library_version();
    manifest["command"] = in.command;
    manifest["passed"] = r.passed;
    manifest["inputs"]["network"] = {{"path", in.network_path}, {"sha256", sha256_hex(in.network_source)}};
    if (!in.config_path.empty() || !in.config_source.empty())
        manifest["inputs"]["config"] = {{"path", in.config_path}, {"sha256", sha256_hex(in.config_source)}};
    manifest["config"] = config_to_json(in.config.value_or(RunConfig{}));
    manifest["network"] = network_to_json(*in.network);
    Json ov = Json::object();
    if (in.seed) ov["seed"] = *in.seed;
    if (in.threads) ov["threads"] = *in.threads;
    if (in.k) ov["k"] = *in.k;
    manifest["overrides"] = ov;
    manifest["summary"] = r.summary;
    Json files = Json::array();
    for (const auto& [name, hash] : out.files()) {
        files.push_back({{"file", name}, {"sha256", hash}});
        r.files.push_back(name);
    }
    manifest["outputs"] = files;
    out.write("manifest.json", manifest.dump(2) + "\n");
    if (!in.out_dir.empty()) r.files.push_back("manifest.json");
    return r;
}

}  // namespace mfgnet
