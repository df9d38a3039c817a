#include "mfgnet/hjb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace mfgnet {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

SparseMatrix diag(const Vector& d) {
    SparseMatrix D(d.size(), d.size());
    D.reserve(Eigen::VectorXi::Ones(d.size()));
    for (int k = 0; k < d.size(); ++k) D.insert(k, k) = d[k];
    return D;
}

}  // namespace

DiscreteHamiltonian::DiscreteHamiltonian(const Grid& grid, const HamiltonianModel& model,
                                         GradientMode mode)
    : grid_(&grid), model_(&model), mode_(mode) {
    if (model.edge_count() != grid.edge_count())
        fail(ErrorCode::invalid_argument, "Hamiltonian model does not match the network");
    if (mode_ == GradientMode::monotone) {
        p_min_ = sample_edges(grid, [&](int a, double y) { return model.edge(a).p_min(y); });
    }
}

std::vector<std::vector<DiscreteHamiltonian::Branch>> DiscreteHamiltonian::select(
    const Vector& v) const {
    const Grid& g = *grid_;
    const EdgeArrays t = traces(g, v, TraceKind::continuous);
    std::vector<std::vector<Branch>> out(g.edge_count());
    for (int a = 0; a < g.edge_count(); ++a) {
        const int n = g.cells(a);
        const double h = g.h(a);
        const Vector& w = t[a];
        auto& b = out[a];
        b.resize(n + 1);
        if (mode_ == GradientMode::centered) {
            for (int j = 1; j < n; ++j) b[j] = {(w[j + 1] - w[j - 1]) / (2 * h), 0};
            b[0] = {(-3 * w[0] + 4 * w[1] - w[2]) / (2 * h), 0};
            b[n] = {(3 * w[n] - 4 * w[n - 1] + w[n - 2]) / (2 * h), 0};
            continue;
        }
        const EdgeHamiltonian& H = model_->edge(a);
        const Vector& pm = p_min_[a];
        // left branch H(max(p-, p_min)) is nondecreasing in p-, right branch H(min(p+, p_min))
        // is nonincreasing in p+; the flux is the larger of the two
        auto left = [&](int j, double pl) -> std::pair<Branch, double> {
            if (pm[j] == inf) return {{0.0, 0}, -inf};
            if (pm[j] == -inf || pl > pm[j]) return {{pl, -1}, H.H(g.y(a, j), pl)};
            return {{pm[j], 0}, H.H(g.y(a, j), pm[j])};
        };
        auto right = [&](int j, double pr) -> std::pair<Branch, double> {
            if (pm[j] == -inf) return {{0.0, 0}, -inf};
            if (pm[j] == inf || pr < pm[j]) return {{pr, +1}, H.H(g.y(a, j), pr)};
            return {{pm[j], 0}, H.H(g.y(a, j), pm[j])};
        };
        for (int j = 1; j < n; ++j) {
            const auto [bl, hl] = left(j, (w[j] - w[j - 1]) / h);
            const auto [br, hr] = right(j, (w[j + 1] - w[j]) / h);
            b[j] = hl >= hr ? bl : br;
        }
        b[0] = right(0, (w[1] - w[0]) / h).first;
        b[n] = left(n, (w[n] - w[n - 1]) / h).first;
        if (pm[0] == -inf) b[0] = {-inf, 0};
        if (pm[n] == inf) b[n] = {inf, 0};
    }
    return out;
}

EdgeArrays DiscreteHamiltonian::gradient(const Vector& v) const {
    const auto sel = select(v);
    EdgeArrays out(sel.size());
    for (std::size_t a = 0; a < sel.size(); ++a) {
        out[a].resize(sel[a].size());
        for (std::size_t j = 0; j < sel[a].size(); ++j) out[a][j] = sel[a][j].p;
    }
    return out;
}

EdgeArrays DiscreteHamiltonian::values(const Vector& v) const {
    const Grid& g = *grid_;
    const auto sel = select(v);
    EdgeArrays out(g.edge_count());
    for (int a = 0; a < g.edge_count(); ++a) {
        const EdgeHamiltonian& H = model_->edge(a);
        const int n = g.cells(a);
        out[a].resize(n + 1);
        for (int j = 0; j <= n; ++j) {
            const double p = sel[a][j].p;
            // an unbounded selection only happens for a half cell with no admissible control
            out[a][j] = std::isfinite(p) ? H.H(j == n ? g.network().edge(a).length : g.y(a, j), p) : 0.0;
        }
    }
    return out;
}

Vector DiscreteHamiltonian::load(const Vector& v) const { return mfgnet::load(*grid_, values(v)); }

EdgeArrays DiscreteHamiltonian::drift(const Vector& v) const {
    const Grid& g = *grid_;
    const auto sel = select(v);
    EdgeArrays out(g.edge_count());
    for (int a = 0; a < g.edge_count(); ++a) {
        const EdgeHamiltonian& H = model_->edge(a);
        const int n = g.cells(a);
        out[a].resize(n + 1);
        for (int j = 0; j <= n; ++j) {
            const double p = sel[a][j].p;
            out[a][j] = std::isfinite(p) ? H.Hp(j == n ? g.network().edge(a).length : g.y(a, j), p) : 0.0;
        }
    }
    return out;
}

SparseMatrix DiscreteHamiltonian::generator(const Vector& v) const {
    const Grid& g = *grid_;
    if (mode_ == GradientMode::centered) {
        EdgeArrays a = drift(v);
        for (Vector& e : a) e = -e;
        return centered_generator(g, a);
    }
    const MetricNetwork& net = g.network();
    const Vector& M = g.dual_mass();
    const auto sel = select(v);
    std::vector<Eigen::Triplet<double>> t;
    auto rate = [&](int from, int to, double r) {
        if (r == 0.0) return;
        t.emplace_back(from, to, r);
        t.emplace_back(from, from, -r);
    };
    for (int a = 0; a < g.edge_count(); ++a) {
        const EdgeHamiltonian& H = model_->edge(a);
        const Edge& e = net.edge(a);
        const int n = g.cells(a);
        const double h = g.h(a);
        for (int j = 0; j <= n; ++j) {
            const Branch& b = sel[a][j];
            if (b.dir == 0) continue;
            const double hp = H.Hp(j == n ? e.length : g.y(a, j), b.p);
            const int k = g.node_dof(a, j);
            const double w = (j == 0 || j == n) ? net.jump_weight(k, a) * h / 2 / M[k] : 1.0;
            // d load / dv = w M H_p dp, with dp = (v_j - v_{j-1})/h or (v_{j+1} - v_j)/h
            if (b.dir < 0) rate(k, g.node_dof(a, j - 1), w * hp / h);
            else rate(k, g.node_dof(a, j + 1), -w * hp / h);
        }
    }
    SparseMatrix Q(g.dof_count(), g.dof_count());
    Q.setFromTriplets(t.begin(), t.end());
    return Q;
}

SparseMatrix assemble_hjb_diffusion(const Grid& grid) { return stiffness(grid); }

void check_time_step(const Grid& grid, double C0) {
    if (C0 <= 0.0) return;
    const double limit = grid.h_min() / C0;
    if (grid.dt() > limit * (1 + 1e-12)) {
        const long suggested = static_cast<long>(std::ceil(grid.T() * C0 / grid.h_min()));
        std::ostringstream os;
        os << "time step " << grid.dt() << " exceeds h_min/C0 = " << limit
           << "; use at least " << suggested << " time steps";
        fail(ErrorCode::invalid_argument, os.str());
    }
}

HJBStepper::HJBStepper(const Grid& grid, const HamiltonianModel& model, const HJBOptions& options)
    : grid_(&grid), options_(options), H_(grid, model, options.mode) {
    check_time_step(grid, model.C0());
    const SparseMatrix A = diag(grid.dual_mass()) + grid.dt() * stiffness(grid);
    lu_.analyzePattern(A);
    lu_.factorize(A);
    if (lu_.info() != Eigen::Success)
        fail(ErrorCode::solve, "HJB system is singular: " + lu_.lastErrorMessage());
}

Vector HJBStepper::step_back(const Vector& v_next, const EdgeArrays& f) const {
    return step_back_load(v_next, f.empty() ? Vector::Zero(grid_->dof_count()) : load(*grid_, f));
}

Vector HJBStepper::step_back_load(const Vector& v_next, const Vector& f_load) const {
    const double dt = grid_->dt();
    const Vector base = grid_->dual_mass().cwiseProduct(v_next) + dt * f_load;
    Vector v = lu_.solve(base - dt * H_.load(v_next));
    if (options_.implicit_hamiltonian) {
        for (int k = 0; k < options_.inner_max_iterations; ++k) {
            Vector next = lu_.solve(base - dt * H_.load(v));
            const double change = (next - v).cwiseAbs().maxCoeff();
            v = std::move(next);
            if (change <= options_.inner_tolerance * (1.0 + v.cwiseAbs().maxCoeff())) break;
        }
    }
    if (!v.allFinite()) fail(ErrorCode::solve, "HJB step produced non-finite values");
    return v;
}

HJBTrajectory solve_hjb(const HJBProblem& p, const HJBOptions& o) {
    const Grid& g = p.grid;
    if (p.vT.size() != g.dof_count())
        fail(ErrorCode::invalid_argument, "terminal value size does not match the grid");
    const HJBStepper stepper(g, p.hamiltonian, o);
    const int N = g.steps();
    HJBTrajectory out;
    out.v.resize(N + 1);
    out.kirchhoff.resize(N + 1);
    out.v[N] = p.vT;
    for (int n = N - 1; n >= 0; --n) {
        const EdgeArrays f = p.f ? p.f(n + 1) : EdgeArrays{};
        out.v[n] = stepper.step_back(out.v[n + 1], f);
    }
    for (int n = 0; n <= N; ++n) out.kirchhoff[n] = kirchhoff_residual(g, out.v[n]);
    return out;
}

GradientSystemResidual gradient_system_residual(const Grid& g, const HamiltonianModel& model,
                                                const std::vector<Vector>& v,
                                                const std::function<EdgeArrays(int)>& f) {
    const MetricNetwork& net = g.network();
    const int T = static_cast<int>(v.size());
    GradientSystemResidual r;
    r.flux = Eigen::MatrixXd::Zero(T, net.vertex_count());
    r.robin = Eigen::MatrixXd::Zero(T, net.vertex_count());
    for (int n = 0; n < T; ++n) {
        r.flux.row(n) = kirchhoff_residual(g, v[n]).transpose();
        const EdgeArrays t = traces(g, v[n], TraceKind::continuous);
        const EdgeArrays fn = f ? f(n) : EdgeArrays{};
        for (int i = 0; i < net.vertex_count(); ++i) {
            double lo = inf, hi = -inf;
            for (const Incidence& inc : net.incident(i)) {
                const int a = inc.edge;
                const int N = g.cells(a);
                const double h = g.h(a);
                const Vector& w = t[a];
                // samples ordered from the vertex into the edge
                auto at = [&](int k) { return inc.sign < 0 ? w[k] : w[N - k]; };
                const double s = -static_cast<double>(inc.sign);  // d/dy = s d/d(distance)
                const double du = s * (-3 * at(0) + 4 * at(1) - at(2)) / (2 * h);
                const double d2 = N >= 3 ? (2 * at(0) - 5 * at(1) + 4 * at(2) - at(3)) / (h * h)
                                         : (at(0) - 2 * at(1) + at(2)) / (h * h);
                const double y = inc.sign < 0 ? 0.0 : net.edge(a).length;
                const double fv = fn.empty() ? 0.0 : (inc.sign < 0 ? fn[a][0] : fn[a][N]);
                const double R = net.edge(a).mu * d2 - model.edge(a).H(y, du) + fv;
                lo = std::min(lo, R);
                hi = std::max(hi, R);
            }
            r.robin(n, i) = net.degree(i) > 1 ? hi - lo : 0.0;
        }
    }
    return r;
}

std::vector<double> loop_integrals(const Grid& g, const Vector& v) {
    const MetricNetwork& net = g.network();
    const EdgeArrays t = traces(g, v, TraceKind::continuous);
    std::vector<double> edge_int(g.edge_count(), 0.0);
    for (int a = 0; a < g.edge_count(); ++a) {
        const Vector& w = t[a];
        double s = 0.0;
        for (int j = 0; j + 1 < w.size(); ++j) s += w[j + 1] - w[j];
        edge_int[a] = s;
    }

    const int nv = net.vertex_count();
    std::vector<int> parent(nv, -1), parent_edge(nv, -1), depth(nv, -1);
    std::vector<bool> tree(g.edge_count(), false);
    for (int root = 0; root < nv; ++root) {
        if (depth[root] >= 0) continue;
        depth[root] = 0;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            const int i = q.front();
            q.pop();
            for (const Incidence& inc : net.incident(i)) {
                const Edge& e = net.edge(inc.edge);
                const int j = e.from == i ? e.to : e.from;
                if (depth[j] < 0) {
                    depth[j] = depth[i] + 1;
                    parent[j] = i;
                    parent_edge[j] = inc.edge;
                    tree[inc.edge] = true;
                    q.push(j);
                }
            }
        }
    }
    // integral along the tree edge from `child` up to its parent
    auto up = [&](int child) {
        const Edge& e = net.edge(parent_edge[child]);
        return e.to == child ? -edge_int[parent_edge[child]] : edge_int[parent_edge[child]];
    };

    std::vector<double> loops;
    for (int a = 0; a < g.edge_count(); ++a) {
        if (tree[a]) continue;
        const Edge& e = net.edge(a);
        // from -> to along the edge, then back to `from` through the tree
        double s = edge_int[a];
        int x = e.to, y = e.from;
        double back_from_y = 0.0;
        while (depth[x] > depth[y]) { s += up(x); x = parent[x]; }
        while (depth[y] > depth[x]) { back_from_y += up(y); y = parent[y]; }
        while (x != y) {
            s += up(x);
            x = parent[x];
            back_from_y += up(y);
            y = parent[y];
        }
        loops.push_back(s - back_from_y);
    }
    return loops;
}

}  // namespace mfgnet
