#include "mfgnet/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfgnet {

Grid::Grid(std::shared_ptr<const MetricNetwork> net, std::vector<int> cells, double T, int steps)
    : net_(std::move(net)), cells_(std::move(cells)), T_(T), steps_(steps) {
    if (!net_) fail(ErrorCode::invalid_argument, "grid needs a network");
    if (static_cast<int>(cells_.size()) != net_->edge_count())
        fail(ErrorCode::invalid_argument, "grid needs one cell count per edge");
    if (!(T_ > 0.0) || !std::isfinite(T_)) fail(ErrorCode::invalid_argument, "time horizon must be positive");
    if (steps_ < 1) fail(ErrorCode::invalid_argument, "time step count must be at least 1");

    dofs_ = net_->vertex_count();
    for (int a = 0; a < edge_count(); ++a) {
        if (cells_[a] < 2)
            fail(ErrorCode::invalid_argument,
                 "edge '" + net_->edge(a).name + "' needs at least 2 cells");
        h_.push_back(net_->edge(a).length / cells_[a]);
        offset_.push_back(dofs_);
        dofs_ += cells_[a] - 1;
    }

    dual_mass_ = Vector::Zero(dofs_);
    trapezoid_ = Vector::Zero(dofs_);
    for (int a = 0; a < edge_count(); ++a) {
        const Edge& e = net_->edge(a);
        const double h = h_[a];
        dual_mass_.segment(offset_[a], cells_[a] - 1).setConstant(h);
        trapezoid_.segment(offset_[a], cells_[a] - 1).setConstant(h);
        dual_mass_[e.from] += net_->jump_weight(e.from, a) * h / 2;
        dual_mass_[e.to] += net_->jump_weight(e.to, a) * h / 2;
        trapezoid_[e.from] += h / 2;
        trapezoid_[e.to] += h / 2;
    }
}

Grid Grid::with_spacing(std::shared_ptr<const MetricNetwork> net, double h, double T, int steps) {
    if (!(h > 0.0)) fail(ErrorCode::invalid_argument, "grid spacing must be positive");
    std::vector<int> cells;
    for (const Edge& e : net->edges())
        cells.push_back(std::max(2, static_cast<int>(std::lround(e.length / h))));
    return Grid(std::move(net), std::move(cells), T, steps);
}

double Grid::h_min() const { return *std::min_element(h_.begin(), h_.end()); }

Grid Grid::with_time(double T, int steps) const { return Grid(net_, cells_, T, steps); }

int Grid::node_dof(int a, int j) const {
    const int n = cells_.at(a);
    if (j == 0) return net_->edge(a).from;
    if (j == n) return net_->edge(a).to;
    if (j < 0 || j > n) fail(ErrorCode::invalid_argument, "node index out of range");
    return offset_[a] + j - 1;
}

EdgeArrays traces(const Grid& grid, const Vector& dofs, TraceKind kind) {
    if (dofs.size() != grid.dof_count())
        fail(ErrorCode::invalid_argument, "field size does not match the grid");
    const MetricNetwork& net = grid.network();
    EdgeArrays out(grid.edge_count());
    for (int a = 0; a < grid.edge_count(); ++a) {
        const int n = grid.cells(a);
        const Edge& e = net.edge(a);
        Vector& f = out[a];
        f.resize(n + 1);
        f.segment(1, n - 1) = dofs.segment(grid.interior_offset(a), n - 1);
        f[0] = dofs[e.from];
        f[n] = dofs[e.to];
        if (kind == TraceKind::jump) {
            f[0] *= net.jump_weight(e.from, a);
            f[n] *= net.jump_weight(e.to, a);
        }
    }
    return out;
}

EdgeArrays sample_edges(const Grid& grid, const std::function<double(int, double)>& fn) {
    EdgeArrays out(grid.edge_count());
    for (int a = 0; a < grid.edge_count(); ++a) {
        const int n = grid.cells(a);
        out[a].resize(n + 1);
        for (int j = 0; j <= n; ++j) out[a][j] = fn(a, j == n ? grid.network().edge(a).length : grid.y(a, j));
    }
    return out;
}

Vector sample_continuous(const Grid& grid, const std::function<double(int, double)>& fn) {
    const EdgeArrays e = sample_edges(grid, fn);
    Vector v = Vector::Zero(grid.dof_count());
    std::vector<bool> set(grid.network().vertex_count(), false);
    for (int a = 0; a < grid.edge_count(); ++a) {
        const int n = grid.cells(a);
        for (int j = 0; j <= n; ++j) {
            const int k = grid.node_dof(a, j);
            if (j == 0 || j == n) {
                if (set[k]) continue;
                set[k] = true;
            }
            v[k] = e[a][j];
        }
    }
    return v;
}

Vector sample_jump(const Grid& grid, const std::function<double(int, double)>& fn) {
    const MetricNetwork& net = grid.network();
    const EdgeArrays e = sample_edges(grid, fn);
    Vector m = Vector::Zero(grid.dof_count());
    Vector half_mass = Vector::Zero(net.vertex_count());
    for (int a = 0; a < grid.edge_count(); ++a) {
        const int n = grid.cells(a);
        m.segment(grid.interior_offset(a), n - 1) = e[a].segment(1, n - 1);
        const Edge& ed = net.edge(a);
        half_mass[ed.from] += grid.h(a) / 2 * e[a][0];
        half_mass[ed.to] += grid.h(a) / 2 * e[a][n];
    }
    for (int i = 0; i < net.vertex_count(); ++i) m[i] = half_mass[i] / grid.dual_mass()[i];
    return m;
}

double integrate(const Grid& grid, const EdgeArrays& f) {
    double s = 0.0;
    for (int a = 0; a < grid.edge_count(); ++a) {
        const Vector& g = f.at(a);
        const int n = grid.cells(a);
        s += grid.h(a) * (g.segment(1, n - 1).sum() + 0.5 * (g[0] + g[n]));
    }
    return s;
}

double integrate(const Grid& grid, const Vector& dofs, TraceKind kind) {
    const Vector& w = kind == TraceKind::jump ? grid.dual_mass() : grid.trapezoid_weights();
    return w.dot(dofs);
}

EdgeArrays derivative(const Grid& grid, const EdgeArrays& f) {
    EdgeArrays out(grid.edge_count());
    for (int a = 0; a < grid.edge_count(); ++a) {
        const int n = grid.cells(a);
        if (n < 2) fail(ErrorCode::invalid_argument, "derivative needs at least 2 cells per edge");
        const double h = grid.h(a);
        const Vector& g = f.at(a);
        Vector& d = out[a];
        d.resize(n + 1);
        for (int j = 1; j < n; ++j) d[j] = (g[j + 1] - g[j - 1]) / (2 * h);
        d[0] = (-3 * g[0] + 4 * g[1] - g[2]) / (2 * h);
        d[n] = (3 * g[n] - 4 * g[n - 1] + g[n - 2]) / (2 * h);
    }
    return out;
}

Vector kirchhoff_residual(const Grid& grid, const Vector& v) {
    const MetricNetwork& net = grid.network();
    const EdgeArrays d = derivative(grid, traces(grid, v, TraceKind::continuous));
    Vector r = Vector::Zero(net.vertex_count());
    for (int i = 0; i < net.vertex_count(); ++i) {
        for (const Incidence& inc : net.incident(i)) {
            const int n = grid.cells(inc.edge);
            const double dy = inc.sign > 0 ? d[inc.edge][n] : d[inc.edge][0];
            r[i] += inc.gamma * net.edge(inc.edge).mu * inc.sign * dy;
        }
    }
    return r;
}

Vector jump_residual(const Grid& grid, const EdgeArrays& m) {
    const MetricNetwork& net = grid.network();
    Vector r = Vector::Zero(net.vertex_count());
    for (int i = 0; i < net.vertex_count(); ++i) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const Incidence& inc : net.incident(i)) {
            const double t = inc.sign > 0 ? m.at(inc.edge)[grid.cells(inc.edge)] : m.at(inc.edge)[0];
            const double ratio = t / inc.gamma;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        if (net.degree(i) > 0) r[i] = hi - lo;
    }
    return r;
}

Vector jump_residual(const Grid& grid, const Vector& latent) {
    if (latent.size() != grid.dof_count())
        fail(ErrorCode::invalid_argument, "field size does not match the grid");
    return Vector::Zero(grid.network().vertex_count());
}

double l2_norm_sq(const Grid& grid, const EdgeArrays& f) {
    double s = 0.0;
    for (int a = 0; a < grid.edge_count(); ++a) {
        const Vector& g = f.at(a);
        const int n = grid.cells(a);
        s += grid.h(a) * (g.segment(1, n - 1).squaredNorm() + 0.5 * (g[0] * g[0] + g[n] * g[n]));
    }
    return s;
}

double h1_norm_sq(const Grid& grid, const EdgeArrays& f) {
    double s = l2_norm_sq(grid, f);
    for (int a = 0; a < grid.edge_count(); ++a) {
        const Vector& g = f.at(a);
        const int n = grid.cells(a);
        const double h = grid.h(a);
        s += (g.tail(n) - g.head(n)).squaredNorm() / h;
    }
    return s;
}

double Weight::at(const MetricNetwork& net, int a, double y) const {
    const double s = y / net.edge(a).length;
    return (1 - s) * ends.at(a)[0] + s * ends.at(a)[1];
}

double Weight::min() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : ends) m = std::min({m, e[0], e[1]});
    return m;
}

double Weight::max() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& e : ends) m = std::max({m, e[0], e[1]});
    return m;
}

namespace {

Weight vertex_weight(const MetricNetwork& net, bool scale_by_mu) {
    Weight w;
    for (int a = 0; a < net.edge_count(); ++a) {
        const Edge& e = net.edge(a);
        auto value = [&](int i) {
            const double g = net.jump_weight(i, a);
            return scale_by_mu ? g * e.mu : g;
        };
        const bool bf = net.is_boundary(e.from);
        const bool bt = net.is_boundary(e.to);
        std::array<double, 2> ends{};
        if (bf && bt) {
            ends = {1.0, 1.0};
        } else if (bf) {
            ends = {value(e.to), value(e.to)};
        } else if (bt) {
            ends = {value(e.from), value(e.from)};
        } else {
            ends = {value(e.from), value(e.to)};
        }
        w.ends.push_back(ends);
    }
    return w;
}

}  // namespace

Weight weight_phi(const MetricNetwork& net) { return vertex_weight(net, false); }
Weight weight_psi(const MetricNetwork& net) { return vertex_weight(net, true); }

SparseMatrix stiffness(const Grid& grid) {
    const MetricNetwork& net = grid.network();
    std::vector<Eigen::Triplet<double>> t;
    for (int a = 0; a < grid.edge_count(); ++a) {
        const Edge& e = net.edge(a);
        const int n = grid.cells(a);
        const double k = e.mu / grid.h(a);
        for (int c = 0; c < n; ++c) {
            const int l = grid.node_dof(a, c);
            const int r = grid.node_dof(a, c + 1);
            // test function weights at the cell ends: 1 inside, gamma at a vertex
            const double wl = c == 0 ? net.jump_weight(e.from, a) : 1.0;
            const double wr = c + 1 == n ? net.jump_weight(e.to, a) : 1.0;
            t.emplace_back(l, l, wl * k);
            t.emplace_back(l, r, -wl * k);
            t.emplace_back(r, r, wr * k);
            t.emplace_back(r, l, -wr * k);
        }
    }
    SparseMatrix K(grid.dof_count(), grid.dof_count());
    K.setFromTriplets(t.begin(), t.end());
    return K;
}

Vector load(const Grid& grid, const EdgeArrays& g) {
    const MetricNetwork& net = grid.network();
    Vector L = Vector::Zero(grid.dof_count());
    for (int a = 0; a < grid.edge_count(); ++a) {
        const Edge& e = net.edge(a);
        const int n = grid.cells(a);
        const double h = grid.h(a);
        const Vector& ga = g.at(a);
        L.segment(grid.interior_offset(a), n - 1) = h * ga.segment(1, n - 1);
        L[e.from] += net.jump_weight(e.from, a) * h / 2 * ga[0];
        L[e.to] += net.jump_weight(e.to, a) * h / 2 * ga[n];
    }
    return L;
}

SparseMatrix upwind_generator(const Grid& grid, const EdgeArrays& velocity) {
    const MetricNetwork& net = grid.network();
    const Vector& M = grid.dual_mass();
    std::vector<Eigen::Triplet<double>> t;
    auto rate = [&](int from, int to, double r) {
        if (r <= 0.0) return;
        t.emplace_back(from, to, r);
        t.emplace_back(from, from, -r);
    };
    for (int a = 0; a < grid.edge_count(); ++a) {
        const Edge& e = net.edge(a);
        const int n = grid.cells(a);
        const double h = grid.h(a);
        const Vector& v = velocity.at(a);
        for (int j = 1; j < n; ++j) {
            const int k = grid.node_dof(a, j);
            rate(k, grid.node_dof(a, j + 1), std::max(v[j], 0.0) / h);
            rate(k, grid.node_dof(a, j - 1), std::max(-v[j], 0.0) / h);
        }
        const double gf = net.jump_weight(e.from, a);
        const double gt = net.jump_weight(e.to, a);
        rate(e.from, grid.node_dof(a, 1), gf * std::max(v[0], 0.0) / (2 * M[e.from]));
        rate(e.to, grid.node_dof(a, n - 1), gt * std::max(-v[n], 0.0) / (2 * M[e.to]));
    }
    SparseMatrix Q(grid.dof_count(), grid.dof_count());
    Q.setFromTriplets(t.begin(), t.end());
    return Q;
}

SparseMatrix centered_generator(const Grid& grid, const EdgeArrays& velocity) {
    const MetricNetwork& net = grid.network();
    const Vector& M = grid.dual_mass();
    std::vector<Eigen::Triplet<double>> t;
    for (int a = 0; a < grid.edge_count(); ++a) {
        const Edge& e = net.edge(a);
        const int n = grid.cells(a);
        const double h = grid.h(a);
        const Vector& v = velocity.at(a);
        for (int j = 1; j < n; ++j) {
            const int k = grid.node_dof(a, j);
            t.emplace_back(k, grid.node_dof(a, j + 1), v[j] / (2 * h));
            t.emplace_back(k, grid.node_dof(a, j - 1), -v[j] / (2 * h));
        }
        // vertex half cells: (gamma h / 2) a d_y w / M_i with one-sided stencils
        const double cf = net.jump_weight(e.from, a) * h / 2 * v[0] / M[e.from] / (2 * h);
        t.emplace_back(e.from, e.from, -3 * cf);
        t.emplace_back(e.from, grid.node_dof(a, 1), 4 * cf);
        t.emplace_back(e.from, grid.node_dof(a, 2), -cf);
        const double ct = net.jump_weight(e.to, a) * h / 2 * v[n] / M[e.to] / (2 * h);
        t.emplace_back(e.to, e.to, 3 * ct);
        t.emplace_back(e.to, grid.node_dof(a, n - 1), -4 * ct);
        t.emplace_back(e.to, grid.node_dof(a, n - 2), ct);
    }
    SparseMatrix Q(grid.dof_count(), grid.dof_count());
    Q.setFromTriplets(t.begin(), t.end());
    return Q;
}

}  // namespace mfgnet
