#include "mfgnet/coupling.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mfgnet {

CouplingOperator CouplingOperator::local(LocalMap map, double lambda) {
    CouplingOperator op;
    op.kind = Kind::local;
    op.map = map;
    op.lambda = lambda;
    return op;
}

CouplingOperator CouplingOperator::nonlocal(double bandwidth, double amplitude) {
    if (!(bandwidth > 0.0)) fail(ErrorCode::invalid_argument, "coupling bandwidth must be positive");
    CouplingOperator op;
    op.kind = Kind::nonlocal;
    op.bandwidth = bandwidth;
    op.amplitude = amplitude;
    return op;
}

double CouplingOperator::F(double m) const {
    switch (map) {
        case LocalMap::identity: return m;
        case LocalMap::scaled_identity: return lambda * m;
        case LocalMap::bounded: return lambda * std::tanh(m);
        case LocalMap::zero: return 0.0;
    }
    return 0.0;
}

bool CouplingOperator::is_zero() const noexcept {
    if (kind == Kind::nonlocal) return amplitude == 0.0;
    return map == LocalMap::zero || (map != LocalMap::identity && lambda == 0.0);
}

std::string CouplingOperator::describe() const {
    std::ostringstream os;
    if (kind == Kind::nonlocal) {
        os << "nonlocal{bandwidth=" << bandwidth << ", amplitude=" << amplitude << "}";
        return os.str();
    }
    switch (map) {
        case LocalMap::identity: os << "local{identity}"; break;
        case LocalMap::scaled_identity: os << "local{scaled_identity, lambda=" << lambda << "}"; break;
        case LocalMap::bounded: os << "local{bounded, lambda=" << lambda << "}"; break;
        case LocalMap::zero: os << "local{zero}"; break;
    }
    return os.str();
}

namespace {

struct Stack {
    std::vector<int> base;
    int size = 0;
    explicit Stack(const Grid& g) {
        for (int a = 0; a < g.edge_count(); ++a) {
            base.push_back(size);
            size += g.cells(a) + 1;
        }
    }
};

class KernelWalker {
public:
    KernelWalker(const Grid& g, const Stack& s, double r, Eigen::MatrixXd& K)
        : g_(g), net_(g.network()), s_(s), r_(r), K_(K) {}

    void row(int a, int j) {
        row_ = s_.base[a] + j;
        walk(a, j, +1, 0.0, 1.0, true);
        walk(a, j, -1, 0.0, 1.0, false);
    }

private:
    double kernel(double d) const { return 1.0 + std::cos(std::numbers::pi * d / r_); }

    void walk(int e, int j0, int dir, double d0, double w, bool include_start) {
        const int n = g_.cells(e);
        const double h = g_.h(e);
        const int j_end = dir > 0 ? n : 0;
        for (int j = include_start ? j0 : j0 + dir; dir > 0 ? j <= n : j >= 0; j += dir) {
            const double d = d0 + std::abs(j - j0) * h;
            if (d >= r_) return;
            K_(row_, s_.base[e] + j) += w * kernel(d);
        }
        const double d_end = d0 + std::abs(j_end - j0) * h;
        if (d_end >= r_) return;
        const Edge& edge = net_.edge(e);
        const int v = j_end == n ? edge.to : edge.from;
        if (net_.is_boundary(v)) {
            walk(e, j_end, -dir, d_end, w, false);
            return;
        }
        const double pe = net_.entry_prob(v, e);
        for (const Incidence& inc : net_.incident(v)) {
            if (inc.edge == e) continue;
            const bool starts = net_.edge(inc.edge).from == v;
            walk(inc.edge, starts ? 0 : g_.cells(inc.edge), starts ? +1 : -1, d_end,
                 w * inc.prob / (1.0 - pe), true);
        }
    }

    const Grid& g_;
    const MetricNetwork& net_;
    const Stack& s_;
    double r_;
    Eigen::MatrixXd& K_;
    int row_ = 0;
};

Vector stacked_weights(const Grid& g, const Stack& s) {
    Vector w(s.size);
    for (int a = 0; a < g.edge_count(); ++a) {
        const int n = g.cells(a);
        w.segment(s.base[a], n + 1).setConstant(g.h(a));
        w[s.base[a]] = w[s.base[a] + n] = g.h(a) / 2;
    }
    return w;
}

}  // namespace

Eigen::MatrixXd nonlocal_matrix(const CouplingOperator& op, const Grid& grid) {
    if (op.kind != CouplingOperator::Kind::nonlocal)
        fail(ErrorCode::invalid_argument, "nonlocal_matrix needs a nonlocal coupling");
    const Stack s(grid);
    const Vector w = stacked_weights(grid, s);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(s.size, s.size);
    KernelWalker walker(grid, s, op.bandwidth, K);
    for (int a = 0; a < grid.edge_count(); ++a)
        for (int j = 0; j <= grid.cells(a); ++j) walker.row(a, j);
    for (int r = 0; r < s.size; ++r) {
        K.row(r) = K.row(r).cwiseProduct(w.transpose());
        const double total = K.row(r).sum();
        K.row(r) *= op.amplitude / total;
    }
    return K;
}

PreparedCoupling::PreparedCoupling(CouplingOperator op, const Grid& grid)
    : op_(op), grid_(&grid) {
    if (op_.kind == CouplingOperator::Kind::nonlocal) {
        kernel_ = nonlocal_matrix(op_, grid);
        base_ = Stack(grid).base;
    }
}

EdgeArrays PreparedCoupling::operator()(const Vector& m) const {
    const Grid& grid = *grid_;
    EdgeArrays tr = traces(grid, m, TraceKind::jump);
    if (op_.kind == CouplingOperator::Kind::local) {
        for (Vector& e : tr) e = e.unaryExpr([&](double x) { return op_.F(x); });
        return tr;
    }
    Vector stacked(kernel_.cols());
    for (int a = 0; a < grid.edge_count(); ++a) stacked.segment(base_[a], grid.cells(a) + 1) = tr[a];
    const Vector out = kernel_ * stacked;
    for (int a = 0; a < grid.edge_count(); ++a) tr[a] = out.segment(base_[a], grid.cells(a) + 1);
    return tr;
}

EdgeArrays apply(const CouplingOperator& op, const Grid& grid, const Vector& m) {
    return PreparedCoupling(op, grid)(m);
}

double lipschitz_constant(const CouplingOperator& op, const Grid& grid) {
    if (op.kind == CouplingOperator::Kind::local) {
        if (op.map == LocalMap::zero) return 0.0;
        if (op.map == LocalMap::identity) return 1.0;
        return std::abs(op.lambda);
    }
    const Stack s(grid);
    const Vector w = stacked_weights(grid, s);
    const Vector sw = w.cwiseSqrt();
    const Eigen::MatrixXd B =
        (sw.asDiagonal() * nonlocal_matrix(op, grid) * sw.cwiseInverse().asDiagonal()).cwiseAbs();
    const double rows = B.rowwise().sum().maxCoeff();
    const double cols = B.colwise().sum().maxCoeff();
    return std::sqrt(rows * cols);
}

double monotonicity_gap(const CouplingOperator& op, const Grid& grid, const Vector& m1,
                        const Vector& m2) {
    const EdgeArrays t1 = traces(grid, m1, TraceKind::jump);
    const EdgeArrays t2 = traces(grid, m2, TraceKind::jump);
    const EdgeArrays v1 = apply(op, grid, m1);
    const EdgeArrays v2 = apply(op, grid, m2);
    EdgeArrays prod(grid.edge_count());
    for (int a = 0; a < grid.edge_count(); ++a)
        prod[a] = (t1[a] - t2[a]).cwiseProduct(v1[a] - v2[a]);
    return integrate(grid, prod);
}

}  // namespace mfgnet
