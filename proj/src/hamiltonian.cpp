#include "mfgnet/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mfgnet {

namespace {

constexpr double golden = 0.6180339887498949;

/// Maximizer of a unimodal function on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
    double x1 = hi - golden * (hi - lo);
    double x2 = lo + golden * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = f(x1);
        }
    }
    const double mid = 0.5 * (lo + hi);
    double best = mid;
    double fb = f(mid);
    for (double c : {lo, hi}) {
        const double fc = f(c);
        if (fc > fb) {
            fb = fc;
            best = c;
        }
    }
    return best;
}

/// Minimizer of a convex function of p; +-infinity when the search hits the bracket.
template <class F>
double convex_argmin(F&& f, double scale) {
    const double bound = 1e6 * (1.0 + scale);
    const double p = golden_max([&](double x) { return -f(x); }, -bound, bound, 1e-9 * (1.0 + scale));
    if (p <= -bound * (1 - 1e-9)) return -std::numeric_limits<double>::infinity();
    if (p >= bound * (1 - 1e-9)) return std::numeric_limits<double>::infinity();
    return p;
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

}  // namespace

ClippedQuadratic::ClippedQuadratic(double amax) : amax_(amax) {
    if (!(amax > 0.0)) fail(ErrorCode::invalid_argument, "clipped_quadratic needs amax > 0");
}

double ClippedQuadratic::H(double, double p) const {
    const double a = std::abs(p);
    return a <= amax_ ? 0.5 * p * p : amax_ * a - 0.5 * amax_ * amax_;
}

double ClippedQuadratic::Hp(double, double p) const { return std::clamp(p, -amax_, amax_); }

std::string ClippedQuadratic::describe() const { return "clipped_quadratic{amax=" + num(amax_) + "}"; }

ClippedLinear::ClippedLinear(double amax, double c) : amax_(amax), c_(c) {
    if (!(amax > 0.0)) fail(ErrorCode::invalid_argument, "clipped_linear needs amax > 0");
    if (!(c >= 0.0)) fail(ErrorCode::invalid_argument, "clipped_linear needs c >= 0");
}

double ClippedLinear::H(double, double p) const { return amax_ * std::max(0.0, std::abs(p) - c_); }

double ClippedLinear::Hp(double, double p) const {
    if (std::abs(p) <= c_) return 0.0;
    return p > 0 ? amax_ : -amax_;
}

std::string ClippedLinear::describe() const {
    return "clipped_linear{amax=" + num(amax_) + ", c=" + num(c_) + "}";
}

FunctionHamiltonian::FunctionHamiltonian(Fn H, Fn Hp, double C0, std::string name)
    : H_(std::move(H)), Hp_(std::move(Hp)), C0_(C0), name_(std::move(name)) {}

double FunctionHamiltonian::p_min(double y) const {
    return convex_argmin([&](double p) { return H_(y, p); }, C0_);
}

LegendreHamiltonian::LegendreHamiltonian(LagrangianSpec spec, int control_grid_size)
    : spec_(std::move(spec)), grid_size_(control_grid_size) {
    if (control_grid_size < 3) fail(ErrorCode::invalid_argument, "control grid needs at least 3 points");
    if (!(spec_.a_min < spec_.a_max)) fail(ErrorCode::invalid_argument, "control interval is empty");
    if (!spec_.L) fail(ErrorCode::invalid_argument, "Lagrangian is missing");

    const int ny = 17;
    const int na = std::max(grid_size_, 33);
    const double da = (spec_.a_max - spec_.a_min) / (na - 1);
    double neg_L = 0.0;
    double dy_L = 0.0;
    for (int iy = 0; iy < ny; ++iy) {
        const double y = spec_.length * iy / (ny - 1);
        const double dy = spec_.length * 1e-6;
        for (int k = 0; k < na; ++k) {
            const double a = spec_.a_min + k * da;
            const double l = spec_.L(y, a);
            if (!std::isfinite(l)) fail(ErrorCode::validation, "Lagrangian is not finite");
            neg_L = std::max(neg_L, -l);
            const double y0 = std::max(0.0, y - dy);
            const double y1 = std::min(spec_.length, y + dy);
            dy_L = std::max(dy_L, std::abs(spec_.L(y1, a) - spec_.L(y0, a)) / (y1 - y0));
            if (k > 0 && k + 1 < na) {
                const double second = spec_.L(y, a - da) - 2 * l + spec_.L(y, a + da);
                if (second < -1e-10 * (1.0 + std::abs(l)))
                    fail(ErrorCode::validation,
                         "Lagrangian is not convex in the control at y=" + num(y) + ", a=" + num(a));
            }
        }
    }
    C0_ = std::max({std::abs(spec_.a_min), std::abs(spec_.a_max), neg_L, dy_L});
}

double LegendreHamiltonian::argmax_control(double y, double p) const {
    auto objective = [&](double a) { return -a * p - spec_.L(y, a); };
    const double da = (spec_.a_max - spec_.a_min) / (grid_size_ - 1);
    int best = 0;
    double fb = objective(spec_.a_min);
    for (int k = 1; k < grid_size_; ++k) {
        const double f = objective(spec_.a_min + k * da);
        if (f > fb) {
            fb = f;
            best = k;
        }
    }
    const double lo = spec_.a_min + std::max(0, best - 1) * da;
    const double hi = spec_.a_min + std::min(grid_size_ - 1, best + 1) * da;
    return golden_max(objective, lo, hi, 1e-10);
}

double LegendreHamiltonian::H(double y, double p) const {
    const double a = argmax_control(y, p);
    return -a * p - spec_.L(y, a);
}

double LegendreHamiltonian::Hp(double y, double p) const { return -argmax_control(y, p); }

double LegendreHamiltonian::p_min(double y) const {
    return convex_argmin([&](double p) { return H(y, p); }, C0_);
}

std::shared_ptr<const EdgeHamiltonian> legendre(const LagrangianSpec& spec, int control_grid_size) {
    return std::make_shared<LegendreHamiltonian>(spec, control_grid_size);
}

HamiltonianModel::HamiltonianModel(int edges, std::shared_ptr<const EdgeHamiltonian> all)
    : edges_(edges, std::move(all)) {
    if (!edges_.empty() && !edges_.front()) fail(ErrorCode::invalid_argument, "null Hamiltonian");
}

HamiltonianModel::HamiltonianModel(std::vector<std::shared_ptr<const EdgeHamiltonian>> per_edge)
    : edges_(std::move(per_edge)) {
    for (const auto& h : edges_)
        if (!h) fail(ErrorCode::invalid_argument, "null Hamiltonian");
}

double HamiltonianModel::C0() const {
    double c = 0.0;
    for (const auto& h : edges_) c = std::max(c, h->C0());
    return c;
}

namespace {

void check_y(const MetricNetwork& net, int a, double y) {
    const double len = net.edge(a).length;
    if (!(y >= 0.0 && y <= len))
        fail(ErrorCode::invalid_argument,
             "coordinate " + num(y) + " outside edge '" + net.edge(a).name + "'");
}

}  // namespace

double eval_H(const HamiltonianModel& m, const MetricNetwork& net, int a, double y, double p) {
    check_y(net, a, y);
    return m.edge(a).H(y, p);
}

double eval_Hp(const HamiltonianModel& m, const MetricNetwork& net, int a, double y, double p) {
    check_y(net, a, y);
    return m.edge(a).Hp(y, p);
}

AssumptionReport check_assumptions(const HamiltonianModel& m, const MetricNetwork& net,
                                   const AssumptionSamples& s) {
    AssumptionReport r;
    if (m.edge_count() != net.edge_count()) {
        r.report.add("Hamiltonian model has " + std::to_string(m.edge_count()) +
                     " edges, network has " + std::to_string(net.edge_count()));
        return r;
    }
    const double C0 = m.C0();
    const double P = s.p_range > 0 ? s.p_range : 4.0 * (C0 + 1.0);
    r.worst_growth = -std::numeric_limits<double>::infinity();
    r.worst_slope = -std::numeric_limits<double>::infinity();
    r.worst_x_variation = -std::numeric_limits<double>::infinity();
    r.worst_convexity = std::numeric_limits<double>::infinity();
    struct Where {
        int edge = 0;
        double y = 0, p = 0;
    } wg, ws, wx, wc;

    const double dp = 2 * P / (s.p_samples - 1);
    for (int a = 0; a < net.edge_count(); ++a) {
        const EdgeHamiltonian& h = m.edge(a);
        const double len = net.edge(a).length;
        for (int iy = 0; iy < s.y_samples; ++iy) {
            const double y = s.y_samples == 1 ? 0.0 : len * iy / (s.y_samples - 1);
            const double ey = 1e-5 * len;
            const double y0 = std::max(0.0, y - ey);
            const double y1 = std::min(len, y + ey);
            for (int k = 0; k < s.p_samples; ++k) {
                const double p = -P + k * dp;
                const double Hv = h.H(y, p);
                const double growth = Hv - C0 * (std::abs(p) + 1);
                if (growth > r.worst_growth) {
                    r.worst_growth = growth;
                    wg = {a, y, p};
                }
                const double slope = std::abs(h.Hp(y, p)) - C0;
                if (slope > r.worst_slope) {
                    r.worst_slope = slope;
                    ws = {a, y, p};
                }
                const double xv = std::abs(h.H(y1, p) - h.H(y0, p)) / (y1 - y0) - C0 * (std::abs(p) + 1);
                if (xv > r.worst_x_variation) {
                    r.worst_x_variation = xv;
                    wx = {a, y, p};
                }
                if (k > 0 && k + 1 < s.p_samples) {
                    const double second = h.H(y, p - dp) - 2 * Hv + h.H(y, p + dp);
                    if (second < r.worst_convexity) {
                        r.worst_convexity = second;
                        wc = {a, y, p};
                    }
                }
            }
        }
    }
    auto at = [&](const Where& w) {
        return " (edge '" + net.edge(w.edge).name + "', y=" + num(w.y) + ", p=" + num(w.p) + ")";
    };
    const double tol = s.tol;
    if (r.worst_growth > tol * (1 + C0))
        r.report.add("growth bound H <= C0(|p|+1) violated by " + num(r.worst_growth) + at(wg));
    if (r.worst_slope > tol * (1 + C0))
        r.report.add("slope bound |H_p| <= C0 violated by " + num(r.worst_slope) + at(ws));
    if (r.worst_x_variation > 1e-4 * (1 + C0))
        r.report.add("x-variation bound |d_x H| <= C0(|p|+1) violated by " +
                     num(r.worst_x_variation) + at(wx));
    if (r.worst_convexity < -tol * (1 + C0))
        r.report.add("convexity in p violated: second difference " + num(r.worst_convexity) + at(wc));
    return r;
}

}  // namespace mfgnet
