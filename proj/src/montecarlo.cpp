#include "mfgnet/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace mfgnet {

namespace {

constexpr long chunk_size = 2048;
constexpr int max_vertex_hops = 1000;

struct Exit {
    int edge;
    double cumulative;
    bool starts;  // the edge starts at the vertex
};

struct Walker {
    const Grid& grid;
    const MetricNetwork& net;
    std::vector<std::vector<Exit>> exits;
    std::vector<double> sqrt_mu;

    explicit Walker(const Grid& g) : grid(g), net(g.network()) {
        for (const Edge& e : net.edges()) sqrt_mu.push_back(std::sqrt(e.mu));
        exits.resize(net.vertex_count());
        for (int i = 0; i < net.vertex_count(); ++i) {
            double total = 0.0;
            for (const Incidence& inc : net.incident(i)) total += inc.prob / sqrt_mu[inc.edge];
            double c = 0.0;
            for (const Incidence& inc : net.incident(i)) {
                c += inc.prob / sqrt_mu[inc.edge] / total;
                exits[i].push_back({inc.edge, c, inc.sign < 0});
            }
            exits[i].back().cumulative = 1.0;
        }
    }

    /// Moves a tentative position back onto the network.
    template <class Rng>
    void resolve(int& e, double& y, Rng& rng, std::uniform_real_distribution<double>& unif) const {
        for (int hop = 0; hop < max_vertex_hops; ++hop) {
            const double len = net.edge(e).length;
            double excess;
            int v;
            if (y < 0.0) {
                excess = -y;
                v = net.edge(e).from;
            } else if (y > len) {
                excess = y - len;
                v = net.edge(e).to;
            } else {
                return;
            }
            if (net.is_boundary(v)) {
                y = y < 0.0 ? excess : len - excess;
                continue;
            }
            const double u = unif(rng);
            const auto& ex = exits[v];
            const Exit& next = *std::find_if(ex.begin(), ex.end(), [&](const Exit& x) { return u < x.cumulative; });
            const double depth = excess * sqrt_mu[next.edge] / sqrt_mu[e];
            e = next.edge;
            y = next.starts ? depth : net.edge(e).length - depth;
        }
        fail(ErrorCode::solve, "particle bounced between vertices too often; reduce the time step");
    }

    [[nodiscard]] int bin(int e, double y) const {
        const double h = grid.h(e);
        const int n = grid.cells(e);
        return std::clamp(static_cast<int>(std::floor(y / h + 0.5)), 0, n);
    }
};

}  // namespace

double max_time_step(const MetricNetwork& net, double velocity_bound) {
    // six standard deviations plus the drift must stay within the shortest edge
    double len = net.edge(0).length, mu = 0.0;
    for (const Edge& e : net.edges()) {
        len = std::min(len, e.length);
        mu = std::max(mu, e.mu);
    }
    // solve 6 (sqrt(2 mu d) + a d) = len for d
    const double a = 6 * velocity_bound, b = 6 * std::sqrt(2 * mu);
    if (a == 0.0) return (len / b) * (len / b);
    const double s = (-b + std::sqrt(b * b + 4 * a * len)) / (2 * a);
    return s * s;
}

EdgeArrays fp_histogram(const Grid& grid, const Vector& m) {
    EdgeArrays t = traces(grid, m, TraceKind::jump);
    for (int a = 0; a < grid.edge_count(); ++a) {
        const int n = grid.cells(a);
        t[a] *= grid.h(a);
        t[a][0] *= 0.5;
        t[a][n] *= 0.5;
    }
    return t;
}

SimResult simulate(const Grid& grid, const SimConfig& cfg) {
    const MetricNetwork& net = grid.network();
    if (cfg.paths < 1) fail(ErrorCode::invalid_argument, "need at least one path");
    if (!(cfg.delta > 0.0)) fail(ErrorCode::invalid_argument, "time step must be positive");
    if (cfg.initial_density.size() != grid.dof_count())
        fail(ErrorCode::invalid_argument, "initial density does not match the grid");
    const double dmax = max_time_step(net, cfg.velocity_bound);
    if (cfg.delta > dmax) {
        std::ostringstream os;
        os << "time step " << cfg.delta << " is too large for the shortest edge; use delta <= " << dmax;
        fail(ErrorCode::invalid_argument, os.str());
    }

    std::vector<double> times = cfg.times;
    std::sort(times.begin(), times.end());
    std::vector<long> record_step;
    for (double t : times) {
        if (t < 0.0) fail(ErrorCode::invalid_argument, "recording times must be nonnegative");
        record_step.push_back(std::lround(t / cfg.delta));
    }
    const long total_steps = record_step.empty() ? 0 : record_step.back();

    // initial law: pick a dual bin by mass, then a uniform point inside it
    const EdgeArrays init = fp_histogram(grid, cfg.initial_density);
    std::vector<std::pair<int, int>> bins;
    std::vector<double> cdf;
    double acc = 0.0;
    for (int a = 0; a < grid.edge_count(); ++a) {
        for (int j = 0; j < init[a].size(); ++j) {
            if (init[a][j] < 0.0) fail(ErrorCode::invalid_argument, "initial density is negative");
            if (init[a][j] == 0.0) continue;
            acc += init[a][j];
            bins.emplace_back(a, j);
            cdf.push_back(acc);
        }
    }
    if (!(acc > 0.0)) fail(ErrorCode::invalid_argument, "initial density has no mass");

    const Walker walker(grid);
    const long chunks = (cfg.paths + chunk_size - 1) / chunk_size;
    const std::size_t nt = times.size();
    std::vector<std::vector<std::vector<long>>> counts(
        chunks, std::vector<std::vector<long>>(nt));
    SimResult out;
    out.times = times;
    if (cfg.keep_positions) out.positions.assign(nt, std::vector<SimPosition>(cfg.paths));

    auto run_chunk = [&](long c) {
        std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(c)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        auto& local = counts[c];
        for (auto& v : local) {
            v.assign(0, 0);
            for (int a = 0; a < grid.edge_count(); ++a) v.resize(v.size() + grid.cells(a) + 1, 0);
        }
        std::vector<int> base;
        int b0 = 0;
        for (int a = 0; a < grid.edge_count(); ++a) {
            base.push_back(b0);
            b0 += grid.cells(a) + 1;
        }
        const long first = c * chunk_size;
        const long last = std::min(cfg.paths, first + chunk_size);
        for (long path = first; path < last; ++path) {
            const double u = unif(rng) * acc;
            const std::size_t k = std::min<std::size_t>(
                std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), cdf.size() - 1);
            int e = bins[k].first;
            const int j = bins[k].second;
            const int n = grid.cells(e);
            const double h = grid.h(e);
            const double lo = j == 0 ? 0.0 : (j - 0.5) * h;
            const double hi = j == n ? net.edge(e).length : (j + 0.5) * h;
            double y = lo + (hi - lo) * unif(rng);

            std::size_t next = 0;
            for (long s = 0;; ++s) {
                while (next < nt && record_step[next] == s) {
                    ++local[next][base[e] + walker.bin(e, y)];
                    if (cfg.keep_positions) out.positions[next][path] = {e, y};
                    ++next;
                }
                if (s >= total_steps) break;
                const double t = s * cfg.delta;
                const double drift = cfg.velocity ? cfg.velocity(e, y, t) : 0.0;
                y += drift * cfg.delta + std::sqrt(2 * net.edge(e).mu * cfg.delta) * normal(rng);
                walker.resolve(e, y, rng, unif);
            }
        }
    };

    const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(chunks)));
    if (threads == 1) {
        for (long c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::atomic<long> next_chunk{0};
        std::vector<std::thread> pool;
        std::exception_ptr error;
        std::mutex error_mu;
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                try {
                    for (long c = next_chunk++; c < chunks; c = next_chunk++) run_chunk(c);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (error) std::rethrow_exception(error);
    }

    for (std::size_t ti = 0; ti < nt; ++ti) {
        EdgeArrays h(grid.edge_count());
        int b0 = 0;
        for (int a = 0; a < grid.edge_count(); ++a) {
            const int n = grid.cells(a);
            h[a] = Vector::Zero(n + 1);
            for (long c = 0; c < chunks; ++c)
                for (int j = 0; j <= n; ++j) h[a][j] += static_cast<double>(counts[c][ti][b0 + j]);
            h[a] /= static_cast<double>(cfg.paths);
            b0 += n + 1;
        }
        out.histograms.push_back(std::move(h));
    }
    return out;
}

double total_variation(const EdgeArrays& p, const EdgeArrays& q) {
    if (p.size() != q.size()) fail(ErrorCode::invalid_argument, "histograms are not aligned");
    double s = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        if (p[a].size() != q[a].size()) fail(ErrorCode::invalid_argument, "histograms are not aligned");
        s += (p[a] - q[a]).cwiseAbs().sum();
    }
    return 0.5 * s;
}

double compare_to_fp(const Grid& grid, const EdgeArrays& empirical, const Vector& m) {
    return total_variation(empirical, fp_histogram(grid, m));
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) fail(ErrorCode::invalid_argument, "KS test needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2));
    return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

}  // namespace mfgnet
