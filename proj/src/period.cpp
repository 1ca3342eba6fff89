#include "slowmo/period.hpp"

#include "slowmo/common.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace slowmo {

namespace {

constexpr const char* kModule = "period";
constexpr double kPeakThreshold = 0.6;

struct Edge {
    int to;
    double w;
};

class DisjointSets {
public:
    explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
        return true;
    }

private:
    std::vector<int> parent_;
};

std::vector<double> dijkstra(const std::vector<std::vector<Edge>>& adj, int src) {
    std::vector<double> dist(adj.size(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (const Edge& e : adj[u]) {
            const double nd = d + e.w;
            if (nd < dist[e.to]) {
                dist[e.to] = nd;
                pq.emplace(nd, e.to);
            }
        }
    }
    return dist;
}

}  // namespace

Surrogate isomap_1d(const PointCloud& cloud, int n_neighbors) {
    const int n = static_cast<int>(cloud.size());
    if (n_neighbors < 1) fail(ErrorKind::Argument, kModule, "n_neighbors must be positive");
    if (n < n_neighbors + 1)
        fail(ErrorKind::Argument, kModule,
             "ISOMAP needs at least " + std::to_string(n_neighbors + 1) + " points, got " + std::to_string(n));

    Surrogate out;
    out.signal.samples.assign(static_cast<std::size_t>(n), 0.0);
    const Eigen::MatrixXd dist = pairwise_distances(cloud);
    if (dist.maxCoeff() == 0.0) {
        out.degenerate = true;
        out.warnings.push_back("all points coincide; surrogate is flat");
        return out;
    }

    // Symmetric k-NN adjacency; ties broken by index.
    std::vector<std::vector<char>> linked(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist(i, a) < dist(i, b); });
        int taken = 0;
        for (int j : order) {
            if (j == i) continue;
            linked[i][j] = linked[j][i] = 1;
            if (++taken == n_neighbors) break;
        }
    }
    DisjointSets comps(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (linked[i][j]) comps.unite(i, j);

    // Borůvka rounds: each component adds its shortest edge to another one.
    for (;;) {
        std::vector<int> root(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) root[i] = comps.find(i);
        std::vector<std::pair<int, int>> best(static_cast<std::size_t>(n), {-1, -1});
        bool any = false;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (root[i] == root[j]) continue;
                any = true;
                auto& b = best[root[i]];
                if (b.first < 0 || dist(i, j) < dist(b.first, b.second)) b = {i, j};
            }
        if (!any) break;
        out.bridged = true;
        for (const auto& [i, j] : best)
            if (i >= 0) {
                linked[i][j] = linked[j][i] = 1;
                comps.unite(i, j);
            }
    }
    if (out.bridged) out.warnings.push_back("neighbor graph was disconnected; components bridged");

    std::vector<std::vector<Edge>> adj(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (linked[i][j]) adj[i].push_back({j, dist(i, j)});

    Eigen::MatrixXd geo2(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t s) {
        const auto d = dijkstra(adj, static_cast<int>(s));
        for (int j = 0; j < n; ++j) geo2(static_cast<Eigen::Index>(s), j) = d[j] * d[j];
    });
    geo2 = 0.5 * (geo2 + geo2.transpose()).eval();

    // Classical MDS: B = -1/2 J G J.
    const Eigen::VectorXd row_mean = geo2.rowwise().mean();
    const double all_mean = row_mean.mean();
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = -0.5 * (geo2(i, j) - row_mean(i) - row_mean(j) + all_mean);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
    const double lambda = std::max(0.0, eig.eigenvalues()(n - 1));
    Eigen::VectorXd v = eig.eigenvectors().col(n - 1);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0) v = -v;
    v *= std::sqrt(lambda);

    std::vector<std::pair<int, double>> by_time(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) by_time[i] = {cloud.labels[static_cast<std::size_t>(i)], v(i)};
    std::stable_sort(by_time.begin(), by_time.end(), [](auto& a, auto& c) { return a.first < c.first; });
    for (int i = 0; i < n; ++i) out.signal.samples[static_cast<std::size_t>(i)] = by_time[i].second;
    return out;
}

std::vector<double> nsdf(const std::vector<double>& x, int max_lag) {
    const int n = static_cast<int>(x.size());
    max_lag = std::min(max_lag, n - 1);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    std::vector<double> c(x.size());
    for (int t = 0; t < n; ++t) c[t] = x[t] - mean;

    std::vector<double> out(static_cast<std::size_t>(max_lag + 1), 0.0);
    for (int tau = 0; tau <= max_lag; ++tau) {
        double acf = 0.0;
        double m = 0.0;
        for (int t = 0; t + tau < n; ++t) {
            acf += c[t] * c[t + tau];
            m += c[t] * c[t] + c[t + tau] * c[t + tau];
        }
        out[tau] = m > 0.0 ? 2.0 * acf / m : 0.0;
    }
    return out;
}

PeriodEstimate estimate_period(const Signal1D& surrogate) {
    const auto& x = surrogate.samples;
    const int n = static_cast<int>(x.size());
    if (n < 8) fail(ErrorKind::Argument, kModule, "period estimation needs at least 8 samples");
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double scale = std::max(std::abs(*lo), std::abs(*hi));
    if (*hi - *lo <= 1e-12 * scale) fail(ErrorKind::Aperiodic, kModule, "aperiodic input");
    const int max_lag = n / 2;
    const auto r = nsdf(x, max_lag);
    if (r[0] <= 0.0) fail(ErrorKind::Aperiodic, kModule, "aperiodic input");

    int tau = 1;
    while (tau <= max_lag && r[tau] > 0.0) ++tau;

    // One candidate per positive lobe, restricted to lags >= 2.
    std::vector<int> candidates;
    while (tau <= max_lag) {
        while (tau <= max_lag && r[tau] <= 0.0) ++tau;
        if (tau > max_lag) break;
        int best = -1;
        for (; tau <= max_lag && r[tau] > 0.0; ++tau)
            if (tau >= 2 && (best < 0 || r[tau] > r[best])) best = tau;
        if (best >= 0) candidates.push_back(best);
    }
    if (candidates.empty()) fail(ErrorKind::Aperiodic, kModule, "aperiodic input");

    double top = 0.0;
    for (int c : candidates) top = std::max(top, r[c]);
    int chosen = candidates.front();
    for (int c : candidates)
        if (r[c] >= kPeakThreshold * top) {
            chosen = c;
            break;
        }

    double period = chosen;
    double height = r[chosen];
    if (chosen + 1 <= max_lag) {
        const double a = r[chosen - 1];
        const double b = r[chosen];
        const double c = r[chosen + 1];
        const double denom = a - 2.0 * b + c;
        if (denom < 0.0) {
            const double shift = 0.5 * (a - c) / denom;
            period = chosen + shift;
            height = b - 0.25 * (a - c) * shift;
        }
    }

    PeriodEstimate est;
    est.T = std::clamp(period, 2.0, n / 2.0);
    est.confidence = std::clamp(height, 0.0, 1.0);
    est.surrogate = surrogate;
    return est;
}

}  // namespace slowmo
