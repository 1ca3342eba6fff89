#include "slowmo/tda.hpp"

#include "slowmo/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <unordered_map>

namespace slowmo {

namespace {

constexpr const char* kModule = "tda";

struct Cofacet {
    double value;
    int a, b, c;  // a < b < c
    std::uint32_t coef;
};

bool key_less(const Cofacet& x, const Cofacet& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    return x.c < y.c;
}

bool same_key(const Cofacet& x, const Cofacet& y) { return x.a == y.a && x.b == y.b && x.c == y.c; }

struct HeapOrder {
    bool operator()(const Cofacet& x, const Cofacet& y) const { return key_less(y, x); }
};

struct Edge {
    double value;
    int i, j;  // i < j
};

class RipsH1 {
public:
    RipsH1(const Eigen::MatrixXd& dist, double threshold, std::uint32_t p)
        : dist_(dist), n_(static_cast<int>(dist.rows())), threshold_(threshold), p_(p), inverse_(p, 0) {
        // Fermat: a^(p-2) is the inverse of a.
        for (std::uint32_t a = 1; a < p; ++a) {
            std::uint64_t result = 1;
            std::uint64_t base = a;
            for (std::uint32_t e = p - 2; e > 0; e >>= 1) {
                if (e & 1) result = result * base % p;
                base = base * base % p;
            }
            inverse_[a] = static_cast<std::uint32_t>(result);
        }
    }

    std::vector<PersistencePair> run() {
        collect_edges();
        const std::vector<char> cleared = clear_negative_edges();
        std::vector<PersistencePair> pairs;
        for (auto e = static_cast<std::ptrdiff_t>(edges_.size()) - 1; e >= 0; --e) {
            if (cleared[static_cast<std::size_t>(e)]) continue;
            reduce_column(static_cast<int>(e), pairs);
        }
        return pairs;
    }

private:
    struct Column {
        std::vector<std::pair<int, std::uint32_t>> terms;  // (edge, coefficient)
        std::uint32_t pivot_coef;
    };

    std::uint64_t code(const Cofacet& f) const {
        return (static_cast<std::uint64_t>(f.a) * n_ + f.b) * n_ + f.c;
    }

    void collect_edges() {
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (dist_(i, j) <= threshold_) edges_.push_back({dist_(i, j), i, j});
        std::sort(edges_.begin(), edges_.end(), [](const Edge& x, const Edge& y) {
            if (x.value != y.value) return x.value < y.value;
            if (x.i != y.i) return x.i < y.i;
            return x.j < y.j;
        });
    }

    // Edges joining two components in degree 0 are paired there, so their
    // degree-1 coboundary columns need no reduction.
    std::vector<char> clear_negative_edges() const {
        std::vector<int> parent(static_cast<std::size_t>(n_));
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        std::vector<char> cleared(edges_.size(), 0);
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const int a = find(edges_[e].i);
            const int b = find(edges_[e].j);
            if (a != b) {
                parent[std::max(a, b)] = std::min(a, b);
                cleared[e] = 1;
            }
        }
        return cleared;
    }

    template <class Fn>
    void for_each_cofacet(int e, Fn&& fn) const {
        const Edge& edge = edges_[static_cast<std::size_t>(e)];
        for (int k = 0; k < n_; ++k) {
            if (k == edge.i || k == edge.j) continue;
            const double dik = dist_(edge.i, k);
            const double djk = dist_(edge.j, k);
            if (dik > threshold_ || djk > threshold_) continue;
            Cofacet f;
            f.value = std::max({edge.value, dik, djk});
            // Boundary sign of the face opposite k is (-1)^(position of k).
            if (k < edge.i) {
                f.a = k, f.b = edge.i, f.c = edge.j, f.coef = 1;
            } else if (k < edge.j) {
                f.a = edge.i, f.b = k, f.c = edge.j, f.coef = p_ - 1;
            } else {
                f.a = edge.i, f.b = edge.j, f.c = k, f.coef = 1;
            }
            fn(f);
        }
    }

    std::optional<Cofacet> smallest_cofacet(int e) const {
        std::optional<Cofacet> best;
        for_each_cofacet(e, [&](const Cofacet& f) {
            if (!best || key_less(f, *best)) best = f;
        });
        return best;
    }

    using Heap = std::priority_queue<Cofacet, std::vector<Cofacet>, HeapOrder>;

    void push_column(Heap& heap, int e, std::uint32_t factor) const {
        for_each_cofacet(e, [&](Cofacet f) {
            f.coef = static_cast<std::uint32_t>((static_cast<std::uint64_t>(f.coef) * factor) % p_);
            heap.push(f);
        });
    }

    std::optional<Cofacet> pop_pivot(Heap& heap) const {
        while (!heap.empty()) {
            Cofacet top = heap.top();
            heap.pop();
            std::uint64_t coef = top.coef;
            while (!heap.empty() && same_key(heap.top(), top)) {
                coef += heap.top().coef;
                heap.pop();
            }
            coef %= p_;
            if (coef != 0) {
                top.coef = static_cast<std::uint32_t>(coef);
                heap.push(top);
                return top;
            }
        }
        return std::nullopt;
    }

    void record(int e, const Cofacet& pivot, std::vector<std::pair<int, std::uint32_t>> terms,
                std::vector<PersistencePair>& pairs) {
        std::sort(terms.begin(), terms.end());
        std::vector<std::pair<int, std::uint32_t>> merged;
        for (const auto& [edge, c] : terms) {
            if (!merged.empty() && merged.back().first == edge)
                merged.back().second = (merged.back().second + c) % p_;
            else
                merged.emplace_back(edge, c);
        }
        std::erase_if(merged, [](const auto& t) { return t.second == 0; });
        pivots_.emplace(code(pivot), static_cast<int>(columns_.size()));
        columns_.push_back({std::move(merged), pivot.coef});
        const double birth = edges_[static_cast<std::size_t>(e)].value;
        if (pivot.value > birth) pairs.push_back({birth, pivot.value, false});
    }

    void reduce_column(int e, std::vector<PersistencePair>& pairs) {
        const auto first = smallest_cofacet(e);
        if (!first) {
            pairs.push_back({edges_[static_cast<std::size_t>(e)].value,
                             std::numeric_limits<double>::infinity(), true});
            return;
        }
        if (!pivots_.contains(code(*first))) {
            record(e, *first, {{e, 1}}, pairs);
            return;
        }

        Heap heap;
        push_column(heap, e, 1);
        std::vector<std::pair<int, std::uint32_t>> terms{{e, 1}};
        for (;;) {
            const auto pivot = pop_pivot(heap);
            if (!pivot) {
                pairs.push_back({edges_[static_cast<std::size_t>(e)].value,
                                 std::numeric_limits<double>::infinity(), true});
                return;
            }
            const auto it = pivots_.find(code(*pivot));
            if (it == pivots_.end()) {
                record(e, *pivot, std::move(terms), pairs);
                return;
            }
            const Column& other = columns_[static_cast<std::size_t>(it->second)];
            const std::uint64_t factor =
                (static_cast<std::uint64_t>(p_ - pivot->coef) * inverse_[other.pivot_coef]) % p_;
            for (const auto& [edge, c] : other.terms) {
                const auto f = static_cast<std::uint32_t>((c * factor) % p_);
                push_column(heap, edge, f);
                terms.emplace_back(edge, f);
            }
        }
    }

    const Eigen::MatrixXd& dist_;
    int n_;
    double threshold_;
    std::uint32_t p_;
    std::vector<std::uint32_t> inverse_;
    std::vector<Edge> edges_;
    std::vector<Column> columns_;
    std::unordered_map<std::uint64_t, int> pivots_;
};

void validate_distances(const Eigen::MatrixXd& dist) {
    if (dist.rows() != dist.cols()) fail(ErrorKind::Argument, kModule, "distance matrix must be square");
    const double scale = dist.size() ? dist.cwiseAbs().maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < dist.rows(); ++i) {
        if (dist(i, i) != 0.0) fail(ErrorKind::Argument, kModule, "distance matrix diagonal must be zero");
        for (Eigen::Index j = 0; j < dist.cols(); ++j) {
            if (!std::isfinite(dist(i, j)) || dist(i, j) < 0.0)
                fail(ErrorKind::Argument, kModule, "distances must be finite and non-negative");
            if (std::abs(dist(i, j) - dist(j, i)) > 1e-12 * scale)
                fail(ErrorKind::Argument, kModule, "distance matrix must be symmetric");
        }
    }
}

}  // namespace

bool is_prime(int p) {
    if (p < 2) return false;
    for (int q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

PersistenceDiagram rips_persistence_h1(const Eigen::MatrixXd& dist, const RipsOptions& opts) {
    if (!is_prime(opts.field_char))
        fail(ErrorKind::Argument, kModule, "field characteristic " + std::to_string(opts.field_char) + " is not prime");
    if (opts.field_char > 65521) fail(ErrorKind::Argument, kModule, "field characteristic too large");
    validate_distances(dist);
    if (dist.rows() > opts.max_points)
        fail(ErrorKind::Argument, kModule,
             std::to_string(dist.rows()) + " points exceed the cap of " + std::to_string(opts.max_points));

    PersistenceDiagram diagram;
    diagram.field_char = opts.field_char;
    if (dist.rows() < 3) return diagram;

    const double threshold = opts.threshold.value_or(enclosing_radius(dist));
    RipsH1 rips(dist, threshold, static_cast<std::uint32_t>(opts.field_char));
    diagram.pairs = rips.run();
    const double tol = 1e-12 * dist.maxCoeff();
    std::erase_if(diagram.pairs, [tol](const PersistencePair& p) { return !p.essential && p.persistence() <= tol; });
    std::sort(diagram.pairs.begin(), diagram.pairs.end(), [](const PersistencePair& x, const PersistencePair& y) {
        const double px = x.persistence();
        const double py = y.persistence();
        if (px != py) return px > py;
        if (x.birth != y.birth) return x.birth < y.birth;
        return x.death < y.death;
    });
    return diagram;
}

ScaleSelection select_scale(const PersistenceDiagram& diagram, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorKind::Argument, kModule, "alpha must lie in [0, 1]");
    const PersistencePair* best = nullptr;
    for (const auto& pr : diagram.pairs) {
        if (pr.essential) continue;
        if (!best || pr.persistence() > best->persistence() ||
            (pr.persistence() == best->persistence() && pr.birth < best->birth))
            best = &pr;
    }
    if (!best) fail(ErrorKind::NoCycle, kModule, "no 1-cycles found");
    ScaleSelection s;
    s.alpha = alpha;
    s.chosen = *best;
    s.sigma = alpha * best->birth + (1.0 - alpha) * best->death;
    return s;
}

std::vector<int> maxmin_indices(const PointCloud& cloud, int target, std::uint64_t seed) {
    const int n = static_cast<int>(cloud.size());
    if (target < 1 || target > n)
        fail(ErrorKind::Argument, kModule, "subsample target must lie in [1, " + std::to_string(n) + "]");
    if (target == n) {
        std::vector<int> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    std::mt19937_64 rng(seed);
    const int start = static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng));

    auto farthest = [&](const std::vector<double>& d) {
        int best = 0;
        for (int i = 1; i < n; ++i)
            if (d[i] > d[best]) best = i;
        return best;
    };
    std::vector<double> mind(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) mind[i] = (cloud.points.row(i) - cloud.points.row(start)).norm();

    std::vector<int> chosen;
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    int next = farthest(mind);
    std::fill(mind.begin(), mind.end(), std::numeric_limits<double>::infinity());
    while (static_cast<int>(chosen.size()) < target) {
        chosen.push_back(next);
        taken[next] = 1;
        for (int i = 0; i < n; ++i) {
            const double d = taken[i] ? -1.0 : (cloud.points.row(i) - cloud.points.row(next)).norm();
            mind[i] = std::min(mind[i], d);
        }
        next = farthest(mind);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

PointCloud subsample_maxmin(const PointCloud& cloud, int target, std::uint64_t seed) {
    const auto idx = maxmin_indices(cloud, target, seed);
    PointCloud out;
    out.points.resize(static_cast<Eigen::Index>(idx.size()), cloud.dim());
    out.labels.reserve(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        out.points.row(static_cast<Eigen::Index>(r)) = cloud.points.row(idx[r]);
        out.labels.push_back(cloud.labels[static_cast<std::size_t>(idx[r])]);
    }
    return out;
}

}  // namespace slowmo
