#pragma once

// Reference H1 persistence: enumerate every vertex, edge and triangle of the
// Rips complex up to a threshold, order them by (value, dimension, vertices),
// and run the textbook left-to-right column reduction of the full boundary
// matrix over Z_p. No clearing, no cohomology, no shortcuts.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <utility>
#include <vector>

namespace oracle {

struct Pair {
    double birth;
    double death;
};

namespace detail {

struct Simplex {
    double value;
    std::vector<int> v;  // sorted vertices
};

inline std::int64_t mod(std::int64_t a, std::int64_t p) { return ((a % p) + p) % p; }

inline std::int64_t inverse(std::int64_t a, std::int64_t p) {
    // extended Euclid
    std::int64_t t = 0, nt = 1, r = p, nr = mod(a, p);
    while (nr != 0) {
        const std::int64_t q = r / nr;
        std::tie(t, nt) = std::make_pair(nt, t - q * nt);
        std::tie(r, nr) = std::make_pair(nr, r - q * nr);
    }
    return mod(t, p);
}

}  // namespace detail

inline double enclosing_radius(const Eigen::MatrixXd& d) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < d.rows(); ++i) best = std::min(best, d.row(i).maxCoeff());
    return best;
}

/// All finite H1 pairs with death > birth, sorted by (birth, death).
inline std::vector<Pair> rips_h1(const Eigen::MatrixXd& d, double threshold, int p) {
    using detail::Simplex;
    const int n = static_cast<int>(d.rows());
    std::vector<Simplex> s;
    for (int i = 0; i < n; ++i) s.push_back({0.0, {i}});
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (d(i, j) <= threshold) s.push_back({d(i, j), {i, j}});
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const double v = std::max({d(i, j), d(i, k), d(j, k)});
                if (v <= threshold) s.push_back({v, {i, j, k}});
            }
    std::sort(s.begin(), s.end(), [](const Simplex& a, const Simplex& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.v.size() != b.v.size()) return a.v.size() < b.v.size();
        return a.v < b.v;
    });
    std::map<std::vector<int>, int> index;
    for (int c = 0; c < static_cast<int>(s.size()); ++c) index[s[c].v] = c;

    // Columns as sparse maps row -> coefficient in [0, p).
    std::vector<std::map<int, std::int64_t>> col(s.size());
    for (int c = 0; c < static_cast<int>(s.size()); ++c) {
        const auto& v = s[c].v;
        if (v.size() < 2) continue;
        for (std::size_t drop = 0; drop < v.size(); ++drop) {
            std::vector<int> face;
            for (std::size_t t = 0; t < v.size(); ++t)
                if (t != drop) face.push_back(v[t]);
            const std::int64_t sign = drop % 2 == 0 ? 1 : p - 1;
            col[c][index.at(face)] = sign;
        }
    }

    std::vector<int> low_owner(s.size(), -1);
    std::vector<Pair> pairs;
    for (int c = 0; c < static_cast<int>(s.size()); ++c) {
        auto& cc = col[c];
        while (!cc.empty()) {
            const int low = cc.rbegin()->first;
            const int other = low_owner[low];
            if (other < 0) break;
            const auto& oc = col[other];
            const std::int64_t factor =
                detail::mod(cc.rbegin()->second * detail::inverse(oc.rbegin()->second, p), p);
            for (const auto& [row, coef] : oc) {
                const std::int64_t nv = detail::mod(cc[row] - factor * coef, p);
                if (nv == 0)
                    cc.erase(row);
                else
                    cc[row] = nv;
            }
        }
        if (cc.empty()) continue;
        const int low = cc.rbegin()->first;
        low_owner[low] = c;
        if (s[low].v.size() == 2 && s[c].value > s[low].value) pairs.push_back({s[low].value, s[c].value});
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
    });
    return pairs;
}

}  // namespace oracle
