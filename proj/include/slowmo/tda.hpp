#pragma once

#include "slowmo/geometry.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace slowmo {

struct PersistencePair {
    double birth = 0.0;
    double death = 0.0;
    bool essential = false;  ///< never dies below the threshold; death is +inf

    double persistence() const { return death - birth; }
    bool operator==(const PersistencePair&) const = default;
};

/// H1 pairs sorted by persistence, largest first (ties: smaller birth first).
struct PersistenceDiagram {
    std::vector<PersistencePair> pairs;
    int field_char = 47;

    bool empty() const { return pairs.empty(); }
    bool operator==(const PersistenceDiagram&) const = default;
};

struct RipsOptions {
    int field_char = 47;
    /// Filtration cutoff; defaults to the enclosing radius.
    std::optional<double> threshold;
    /// Inputs with more points are rejected; subsample first.
    int max_points = 400;
};

bool is_prime(int p);

/// Degree-1 persistent homology of the Vietoris-Rips filtration of a
/// distance matrix with Z/p coefficients.
///
/// Simplices are totally ordered by (filtration value, dimension,
/// lexicographic vertex tuple). The reduction runs on the anti-transposed
/// boundary matrix (coboundary columns of edges, processed from the latest
/// edge backwards), which yields the same pairs as reducing the boundary
/// matrix. Edges that merge two components in degree 0 are cleared up front
/// since their columns reduce to zero, and columns whose smallest cofacet is
/// not yet claimed are accepted without materializing them. Zero-persistence
/// pairs are dropped.
PersistenceDiagram rips_persistence_h1(const Eigen::MatrixXd& dist, const RipsOptions& opts = {});

struct ScaleSelection {
    double sigma = 0.0;
    double alpha = 0.5;
    PersistencePair chosen;
};

/// sigma = alpha * birth + (1 - alpha) * death of the most persistent finite
/// pair (ties go to the smaller birth).
ScaleSelection select_scale(const PersistenceDiagram& diagram, double alpha);

/// Greedy farthest-point indices. The walk starts at the point farthest from
/// a seeded random pick; returned indices are sorted ascending.
std::vector<int> maxmin_indices(const PointCloud& cloud, int target, std::uint64_t seed);

/// Farthest-point subsample keeping the original time labels.
PointCloud subsample_maxmin(const PointCloud& cloud, int target, std::uint64_t seed);

}  // namespace slowmo
