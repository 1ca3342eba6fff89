#pragma once

#include "slowmo/videoio.hpp"

#include <Eigen/Dense>

#include <vector>

namespace slowmo {

/// N points in R^D, one per row, with the time index each row came from.
struct PointCloud {
    Eigen::MatrixXd points;
    std::vector<int> labels;

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
};

/// Builds a cloud with labels 0..N-1.
PointCloud make_cloud(Eigen::MatrixXd points);

struct SlidingWindowEmbedding {
    PointCloud cloud;     ///< N - d + 1 windows
    int d = 0;            ///< frames per window
    int source_dim = 0;   ///< dimension of one projected frame
};

/// Projects frames into at most N-1 dimensions while keeping every pairwise
/// Euclidean distance. Works on the N x N Gram matrix of the centered,
/// flattened frames and keeps eigenpairs above 1e-10 of the largest.
PointCloud project_isometric(const FrameSequence& seq);

/// Row i is the concatenation of rows i .. i+d-1 of the input. 2 <= d <= N-1.
SlidingWindowEmbedding sliding_window(const PointCloud& cloud, int d);

/// d = round(T) + 1, a window spanning exactly one period.
int choose_window_dim(double period);

Eigen::MatrixXd pairwise_distances(const PointCloud& cloud);

/// min_i max_j dist(i, j).
double enclosing_radius(const Eigen::MatrixXd& dist);

/// One point per line, comma-separated coordinates; a non-numeric first
/// line is skipped as a header.
PointCloud read_point_cloud_csv(const std::filesystem::path& file);

}  // namespace slowmo
