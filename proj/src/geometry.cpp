#include "slowmo/geometry.hpp"

#include "slowmo/common.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <limits>

namespace slowmo {

namespace {
constexpr const char* kModule = "geometry";
constexpr double kRankCutoff = 1e-10;
}  // namespace

PointCloud make_cloud(Eigen::MatrixXd points) {
    PointCloud c;
    c.labels.resize(static_cast<std::size_t>(points.rows()));
    for (std::size_t i = 0; i < c.labels.size(); ++i) c.labels[i] = static_cast<int>(i);
    c.points = std::move(points);
    return c;
}

PointCloud project_isometric(const FrameSequence& seq) {
    const auto n = static_cast<Eigen::Index>(seq.size());
    if (n < 2) fail(ErrorKind::Argument, kModule, "projection needs at least 2 frames");
    const auto p = static_cast<Eigen::Index>(seq.frame_size());

    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto f = seq.frame(static_cast<std::size_t>(i));
        x.row(i) = Eigen::Map<const Eigen::RowVectorXd>(f.data(), p);
    }
    const double scale = x.cwiseAbs().maxCoeff();
    x.rowwise() -= x.colwise().mean();
    const Eigen::MatrixXd gram = x * x.transpose();
    // Rounding-level spread counts as rank zero.
    const double floor = static_cast<double>(n * p) * std::pow(1e-12 * scale, 2);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd& values = eig.eigenvalues();  // ascending
    const double lmax = values(n - 1);
    Eigen::Index keep = 0;
    if (lmax > floor)
        for (Eigen::Index i = n - 1; i >= 0 && values(i) > kRankCutoff * lmax; --i) ++keep;

    if (keep == 0) return make_cloud(Eigen::MatrixXd::Zero(n, 1));

    Eigen::MatrixXd z(n, keep);
    for (Eigen::Index c = 0; c < keep; ++c) {
        const Eigen::Index src = n - 1 - c;
        z.col(c) = eig.eigenvectors().col(src) * std::sqrt(values(src));
    }
    return make_cloud(std::move(z));
}

SlidingWindowEmbedding sliding_window(const PointCloud& cloud, int d) {
    const auto n = cloud.size();
    if (d < 2 || d > n - 1)
        fail(ErrorKind::Argument, kModule,
             "window dimension " + std::to_string(d) + " outside [2, " + std::to_string(n - 1) + "]");
    const auto dz = cloud.dim();
    const Eigen::Index count = n - d + 1;
    SlidingWindowEmbedding sw;
    sw.d = d;
    sw.source_dim = static_cast<int>(dz);
    sw.cloud.points.resize(count, dz * d);
    sw.cloud.labels.resize(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) {
        for (int j = 0; j < d; ++j) sw.cloud.points.row(i).segment(j * dz, dz) = cloud.points.row(i + j);
        sw.cloud.labels[static_cast<std::size_t>(i)] = cloud.labels[static_cast<std::size_t>(i)];
    }
    return sw;
}

int choose_window_dim(double period) { return static_cast<int>(std::lround(period)) + 1; }

Eigen::MatrixXd pairwise_distances(const PointCloud& cloud) {
    const auto n = cloud.size();
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
        const auto i = static_cast<Eigen::Index>(ii);
        for (Eigen::Index j = i + 1; j < n; ++j) dist(i, j) = (cloud.points.row(i) - cloud.points.row(j)).norm();
    });
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) dist(j, i) = dist(i, j);
    return dist;
}

double enclosing_radius(const Eigen::MatrixXd& dist) {
    double r = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < dist.rows(); ++i) r = std::min(r, dist.row(i).maxCoeff());
    return r;
}

PointCloud read_point_cloud_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorKind::Io, kModule, "cannot open " + file.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        bool numeric = true;
        while (std::getline(ss, field, ',')) {
            char* end = nullptr;
            const double v = std::strtod(field.c_str(), &end);
            if (end == field.c_str() || field.find_first_not_of(" \t\r", end - field.c_str()) != std::string::npos) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (lineno == 1) continue;
            fail(ErrorKind::Io, kModule, file.string() + ":" + std::to_string(lineno) + ": not a number");
        }
        if (!rows.empty() && row.size() != rows.front().size())
            fail(ErrorKind::Io, kModule, file.string() + ":" + std::to_string(lineno) + ": column count differs");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(ErrorKind::Io, kModule, file.string() + ": no points");
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            if (!std::isfinite(rows[i][j])) fail(ErrorKind::Io, kModule, file.string() + ": non-finite value");
            pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    return make_cloud(std::move(pts));
}

}  // namespace slowmo
