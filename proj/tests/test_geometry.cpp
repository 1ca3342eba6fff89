#include "oracles/dense_reference.hpp"
#include "test_util.hpp"

#include "slowmo/geometry.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

using namespace slowmo;

namespace {

PointCloud line_cloud(std::initializer_list<double> values) {
    Eigen::MatrixXd p(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index i = 0;
    for (double v : values) p(i++, 0) = v;
    return make_cloud(p);
}

FrameSequence cosine_sequence(int n, double period) {
    FrameSequence seq(1, 1, 1);
    for (int t = 1; t <= n; ++t) seq.push_back({std::cos(2.0 * std::numbers::pi * t / period)});
    return seq;
}

}  // namespace

TEST_CASE("pairwise distances: 3-4-5 triangle, coincident points, scalar oracle") {
    Eigen::MatrixXd p(2, 2);
    p << 0, 0, 3, 4;
    const auto d = pairwise_distances(make_cloud(p));
    CHECK(d(0, 1) == doctest::Approx(5.0));
    CHECK(d(1, 0) == doctest::Approx(5.0));
    CHECK(d(0, 0) == 0.0);

    const auto z = pairwise_distances(make_cloud(Eigen::MatrixXd::Constant(4, 3, 0.7)));
    CHECK(z.cwiseAbs().maxCoeff() == 0.0);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd r(10, 6);
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = nd(rng);
    const auto dr = pairwise_distances(make_cloud(r));
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            double s = 0.0;
            for (int c = 0; c < 6; ++c) s += (r(i, c) - r(j, c)) * (r(i, c) - r(j, c));
            CHECK(dr(i, j) == doctest::Approx(std::sqrt(s)).epsilon(1e-14));
            CHECK(dr(i, j) == dr(j, i));
        }
}

TEST_CASE("isometric projection keeps every pairwise distance") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const FrameSequence seq = testutil::random_frames(25, 6, 5, 3, seed);
        const PointCloud z = project_isometric(seq);
        CHECK(z.size() == 25);
        CHECK(z.dim() <= 24);
        const auto dz = pairwise_distances(z);
        double worst = 0.0;
        for (int i = 0; i < 25; ++i)
            for (int j = i + 1; j < 25; ++j) {
                double s = 0.0;
                for (std::size_t p = 0; p < seq.frame_size(); ++p) {
                    const double diff = seq.frame(i)[p] - seq.frame(j)[p];
                    s += diff * diff;
                }
                const double raw = std::sqrt(s);
                worst = std::max(worst, std::abs(dz(i, j) - raw) / (raw + 1e-12));
            }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("isometric projection of low-rank data has matching dimension") {
    // Frames on a 2-D affine plane: rank of the centered data is 2.
    FrameSequence seq(3, 3, 1);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> a(9), b(9), base(9);
    for (int p = 0; p < 9; ++p) {
        a[p] = u(rng);
        b[p] = u(rng);
        base[p] = u(rng);
    }
    for (int i = 0; i < 12; ++i) {
        const double s = u(rng), t = u(rng);
        std::vector<double> f(9);
        for (int p = 0; p < 9; ++p) f[p] = base[p] + s * a[p] + t * b[p];
        seq.push_back(f);
    }
    CHECK(project_isometric(seq).dim() == 2);
}

TEST_CASE("identical frames project to coincident zeros") {
    FrameSequence seq(2, 2, 1);
    for (int i = 0; i < 6; ++i) seq.push_back({0.1, 0.2, 0.3, 0.4});
    const PointCloud z = project_isometric(seq);
    CHECK(z.size() == 6);
    CHECK(z.dim() == 1);
    CHECK(z.points.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sliding window of 1..5 with d=3") {
    const auto sw = sliding_window(line_cloud({1, 2, 3, 4, 5}), 3);
    REQUIRE(sw.cloud.size() == 3);
    CHECK(sw.d == 3);
    Eigen::MatrixXd expect(3, 3);
    expect << 1, 2, 3, 2, 3, 4, 3, 4, 5;
    CHECK(sw.cloud.points == expect);
    CHECK(sw.cloud.labels == std::vector<int>{0, 1, 2});
}

TEST_CASE("sliding window with d = N-1 gives exactly two windows") {
    const auto sw = sliding_window(line_cloud({1, 2, 3, 4, 5, 6}), 5);
    CHECK(sw.cloud.size() == 2);
    CHECK(testutil::error_kind_of([] { sliding_window(line_cloud({1, 2, 3}), 3); }) == ErrorKind::Argument);
    CHECK(testutil::error_kind_of([] { sliding_window(line_cloud({1, 2, 3}), 1); }) == ErrorKind::Argument);
}

TEST_CASE("consecutive windows share d-1 frames") {
    const PointCloud z = project_isometric(testutil::random_frames(20, 3, 3, 1, 8));
    const int d = 6;
    const auto sw = sliding_window(z, d);
    const auto dz = z.dim();
    for (Eigen::Index i = 0; i + 1 < sw.cloud.size(); ++i)
        CHECK(sw.cloud.points.row(i).tail((d - 1) * dz) == sw.cloud.points.row(i + 1).head((d - 1) * dz));
}

TEST_CASE("windows of cos(2 pi t / 20) with d=21 lie on a planar ellipse") {
    const PointCloud z = project_isometric(cosine_sequence(200, 20.0));
    const auto sw = sliding_window(z, 21);
    CHECK(sw.cloud.size() == 180);
    const auto fit = oracle::ellipse_residual(sw.cloud.points);
    CHECK(fit.out_of_plane < 1e-6);
    CHECK(fit.conic_residual < 1e-6);
}

TEST_CASE("windows covering a whole number of periods have equal norms") {
    for (int period : {10, 16, 25}) {
        const PointCloud z = project_isometric(cosine_sequence(10 * period, period));
        const auto sw = sliding_window(z, period);
        const Eigen::VectorXd norms = sw.cloud.points.rowwise().norm();
        CHECK(norms.maxCoeff() - norms.minCoeff() < 1e-6);
    }
}

TEST_CASE("window dimension is round(T)+1") {
    CHECK(choose_window_dim(14.0) == 15);
    CHECK(choose_window_dim(11.6) == 13);
    const int d = choose_window_dim(25.0);
    CHECK(d == 26);
    CHECK(500 - d + 1 == 475);
    const auto sw = sliding_window(project_isometric(cosine_sequence(500, 25.0)), d);
    CHECK(sw.cloud.size() == 475);
}

TEST_CASE("enclosing radius is min over rows of the row maximum") {
    Eigen::MatrixXd p(3, 1);
    p << 0, 1, 5;
    const auto d = pairwise_distances(make_cloud(p));
    CHECK(enclosing_radius(d) == doctest::Approx(4.0));
}

TEST_CASE("point cloud csv with header") {
    testutil::TempDir dir;
    {
        std::ofstream out(dir.path() / "c.csv");
        out << "x,y\n1,2\n3.5,-4\n";
    }
    const PointCloud c = read_point_cloud_csv(dir.path() / "c.csv");
    REQUIRE(c.size() == 2);
    CHECK(c.dim() == 2);
    CHECK(c.points(1, 1) == -4.0);
    {
        std::ofstream out(dir.path() / "bad.csv");
        out << "1,2\n3\n";
    }
    CHECK(testutil::error_kind_of([&] { read_point_cloud_csv(dir.path() / "bad.csv"); }) == ErrorKind::Io);
}
