#include "slowmo/spectral.hpp"

#include "slowmo/common.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>

namespace slowmo {

namespace {
constexpr const char* kModule = "spectral";
constexpr double kZeroCutoff = 1e-8;
constexpr double kCrossingTolerance = 0.2;
}  // namespace

LaplacianGraph build_adjacency(const Eigen::MatrixXd& dist, double sigma, LaplacianMode mode, KernelKind kernel) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorKind::Argument, kModule, "sigma must be positive");
    if (dist.rows() != dist.cols()) fail(ErrorKind::Argument, kModule, "distance matrix must be square");
    const Eigen::Index n = dist.rows();
    LaplacianGraph g;
    g.mode = mode;
    g.sigma = sigma;
    g.adjacency = Eigen::MatrixXd::Zero(n, n);
    const double denom = 2.0 * sigma * sigma;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = dist(i, j);
            if (mode == LaplacianMode::Unweighted)
                g.adjacency(i, j) = d <= sigma ? 1.0 : 0.0;
            else
                g.adjacency(i, j) = std::exp(-(kernel == KernelKind::Gaussian ? d * d : d) / denom);
        }
    g.laplacian = -g.adjacency;
    g.laplacian.diagonal() = g.adjacency.rowwise().sum();
    return g;
}

LaplacianGraph model_circulant_laplacian(int T, int k) {
    if (T < 3 || k < 2) fail(ErrorKind::Argument, kModule, "model Laplacian needs T >= 3 and k >= 2");
    const int n = T * k;
    std::set<int> offsets{1, n - 1};
    for (int l = 1; l < k; ++l)
        for (int delta : {-1, 0, 1}) offsets.insert(((l * T + delta) % n + n) % n);
    LaplacianGraph g;
    g.mode = LaplacianMode::Unweighted;
    g.adjacency = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int off : offsets) g.adjacency(i, (i + off) % n) = 1.0;
    g.laplacian = -g.adjacency;
    g.laplacian.diagonal() = g.adjacency.rowwise().sum();
    return g;
}

Eigenpairs smallest_eigenpairs(const Eigen::MatrixXd& laplacian, int count) {
    if (count < 1) fail(ErrorKind::Argument, kModule, "eigenpair count must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian);
    if (eig.info() != Eigen::Success) fail(ErrorKind::Argument, kModule, "eigensolver did not converge");
    const Eigen::VectorXd& values = eig.eigenvalues();
    const Eigen::Index n = values.size();
    const double cutoff = kZeroCutoff * values(n - 1);

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n && static_cast<int>(keep.size()) < count; ++i)
        if (values(i) > cutoff) keep.push_back(i);

    Eigenpairs out;
    out.values.resize(static_cast<Eigen::Index>(keep.size()));
    out.vectors.resize(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        out.values(static_cast<Eigen::Index>(c)) = values(keep[c]);
        out.vectors.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]).normalized();
    }
    if (static_cast<int>(keep.size()) < count) {
        out.truncated = true;
        out.warnings.push_back("only " + std::to_string(keep.size()) + " numerically nonzero eigenvalues available");
    }
    return out;
}

int zero_crossings(std::span<const double> v) {
    int count = 0;
    int prev = 0;
    for (double x : v) {
        const int s = x > 0.0 ? 1 : (x < 0.0 ? -1 : prev);
        if (prev != 0 && s != prev) ++count;
        prev = s;
    }
    return count;
}

EigenpairChoice select_eigenpair_by_counts(std::span<const int> counts) {
    if (counts.size() < 2) fail(ErrorKind::Argument, kModule, "need at least two eigenpairs");
    EigenpairChoice choice;
    choice.zero_crossings.assign(counts.begin(), counts.end());
    int best = -1;
    for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
        const int lo = std::min(counts[i], counts[i + 1]);
        const int hi = std::max(counts[i], counts[i + 1]);
        if (hi - lo > kCrossingTolerance * hi) continue;
        if (best < 0 || lo < std::min(counts[best], counts[best + 1])) best = static_cast<int>(i);
    }
    if (best < 0) {
        choice.fallback = true;
        choice.warnings.push_back("no neighbouring eigenvectors agree on zero crossings; using the two smallest");
        best = 0;
    }
    choice.a = best;
    choice.b = best + 1;
    return choice;
}

EigenpairChoice select_eigenpair(const Eigenpairs& pairs) {
    std::vector<int> counts;
    for (Eigen::Index c = 0; c < pairs.vectors.cols(); ++c) {
        const Eigen::VectorXd v = pairs.vectors.col(c);
        counts.push_back(zero_crossings(std::span<const double>(v.data(), static_cast<std::size_t>(v.size()))));
    }
    return select_eigenpair_by_counts(counts);
}

std::vector<double> circular_phase(std::span<const double> va, std::span<const double> vb) {
    if (va.size() != vb.size()) fail(ErrorKind::Argument, kModule, "phase vectors differ in length");
    if (va.size() < 3) fail(ErrorKind::Argument, kModule, "phase vectors need at least 3 entries");
    std::vector<double> phi(va.size());
    for (std::size_t n = 0; n < va.size(); ++n) {
        if (va[n] == 0.0 && vb[n] == 0.0)
            fail(ErrorKind::PhaseUndefined, kModule, "phase undefined at index " + std::to_string(n));
        phi[n] = wrap_angle(std::atan2(va[n], vb[n]));
    }
    return phi;
}

}  // namespace slowmo
