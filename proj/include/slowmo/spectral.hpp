#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace slowmo {

enum class LaplacianMode { Weighted, Unweighted };

/// Weighted-mode kernel: Gaussian exp(-d^2 / 2 sigma^2), or Raw
/// exp(-d / 2 sigma^2) with the distance left unsquared.
enum class KernelKind { Gaussian, Raw };

struct LaplacianGraph {
    Eigen::MatrixXd adjacency;
    Eigen::MatrixXd laplacian;  ///< degree matrix minus adjacency
    LaplacianMode mode = LaplacianMode::Weighted;
    double sigma = 0.0;
};

LaplacianGraph build_adjacency(const Eigen::MatrixXd& dist, double sigma, LaplacianMode mode,
                               KernelKind kernel = KernelKind::Gaussian);

/// Laplacian of the ideal k-fold repeated loop of period T: N = kT windows,
/// each linked to its temporal neighbours and to the same window, and its
/// neighbours, in every other repetition.
LaplacianGraph model_circulant_laplacian(int T, int k);

struct Eigenpairs {
    Eigen::VectorXd values;   ///< ascending, all above the numerical-zero cutoff
    Eigen::MatrixXd vectors;  ///< unit-norm columns matching values
    bool truncated = false;   ///< fewer than requested were available
    std::vector<std::string> warnings;
};

/// The `count` smallest eigenpairs with eigenvalue > 1e-8 * lambda_max, from
/// a dense symmetric eigensolve.
Eigenpairs smallest_eigenpairs(const Eigen::MatrixXd& laplacian, int count);

/// Sign changes along v; an exact zero keeps the previous sign.
int zero_crossings(std::span<const double> v);

struct EigenpairChoice {
    int a = 0;  ///< 0-based index into the inspected eigenpairs
    int b = 1;
    bool fallback = false;
    std::vector<int> zero_crossings;
    std::vector<std::string> warnings;
};

/// Among neighbouring pairs (i, i+1) whose crossing counts differ by at most
/// 20% of the larger, the pair with the fewest crossings; ties favour the
/// smaller eigenvalue. Falls back to (0, 1) when no pair qualifies.
EigenpairChoice select_eigenpair_by_counts(std::span<const int> counts);
EigenpairChoice select_eigenpair(const Eigenpairs& pairs);

/// atan2(v_a[n], v_b[n]) wrapped to [0, 2*pi).
std::vector<double> circular_phase(std::span<const double> va, std::span<const double> vb);

}  // namespace slowmo
