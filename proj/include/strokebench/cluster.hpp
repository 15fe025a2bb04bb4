#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <vector>

namespace strokebench {

struct AffinityMatrix {
    Eigen::MatrixXd values;  // symmetric, zero diagonal, entries in [0, 1]
    double sigma = 1.0;
};

// Log-uniform sigma grid for the eigengap scan.
struct SweepGrid {
    double log10_min = -3.0;
    double log10_max = 1.0;
    int count = 100;

    void validate() const;
};

struct EigengapProfile {
    std::vector<double> sigma_grid;
    std::vector<std::vector<double>> eigenvalues;  // ascending, per sigma (empty if skipped)
    std::vector<std::vector<double>> gaps;         // gaps[i][k-1] = lambda_{k+1} - lambda_k
    std::vector<int> skipped;                      // grid indices with a degenerate graph
};

struct SigmaSweepResult {
    int selected_k = 2;
    std::map<int, double> dominance;  // candidate k -> total log10-sigma measure
    bool fallback = false;            // no candidate dominated >= 10% of the grid
};

struct ClusterModel {
    int k = 0;
    std::vector<int> assignments;
    Eigen::MatrixXd centroids;  // k x dim
    double inertia = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> inertia_history;  // best restart, one entry per Lloyd iteration
};

struct BenchmarkSelection {
    std::vector<double> distances;
    int benchmark_index = 0;
};

// A_ij = exp(-|x_i - x_j|^2 / (2 sigma^2)), zero diagonal.
AffinityMatrix affinity(const Eigen::MatrixXd& points, double sigma);

// L = I - D^{-1/2} A D^{-1/2}; throws on isolated points (zero row sum).
Eigen::MatrixXd normalized_laplacian(const AffinityMatrix& A);

// All eigenvalues of a symmetric matrix, ascending (cyclic Jacobi rotations).
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& M);

struct EigenDecomposition {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // column i pairs with values[i]
};
EigenDecomposition jacobi_eigensystem(const Eigen::MatrixXd& M);

// gaps[k-1] = eig[k] - eig[k-1] on the ascending spectrum (gap index k is
// the candidate cluster count).
std::vector<double> eigengaps(const std::vector<double>& ascending_eigenvalues);

// Scans sigma over the grid and picks the gap index in [3, k_max] that is
// strictly maximal over the largest total log-sigma measure; falls back to
// k = 2 when no candidate wins at least 10% of the grid.
std::pair<EigengapProfile, SigmaSweepResult> sigma_sweep(const Eigen::MatrixXd& points,
                                                         const SweepGrid& grid, int k_max);

// k-means++ with restarts, Lloyd iterations to an assignment fixpoint
// (<= 300), empty clusters reseeded from the farthest point. Deterministic
// for a given seed.
ClusterModel kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts = 50);

// Single Lloyd run from explicit initial centroids (the kmeans building
// block, exposed for oracle comparisons).
ClusterModel lloyd_run(const Eigen::MatrixXd& points, const Eigen::MatrixXd& initial_centroids);

double distance_to_ideal(const Eigen::VectorXd& centroid);

BenchmarkSelection select_benchmark(const ClusterModel& model);

struct SubclusterResult {
    SigmaSweepResult sweep;
    EigengapProfile profile;
    ClusterModel model;
};

// Recursive drill-down on a subset of points (>= 4); k_max is capped at
// subset_size - 1 to keep the sweep well-posed.
SubclusterResult subcluster(const Eigen::MatrixXd& points, const SweepGrid& grid, int k_max,
                            std::uint64_t seed, int restarts = 50);

}  // namespace strokebench
