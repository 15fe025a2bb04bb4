#include "strokebench/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "strokebench/errors.hpp"
#include "strokebench/rng.hpp"

namespace strokebench {

void SweepGrid::validate() const {
    if (!(log10_min < log10_max)) throw ConfigError("sweep grid needs log10_min < log10_max");
    if (count < 2) throw ConfigError("sweep grid needs at least 2 points");
}

AffinityMatrix affinity(const Eigen::MatrixXd& points, double sigma) {
    if (points.rows() < 2) throw ValidationError("affinity needs at least 2 points");
    if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
    if (!points.allFinite()) throw NumericError("points contain non-finite values");

    const Eigen::Index n = points.rows();
    AffinityMatrix A;
    A.sigma = sigma;
    A.values = Eigen::MatrixXd::Zero(n, n);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d2 = (points.row(i) - points.row(j)).squaredNorm();
            const double a = std::exp(-d2 * inv);
            A.values(i, j) = a;
            A.values(j, i) = a;
        }
    }
    return A;
}

Eigen::MatrixXd normalized_laplacian(const AffinityMatrix& A) {
    const Eigen::Index n = A.values.rows();
    Eigen::VectorXd degree = A.values.rowwise().sum();
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(degree[i] > 0.0))
            throw NumericError("degenerate graph: point " + std::to_string(i) +
                               " has zero row sum");
    const Eigen::VectorXd inv_sqrt = degree.array().rsqrt();
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n) -
                        inv_sqrt.asDiagonal() * A.values * inv_sqrt.asDiagonal();
    return 0.5 * (L + L.transpose());
}

namespace {

void check_symmetric(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw ValidationError("matrix is not square");
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw ValidationError("matrix is not symmetric within 1e-9");
}

// Cyclic Jacobi sweeps; annihilates every off-diagonal pair per sweep until
// the off-diagonal mass is negligible.
void jacobi_rotate(Eigen::MatrixXd& A, Eigen::MatrixXd* V, Eigen::Index p, Eigen::Index q) {
    const double apq = A(p, q);
    if (apq == 0.0) return;
    const double app = A(p, p);
    const double aqq = A(q, q);
    const double tau = (aqq - app) / (2.0 * apq);
    const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                  : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    const Eigen::Index n = A.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double aip = A(i, p);
        const double aiq = A(i, q);
        A(i, p) = c * aip - s * aiq;
        A(i, q) = s * aip + c * aiq;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const double api = A(p, i);
        const double aqi = A(q, i);
        A(p, i) = c * api - s * aqi;
        A(q, i) = s * api + c * aqi;
    }
    A(p, q) = 0.0;
    A(q, p) = 0.0;
    if (V) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double vip = (*V)(i, p);
            const double viq = (*V)(i, q);
            (*V)(i, p) = c * vip - s * viq;
            (*V)(i, q) = s * vip + c * viq;
        }
    }
}

double off_diagonal_norm(const Eigen::MatrixXd& A) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = i + 1; j < A.cols(); ++j) sum += 2.0 * A(i, j) * A(i, j);
    return std::sqrt(sum);
}

EigenDecomposition jacobi_impl(const Eigen::MatrixXd& M, bool want_vectors) {
    check_symmetric(M);
    const Eigen::Index n = M.rows();
    Eigen::MatrixXd A = 0.5 * (M + M.transpose());
    Eigen::MatrixXd V;
    if (want_vectors) V = Eigen::MatrixXd::Identity(n, n);

    const double frob = std::max(A.norm(), std::numeric_limits<double>::min());
    constexpr int kMaxSweeps = 64;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(A) <= 1e-14 * frob) break;
        for (Eigen::Index p = 0; p < n - 1; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q)
                jacobi_rotate(A, want_vectors ? &V : nullptr, p, q);
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&A](Eigen::Index a, Eigen::Index b) { return A(a, a) < A(b, b); });

    EigenDecomposition out;
    out.values.resize(n);
    if (want_vectors) out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values[i] = A(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        if (want_vectors) out.vectors.col(i) = V.col(order[static_cast<std::size_t>(i)]);
    }
    return out;
}

}  // namespace

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& M) {
    const EigenDecomposition d = jacobi_impl(M, false);
    return {d.values.data(), d.values.data() + d.values.size()};
}

EigenDecomposition jacobi_eigensystem(const Eigen::MatrixXd& M) { return jacobi_impl(M, true); }

std::vector<double> eigengaps(const std::vector<double>& ascending_eigenvalues) {
    if (ascending_eigenvalues.size() < 2)
        throw ValidationError("eigengaps need at least 2 eigenvalues");
    std::vector<double> gaps(ascending_eigenvalues.size() - 1);
    for (std::size_t k = 0; k + 1 < ascending_eigenvalues.size(); ++k)
        gaps[k] = ascending_eigenvalues[k + 1] - ascending_eigenvalues[k];
    return gaps;
}

std::pair<EigengapProfile, SigmaSweepResult> sigma_sweep(const Eigen::MatrixXd& points,
                                                         const SweepGrid& grid, int k_max) {
    grid.validate();
    const Eigen::Index n = points.rows();
    if (k_max < 3) throw ConfigError("k_max must be at least 3");
    if (n < k_max + 1)
        throw ValidationError("sigma sweep needs at least k_max + 1 points, got " +
                              std::to_string(n));

    EigengapProfile profile;
    const double step = (grid.log10_max - grid.log10_min) / (grid.count - 1);
    profile.sigma_grid.resize(static_cast<std::size_t>(grid.count));
    profile.eigenvalues.resize(static_cast<std::size_t>(grid.count));
    profile.gaps.resize(static_cast<std::size_t>(grid.count));

    // Total log-sigma measure claimed by each candidate gap index.
    std::map<int, double> dominance;
    for (int k = 3; k <= k_max; ++k) dominance[k] = 0.0;

    for (int i = 0; i < grid.count; ++i) {
        const double sigma = std::pow(10.0, grid.log10_min + step * i);
        profile.sigma_grid[static_cast<std::size_t>(i)] = sigma;
        std::vector<double> eigs;
        try {
            const Eigen::MatrixXd L = normalized_laplacian(affinity(points, sigma));
            eigs = symmetric_eigenvalues(L);
        } catch (const NumericError&) {
            profile.skipped.push_back(i);
            continue;
        }
        auto gaps = eigengaps(eigs);
        profile.eigenvalues[static_cast<std::size_t>(i)] = std::move(eigs);

        // Winner = gap index in [3, k_max] strictly above every other
        // candidate. A winner must also clear an absolute significance floor:
        // in the large-sigma tail every gap decays to numerical noise while
        // their ratios freeze, so without the floor one arbitrary index
        // collects the whole tail. Cluster-structure gaps on the normalized
        // Laplacian (eigenvalues in [0, 2]) are O(1), noise gaps are not.
        constexpr double kSignificantGap = 0.1;
        int winner = 0;
        double best = -1.0;
        bool tie = false;
        for (int k = 3; k <= k_max; ++k) {
            const double gap = gaps[static_cast<std::size_t>(k - 1)];
            if (gap > best) {
                best = gap;
                winner = k;
                tie = false;
            } else if (gap == best) {
                tie = true;
            }
        }
        if (winner != 0 && !tie && best >= kSignificantGap) dominance[winner] += step;
        profile.gaps[static_cast<std::size_t>(i)] = std::move(gaps);
    }

    SigmaSweepResult result;
    result.dominance = dominance;
    int best_k = 0;
    double best_measure = 0.0;
    for (const auto& [k, measure] : dominance) {
        if (measure > best_measure) {
            best_measure = measure;
            best_k = k;
        }
    }
    const double total_span = grid.log10_max - grid.log10_min;
    if (best_k == 0 || best_measure < 0.10 * total_span) {
        result.selected_k = 2;
        result.fallback = true;
    } else {
        result.selected_k = best_k;
    }
    return {profile, result};
}

namespace {

double squared_distance(const Eigen::MatrixXd& points, Eigen::Index i,
                        const Eigen::MatrixXd& centroids, Eigen::Index c) {
    return (points.row(i) - centroids.row(c)).squaredNorm();
}

int nearest_centroid(const Eigen::MatrixXd& points, Eigen::Index i,
                     const Eigen::MatrixXd& centroids) {
    int best = 0;
    double best_d = squared_distance(points, i, centroids, 0);
    for (Eigen::Index c = 1; c < centroids.rows(); ++c) {
        const double d = squared_distance(points, i, centroids, c);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

double compute_inertia(const Eigen::MatrixXd& points, const std::vector<int>& assignments,
                       const Eigen::MatrixXd& centroids) {
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        inertia += squared_distance(points, i, centroids, assignments[static_cast<std::size_t>(i)]);
    return inertia;
}

Eigen::MatrixXd kmeans_pp_init(const Eigen::MatrixXd& points, int k, Rng& rng) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd centroids(k, points.cols());
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);

    const auto first = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    centroids.row(0) = points.row(first);
    chosen[static_cast<std::size_t>(first)] = true;

    std::vector<double> d2(static_cast<std::size_t>(n));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < c; ++j)
                best = std::min(best, squared_distance(points, i, centroids, j));
            d2[static_cast<std::size_t>(i)] = best;
            total += best;
        }
        Eigen::Index pick = -1;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cumulative = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                cumulative += d2[static_cast<std::size_t>(i)];
                if (cumulative >= target) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) pick = n - 1;
        } else {
            // All remaining points coincide with chosen centroids.
            for (Eigen::Index i = 0; i < n; ++i)
                if (!chosen[static_cast<std::size_t>(i)]) {
                    pick = i;
                    break;
                }
            if (pick < 0) pick = static_cast<Eigen::Index>(
                              rng.uniform_index(static_cast<std::uint64_t>(n)));
        }
        centroids.row(c) = points.row(pick);
        chosen[static_cast<std::size_t>(pick)] = true;
    }
    return centroids;
}

}  // namespace

ClusterModel lloyd_run(const Eigen::MatrixXd& points, const Eigen::MatrixXd& initial_centroids) {
    const Eigen::Index n = points.rows();
    const int k = static_cast<int>(initial_centroids.rows());
    if (n < k) throw ValidationError("need at least k points");

    Eigen::MatrixXd centroids = initial_centroids;
    std::vector<int> assignments(static_cast<std::size_t>(n), -1);
    ClusterModel model;
    model.k = k;

    constexpr int kMaxIterations = 300;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = nearest_centroid(points, i, centroids);
            if (c != assignments[static_cast<std::size_t>(i)]) {
                assignments[static_cast<std::size_t>(i)] = c;
                changed = true;
            }
        }

        // Reseed empty clusters from the point farthest from its centroid.
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        for (int a : assignments) ++counts[static_cast<std::size_t>(a)];
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            Eigen::Index farthest = 0;
            double worst = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const int a = assignments[static_cast<std::size_t>(i)];
                if (counts[static_cast<std::size_t>(a)] <= 1) continue;
                const double d = squared_distance(points, i, centroids, a);
                if (d > worst) {
                    worst = d;
                    farthest = i;
                }
            }
            --counts[static_cast<std::size_t>(assignments[static_cast<std::size_t>(farthest)])];
            assignments[static_cast<std::size_t>(farthest)] = c;
            ++counts[static_cast<std::size_t>(c)];
            changed = true;
        }

        centroids.setZero();
        for (Eigen::Index i = 0; i < n; ++i)
            centroids.row(assignments[static_cast<std::size_t>(i)]) += points.row(i);
        for (int c = 0; c < k; ++c)
            centroids.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

        model.inertia_history.push_back(compute_inertia(points, assignments, centroids));
        if (!changed) break;
    }

    model.assignments = std::move(assignments);
    model.centroids = std::move(centroids);
    model.inertia = model.inertia_history.back();
    return model;
}

ClusterModel kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts) {
    if (k < 1) throw ValidationError("k must be at least 1");
    if (points.rows() < k)
        throw ValidationError("k-means needs at least k points, got " +
                              std::to_string(points.rows()));
    if (!points.allFinite()) throw NumericError("points contain non-finite values");
    if (restarts < 1) restarts = 1;

    const Rng root(seed);
    ClusterModel best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng = root.split(static_cast<std::uint64_t>(r));
        ClusterModel model = lloyd_run(points, kmeans_pp_init(points, k, rng));
        if (model.inertia < best.inertia) best = std::move(model);
    }
    best.seed = seed;
    return best;
}

double distance_to_ideal(const Eigen::VectorXd& centroid) {
    return (centroid - Eigen::VectorXd::Ones(centroid.size())).norm();
}

BenchmarkSelection select_benchmark(const ClusterModel& model) {
    if (model.k < 1) throw ValidationError("model has no clusters");
    BenchmarkSelection sel;
    sel.distances.resize(static_cast<std::size_t>(model.k));
    for (int q = 0; q < model.k; ++q)
        sel.distances[static_cast<std::size_t>(q)] = distance_to_ideal(model.centroids.row(q));
    sel.benchmark_index = 0;
    for (int q = 1; q < model.k; ++q)
        if (sel.distances[static_cast<std::size_t>(q)] <
            sel.distances[static_cast<std::size_t>(sel.benchmark_index)])
            sel.benchmark_index = q;
    return sel;
}

SubclusterResult subcluster(const Eigen::MatrixXd& points, const SweepGrid& grid, int k_max,
                            std::uint64_t seed, int restarts) {
    if (points.rows() < 4) throw ValidationError("subcluster needs at least 4 points");
    const int capped_k_max =
        std::min<int>(k_max, static_cast<int>(points.rows()) - 1);
    SubclusterResult out;
    std::tie(out.profile, out.sweep) = sigma_sweep(points, grid, std::max(3, capped_k_max));
    out.model = kmeans(points, out.sweep.selected_k, seed, restarts);
    return out;
}

}  // namespace strokebench
