#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace strokebench {

struct TsneConfig {
    double perplexity = 30.0;
    int iterations = 1000;
    double learning_rate = 200.0;
    double early_exaggeration = 12.0;
    int exaggeration_iters = 250;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Embedding2D {
    Eigen::MatrixXd coords;  // n x 2
    double final_kl = 0.0;
    std::vector<double> kl_history;  // KL against the un-exaggerated P, per iteration
};

// Symmetrized, unit-mass joint probabilities; per-row bandwidth found by
// bisection so each row's Shannon perplexity matches the target within 1e-4.
Eigen::MatrixXd perplexity_affinities(const Eigen::MatrixXd& points, double perplexity);

// Exact (dense) t-SNE to 2D with PCA initialization and seeded jitter.
Embedding2D tsne_embed(const Eigen::MatrixXd& points, const TsneConfig& cfg);

}  // namespace strokebench
