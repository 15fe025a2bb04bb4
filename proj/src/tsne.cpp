#include "strokebench/tsne.hpp"

#include <cmath>
#include <limits>

#include "strokebench/cluster.hpp"
#include "strokebench/errors.hpp"
#include "strokebench/rng.hpp"

namespace strokebench {

void TsneConfig::validate() const {
    if (!(perplexity > 0.0)) throw ConfigError("perplexity must be positive");
    if (iterations < 1) throw ConfigError("iterations must be at least 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(early_exaggeration >= 1.0)) throw ConfigError("early_exaggeration must be >= 1");
    if (exaggeration_iters < 0) throw ConfigError("exaggeration_iters must be >= 0");
}

Eigen::MatrixXd perplexity_affinities(const Eigen::MatrixXd& points, double perplexity) {
    const Eigen::Index n = points.rows();
    if (n < 4) throw ValidationError("t-SNE needs at least 4 points");
    if (!(perplexity < static_cast<double>(n) / 3.0))
        throw ValidationError("perplexity must be below n/3");
    if (!points.allFinite()) throw NumericError("points contain non-finite values");

    Eigen::MatrixXd d2(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d2(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = (points.row(i) - points.row(j)).squaredNorm();
            d2(i, j) = d;
            d2(j, i) = d;
        }
    }

    Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // A flat distance row (regular simplex, coincident points) has a
        // bandwidth-independent distribution; the uniform row is exact.
        double d2_min = std::numeric_limits<double>::infinity();
        double d2_max = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            d2_min = std::min(d2_min, d2(i, j));
            d2_max = std::max(d2_max, d2(i, j));
        }
        if (d2_max - d2_min <= 1e-12 * std::max(1.0, d2_max)) {
            for (Eigen::Index j = 0; j < n; ++j)
                cond(i, j) = (j == i) ? 0.0 : 1.0 / static_cast<double>(n - 1);
            continue;
        }

        // Bisection on the precision beta = 1 / (2 sigma^2).
        double beta = 1.0;
        double beta_lo = 0.0;
        double beta_hi = std::numeric_limits<double>::infinity();
        Eigen::VectorXd row(n);
        bool converged = false;
        for (int step = 0; step < 200; ++step) {
            double sum = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                row[j] = (j == i) ? 0.0 : std::exp(-beta * d2(i, j));
                sum += row[j];
            }
            double entropy_nats = 0.0;  // H = log(sum) + beta * E[d^2]
            if (sum > 0.0) {
                double weighted = 0.0;
                for (Eigen::Index j = 0; j < n; ++j) weighted += row[j] * d2(i, j);
                entropy_nats = std::log(sum) + beta * weighted / sum;
            }
            const double perp = std::exp(entropy_nats);
            if (std::abs(perp - perplexity) < 1e-4) {
                converged = true;
                row /= sum;
                break;
            }
            if (perp > perplexity) {
                beta_lo = beta;
                beta = std::isinf(beta_hi) ? beta * 2.0 : 0.5 * (beta_lo + beta_hi);
            } else {
                beta_hi = beta;
                beta = (beta_lo == 0.0) ? beta / 2.0 : 0.5 * (beta_lo + beta_hi);
            }
        }
        if (!converged)
            throw NumericError("perplexity bisection failed to converge for point " +
                               std::to_string(i));
        cond.row(i) = row.transpose();
    }

    // Joint probabilities with total mass 1.
    Eigen::MatrixXd P = (cond + cond.transpose()) / (2.0 * static_cast<double>(n));
    return P;
}

namespace {

// KL(P || Q) for the Student-t kernel; qw must hold 1/(1+d2) with zero diagonal.
double kl_divergence(const Eigen::MatrixXd& P, const Eigen::MatrixXd& qw, double qw_sum) {
    double kl = 0.0;
    const Eigen::Index n = P.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double p = P(i, j);
            if (p <= 0.0) continue;
            const double q = std::max(qw(i, j) / qw_sum, 1e-300);
            kl += p * std::log(p / q);
        }
    }
    return kl;
}

}  // namespace

Embedding2D tsne_embed(const Eigen::MatrixXd& points, const TsneConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = points.rows();
    const Eigen::MatrixXd P = perplexity_affinities(points, cfg.perplexity);

    // PCA initialization: project onto the top-2 principal axes, rescale each
    // axis to std 1e-4, then add seeded jitter so coincident points separate.
    Eigen::MatrixXd Y(n, 2);
    {
        const Eigen::RowVectorXd mean = points.colwise().mean();
        const Eigen::MatrixXd centered = points.rowwise() - mean;
        const Eigen::MatrixXd cov =
            centered.transpose() * centered / std::max<double>(1.0, static_cast<double>(n - 1));
        const EigenDecomposition eig = jacobi_eigensystem(cov);
        const Eigen::Index dim = cov.rows();
        Y.col(0) = centered * eig.vectors.col(dim - 1);
        Y.col(1) = centered * eig.vectors.col(dim - 2);
        for (int c = 0; c < 2; ++c) {
            const double sd = std::sqrt(Y.col(c).squaredNorm() / static_cast<double>(n));
            if (sd > 0.0) Y.col(c) *= 1e-4 / sd;
        }
        Rng rng = Rng(cfg.seed).split(0x7e5e);
        for (Eigen::Index i = 0; i < n; ++i)
            for (int c = 0; c < 2; ++c) Y(i, c) += rng.normal(0.0, 1e-6);
    }

    Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(n, 2);
    Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);
    Eigen::MatrixXd gradient(n, 2);
    Eigen::MatrixXd qw(n, n);

    Embedding2D out;
    out.kl_history.reserve(static_cast<std::size_t>(cfg.iterations));

    for (int iter = 0; iter < cfg.iterations; ++iter) {
        const bool exaggerate = iter < cfg.exaggeration_iters;
        const double p_scale = exaggerate ? cfg.early_exaggeration : 1.0;

        double qw_sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            qw(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double w = 1.0 / (1.0 + (Y.row(i) - Y.row(j)).squaredNorm());
                qw(i, j) = w;
                qw(j, i) = w;
                qw_sum += 2.0 * w;
            }
        }

        gradient.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j) continue;
                const double w = qw(i, j);
                const double coeff = 4.0 * (p_scale * P(i, j) - w / qw_sum) * w;
                gradient.row(i) += coeff * (Y.row(i) - Y.row(j));
            }
        }

        const double momentum = (iter < cfg.exaggeration_iters) ? 0.5 : 0.8;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (int c = 0; c < 2; ++c) {
                const bool same_sign = (gradient(i, c) > 0.0) == (velocity(i, c) > 0.0);
                gains(i, c) = same_sign ? std::max(0.01, gains(i, c) * 0.8)
                                        : gains(i, c) + 0.2;
                velocity(i, c) =
                    momentum * velocity(i, c) - cfg.learning_rate * gains(i, c) * gradient(i, c);
            }
        }
        Y += velocity;
        Y.rowwise() -= Y.colwise().mean();

        out.kl_history.push_back(kl_divergence(P, qw, qw_sum));
    }

    // KL at the final coordinates.
    double qw_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        qw(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double w = 1.0 / (1.0 + (Y.row(i) - Y.row(j)).squaredNorm());
            qw(i, j) = w;
            qw(j, i) = w;
            qw_sum += 2.0 * w;
        }
    }
    out.final_kl = kl_divergence(P, qw, qw_sum);
    out.coords = std::move(Y);
    if (!out.coords.allFinite()) throw NumericError("t-SNE diverged to non-finite coordinates");
    return out;
}

}  // namespace strokebench
