#include "kbandit/rkhs.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace kbandit {

Distribution Distribution::from_weights(Vector weights) {
    if (weights.size() < 1) throw InputError("distribution needs at least one weight");
    for (Index i = 0; i < weights.size(); ++i) {
        if (weights[i] < -1e-12) throw InputError("distribution weights must be non-negative");
        if (weights[i] < 0.0) weights[i] = 0.0;
    }
    const double total = weights.sum();
    if (!(total > 0.0)) throw InputError("distribution weights sum to zero");
    weights /= total;
    return Distribution(std::move(weights));
}

Distribution Distribution::uniform(Index n) {
    return from_weights(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(Index n, Index i) {
    if (i < 0 || i >= n) throw InputError("point_mass: index out of range");
    Vector w = Vector::Zero(n);
    w[i] = 1.0;
    return Distribution(std::move(w));
}

CovarianceOperator covariance(const GramContext& ctx, const Distribution& dist) {
    if (dist.size() != ctx.size()) throw InputError("covariance: distribution size mismatch");
    Matrix sigma = ctx.sqrt.transpose() * dist.weights().asDiagonal() * ctx.sqrt;
    sigma = ((sigma + sigma.transpose()) * 0.5).eval();
    return CovarianceOperator{std::move(sigma)};
}

double effective_dim(const CovarianceOperator& sigma, double rho) {
    if (!(rho > 0.0)) throw InputError("effective_dim: rho must be positive");
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma.matrix, Eigen::EigenvaluesOnly);
    const Vector mu = es.eigenvalues().cwiseMax(0.0);
    double d = 0.0;
    for (Index j = 0; j < mu.size(); ++j) d += mu[j] / (mu[j] + rho);
    return d;
}

RegularizedResolvent::RegularizedResolvent(const GramContext& ctx, Distribution dist,
                                           double lambda)
    : dist_(std::move(dist)), lambda_(lambda) {
    if (!(lambda > 0.0)) throw InputError("resolvent: lambda must be positive");
    if (dist_.size() != ctx.size()) throw InputError("resolvent: distribution size mismatch");
    const Vector sqrt_p = dist_.weights().cwiseSqrt();
    const Matrix weighted = sqrt_p.asDiagonal() * ctx.gram;  // rows scaled: kt(x_j) in column j
    Matrix kt = weighted * sqrt_p.asDiagonal();              // Kt_ij = sqrt(p_i p_j) K_ij
    kt.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(kt);
    if (llt.info() != Eigen::Success)
        throw NumericError("resolvent: Cholesky of Kt + lambda I failed");
    const Matrix cross = llt.solve(weighted);
    bias_ = ctx.gram - weighted.transpose() * cross;
    bias_ = ((bias_ + bias_.transpose()) * 0.5).eval();
    bilinear_ = bias_ / lambda;
    if (!bilinear_.allFinite()) throw NumericError("resolvent: non-finite bilinear form");
}

double RegularizedResolvent::weighted_norm(Index i) const {
    return std::sqrt(std::max(0.0, bilinear_(i, i)));
}

Vector RegularizedResolvent::weighted_norms() const {
    return bilinear_.diagonal().cwiseMax(0.0).cwiseSqrt();
}

Vector RegularizedResolvent::bias_operator_apply(const Vector& alpha) const {
    if (alpha.size() != bias_.rows()) throw InputError("bias_operator_apply: size mismatch");
    return bias_ * alpha;
}

Matrix bilinear_matrix_primal(const GramContext& ctx, const Distribution& dist, double lambda) {
    if (!(lambda > 0.0)) throw InputError("primal resolvent: lambda must be positive");
    Matrix m = ctx.sqrt.transpose() * dist.weights().asDiagonal() * ctx.sqrt;
    m = ((m + m.transpose()) * 0.5).eval();
    m.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success)
        throw NumericError("primal resolvent: Cholesky failed");
    Matrix b = ctx.sqrt * llt.solve(ctx.sqrt.transpose());
    return ((b + b.transpose()) * 0.5).eval();
}

namespace {

/// Shared greedy log-det accumulator: F(V) = log det(I + V / alpha), with
/// V growing by the feature outer product of the current max-leverage
/// action. Maintains M = (alpha I + V)^-1 by rank-one downdates.
double greedy_logdet(const GramContext& ctx, Index T, double alpha) {
    const Index n = ctx.size();
    Matrix m = Matrix::Identity(n, n) / alpha;
    double value = 0.0;
    for (Index t = 0; t < T; ++t) {
        const Matrix sm = ctx.sqrt * m;  // row i = (m Phi(x_i))^T
        Index best = 0;
        double best_lev = -1.0;
        for (Index i = 0; i < n; ++i) {
            const double lev = sm.row(i).dot(ctx.sqrt.row(i));
            if (lev > best_lev) {
                best_lev = lev;
                best = i;
            }
        }
        if (best_lev <= 0.0) break;  // zero features only; nothing to gain
        value += std::log1p(best_lev);
        const Vector mphi = sm.row(best).transpose();
        m.noalias() -= (mphi * mphi.transpose()) / (1.0 + best_lev);
    }
    return value;
}

}  // namespace

double info_gain_greedy(const GramContext& ctx, Index T, double lambda, bool* relaxed_lambda) {
    if (T < 1) throw InputError("info_gain_greedy: T must be >= 1");
    if (!(lambda > 0.0)) throw InputError("info_gain_greedy: lambda must be positive");
    const bool relaxed = lambda < 1.0 / static_cast<double>(T);
    if (relaxed_lambda) *relaxed_lambda = relaxed;
    return greedy_logdet(ctx, T, static_cast<double>(T) * lambda);
}

double max_info_gain(const GramContext& ctx, Index T) {
    if (T < 1) throw InputError("max_info_gain: T must be >= 1");
    return 0.5 * greedy_logdet(ctx, T, 1.0);
}

}  // namespace kbandit
