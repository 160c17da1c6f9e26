#pragma once

#include "kbandit/kernels.hpp"

namespace kbandit {

// ---------------------------------------------------------------------------
// Distributions over the action set
// ---------------------------------------------------------------------------

/// Probability vector over the N actions: non-negative, sums to one.
class Distribution {
public:
    /// Normalizes non-negative weights; throws InputError on negative
    /// entries (beyond rounding) or an all-zero vector.
    static Distribution from_weights(Vector weights);
    static Distribution uniform(Index n);
    static Distribution point_mass(Index n, Index i);

    const Vector& weights() const { return weights_; }
    double operator[](Index i) const { return weights_[i]; }
    Index size() const { return weights_.size(); }

private:
    explicit Distribution(Vector w) : weights_(std::move(w)) {}
    Vector weights_;
};

// ---------------------------------------------------------------------------
// Covariance operators
// ---------------------------------------------------------------------------

/// Covariance of the feature map under a distribution, in the coordinates
/// of the Gram square root: Sigma = sum_i w_i Phi(x_i) Phi(x_i)^T.
struct CovarianceOperator {
    Matrix matrix;  // N x N symmetric PSD, trace <= 1
};

CovarianceOperator covariance(const GramContext& ctx, const Distribution& dist);

/// Tr((Sigma + rho I)^-1 Sigma) = sum_j mu_j / (mu_j + rho); in [0, N].
double effective_dim(const CovarianceOperator& sigma, double rho);

// ---------------------------------------------------------------------------
// Regularized resolvents
// ---------------------------------------------------------------------------

/// Per-round factorization giving the bilinear forms
/// Phi(x_i)^T (Sigma(p) + lambda I)^-1 Phi(x_j). Expressed through kernel
/// evaluations only: with Kt_ij = sqrt(p_i p_j) K_ij and
/// kt(x)_i = sqrt(p_i) K(x_i, x), the form equals
/// (K_ij - kt(x_i)^T (Kt + lambda I)^-1 kt(x_j)) / lambda.
/// Immutable after construction.
class RegularizedResolvent {
public:
    RegularizedResolvent(const GramContext& ctx, Distribution dist, double lambda);

    double lambda() const { return lambda_; }
    const Distribution& source_distribution() const { return dist_; }

    /// Phi(x_i)^T (Sigma + lambda I)^-1 Phi(x_j); symmetric, diagonal in
    /// [0, K_ii / lambda].
    double bilinear(Index i, Index j) const { return bilinear_(i, j); }
    const Matrix& bilinear_matrix() const { return bilinear_; }

    /// ||Phi(x_i)||_{(Sigma + lambda I)^-1}.
    double weighted_norm(Index i) const;
    Vector weighted_norms() const;

    /// lambda * bilinear(i, j), computed without the division round trip;
    /// this is <Phi(x_i), E Phi(x_j)> for the bias operator
    /// E = lambda (Sigma + lambda I)^-1.
    double bias_bilinear(Index i, Index j) const { return bias_(i, j); }

    /// Loss-side action of the bias operator: entry i is
    /// <Phi(x_i), E w> for w = sum_j alpha_j Phi(x_j).
    Vector bias_operator_apply(const Vector& alpha) const;

private:
    Distribution dist_;
    double lambda_;
    Matrix bias_;      // K - (D_sqrt(p) K)^T (Kt + lambda I)^-1 (D_sqrt(p) K)
    Matrix bilinear_;  // bias_ / lambda
};

/// Same bilinear forms by the explicit-feature route
/// sqrt (Sigma + lambda I)^-1 sqrt^T; the verification oracle for the
/// kernel-trick path above.
Matrix bilinear_matrix_primal(const GramContext& ctx, const Distribution& dist, double lambda);

// ---------------------------------------------------------------------------
// Effective dimension and information gain
// ---------------------------------------------------------------------------

struct DStarEstimate {
    double value = 0.0;        // d_eff at the D-optimal distribution: a lower bound on d_*
    Distribution distribution; // the maximizing distribution found
    Index iterations = 0;
    double gap = 0.0;          // max leverage - d_eff at the returned point
    bool converged = false;
};

/// Lower-bounds d_*(rho) = max_nu d_eff(Sigma(nu), rho) by Frank-Wolfe
/// maximization of log det(Sigma(nu) + rho I) (see design.hpp for the
/// solver); the returned value is certified <= d_*(rho).
DStarEstimate d_star_estimate(const GramContext& ctx, double rho, Index max_iters,
                              double tol = 1e-6);

/// Greedy value of log det(I + V_T / (T lambda)) where V_T accumulates T
/// rank-one feature outer products, each chosen to maximize the current
/// regularized leverage. Requires lambda >= 1/T for the domination lemma;
/// smaller lambda is allowed but flagged via *relaxed_lambda.
double info_gain_greedy(const GramContext& ctx, Index T, double lambda,
                        bool* relaxed_lambda = nullptr);

/// Greedy surrogate of the maximum information gain at unit noise:
/// (1/2) log det(I + V_T) over T greedily chosen points.
double max_info_gain(const GramContext& ctx, Index T);

}  // namespace kbandit
