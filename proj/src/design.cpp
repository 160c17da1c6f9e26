#include "kbandit/design.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace kbandit {

namespace {

double logdet_objective(const GramContext& ctx, const Vector& weights, double rho) {
    Matrix m = ctx.sqrt.transpose() * weights.asDiagonal() * ctx.sqrt;
    m = ((m + m.transpose()) * 0.5).eval();
    m.diagonal().array() += rho;
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) throw NumericError("design: Cholesky failed");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

Vector leverage_profile(const GramContext& ctx, const Distribution& dist, double rho) {
    RegularizedResolvent res(ctx, dist, rho);
    return res.bilinear_matrix().diagonal().cwiseMax(0.0);
}

ExplorationDesign d_optimal(const GramContext& ctx, double rho, Index max_iters, double tol) {
    if (!(rho > 0.0)) throw InputError("d_optimal: rho must be positive");
    if (max_iters < 1) throw InputError("d_optimal: max_iters must be >= 1");
    if (!(tol > 0.0)) throw InputError("d_optimal: tol must be positive");

    const Index n = ctx.size();
    Vector nu = Vector::Constant(n, 1.0 / static_cast<double>(n));
    double objective = logdet_objective(ctx, nu, rho);

    Vector lev;
    double d_eff = 0.0;
    double gap = 0.0;
    Index steps = 0;
    bool converged = false;

    for (Index iter = 1;; ++iter) {
        lev = leverage_profile(ctx, Distribution::from_weights(nu), rho);
        d_eff = nu.dot(lev);  // Tr((Sigma + rho I)^-1 Sigma)
        gap = lev.maxCoeff() - d_eff;
        if (gap <= tol) {
            converged = true;
            break;
        }
        if (steps >= max_iters) break;

        Index vertex = 0;
        lev.maxCoeff(&vertex);  // Eigen returns the first (lowest-index) maximum

        double step = 1.0 / static_cast<double>(iter + 1);
        Vector candidate = nu;
        double candidate_obj = objective;
        for (int halvings = 0; halvings < 60; ++halvings) {
            candidate = (1.0 - step) * nu;
            candidate[vertex] += step;
            candidate_obj = logdet_objective(ctx, candidate, rho);
            if (candidate_obj >= objective) break;  // gap > 0 guarantees ascent for small steps
            step *= 0.5;
        }
        if (candidate_obj < objective) break;  // no ascent step found; stop with current point
        nu = candidate;
        objective = candidate_obj;
        ++steps;
    }

    return ExplorationDesign{Distribution::from_weights(nu), rho,
                             lev.maxCoeff(), d_eff, steps, gap, converged};
}

DStarEstimate d_star_estimate(const GramContext& ctx, double rho, Index max_iters, double tol) {
    const ExplorationDesign design = d_optimal(ctx, rho, max_iters, tol);
    return DStarEstimate{design.dual_bound, design.distribution, design.iterations_used,
                         design.gap, design.converged};
}

}  // namespace kbandit
