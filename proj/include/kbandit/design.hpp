#pragma once

#include "kbandit/rkhs.hpp"

namespace kbandit {

/// Regularized optimal exploration design. By the Kiefer-Wolfowitz-type
/// duality between G- and D-optimality, the Frank-Wolfe D-optimal solution
/// doubles as the exploration distribution: on convergence it carries the
/// certificate max_leverage <= dual_bound + tol, which is the only property
/// downstream bounds consume.
struct ExplorationDesign {
    Distribution distribution;
    double rho = 0.0;           // the regularizer lambda / gamma
    double max_leverage = 0.0;  // max_i ||Phi(x_i)||^2_{(Sigma(nu) + rho I)^-1}
    double dual_bound = 0.0;    // d_eff(Sigma(nu), rho) at the returned nu
    Index iterations_used = 0;
    double gap = 0.0;           // max_leverage - dual_bound on exit
    bool converged = false;
};

/// Entry i = ||Phi(x_i)||^2_{(Sigma(nu) + rho I)^-1}; entries in [0, K_ii / rho].
Vector leverage_profile(const GramContext& ctx, const Distribution& dist, double rho);

/// Frank-Wolfe maximization of log det(Sigma(nu) + rho I) over the simplex.
/// Each step moves toward the max-leverage vertex (lowest index on ties)
/// with base step 1/(iter + 1), deterministically halved whenever the fixed
/// step would decrease the objective. Stops when the duality gap
/// max_leverage - d_eff drops below tol; non-convergence is reported via
/// the converged flag, never an exception.
ExplorationDesign d_optimal(const GramContext& ctx, double rho, Index max_iters,
                            double tol = 1e-6);

/// Default iteration budget when a config leaves it unset.
inline Index default_design_iters(Index n_actions) { return 50 * n_actions; }

}  // namespace kbandit
