#pragma once

#include "kbandit/config.hpp"

namespace kbandit {

/// Outcome of one lemma check over randomized instances.
struct CheckResult {
    std::string name;
    bool pass = false;
    double worst_slack = 0.0;  // max of (LHS - RHS); pass iff <= tolerance
    double tolerance = 0.0;
    std::string detail;
    std::uint64_t fail_seed = 0;  // instance seed of the worst case
};

// Randomized instance helpers (shared with the acceptance suite; all
// deterministic in the given seed).
GramContext random_context(std::uint64_t seed, Index max_n);
Distribution random_distribution(std::uint64_t seed, Index n);
Vector random_alpha_in_ball(std::uint64_t seed, const GramContext& ctx, double B);

/// Dual (kernel-trick) vs primal (explicit-feature) bilinear forms agree.
CheckResult check_dual_primal(std::uint64_t master_seed, int instances, Index max_n,
                              double lambda_min, double lambda_max, double tol);

/// Exact-sum conditional mean of the estimator term equals the loss minus
/// the bias-operator term. `corrupt_resolvent` is a fault-injection hook
/// that perturbs the resolvent and must make the check fail.
CheckResult check_cond_mean(std::uint64_t master_seed, int instances, Index max_n, double tol,
                            bool corrupt_resolvent = false);

/// Under each of the three tunings (cycled across instances), every round
/// keeps max_x |eta * proxy(x)| <= 1.
CheckResult check_bounded_loss(std::uint64_t master_seed, int instances,
                               const std::vector<Index>& horizons, double tol);

/// Pointwise |<Phi(x), E_t w_t>| <= c_t(x) on every round.
CheckResult check_comp_bias(std::uint64_t master_seed, int instances, Index horizon, double tol);

/// Exact double sum of squared regularized leverages <= effective dimension.
CheckResult check_leverage(std::uint64_t master_seed, int instances, Index max_n, double tol);

/// d_star_estimate under imposed FiniteRank spectra stays below the
/// closed-form decay bounds (polynomial and exponential).
CheckResult check_eigendecay(std::uint64_t master_seed, Index max_m, double tol);

/// effective_dim(Sigma(nu), 1/T) <= 2 * info_gain_greedy(ctx, T, 1/T).
CheckResult check_infogain(std::uint64_t master_seed, int instances,
                           const std::vector<Index>& horizons, double tol);

/// Converged designs satisfy max_leverage <= d_eff(Sigma(nu), rho) + tol,
/// with d_eff recomputed through the independent eigenvalue route.
CheckResult check_design_certificate(std::uint64_t master_seed, int instances, double design_tol,
                                     double numeric_tol);

struct VerifyOptions {
    std::vector<std::string> lemmas;  // empty selection is a config error upstream
    std::uint64_t master_seed = 987654321;
    bool corrupt_resolvent = false;
};

const std::vector<std::string>& all_lemma_names();

/// Runs the named checks at the verify subcommand's default scales.
std::vector<CheckResult> run_verify(const VerifyOptions& opts);

}  // namespace kbandit
