#pragma once

#include "kbandit/design.hpp"

#include <vector>

namespace kbandit {

// ---------------------------------------------------------------------------
// Parameters and tunings
// ---------------------------------------------------------------------------

/// Algorithm parameters. The two conditions the regret analysis needs,
///   lambda <= 1 / (2 eta B)
///   d_eff(Sigma(nu_D), lambda/gamma) <= gamma / (2 eta B),
/// are checked, not enforced: violations set warning flags so infeasible
/// configurations still run for diagnostic value.
struct Params {
    double lambda = 1.0;
    double gamma = 1.0;
    double eta = 0.1;
    double B = 1.0;
    std::vector<std::string> warnings;  // tuning-time warnings (e.g. gamma clamp)
};

void validate(const Params& p);

/// lambda <= 1 / (2 eta B).
bool lambda_condition_holds(const Params& p);

/// d_eff(Sigma(nu_D), lambda/gamma) <= gamma / (2 eta B), evaluated at the
/// computed design's d_eff value.
bool effdim_condition_holds(const Params& p, double design_d_eff);

/// Eigenvalue decay hypothesis (mu_j <= C j^-beta or C e^-beta j).
struct DecaySpec {
    enum class Kind { polynomial, exponential };
    Kind kind = Kind::polynomial;
    double C = 1.0;
    double beta = 2.0;  // > 1 for polynomial, > 0 for exponential
};

/// Effective-dimension tuning: lambda = 1/T,
/// eta = (1/2B) sqrt(log(e N) / (2 (1+lambda) d_star T)),
/// gamma = min{ sqrt(2 d_star log(e N) / ((1+lambda) T)), 1 }.
Params tune_effdim(Index T, double B, double d_star, Index n_actions);

/// Polynomial-decay tuning: m = ceil(T^(1/beta)), lambda = m^-beta,
/// gamma = m^-(beta-1)/2, eta = m^-(beta+1)/2 / (2B (1 + C/(beta-1))).
Params tune_poly(Index T, double B, const DecaySpec& decay);

/// Exponential-decay tuning: m = ceil(log(T)/beta), lambda = e^-beta m,
/// gamma = sqrt((m + C/(e^beta - 1)) log(e N) / T) (clamped to 1 with a
/// warning when T is too small), eta = gamma / (2B (m + C/(e^beta - 1))).
Params tune_exp(Index T, double B, const DecaySpec& decay, Index n_actions);

/// Fully evaluated closed-form regret bound
/// log(N)/eta + 2(1+lambda) B^2 eta d_lambda T + 4B sqrt(lambda T^2 d_lambda)
/// + B sqrt(lambda gamma T^2 d_lambda_over_gamma) + 2 gamma B T
/// for given effective-dimension values at lambda and lambda/gamma.
double theorem_regret_bound(const Params& p, Index T, Index n_actions, double d_lambda,
                            double d_lambda_over_gamma);

// ---------------------------------------------------------------------------
// Exponential-weights learner state
// ---------------------------------------------------------------------------

/// State of the exponential-weights update. Weights are kept in log space
/// and re-centered after every update; the multiplicative form overflows
/// for large eta T.
struct LearnerState {
    Vector log_weights;
    ExplorationDesign design;
    Params params;
    Index round = 1;
    std::vector<std::string> warnings;
};

/// Uniform q_1. Requires design.rho == params.lambda / params.gamma
/// (within 1e-12 relative); condition violations land in warnings.
LearnerState init(const GramContext& ctx, const Params& params, const ExplorationDesign& design);

/// q_t from the log weights.
Distribution weight_distribution(const LearnerState& state);

/// p_t = (1 - gamma) q_t + gamma nu_G.
Distribution sampling_distribution(const LearnerState& state);

/// Corrected loss proxy over all actions given the single observed loss:
/// proxy_i = y * Phi(x_i)^T (Sigma_t + lambda I)^-1 Phi(x_chosen)
///           - B sqrt(lambda) ||Phi(x_i)||_{(Sigma_t + lambda I)^-1},
/// with the resolvent built from the current p_t.
Vector proxy_losses(const LearnerState& state, const GramContext& ctx, Index chosen, double y);

/// Same proxy against a caller-supplied resolvent (which must have been
/// built from this round's p_t and params.lambda).
Vector proxy_losses(const LearnerState& state, const RegularizedResolvent& res, Index chosen,
                    double y);

/// log q_{t+1} = log q_t - eta * proxy, re-centered; round advances.
/// Throws NumericError (naming the round) on a non-finite proxy.
LearnerState update(LearnerState state, const Vector& proxy);

}  // namespace kbandit
