#include "kbandit/learner.hpp"

#include <cmath>

namespace kbandit {

namespace {

/// Ceiling that tolerates values sitting a hair above an integer from
/// floating-point pow/log (e.g. 16^(1/2) = 4.0000000000000004).
Index safe_ceil(double x) { return static_cast<Index>(std::ceil(x - 1e-9)); }

double log_e_card(Index n_actions) { return 1.0 + std::log(static_cast<double>(n_actions)); }

}  // namespace

void validate(const Params& p) {
    if (!(p.lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(p.gamma > 0.0 && p.gamma <= 1.0)) throw ConfigError("gamma must be in (0, 1]");
    if (!(p.eta > 0.0)) throw ConfigError("eta must be positive");
    if (!(p.B > 0.0)) throw ConfigError("B must be positive");
}

bool lambda_condition_holds(const Params& p) {
    return p.lambda <= 1.0 / (2.0 * p.eta * p.B) * (1.0 + 1e-12);
}

bool effdim_condition_holds(const Params& p, double design_d_eff) {
    return design_d_eff <= p.gamma / (2.0 * p.eta * p.B) * (1.0 + 1e-12);
}

Params tune_effdim(Index T, double B, double d_star, Index n_actions) {
    if (T < 1) throw ConfigError("tune_effdim: T must be >= 1");
    if (!(d_star > 0.0)) throw ConfigError("tune_effdim: d_star must be positive");
    if (!(B > 0.0)) throw ConfigError("tune_effdim: B must be positive");
    Params p;
    p.B = B;
    p.lambda = 1.0 / static_cast<double>(T);
    const double logn = log_e_card(n_actions);
    p.eta = (1.0 / (2.0 * B)) *
            std::sqrt(logn / (2.0 * (1.0 + p.lambda) * d_star * static_cast<double>(T)));
    p.gamma = std::sqrt(2.0 * d_star * logn / ((1.0 + p.lambda) * static_cast<double>(T)));
    if (p.gamma > 1.0) {
        p.gamma = 1.0;
        p.warnings.push_back("gamma clamped to 1 (T too small for the effdim tuning)");
    }
    return p;
}

Params tune_poly(Index T, double B, const DecaySpec& decay) {
    if (decay.kind != DecaySpec::Kind::polynomial)
        throw ConfigError("tune_poly: decay kind must be polynomial");
    if (!(decay.beta > 1.0)) throw ConfigError("tune_poly: beta must exceed 1");
    if (T < 1) throw ConfigError("tune_poly: T must be >= 1");
    if (!(B > 0.0)) throw ConfigError("tune_poly: B must be positive");
    const Index m = std::max<Index>(1, safe_ceil(std::pow(static_cast<double>(T), 1.0 / decay.beta)));
    const double md = static_cast<double>(m);
    Params p;
    p.B = B;
    p.lambda = std::pow(md, -decay.beta);
    p.gamma = std::min(1.0, std::pow(md, -(decay.beta - 1.0) / 2.0));
    p.eta = std::pow(md, -(decay.beta + 1.0) / 2.0) /
            (2.0 * B * (1.0 + decay.C / (decay.beta - 1.0)));
    return p;
}

Params tune_exp(Index T, double B, const DecaySpec& decay, Index n_actions) {
    if (decay.kind != DecaySpec::Kind::exponential)
        throw ConfigError("tune_exp: decay kind must be exponential");
    if (!(decay.beta > 0.0)) throw ConfigError("tune_exp: beta must be positive");
    if (T < 1) throw ConfigError("tune_exp: T must be >= 1");
    if (!(B > 0.0)) throw ConfigError("tune_exp: B must be positive");
    const Index m = std::max<Index>(1, safe_ceil(std::log(static_cast<double>(T)) / decay.beta));
    const double md = static_cast<double>(m);
    const double dim_term = md + decay.C / (std::exp(decay.beta) - 1.0);
    Params p;
    p.B = B;
    p.lambda = std::exp(-decay.beta * md);
    p.gamma = std::sqrt(dim_term * log_e_card(n_actions) / static_cast<double>(T));
    if (p.gamma > 1.0) {
        p.gamma = 1.0;
        p.warnings.push_back("gamma clamped to 1 (T too small for the exp-decay tuning)");
    }
    p.eta = p.gamma / (2.0 * B * dim_term);
    return p;
}

double theorem_regret_bound(const Params& p, Index T, Index n_actions, double d_lambda,
                            double d_lambda_over_gamma) {
    const double t = static_cast<double>(T);
    const double logn = std::log(static_cast<double>(n_actions));
    return logn / p.eta + 2.0 * (1.0 + p.lambda) * p.B * p.B * p.eta * d_lambda * t +
           4.0 * p.B * std::sqrt(p.lambda * t * t * d_lambda) +
           p.B * std::sqrt(p.lambda * p.gamma * t * t * d_lambda_over_gamma) +
           2.0 * p.gamma * p.B * t;
}

LearnerState init(const GramContext& ctx, const Params& params, const ExplorationDesign& design) {
    validate(params);
    if (design.distribution.size() != ctx.size())
        throw ConfigError("init: design distribution size differs from the action set");
    const double rho = params.lambda / params.gamma;
    if (std::abs(design.rho - rho) > 1e-12 * std::max(1.0, rho))
        throw ConfigError("init: design.rho does not equal lambda/gamma");

    LearnerState state{Vector::Zero(ctx.size()), design, params, 1, params.warnings};
    if (!lambda_condition_holds(params))
        state.warnings.push_back("theorem condition lambda <= 1/(2 eta B) violated");
    if (!effdim_condition_holds(params, design.dual_bound))
        state.warnings.push_back(
            "theorem condition d_eff(nu_D, lambda/gamma) <= gamma/(2 eta B) violated");
    if (!design.converged)
        state.warnings.push_back("exploration design did not converge to its gap tolerance");
    return state;
}

Distribution weight_distribution(const LearnerState& state) {
    const Vector shifted = state.log_weights.array() - state.log_weights.maxCoeff();
    return Distribution::from_weights(shifted.array().exp());
}

Distribution sampling_distribution(const LearnerState& state) {
    const Distribution q = weight_distribution(state);
    const double gamma = state.params.gamma;
    return Distribution::from_weights((1.0 - gamma) * q.weights() +
                                      gamma * state.design.distribution.weights());
}

Vector proxy_losses(const LearnerState& state, const GramContext& ctx, Index chosen, double y) {
    const Distribution p = sampling_distribution(state);
    return proxy_losses(state, RegularizedResolvent(ctx, p, state.params.lambda), chosen, y);
}

Vector proxy_losses(const LearnerState& state, const RegularizedResolvent& res, Index chosen,
                    double y) {
    if (chosen < 0 || chosen >= res.bilinear_matrix().rows())
        throw InputError("proxy_losses: chosen out of range");
    const double correction_scale = state.params.B * std::sqrt(state.params.lambda);
    return y * res.bilinear_matrix().col(chosen) - correction_scale * res.weighted_norms();
}

LearnerState update(LearnerState state, const Vector& proxy) {
    if (proxy.size() != state.log_weights.size()) throw InputError("update: proxy size mismatch");
    if (!proxy.allFinite())
        throw NumericError("update: non-finite proxy at round " + std::to_string(state.round));
    state.log_weights -= state.params.eta * proxy;
    state.log_weights.array() -= state.log_weights.maxCoeff();
    if (!state.log_weights.allFinite())
        throw NumericError("update: log-weights overflowed at round " +
                           std::to_string(state.round));
    state.round += 1;
    return state;
}

}  // namespace kbandit
