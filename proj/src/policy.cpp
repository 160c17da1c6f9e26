#include "kbandit/policy.hpp"

#include <cmath>

namespace kbandit {

double entropy(const Distribution& dist) {
    double h = 0.0;
    for (Index i = 0; i < dist.size(); ++i) {
        const double p = dist[i];
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

Exp2KernelPolicy::Exp2KernelPolicy(const GramContext& ctx, const Params& params,
                                   const ExplorationDesign& design)
    : ctx_(ctx), state_(init(ctx, params, design)) {}

Distribution Exp2KernelPolicy::begin_round() {
    current_p_ = std::make_unique<Distribution>(sampling_distribution(state_));
    return *current_p_;
}

void Exp2KernelPolicy::observe(Index chosen, double loss) {
    if (!current_p_) throw InputError("observe called before begin_round");
    const Vector proxy = proxy_losses(state_, ctx_, chosen, loss);
    max_eta_proxy_ = (state_.params.eta * proxy).cwiseAbs().maxCoeff();
    state_ = update(std::move(state_), proxy);
    current_p_.reset();
}

double Exp2KernelPolicy::q_entropy() const { return entropy(weight_distribution(state_)); }

Exp3Policy::Exp3Policy(Index n_actions, double eta)
    : log_weights_(Vector::Zero(n_actions)), eta_(eta) {
    if (!(eta > 0.0)) throw ConfigError("exp3: eta must be positive");
}

Distribution Exp3Policy::begin_round() {
    const Vector shifted = log_weights_.array() - log_weights_.maxCoeff();
    current_p_ = std::make_unique<Distribution>(Distribution::from_weights(shifted.array().exp()));
    return *current_p_;
}

void Exp3Policy::observe(Index chosen, double loss) {
    if (!current_p_) throw InputError("observe called before begin_round");
    const double p = (*current_p_)[chosen];
    if (!(p > 0.0)) throw NumericError("exp3: chosen arm has zero probability");
    const double estimate = loss / p;
    max_eta_proxy_ = std::abs(eta_ * estimate);
    log_weights_[chosen] -= eta_ * estimate;
    log_weights_.array() -= log_weights_.maxCoeff();
    current_p_.reset();
}

double Exp3Policy::q_entropy() const {
    const Vector shifted = log_weights_.array() - log_weights_.maxCoeff();
    return entropy(Distribution::from_weights(shifted.array().exp()));
}

std::unique_ptr<Policy> baseline_uniform(const GramContext& ctx) {
    return std::make_unique<UniformPolicy>(ctx.size());
}

std::unique_ptr<Policy> baseline_exp3(const GramContext& ctx, double eta) {
    return std::make_unique<Exp3Policy>(ctx.size(), eta);
}

}  // namespace kbandit
