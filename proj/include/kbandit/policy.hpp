#pragma once

#include "kbandit/learner.hpp"

#include <memory>
#include <string_view>

namespace kbandit {

/// Bandit-feedback firewall: a policy announces its sampling distribution,
/// then receives only the index it played and that action's scalar loss.
/// Nothing else of the loss sequence is reachable through this interface.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string_view name() const = 0;

    /// Sampling distribution p_t for the round about to be played.
    virtual Distribution begin_round() = 0;

    /// Feedback for the round started by the last begin_round call.
    virtual void observe(Index chosen, double loss) = 0;

    /// max_x |eta * proxy(x)| from the last observe; 0 for policies with no
    /// proxy losses.
    virtual double max_eta_proxy() const { return 0.0; }

    /// Shannon entropy of the current weight distribution q_t.
    virtual double q_entropy() const = 0;
};

double entropy(const Distribution& dist);

/// Algorithm wrapper driving the exponential-weights learner.
class Exp2KernelPolicy final : public Policy {
public:
    Exp2KernelPolicy(const GramContext& ctx, const Params& params,
                     const ExplorationDesign& design);

    std::string_view name() const override { return "exp2_kernel"; }
    Distribution begin_round() override;
    void observe(Index chosen, double loss) override;
    double max_eta_proxy() const override { return max_eta_proxy_; }
    double q_entropy() const override;

    const LearnerState& state() const { return state_; }

private:
    const GramContext& ctx_;
    LearnerState state_;
    std::unique_ptr<Distribution> current_p_;
    double max_eta_proxy_ = 0.0;
};

/// Plays uniformly forever.
class UniformPolicy final : public Policy {
public:
    explicit UniformPolicy(Index n_actions) : dist_(Distribution::uniform(n_actions)) {}
    std::string_view name() const override { return "uniform"; }
    Distribution begin_round() override { return dist_; }
    void observe(Index, double) override {}
    double q_entropy() const override { return entropy(dist_); }

private:
    Distribution dist_;
};

/// Classical arm-wise exponential weights with the standard importance
/// weight loss/p(chosen) on the played arm; ignores kernel structure.
class Exp3Policy final : public Policy {
public:
    Exp3Policy(Index n_actions, double eta);
    std::string_view name() const override { return "exp3"; }
    Distribution begin_round() override;
    void observe(Index chosen, double loss) override;
    double max_eta_proxy() const override { return max_eta_proxy_; }
    double q_entropy() const override;

private:
    Vector log_weights_;
    double eta_;
    std::unique_ptr<Distribution> current_p_;
    double max_eta_proxy_ = 0.0;
};

std::unique_ptr<Policy> baseline_uniform(const GramContext& ctx);
std::unique_ptr<Policy> baseline_exp3(const GramContext& ctx, double eta);

}  // namespace kbandit
