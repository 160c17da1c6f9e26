#pragma once

#include "kbandit/adversary.hpp"
#include "kbandit/policy.hpp"

#include <functional>
#include <optional>

namespace kbandit {

struct RoundRecord {
    std::uint64_t seed = 0;
    Index t = 0;  // 1-based
    Index chosen = 0;
    double realized_loss = 0.0;
    double expected_instant_regret = 0.0;
    double cum_expected_regret = 0.0;
    double max_eta_proxy = 0.0;
    double q_entropy = 0.0;
};

struct EpisodeResult {
    std::uint64_t seed = 0;
    std::vector<RoundRecord> rounds;
    double final_expected_regret = 0.0;
    double final_realized_regret = 0.0;
    bool aborted = false;
    Index abort_round = 0;
    std::string abort_message;
};

/// Per-round records across replicate seeds plus cross-seed aggregates of
/// the cumulative expected regret.
struct RegretCurve {
    std::vector<EpisodeResult> episodes;
    Index best_action = 0;
    double mean_regret = 0.0;    // mean over seeds of final cumulative expected regret
    double stderr_regret = 0.0;  // sample standard error (0 for a single seed)
    bool any_aborted = false;
};

/// argmin of the column sums of the loss matrix, lowest index on ties.
Index best_fixed_action(const LossSequence& seq);

/// Runs one bandit episode: each round queries the policy's sampling
/// distribution, records the exact expected instantaneous regret
/// sum_x p_t(x) l_t(x) - l_t(x_*), draws the action from the counter-based
/// stream keyed by (seed, round), and feeds the policy only the chosen
/// index and its scalar loss. A numeric failure inside the policy aborts
/// the episode with the round recorded.
EpisodeResult run_episode(const GramContext& ctx, const LossSequence& seq, Policy& policy,
                          std::uint64_t seed);

/// Runs one episode per seed (policies built fresh via the factory) and
/// aggregates. `threads` caps the worker count; results are merged in seed
/// order so the output is independent of the schedule.
RegretCurve run_replicated(const GramContext& ctx, const LossSequence& seq,
                           const std::function<std::unique_ptr<Policy>()>& make_policy,
                           const std::vector<std::uint64_t>& seeds, unsigned threads = 1);

struct RateFit {
    double exponent = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
    Index points_used = 0;
    bool excluded_nonpositive = false;
};

/// Least-squares slope of log(regret) against log(T). Non-positive regret
/// values are excluded with a flag; fewer than two usable points yields
/// NaN fields.
RateFit rate_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace kbandit
