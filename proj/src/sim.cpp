#include "kbandit/sim.hpp"

#include "kbandit/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace kbandit {

Index best_fixed_action(const LossSequence& seq) {
    const Vector sums = seq.losses.colwise().sum();
    Index best = 0;
    for (Index i = 1; i < sums.size(); ++i)
        if (sums[i] < sums[best]) best = i;
    return best;
}

EpisodeResult run_episode(const GramContext& ctx, const LossSequence& seq, Policy& policy,
                          std::uint64_t seed) {
    if (seq.n_actions() != ctx.size()) throw InputError("run_episode: action count mismatch");
    const Index T = seq.horizon();
    const Index star = best_fixed_action(seq);

    EpisodeResult ep;
    ep.seed = seed;
    ep.rounds.reserve(static_cast<std::size_t>(T));
    double cum_expected = 0.0;
    double cum_realized = 0.0;
    double cum_star = 0.0;

    for (Index t = 1; t <= T; ++t) {
        const Vector losses = seq.losses.row(t - 1).transpose();
        try {
            const Distribution p = policy.begin_round();
            const double expected_instant = p.weights().dot(losses) - losses[star];
            auto rng = CounterRng::keyed(seed, static_cast<std::uint64_t>(t), 0);
            const Index chosen = rng.next_categorical(p.weights());
            const double y = losses[chosen];
            policy.observe(chosen, y);

            cum_expected += expected_instant;
            cum_realized += y;
            cum_star += losses[star];
            ep.rounds.push_back(RoundRecord{seed, t, chosen, y, expected_instant, cum_expected,
                                            policy.max_eta_proxy(), policy.q_entropy()});
        } catch (const NumericError& err) {
            ep.aborted = true;
            ep.abort_round = t;
            ep.abort_message = err.what();
            break;
        }
    }
    ep.final_expected_regret = cum_expected;
    ep.final_realized_regret = cum_realized - cum_star;
    return ep;
}

RegretCurve run_replicated(const GramContext& ctx, const LossSequence& seq,
                           const std::function<std::unique_ptr<Policy>()>& make_policy,
                           const std::vector<std::uint64_t>& seeds, unsigned threads) {
    if (seeds.empty()) throw InputError("run_replicated: seed list is empty");
    RegretCurve curve;
    curve.best_action = best_fixed_action(seq);
    curve.episodes.resize(seeds.size());

    const unsigned workers =
        std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(seeds.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            auto policy = make_policy();
            curve.episodes[i] = run_episode(ctx, seq, *policy, seeds[i]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= seeds.size()) return;
                auto policy = make_policy();
                curve.episodes[i] = run_episode(ctx, seq, *policy, seeds[i]);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    double sum = 0.0;
    for (const auto& ep : curve.episodes) {
        sum += ep.final_expected_regret;
        curve.any_aborted = curve.any_aborted || ep.aborted;
    }
    const double n = static_cast<double>(curve.episodes.size());
    curve.mean_regret = sum / n;
    if (curve.episodes.size() > 1) {
        double ss = 0.0;
        for (const auto& ep : curve.episodes) {
            const double d = ep.final_expected_regret - curve.mean_regret;
            ss += d * d;
        }
        curve.stderr_regret = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return curve;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& points) {
    RateFit fit;
    std::vector<std::pair<double, double>> logs;
    for (const auto& [t, regret] : points) {
        if (!(t > 0.0)) throw InputError("rate_fit: horizons must be positive");
        if (regret > 0.0)
            logs.emplace_back(std::log(t), std::log(regret));
        else
            fit.excluded_nonpositive = true;
    }
    fit.points_used = static_cast<Index>(logs.size());
    if (logs.size() < 2) return fit;

    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : logs) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(logs.size());
    my /= static_cast<double>(logs.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : logs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (!(sxx > 0.0)) return fit;  // all horizons equal: slope undefined
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    double ss_res = 0.0;
    for (const auto& [x, y] : logs) {
        const double r = y - (fit.intercept + fit.exponent * x);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

}  // namespace kbandit
