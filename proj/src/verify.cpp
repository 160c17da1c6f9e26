#include "kbandit/verify.hpp"

#include "kbandit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kbandit {

namespace {

std::string describe(double lhs, double rhs, std::uint64_t seed) {
    std::ostringstream os;
    os << "worst lhs=" << lhs << " rhs=" << rhs << " (instance seed " << seed << ")";
    return os.str();
}

/// Tracks the worst (largest) violation LHS - RHS across instances.
struct SlackTracker {
    double worst = -std::numeric_limits<double>::infinity();
    double lhs = 0.0, rhs = 0.0;
    std::uint64_t seed = 0;

    void update(double l, double r, std::uint64_t s) {
        if (l - r > worst) {
            worst = l - r;
            lhs = l;
            rhs = r;
            seed = s;
        }
    }

    CheckResult finish(std::string name, double tol) const {
        return CheckResult{std::move(name), worst <= tol, worst, tol, describe(lhs, rhs, seed),
                           seed};
    }
};

}  // namespace

GramContext random_context(std::uint64_t seed, Index max_n) {
    auto rng = CounterRng::keyed(seed, 0, 10);
    const Index n = 2 + static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(max_n - 1));
    const int kind = static_cast<int>(rng.next_u64() % 4);

    if (kind == 3) {
        // FiniteRank with a random polynomial or exponential spectrum.
        const bool poly = (rng.next_u64() & 1) != 0;
        const double beta = poly ? 1.5 + rng.next_unit() * 2.0 : 0.5 + rng.next_unit() * 1.5;
        std::vector<double> mu(static_cast<std::size_t>(n));
        for (Index j = 0; j < n; ++j) {
            const double jj = static_cast<double>(j + 1);
            mu[static_cast<std::size_t>(j)] = poly ? std::pow(jj, -beta) : std::exp(-beta * jj);
        }
        FiniteRank fr{std::move(mu), rng.next_u64()};
        // Points are ignored by FiniteRank but the action set must be valid.
        Matrix pts(n, 1);
        for (Index i = 0; i < n; ++i) pts(i, 0) = static_cast<double>(i) / static_cast<double>(n);
        return build_gram(fr, make_action_set(std::move(pts)));
    }

    const Index d = 1 + static_cast<Index>(rng.next_u64() % 3);
    Matrix pts(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) pts(i, j) = rng.next_unit();
    KernelSpec spec;
    if (kind == 0) {
        spec = SquaredExponential{0.2 + rng.next_unit() * 1.3};
    } else if (kind == 1) {
        const double nus[3] = {0.5, 1.5, 2.5};
        spec = Matern{nus[rng.next_u64() % 3], 0.2 + rng.next_unit() * 1.3};
    } else {
        spec = Linear{};
    }
    return build_gram(spec, make_action_set(std::move(pts)));
}

Distribution random_distribution(std::uint64_t seed, Index n) {
    auto rng = CounterRng::keyed(seed, 1, 11);
    Vector w(n);
    for (Index i = 0; i < n; ++i) w[i] = -std::log(1.0 - rng.next_unit());
    // Occasionally sparsify so low-support distributions are exercised too.
    if ((rng.next_u64() % 3) == 0)
        for (Index i = 0; i < n; ++i)
            if (rng.next_unit() < 0.5 && w.maxCoeff() > w[i]) w[i] = 0.0;
    return Distribution::from_weights(w);
}

Vector random_alpha_in_ball(std::uint64_t seed, const GramContext& ctx, double B) {
    auto rng = CounterRng::keyed(seed, 2, 12);
    Vector alpha(ctx.size());
    for (Index i = 0; i < alpha.size(); ++i) alpha[i] = rng.next_gaussian();
    const double norm = rkhs_norm(alpha, ctx);
    if (norm > 0.0) alpha *= (0.2 + 0.8 * rng.next_unit()) * B / norm;
    return alpha;
}

CheckResult check_dual_primal(std::uint64_t master_seed, int instances, Index max_n,
                              double lambda_min, double lambda_max, double tol) {
    SlackTracker tracker;
    for (int k = 0; k < instances; ++k) {
        const std::uint64_t seed = master_seed + static_cast<std::uint64_t>(k);
        const GramContext ctx = random_context(seed, max_n);
        const Distribution p = random_distribution(seed, ctx.size());
        auto rng = CounterRng::keyed(seed, 3, 13);
        const double lambda =
            lambda_min * std::exp(rng.next_unit() * std::log(lambda_max / lambda_min));
        const RegularizedResolvent res(ctx, p, lambda);
        const Matrix primal = bilinear_matrix_primal(ctx, p, lambda);
        const double diff = (res.bilinear_matrix() - primal).cwiseAbs().maxCoeff();
        tracker.update(diff, 0.0, seed);
    }
    return tracker.finish("dual-primal", tol);
}

CheckResult check_cond_mean(std::uint64_t master_seed, int instances, Index max_n, double tol,
                            bool corrupt_resolvent) {
    SlackTracker tracker;
    for (int k = 0; k < instances; ++k) {
        const std::uint64_t seed = master_seed + static_cast<std::uint64_t>(k);
        const GramContext ctx = random_context(seed, max_n);
        const Distribution p = random_distribution(seed, ctx.size());
        auto rng = CounterRng::keyed(seed, 3, 13);
        const double lambda = 1e-3 * std::exp(rng.next_unit() * std::log(1e4));
        const double B = 0.5 + 1.5 * rng.next_unit();
        const Vector alpha = random_alpha_in_ball(seed, ctx, B);
        const Vector losses = ctx.gram * alpha;

        const RegularizedResolvent res(ctx, p, lambda);
        Matrix bilinear = res.bilinear_matrix();
        if (corrupt_resolvent) bilinear.array() += 1e-3;  // fault-injection hook
        const Vector expectation = bilinear * p.weights().cwiseProduct(losses);
        const Vector target = losses - res.bias_operator_apply(alpha);
        const double diff = (expectation - target).cwiseAbs().maxCoeff();
        tracker.update(diff, 0.0, seed);
    }
    return tracker.finish("cond-mean", tol);
}

CheckResult check_bounded_loss(std::uint64_t master_seed, int instances,
                               const std::vector<Index>& horizons, double tol) {
    SlackTracker tracker;
    for (int k = 0; k < instances; ++k) {
        const std::uint64_t seed = master_seed + static_cast<std::uint64_t>(k);
        const int tuning = k % 3;
        const Index T = horizons[static_cast<std::size_t>(k) % horizons.size()];

        GramContext ctx = [&] {
            if (tuning == 0) return random_context(seed, 12);
            // poly/exp tunings assume the matching decay; impose it exactly.
            const Index n = 10;
            std::vector<double> mu(static_cast<std::size_t>(n));
            for (Index j = 0; j < n; ++j)
                mu[static_cast<std::size_t>(j)] = tuning == 1
                                                      ? std::pow(static_cast<double>(j + 1), -2.0)
                                                      : std::exp(-static_cast<double>(j + 1));
            Matrix pts(n, 1);
            for (Index i = 0; i < n; ++i)
                pts(i, 0) = static_cast<double>(i) / static_cast<double>(n);
            return build_gram(FiniteRank{std::move(mu), seed}, make_action_set(std::move(pts)));
        }();

        const double B = 1.0;
        const LossSequence seq = generate(RandomRKHS{B, seed + 1}, ctx, T);

        Params params;
        if (tuning == 0) {
            const double lambda = 1.0 / static_cast<double>(T);
            const auto est = d_star_estimate(ctx, lambda, default_design_iters(ctx.size()));
            params = tune_effdim(T, B, std::max(est.value, 1e-12), ctx.size());
        } else if (tuning == 1) {
            params = tune_poly(T, B, DecaySpec{DecaySpec::Kind::polynomial, 1.0, 2.0});
        } else {
            params = tune_exp(T, B, DecaySpec{DecaySpec::Kind::exponential, 1.0, 1.0}, ctx.size());
        }
        const ExplorationDesign design =
            d_optimal(ctx, params.lambda / params.gamma, default_design_iters(ctx.size()));

        LearnerState state = init(ctx, params, design);
        for (Index t = 1; t <= T; ++t) {
            const Distribution p = sampling_distribution(state);
            auto rng = CounterRng::keyed(seed, static_cast<std::uint64_t>(t), 0);
            const Index chosen = rng.next_categorical(p.weights());
            const Vector proxy =
                proxy_losses(state, ctx, chosen, seq.losses(t - 1, chosen));
            tracker.update((params.eta * proxy).cwiseAbs().maxCoeff(), 1.0, seed);
            state = update(std::move(state), proxy);
        }
    }
    return tracker.finish("bounded-loss", tol);
}

CheckResult check_comp_bias(std::uint64_t master_seed, int instances, Index horizon, double tol) {
    SlackTracker tracker;
    for (int k = 0; k < instances; ++k) {
        const std::uint64_t seed = master_seed + static_cast<std::uint64_t>(k);
        const GramContext ctx = random_context(seed, 12);
        const double B = 1.0;
        const LossSequence seq = generate(RandomRKHS{B, seed + 1}, ctx, horizon);
        const auto est = d_star_estimate(ctx, 1.0 / static_cast<double>(horizon),
                                         default_design_iters(ctx.size()));
        const Params params =
            tune_effdim(horizon, B, std::max(est.value, 1e-12), ctx.size());
        const ExplorationDesign design =
            d_optimal(ctx, params.lambda / params.gamma, default_design_iters(ctx.size()));
        LearnerState state = init(ctx, params, design);
        const double scale = B * std::sqrt(params.lambda);

        for (Index t = 1; t <= horizon; ++t) {
            const Distribution p = sampling_distribution(state);
            const RegularizedResolvent res(ctx, p, params.lambda);
            const Vector bias = res.bias_operator_apply(seq.alphas.row(t - 1).transpose());
            const Vector correction = scale * res.weighted_norms();
            for (Index i = 0; i < ctx.size(); ++i)
                tracker.update(std::abs(bias[i]), correction[i], seed);
            auto rng = CounterRng::keyed(seed, static_cast<std::uint64_t>(t), 0);
            const Index chosen = rng.next_categorical(p.weights());
            state = update(std::move(state),
                           proxy_losses(state, res, chosen, seq.losses(t - 1, chosen)));
        }
    }
    return tracker.finish("comp-bias", tol);
}

CheckResult check_leverage(std::uint64_t master_seed, int instances, Index max_n, double tol) {
    SlackTracker tracker;
    for (int k = 0; k < instances; ++k) {
        const std::uint64_t seed = master_seed + static_cast<std::uint64_t>(k);
        const GramContext ctx = random_context(seed, max_n);
        const Distribution p = random_distribution(seed, ctx.size());
        auto rng = CounterRng::keyed(seed, 3, 13);
        const double lambda = 1e-3 * std::exp(rng.next_unit() * std::log(1e4));
        const RegularizedResolvent res(ctx, p, lambda);
        const Matrix sq = res.bilinear_matrix().array().square();
        const double second_moment = p.weights().dot(sq * p.weights());
        const double d_eff = effective_dim(covariance(ctx, p), lambda);
        tracker.update(second_moment, d_eff, seed);
    }
    return tracker.finish("leverage", tol);
}

CheckResult check_eigendecay(std::uint64_t master_seed, Index max_m, double tol) {
    SlackTracker tracker;
    const Index n = 40;
    const std::vector<double> xis = {1e-3, 1e-2, 1e-1};

    for (int variant = 0; variant < 2; ++variant) {
        const bool poly = variant == 0;
        const double C = 1.0;
        const double beta = poly ? 2.0 : 1.0;
        std::vector<double> mu(static_cast<std::size_t>(n));
        for (Index j = 0; j < n; ++j) {
            const double jj = static_cast<double>(j + 1);
            mu[static_cast<std::size_t>(j)] = poly ? C * std::pow(jj, -beta) : C * std::exp(-beta * jj);
        }
        Matrix pts(n, 1);
        for (Index i = 0; i < n; ++i) pts(i, 0) = static_cast<double>(i) / static_cast<double>(n);
        const GramContext ctx =
            build_gram(FiniteRank{std::move(mu), master_seed + static_cast<std::uint64_t>(variant)},
                       make_action_set(std::move(pts)));

        for (const double xi : xis) {
            const double estimate = d_star_estimate(ctx, xi, default_design_iters(n)).value;
            for (Index m = 1; m <= max_m; ++m) {
                const double md = static_cast<double>(m);
                const double tail = poly ? C / (beta - 1.0) * std::pow(md, 1.0 - beta)
                                         : C * std::exp(-beta * md) / (std::exp(beta) - 1.0);
                tracker.update(estimate, md + tail / xi,
                               master_seed + static_cast<std::uint64_t>(variant));
            }
        }
    }
    return tracker.finish("eigendecay", tol);
}

CheckResult check_infogain(std::uint64_t master_seed, int instances,
                           const std::vector<Index>& horizons, double tol) {
    SlackTracker tracker;
    for (int k = 0; k < instances; ++k) {
        const std::uint64_t seed = master_seed + static_cast<std::uint64_t>(k);
        const GramContext ctx = random_context(seed, 15);
        const Distribution nu = random_distribution(seed, ctx.size());
        const Index T = horizons[static_cast<std::size_t>(k) % horizons.size()];
        const double lambda = 1.0 / static_cast<double>(T);
        const double d_eff = effective_dim(covariance(ctx, nu), lambda);
        const double gain = info_gain_greedy(ctx, T, lambda);
        tracker.update(d_eff, 2.0 * gain, seed);
    }
    return tracker.finish("info-gain", tol);
}

CheckResult check_design_certificate(std::uint64_t master_seed, int instances, double design_tol,
                                     double numeric_tol) {
    SlackTracker tracker;
    int converged = 0;
    for (int k = 0; k < instances; ++k) {
        const std::uint64_t seed = master_seed + static_cast<std::uint64_t>(k);
        const GramContext ctx = random_context(seed, 15);
        auto rng = CounterRng::keyed(seed, 3, 13);
        const double rho = 1e-3 * std::exp(rng.next_unit() * std::log(1e4));
        const ExplorationDesign design =
            d_optimal(ctx, rho, default_design_iters(ctx.size()), design_tol);
        if (!design.converged) continue;
        ++converged;
        const double d_eff = effective_dim(covariance(ctx, design.distribution), rho);
        tracker.update(design.max_leverage, d_eff + design_tol, seed);
    }
    CheckResult result = tracker.finish("design-cert", numeric_tol);
    if (converged == 0) {
        result.pass = false;
        result.detail = "no design converged; nothing certified";
    }
    return result;
}

const std::vector<std::string>& all_lemma_names() {
    static const std::vector<std::string> names = {
        "dual-primal", "cond-mean",  "bounded-loss", "comp-bias",
        "leverage",    "eigendecay", "info-gain",    "design-cert"};
    return names;
}

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
    std::vector<CheckResult> results;
    for (const auto& name : opts.lemmas) {
        const std::uint64_t s = opts.master_seed;
        if (name == "dual-primal") {
            results.push_back(check_dual_primal(s, 100, 15, 1e-4, 10.0, 1e-8));
        } else if (name == "cond-mean") {
            results.push_back(check_cond_mean(s, 50, 15, 1e-8, opts.corrupt_resolvent));
        } else if (name == "bounded-loss") {
            results.push_back(check_bounded_loss(s, 6, {60, 120}, 1e-9));
        } else if (name == "comp-bias") {
            results.push_back(check_comp_bias(s, 4, 60, 1e-10));
        } else if (name == "leverage") {
            results.push_back(check_leverage(s, 100, 15, 1e-9));
        } else if (name == "eigendecay") {
            results.push_back(check_eigendecay(s, 10, 1e-9));
        } else if (name == "info-gain") {
            results.push_back(check_infogain(s, 30, {16, 64, 256}, 1e-9));
        } else if (name == "design-cert") {
            results.push_back(check_design_certificate(s, 30, 1e-6, 1e-9));
        } else {
            throw ConfigError("unknown lemma `" + name + "`");
        }
    }
    return results;
}

}  // namespace kbandit
