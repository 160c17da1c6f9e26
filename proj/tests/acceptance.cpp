// Acceptance suite: one line per criterion, nonzero exit if any fail.

#include "kbandit/cli.hpp"
#include "kbandit/csv.hpp"
#include "kbandit/rng.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace kbandit;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << " (" << name << "): "
              << detail << "  [" << csv::fmt(seconds) << " s]" << std::endl;
    if (!pass) ++failures;
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string slack_detail(const CheckResult& r, double budget, double elapsed) {
    std::ostringstream os;
    os << "worst_slack=" << csv::fmt(r.worst_slack) << " tol=" << csv::fmt(r.tolerance);
    if (elapsed > budget) os << " RUNTIME OVER BUDGET " << budget << " s";
    return os.str();
}

void run_check_criterion(int id, const std::string& name, const CheckResult& r, double budget,
                         const Timer& timer) {
    const double elapsed = timer.seconds();
    report(id, name, r.pass && elapsed <= budget, slack_detail(r, budget, elapsed), elapsed);
}

ExperimentConfig matern_gap_config(const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.kernel = Matern{0.5, 0.6};
    cfg.actions_d = 1;
    cfg.actions_n_per_axis = 25;
    cfg.adversary = BestArmGap{12, 0.4, 1.0, 11};
    cfg.policy_name = "exp2_kernel";
    cfg.tuning = "effdim";
    cfg.horizon = 3200;
    cfg.seeds.clear();
    for (std::uint64_t s = 1; s <= 30; ++s) cfg.seeds.push_back(s);
    cfg.output_dir = out_dir;
    return cfg;
}

// Criterion 9: regret against the fully evaluated theorem bound.
void criterion_theorem_bound() {
    Timer timer;
    bool pass = true;
    std::ostringstream detail;
    double worst_margin = std::numeric_limits<double>::infinity();
    const Index T = 2000;

    for (int inst = 0; inst < 10; ++inst) {
        const std::uint64_t seed = 31000 + static_cast<std::uint64_t>(inst);
        const GramContext ctx = random_context(seed, 30);
        const Index n = ctx.size();
        const LossSequence seq =
            inst % 2 == 0
                ? generate(RandomRKHS{1.0, seed + 1}, ctx, T)
                : generate(BestArmGap{n / 2, 0.4, 1.0, seed + 1}, ctx, T);

        const double lambda = 1.0 / static_cast<double>(T);
        const auto est = d_star_estimate(ctx, lambda, default_design_iters(n));
        const Params params = tune_effdim(T, 1.0, std::max(est.value, 1e-12), n);
        const ExplorationDesign design =
            d_optimal(ctx, params.lambda / params.gamma, default_design_iters(n));

        std::vector<std::uint64_t> seeds;
        for (std::uint64_t s = 1; s <= 30; ++s) seeds.push_back(seed * 100 + s);
        const RegretCurve curve = run_replicated(
            ctx, seq,
            [&] { return std::make_unique<Exp2KernelPolicy>(ctx, params, design); }, seeds,
            thread_cap());

        const double d_up_lambda =
            std::min(static_cast<double>(n), 2.0 * info_gain_greedy(ctx, T, lambda));
        const double d_up_mix = std::min(
            static_cast<double>(n),
            2.0 * info_gain_greedy(ctx, T, params.lambda / params.gamma));
        const double rhs = theorem_regret_bound(params, T, n, d_up_lambda, d_up_mix);

        const double margin = rhs - curve.mean_regret;
        worst_margin = std::min(worst_margin, margin);
        if (!(curve.mean_regret <= rhs) || curve.any_aborted) pass = false;
    }
    const double elapsed = timer.seconds();
    detail << "worst bound margin=" << csv::fmt(worst_margin);
    if (elapsed > 600.0) {
        pass = false;
        detail << " RUNTIME OVER BUDGET 600 s";
    }
    report(9, "theorem bound conformance", pass, detail.str(), elapsed);
}

// Criterion 10: sublinearity and baseline dominance on the Matern(1/2)
// gap instance.
void criterion_rate_and_dominance() {
    Timer timer;
    const ExperimentConfig cfg = matern_gap_config("");
    const std::vector<Index> horizons = {200, 400, 800, 1600, 3200};

    std::vector<std::pair<double, double>> points;
    double alg_at_final = 0.0;
    for (const Index T : horizons) {
        const Experiment ex = assemble(cfg, T);
        const RegretCurve curve = run_replicated(
            ex.ctx, ex.seq, [&ex] { return ex.make_policy(); }, cfg.seeds, thread_cap());
        points.emplace_back(static_cast<double>(T), curve.mean_regret);
        if (T == horizons.back()) alg_at_final = curve.mean_regret;
    }
    const RateFit fit = rate_fit(points);

    ExperimentConfig ucfg = cfg;
    ucfg.policy_name = "uniform";
    const Experiment uex = assemble(ucfg, horizons.back());
    const RegretCurve ucurve = run_replicated(
        uex.ctx, uex.seq, [&uex] { return uex.make_policy(); }, cfg.seeds, thread_cap());

    const double elapsed = timer.seconds();
    const bool rate_ok = fit.exponent >= 0.55 && fit.exponent <= 0.95;
    {
        std::ostringstream os;
        os << "fitted exponent=" << csv::fmt(fit.exponent) << " (band [0.55, 0.95]), r2="
           << csv::fmt(fit.r2);
        report(10, "regret rate within band", rate_ok && elapsed <= 1200.0, os.str(), elapsed);
    }
    {
        const double ratio = alg_at_final / ucurve.mean_regret;
        std::ostringstream os;
        os << "alg regret=" << csv::fmt(alg_at_final) << " uniform=" << csv::fmt(
               ucurve.mean_regret) << " ratio=" << csv::fmt(ratio) << " (required <= 0.5)";
        report(10, "baseline dominance at T=3200", ratio <= 0.5, os.str(), elapsed);
    }
}

// Criterion 11: byte-identical CSVs across repeated runs of one config.
void criterion_determinism() {
    Timer timer;
    const fs::path dir = fs::temp_directory_path() / "kbandit_acceptance_det";
    fs::remove_all(dir);
    fs::create_directories(dir);

    ExperimentConfig cfg = matern_gap_config((dir / "out_a").string());
    cfg.seeds = {1, 2, 3};
    cfg.horizon = 50;
    const std::string path_a = (dir / "a.json").string();
    std::ofstream(path_a) << serialize_config(cfg);
    cfg.output_dir = (dir / "out_b").string();
    const std::string path_b = (dir / "b.json").string();
    std::ofstream(path_b) << serialize_config(cfg);

    int code_a = -1, code_b = -1;
    {
        // The nested runs print their own summaries; keep this binary's
        // output to one line per criterion.
        std::ostringstream sink_out, sink_err;
        std::streambuf* old_out = std::cout.rdbuf(sink_out.rdbuf());
        std::streambuf* old_err = std::cerr.rdbuf(sink_err.rdbuf());
        code_a = cli::dispatch({"run", "--config", path_a});
        code_b = cli::dispatch({"run", "--config", path_b});
        std::cout.rdbuf(old_out);
        std::cerr.rdbuf(old_err);
    }

    auto bytes = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const bool same =
        code_a == 0 && code_b == 0 &&
        bytes(dir / "out_a" / "rounds.csv") == bytes(dir / "out_b" / "rounds.csv") &&
        bytes(dir / "out_a" / "summary.csv") == bytes(dir / "out_b" / "summary.csv");
    report(11, "determinism", same, same ? "repeated runs byte-identical" : "outputs differ",
           timer.seconds());
    fs::remove_all(dir);
}

}  // namespace

int main() {
    std::cout << "acceptance suite (threads=" << thread_cap() << ")\n";

    {
        Timer t;
        run_check_criterion(1, "dual/primal resolvent equivalence",
                            check_dual_primal(41000, 1000, 20, 1e-4, 10.0, 1e-8), 30.0, t);
    }
    {
        Timer t;
        run_check_criterion(2, "conditional-mean identity",
                            check_cond_mean(42000, 200, 20, 1e-8), 10.0, t);
    }
    {
        Timer t;
        run_check_criterion(3, "bounded proxy under the three tunings",
                            check_bounded_loss(43000, 6, {100, 1000}, 1e-9), 60.0, t);
    }
    {
        Timer t;
        run_check_criterion(4, "comparator dominance",
                            check_comp_bias(44000, 6, 100, 1e-10), 120.0, t);
    }
    {
        Timer t;
        run_check_criterion(5, "leverage second moment",
                            check_leverage(45000, 500, 20, 1e-9), 60.0, t);
    }
    {
        Timer t;
        run_check_criterion(6, "eigendecay bounds", check_eigendecay(46000, 10, 1e-9), 120.0, t);
    }
    {
        Timer t;
        run_check_criterion(7, "info-gain domination",
                            check_infogain(47000, 100, {16, 64, 256}, 1e-9), 120.0, t);
    }
    {
        Timer t;
        run_check_criterion(8, "G-optimal certificate",
                            check_design_certificate(48000, 50, 1e-6, 1e-9), 120.0, t);
    }
    criterion_theorem_bound();
    criterion_rate_and_dominance();
    criterion_determinism();

    if (failures > 0) {
        std::cout << failures << " criterion check(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all acceptance criteria passed" << std::endl;
    return 0;
}
