#include "kbandit/cli.hpp"

#include "kbandit/csv.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace kbandit::cli {

namespace {

namespace fs = std::filesystem;

std::string out_path(const ExperimentConfig& cfg, const std::string& file) {
    fs::create_directories(cfg.output_dir);
    return (fs::path(cfg.output_dir) / file).string();
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_run(const std::string& config_path, bool dump_gram, bool dump_losses) {
    const ExperimentConfig cfg = load_config(config_path);
    const Experiment ex = assemble(cfg);
    print_warnings(ex.warnings);
    if (dump_gram) write_gram_csv(ex.ctx, out_path(cfg, "gram.csv"));
    if (dump_losses) write_losses_csv(ex.seq, out_path(cfg, "losses.csv"));
    const RegretCurve curve = run_replicated(
        ex.ctx, ex.seq, [&ex] { return ex.make_policy(); }, cfg.seeds, thread_cap());

    write_rounds_csv(curve, out_path(cfg, "rounds.csv"));
    write_summary_csv({{cfg.horizon, curve.mean_regret, curve.stderr_regret,
                        std::numeric_limits<double>::quiet_NaN()}},
                      out_path(cfg, "summary.csv"));
    std::cout << "T=" << cfg.horizon << " seeds=" << cfg.seeds.size()
              << " mean_expected_regret=" << csv::fmt(curve.mean_regret)
              << " stderr=" << csv::fmt(curve.stderr_regret) << "\n";
    if (curve.any_aborted) {
        for (const auto& ep : curve.episodes)
            if (ep.aborted)
                std::cerr << "episode seed " << ep.seed << " aborted at round " << ep.abort_round
                          << ": " << ep.abort_message << "\n";
        return exit_numeric_error;
    }
    return exit_ok;
}

int cmd_sweep(const std::string& config_path, const std::vector<Index>& horizons) {
    if (horizons.empty()) throw ConfigError("sweep needs at least one horizon");
    const ExperimentConfig cfg = load_config(config_path);
    if (std::holds_alternative<RankOne>(cfg.adversary) ||
        std::holds_alternative<Switching>(cfg.adversary))
        throw ConfigError(
            "sweep requires an adversary whose shape adapts to the horizon "
            "(random_rkhs or best_arm_gap)");
    if (horizons.size() == 1)
        std::cerr << "warning: a single-horizon sweep cannot fit a rate exponent\n";

    std::vector<std::tuple<Index, double, double, double>> rows;
    std::vector<std::pair<double, double>> points;
    bool aborted = false;
    for (const Index T : horizons) {
        const Experiment ex = assemble(cfg, T);
        print_warnings(ex.warnings);
        const RegretCurve curve = run_replicated(
            ex.ctx, ex.seq, [&ex] { return ex.make_policy(); }, cfg.seeds, thread_cap());
        aborted = aborted || curve.any_aborted;
        points.emplace_back(static_cast<double>(T), curve.mean_regret);
        const RateFit partial = rate_fit(points);
        rows.emplace_back(T, curve.mean_regret, curve.stderr_regret, partial.exponent);
        std::cout << "T=" << T << " mean_expected_regret=" << csv::fmt(curve.mean_regret)
                  << " stderr=" << csv::fmt(curve.stderr_regret) << "\n";
    }
    write_summary_csv(rows, out_path(cfg, "summary.csv"));

    const RateFit fit = rate_fit(points);
    if (fit.excluded_nonpositive)
        std::cerr << "warning: non-positive regret points excluded from the rate fit\n";
    std::cout << "rate_exponent=" << csv::fmt(fit.exponent) << " r2=" << csv::fmt(fit.r2)
              << " points_used=" << fit.points_used << "\n";
    return aborted ? exit_numeric_error : exit_ok;
}

int cmd_design(const std::string& config_path, double rho_flag) {
    const ExperimentConfig cfg = load_config(config_path);
    const Experiment ex = assemble(cfg);
    double rho = rho_flag;
    if (!(rho > 0.0)) {
        if (!ex.params) throw ConfigError("--rho is required unless the policy is exp2_kernel");
        rho = ex.params->lambda / ex.params->gamma;
    }
    const ExplorationDesign design =
        d_optimal(ex.ctx, rho, cfg.design_max_iters.value_or(default_design_iters(ex.ctx.size())),
                  cfg.design_tol);
    const Vector lev = leverage_profile(ex.ctx, design.distribution, rho);
    std::ofstream out(out_path(cfg, "design.csv"), std::ios::binary);
    out << "action_index,weight,leverage\n";
    for (Index i = 0; i < ex.ctx.size(); ++i)
        out << i << ',' << csv::fmt(design.distribution[i]) << ',' << csv::fmt(lev[i]) << '\n';
    std::cout << "rho=" << csv::fmt(rho) << " max_leverage=" << csv::fmt(design.max_leverage)
              << " d_eff=" << csv::fmt(design.dual_bound) << " gap=" << csv::fmt(design.gap)
              << " iterations=" << design.iterations_used
              << " converged=" << (design.converged ? 1 : 0) << "\n";
    if (!design.converged) std::cerr << "warning: design did not reach its gap tolerance\n";
    return exit_ok;
}

int cmd_effdim(const std::string& config_path, const std::vector<double>& rhos) {
    if (rhos.empty()) throw ConfigError("effdim needs at least one rho");
    const ExperimentConfig cfg = load_config(config_path);
    const Experiment ex = assemble(cfg);
    std::ofstream out(out_path(cfg, "effdim.csv"), std::ios::binary);
    out << "rho,d_lower,d_upper,iterations,gap,converged\n";
    for (const double rho : rhos) {
        if (!(rho > 0.0)) throw ConfigError("effdim: rho values must be positive");
        const auto est = d_star_estimate(
            ex.ctx, rho, cfg.design_max_iters.value_or(default_design_iters(ex.ctx.size())),
            cfg.design_tol);
        const Index T = std::max<Index>(1, static_cast<Index>(std::ceil(1.0 / rho)));
        const double upper = std::min(static_cast<double>(ex.ctx.size()),
                                      2.0 * info_gain_greedy(ex.ctx, T, rho));
        out << csv::fmt(rho) << ',' << csv::fmt(est.value) << ',' << csv::fmt(upper) << ','
            << est.iterations << ',' << csv::fmt(est.gap) << ',' << (est.converged ? 1 : 0)
            << '\n';
        std::cout << "rho=" << csv::fmt(rho) << " d_lower=" << csv::fmt(est.value)
                  << " d_upper=" << csv::fmt(upper) << "\n";
    }
    return exit_ok;
}

int cmd_verify(const std::vector<std::string>& lemmas, std::uint64_t master_seed,
               bool corrupt_resolvent) {
    VerifyOptions opts;
    opts.master_seed = master_seed;
    opts.corrupt_resolvent = corrupt_resolvent;
    for (const auto& l : lemmas) {
        if (l == "all") {
            opts.lemmas = all_lemma_names();
            break;
        }
        if (!l.empty()) opts.lemmas.push_back(l);
    }
    if (opts.lemmas.empty()) throw ConfigError("verify: empty lemma set");

    const auto results = run_verify(opts);
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[ok]   " : "[FAIL] ") << r.name
                  << " worst_slack=" << csv::fmt(r.worst_slack)
                  << " tol=" << csv::fmt(r.tolerance) << " " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    if (!all_pass) {
        for (const auto& r : results)
            if (!r.pass)
                std::cerr << "verify failed: " << r.name << " (instance seed " << r.fail_seed
                          << ")\n";
        return exit_verify_failure;
    }
    return exit_ok;
}

}  // namespace

void write_rounds_csv(const RegretCurve& curve, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << "seed,t,chosen,realized_loss,expected_instant_regret,cum_expected_regret,"
           "max_eta_proxy,q_entropy\n";
    for (const auto& ep : curve.episodes)
        for (const auto& r : ep.rounds)
            out << r.seed << ',' << r.t << ',' << r.chosen << ',' << csv::fmt(r.realized_loss)
                << ',' << csv::fmt(r.expected_instant_regret) << ','
                << csv::fmt(r.cum_expected_regret) << ',' << csv::fmt(r.max_eta_proxy) << ','
                << csv::fmt(r.q_entropy) << '\n';
}

void write_summary_csv(const std::vector<std::tuple<Index, double, double, double>>& rows,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << "T,mean_regret,stderr,exponent_partial\n";
    for (const auto& [T, mean, se, exponent] : rows)
        out << T << ',' << csv::fmt(mean) << ',' << csv::fmt(se) << ',' << csv::fmt(exponent)
            << '\n';
}

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Adversarial kernel bandit simulator"};
    app.require_subcommand(1);

    std::string config_path;
    bool dump_gram = false;
    bool dump_losses = false;
    auto* run = app.add_subcommand("run", "run the configured experiment");
    run->add_option("--config", config_path, "config JSON path")->required();
    run->add_flag("--dump-gram", dump_gram, "also write the Gram matrix as gram.csv");
    run->add_flag("--dump-losses", dump_losses, "also write the loss sequence as losses.csv");

    std::vector<Index> horizons;
    auto* sweep = app.add_subcommand("sweep", "run over a horizon grid and fit the regret rate");
    sweep->add_option("--config", config_path, "config JSON path")->required();
    sweep->add_option("--horizons", horizons, "comma-separated horizon grid")
        ->required()
        ->delimiter(',');

    double rho_flag = 0.0;
    auto* design = app.add_subcommand("design", "compute the exploration design");
    design->add_option("--config", config_path, "config JSON path")->required();
    design->add_option("--rho", rho_flag, "design regularizer (default: tuned lambda/gamma)");

    std::vector<double> rhos;
    auto* effdim = app.add_subcommand("effdim", "bracket the effective dimension over a rho grid");
    effdim->add_option("--config", config_path, "config JSON path")->required();
    effdim->add_option("--rhos", rhos, "comma-separated rho grid")->required()->delimiter(',');

    std::vector<std::string> lemmas{"all"};
    std::uint64_t master_seed = VerifyOptions{}.master_seed;
    bool corrupt = false;
    auto* verify = app.add_subcommand("verify", "numerically check the analysis lemmas");
    verify->add_option("--lemmas", lemmas, "lemma names or `all`")->delimiter(',');
    verify->add_option("--master-seed", master_seed, "master seed for the randomized instances");
    verify->add_flag("--corrupt-resolvent", corrupt,
                     "fault-injection hook: perturb the resolvent (must fail cond-mean)");

    std::vector<const char*> argv;
    argv.push_back("kbandit");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return exit_config_error;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, dump_gram, dump_losses);
        if (sweep->parsed()) return cmd_sweep(config_path, horizons);
        if (design->parsed()) return cmd_design(config_path, rho_flag);
        if (effdim->parsed()) return cmd_effdim(config_path, rhos);
        if (verify->parsed()) return cmd_verify(lemmas, master_seed, corrupt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return exit_numeric_error;
    }
    return exit_config_error;
}

}  // namespace kbandit::cli
