#include "kbandit/config.hpp"

#include "kbandit/csv.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace kbandit {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError("unknown config key `" + where + key + "`");
    }
}

double require_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError("missing config key `" + where + key + "`");
    if (!obj[key].is_number()) throw ConfigError("config key `" + where + key + "` must be a number");
    return obj[key].get<double>();
}

Index require_integer(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError("missing config key `" + where + key + "`");
    if (!obj[key].is_number_integer())
        throw ConfigError("config key `" + where + key + "` must be an integer");
    return obj[key].get<Index>();
}

std::string require_string(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError("missing config key `" + where + key + "`");
    if (!obj[key].is_string()) throw ConfigError("config key `" + where + key + "` must be a string");
    return obj[key].get<std::string>();
}

KernelSpec parse_kernel(const json& k) {
    const std::string type = require_string(k, "kernel.", "type");
    if (type == "squared_exponential" || type == "se") {
        reject_unknown(k, "kernel.", {"type", "lengthscale"});
        SquaredExponential se;
        se.lengthscale = require_number(k, "kernel.", "lengthscale");
        if (!(se.lengthscale > 0.0)) throw ConfigError("kernel.lengthscale must be positive");
        return se;
    }
    if (type == "matern") {
        reject_unknown(k, "kernel.", {"type", "nu", "lengthscale"});
        Matern m;
        m.smoothness = require_number(k, "kernel.", "nu");
        m.lengthscale = require_number(k, "kernel.", "lengthscale");
        if (!(m.lengthscale > 0.0)) throw ConfigError("kernel.lengthscale must be positive");
        if (m.smoothness != 0.5 && m.smoothness != 1.5 && m.smoothness != 2.5)
            throw ConfigError("kernel.nu must be 0.5, 1.5 or 2.5");
        return m;
    }
    if (type == "linear") {
        reject_unknown(k, "kernel.", {"type"});
        return Linear{};
    }
    if (type == "finite_rank") {
        reject_unknown(k, "kernel.", {"type", "eigenvalues", "seed"});
        FiniteRank fr;
        if (!k.contains("eigenvalues") || !k["eigenvalues"].is_array())
            throw ConfigError("kernel.eigenvalues must be an array");
        fr.eigenvalues = k["eigenvalues"].get<std::vector<double>>();
        fr.seed = k.contains("seed") ? k["seed"].get<std::uint64_t>() : 0;
        validate(KernelSpec{fr});
        return fr;
    }
    throw ConfigError("kernel.type must be squared_exponential, matern, linear or finite_rank");
}

AdversarySpec parse_adversary(const json& a) {
    const std::string type = require_string(a, "adversary.", "type");
    if (type == "rank_one") {
        reject_unknown(a, "adversary.", {"type", "anchor_schedule"});
        RankOne ro;
        if (!a.contains("anchor_schedule") || !a["anchor_schedule"].is_array())
            throw ConfigError("adversary.anchor_schedule must be an array of action indices");
        ro.anchor_schedule = a["anchor_schedule"].get<std::vector<Index>>();
        return ro;
    }
    if (type == "random_rkhs") {
        reject_unknown(a, "adversary.", {"type", "B", "seed"});
        RandomRKHS rr;
        rr.B = require_number(a, "adversary.", "B");
        if (!(rr.B > 0.0)) throw ConfigError("adversary.B must be positive");
        rr.seed = a.contains("seed") ? a["seed"].get<std::uint64_t>() : 0;
        return rr;
    }
    if (type == "switching") {
        reject_unknown(a, "adversary.", {"type", "segments", "B"});
        Switching sw;
        sw.B = require_number(a, "adversary.", "B");
        if (!(sw.B > 0.0)) throw ConfigError("adversary.B must be positive");
        if (!a.contains("segments") || !a["segments"].is_array())
            throw ConfigError("adversary.segments must be an array of [length, target] pairs");
        for (const auto& seg : a["segments"]) {
            if (!seg.is_array() || seg.size() != 2)
                throw ConfigError("adversary.segments entries must be [length, target] pairs");
            sw.segments.push_back({seg[0].get<Index>(), seg[1].get<Index>()});
        }
        return sw;
    }
    if (type == "best_arm_gap") {
        reject_unknown(a, "adversary.", {"type", "best", "gap", "B", "seed"});
        BestArmGap bg;
        bg.best = require_integer(a, "adversary.", "best");
        bg.gap = require_number(a, "adversary.", "gap");
        bg.B = require_number(a, "adversary.", "B");
        if (!(bg.gap > 0.0 && bg.gap < 1.0)) throw ConfigError("adversary.gap must be in (0, 1)");
        if (!(bg.B > 0.0)) throw ConfigError("adversary.B must be positive");
        bg.seed = a.contains("seed") ? a["seed"].get<std::uint64_t>() : 0;
        return bg;
    }
    throw ConfigError("adversary.type must be rank_one, random_rkhs, switching or best_arm_gap");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown(root, "", {"kernel", "actions", "adversary", "policy", "horizon", "seeds",
                              "design", "output_dir"});
    for (const char* key : {"kernel", "actions", "adversary", "policy", "horizon", "seeds"})
        if (!root.contains(key)) throw ConfigError(std::string("missing config key `") + key + "`");

    ExperimentConfig cfg;
    cfg.kernel = parse_kernel(root["kernel"]);

    const json& act = root["actions"];
    if (act.contains("points_csv")) {
        reject_unknown(act, "actions.", {"points_csv"});
        cfg.actions_points_csv = require_string(act, "actions.", "points_csv");
    } else {
        reject_unknown(act, "actions.", {"d", "n_per_axis"});
        cfg.actions_d = require_integer(act, "actions.", "d");
        cfg.actions_n_per_axis = require_integer(act, "actions.", "n_per_axis");
        if (*cfg.actions_d < 1) throw ConfigError("actions.d must be >= 1");
        if (*cfg.actions_n_per_axis < 1) throw ConfigError("actions.n_per_axis must be >= 1");
    }

    cfg.adversary = parse_adversary(root["adversary"]);

    const json& pol = root["policy"];
    reject_unknown(pol, "policy.", {"name", "tuning", "overrides", "decay", "d_star_source"});
    cfg.policy_name = require_string(pol, "policy.", "name");
    if (cfg.policy_name != "exp2_kernel" && cfg.policy_name != "uniform" &&
        cfg.policy_name != "exp3")
        throw ConfigError("policy.name must be exp2_kernel, uniform or exp3");
    if (pol.contains("tuning")) {
        cfg.tuning = pol["tuning"].get<std::string>();
        if (cfg.tuning != "effdim" && cfg.tuning != "poly" && cfg.tuning != "exp" &&
            cfg.tuning != "manual")
            throw ConfigError("policy.tuning must be effdim, poly, exp or manual");
    }
    if (pol.contains("overrides")) {
        const json& ov = pol["overrides"];
        reject_unknown(ov, "policy.overrides.", {"lambda", "gamma", "eta"});
        if (ov.contains("lambda")) {
            cfg.override_lambda = ov["lambda"].get<double>();
            if (!(*cfg.override_lambda > 0.0)) throw ConfigError("lambda must be positive");
        }
        if (ov.contains("gamma")) {
            cfg.override_gamma = ov["gamma"].get<double>();
            if (!(*cfg.override_gamma > 0.0 && *cfg.override_gamma <= 1.0))
                throw ConfigError("gamma must be in (0, 1]");
        }
        if (ov.contains("eta")) {
            cfg.override_eta = ov["eta"].get<double>();
            if (!(*cfg.override_eta > 0.0)) throw ConfigError("eta must be positive");
        }
    }
    if (pol.contains("decay")) {
        const json& dc = pol["decay"];
        reject_unknown(dc, "policy.decay.", {"C", "beta"});
        DecaySpec decay;
        decay.C = require_number(dc, "policy.decay.", "C");
        decay.beta = require_number(dc, "policy.decay.", "beta");
        if (!(decay.C > 0.0)) throw ConfigError("policy.decay.C must be positive");
        cfg.decay = decay;  // kind fixed by the tuning that consumes it
    }
    if (pol.contains("d_star_source")) {
        cfg.d_star_source = pol["d_star_source"].get<std::string>();
        if (cfg.d_star_source != "lower" && cfg.d_star_source != "upper")
            throw ConfigError("policy.d_star_source must be lower or upper");
    }

    if (!root["horizon"].is_number_integer()) throw ConfigError("horizon must be an integer");
    cfg.horizon = root["horizon"].get<Index>();
    if (cfg.horizon < 1) throw ConfigError("horizon must be >= 1");

    if (!root["seeds"].is_array() || root["seeds"].empty())
        throw ConfigError("seeds must be a non-empty array");
    cfg.seeds = root["seeds"].get<std::vector<std::uint64_t>>();

    if (root.contains("design")) {
        const json& d = root["design"];
        reject_unknown(d, "design.", {"max_iters", "tol"});
        if (d.contains("max_iters")) {
            cfg.design_max_iters = d["max_iters"].get<Index>();
            if (*cfg.design_max_iters < 1) throw ConfigError("design.max_iters must be >= 1");
        }
        if (d.contains("tol")) {
            cfg.design_tol = d["tol"].get<double>();
            if (!(cfg.design_tol > 0.0)) throw ConfigError("design.tol must be positive");
        }
    }
    if (root.contains("output_dir")) cfg.output_dir = root["output_dir"].get<std::string>();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json root;
    json k;
    if (const auto* se = std::get_if<SquaredExponential>(&cfg.kernel)) {
        k["type"] = "squared_exponential";
        k["lengthscale"] = se->lengthscale;
    } else if (const auto* m = std::get_if<Matern>(&cfg.kernel)) {
        k["type"] = "matern";
        k["nu"] = m->smoothness;
        k["lengthscale"] = m->lengthscale;
    } else if (std::holds_alternative<Linear>(cfg.kernel)) {
        k["type"] = "linear";
    } else if (const auto* fr = std::get_if<FiniteRank>(&cfg.kernel)) {
        k["type"] = "finite_rank";
        k["eigenvalues"] = fr->eigenvalues;
        k["seed"] = fr->seed;
    }
    root["kernel"] = k;

    json act;
    if (cfg.actions_points_csv) {
        act["points_csv"] = *cfg.actions_points_csv;
    } else {
        act["d"] = *cfg.actions_d;
        act["n_per_axis"] = *cfg.actions_n_per_axis;
    }
    root["actions"] = act;

    json adv;
    if (const auto* ro = std::get_if<RankOne>(&cfg.adversary)) {
        adv["type"] = "rank_one";
        adv["anchor_schedule"] = ro->anchor_schedule;
    } else if (const auto* rr = std::get_if<RandomRKHS>(&cfg.adversary)) {
        adv["type"] = "random_rkhs";
        adv["B"] = rr->B;
        adv["seed"] = rr->seed;
    } else if (const auto* sw = std::get_if<Switching>(&cfg.adversary)) {
        adv["type"] = "switching";
        adv["B"] = sw->B;
        json segs = json::array();
        for (const auto& s : sw->segments) segs.push_back({s.length, s.target});
        adv["segments"] = segs;
    } else if (const auto* bg = std::get_if<BestArmGap>(&cfg.adversary)) {
        adv["type"] = "best_arm_gap";
        adv["best"] = bg->best;
        adv["gap"] = bg->gap;
        adv["B"] = bg->B;
        adv["seed"] = bg->seed;
    }
    root["adversary"] = adv;

    json pol;
    pol["name"] = cfg.policy_name;
    pol["tuning"] = cfg.tuning;
    json ov = json::object();
    if (cfg.override_lambda) ov["lambda"] = *cfg.override_lambda;
    if (cfg.override_gamma) ov["gamma"] = *cfg.override_gamma;
    if (cfg.override_eta) ov["eta"] = *cfg.override_eta;
    if (!ov.empty()) pol["overrides"] = ov;
    if (cfg.decay) {
        pol["decay"] = {{"C", cfg.decay->C}, {"beta", cfg.decay->beta}};
    }
    pol["d_star_source"] = cfg.d_star_source;
    root["policy"] = pol;

    root["horizon"] = cfg.horizon;
    root["seeds"] = cfg.seeds;
    root["design"] = json::object();
    if (cfg.design_max_iters) root["design"]["max_iters"] = *cfg.design_max_iters;
    root["design"]["tol"] = cfg.design_tol;
    root["output_dir"] = cfg.output_dir;
    return root.dump(2) + "\n";
}

Experiment assemble(const ExperimentConfig& cfg, std::optional<Index> horizon_override) {
    const Index T = horizon_override.value_or(cfg.horizon);

    ActionSet actions = [&] {
        if (cfg.actions_points_csv) {
            const auto rows = csv::read_numeric(*cfg.actions_points_csv);
            if (rows.empty()) throw ConfigError("actions.points_csv: no points");
            const Index d = static_cast<Index>(rows[0].size());
            Matrix pts(static_cast<Index>(rows.size()), d);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (static_cast<Index>(rows[i].size()) != d)
                    throw ConfigError("actions.points_csv: inconsistent dimension");
                for (Index j = 0; j < d; ++j) pts(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
            }
            return make_action_set(std::move(pts));
        }
        return grid_actions(*cfg.actions_d, *cfg.actions_n_per_axis);
    }();

    Experiment ex{build_gram(cfg.kernel, actions), LossSequence{}, {}, {}, {}, {}};
    ex.seq = generate(cfg.adversary, ex.ctx, T);

    const Index n = ex.ctx.size();
    if (cfg.policy_name == "uniform") {
        ex.policy_factory = [](const GramContext& c) {
            return std::make_unique<UniformPolicy>(c.size());
        };
        return ex;
    }
    if (cfg.policy_name == "exp3") {
        if (!cfg.override_eta)
            throw ConfigError("policy.overrides.eta is required for exp3");
        const double eta = *cfg.override_eta;
        ex.policy_factory = [eta](const GramContext& c) {
            return std::make_unique<Exp3Policy>(c.size(), eta);
        };
        return ex;
    }

    // exp2_kernel: tune, then apply overrides, then build the design at
    // rho = lambda / gamma.
    const double B = ex.seq.B;
    const Index design_iters = cfg.design_max_iters.value_or(default_design_iters(n));
    Params params;
    if (cfg.tuning == "manual") {
        if (!cfg.override_lambda || !cfg.override_gamma || !cfg.override_eta)
            throw ConfigError("manual tuning requires overrides for lambda, gamma and eta");
        params.lambda = *cfg.override_lambda;
        params.gamma = *cfg.override_gamma;
        params.eta = *cfg.override_eta;
        params.B = B;
    } else if (cfg.tuning == "effdim") {
        const double lambda = 1.0 / static_cast<double>(T);
        double d_star;
        if (cfg.d_star_source == "lower") {
            d_star = d_star_estimate(ex.ctx, lambda, design_iters, cfg.design_tol).value;
        } else {
            d_star = std::min(static_cast<double>(n),
                              2.0 * info_gain_greedy(ex.ctx, T, lambda));
        }
        d_star = std::max(d_star, 1e-12);
        params = tune_effdim(T, B, d_star, n);
    } else {
        if (!cfg.decay)
            throw ConfigError("policy.decay (C, beta) is required for the poly/exp tunings");
        DecaySpec decay = *cfg.decay;
        if (cfg.tuning == "poly") {
            decay.kind = DecaySpec::Kind::polynomial;
            if (!(decay.beta > 1.0)) throw ConfigError("policy.decay.beta must exceed 1 for poly");
            params = tune_poly(T, B, decay);
        } else {
            decay.kind = DecaySpec::Kind::exponential;
            if (!(decay.beta > 0.0)) throw ConfigError("policy.decay.beta must be positive");
            params = tune_exp(T, B, decay, n);
        }
    }
    if (cfg.override_lambda) params.lambda = *cfg.override_lambda;
    if (cfg.override_gamma) params.gamma = *cfg.override_gamma;
    if (cfg.override_eta) params.eta = *cfg.override_eta;
    validate(params);

    ex.design = d_optimal(ex.ctx, params.lambda / params.gamma, design_iters, cfg.design_tol);
    ex.params = params;
    ex.warnings = params.warnings;
    if (!ex.design->converged)
        ex.warnings.push_back("exploration design did not reach its gap tolerance");

    const Params p = params;
    const ExplorationDesign d = *ex.design;
    ex.policy_factory = [p, d](const GramContext& c) {
        return std::make_unique<Exp2KernelPolicy>(c, p, d);
    };
    return ex;
}

unsigned thread_cap() {
    if (const char* env = std::getenv("KBANDIT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace kbandit
