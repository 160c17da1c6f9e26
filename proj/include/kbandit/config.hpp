#pragma once

#include "kbandit/sim.hpp"

#include <optional>
#include <string>

namespace kbandit {

/// Parsed experiment configuration. The on-disk form is a JSON file with
/// the exhaustive top-level keys kernel, actions, adversary, policy,
/// horizon, seeds, design, output_dir; unknown keys anywhere are rejected
/// with the offending key named.
struct ExperimentConfig {
    KernelSpec kernel;

    // exactly one of grid / points file
    std::optional<Index> actions_d;
    std::optional<Index> actions_n_per_axis;
    std::optional<std::string> actions_points_csv;

    AdversarySpec adversary;

    std::string policy_name = "exp2_kernel";  // exp2_kernel | uniform | exp3
    std::string tuning = "effdim";            // effdim | poly | exp | manual
    std::optional<double> override_lambda;
    std::optional<double> override_gamma;
    std::optional<double> override_eta;
    std::optional<DecaySpec> decay;
    std::string d_star_source = "lower";  // lower (D-optimal) | upper (info gain)

    Index horizon = 1;
    std::vector<std::uint64_t> seeds;

    std::optional<Index> design_max_iters;
    double design_tol = 1e-6;

    std::string output_dir = ".";
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON serialization; parsing it back yields an equivalent
/// configuration (config round-trip).
std::string serialize_config(const ExperimentConfig& cfg);

/// Fully assembled experiment: immutable inputs shared across seeds plus a
/// factory producing one fresh policy per episode. The factory takes the
/// context explicitly so the Experiment stays safely movable.
struct Experiment {
    GramContext ctx;
    LossSequence seq;
    std::optional<Params> params;             // exp2_kernel only
    std::optional<ExplorationDesign> design;  // exp2_kernel only
    std::function<std::unique_ptr<Policy>(const GramContext&)> policy_factory;
    std::vector<std::string> warnings;

    std::unique_ptr<Policy> make_policy() const { return policy_factory(ctx); }
};

/// Builds kernel, Gram context, loss sequence, tuned parameters and
/// exploration design for the configured horizon. `horizon_override`
/// supports sweeps that retune per horizon.
Experiment assemble(const ExperimentConfig& cfg, std::optional<Index> horizon_override = {});

/// Worker cap: KBANDIT_THREADS when set, else hardware concurrency.
unsigned thread_cap();

}  // namespace kbandit
