#pragma once

#include "mehc/mdp.hpp"
#include "mehc/shaping.hpp"
#include "mehc/ucrl2.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mehc {

/**
 * Two-state example with uninformative rewards.
 *
 * Action 0 stays put; action 1 switches state with probability epsilon.
 * Both actions pay 1 - alpha in state 0 and 1 - beta in state 1 (r_max = 1).
 * Requires 0 < beta < alpha < 1 and 0 < epsilon <= 1.
 */
Mdp toy_mdp(double alpha, double beta, double epsilon);

/// toy_mdp with the state and action names s1, s2 / a1, a2.
std::vector<std::string> toy_state_names();
std::vector<std::string> toy_action_names();

struct RandomMdpOptions {
    /// Skip the planted spanning cycle that makes the MDP communicating.
    bool allow_noncommunicating = false;
    double r_max = 1.0;
    RewardModel reward_model = RewardModel::Deterministic;
};

/// Garnet-style random MDP: each row has `branching` random successors with
/// Dirichlet(1, ..., 1) weights; mean rewards uniform in [0, r_max). A random
/// deterministic spanning cycle is planted on one action per state unless
/// disabled. Deterministic in seed.
Mdp random_mdp(std::size_t n_states, std::size_t n_actions, std::size_t branching,
               std::uint64_t seed, const RandomMdpOptions& options = {});

/// Rejection-samples a valid potential with phi(0) = 0 and other entries
/// uniform in [-scale, scale]. After 1000 failed draws the scale is halved;
/// after 20 halvings Error(NoValidPotential) is thrown.
Potential random_potential(const Mdp& mdp, double scale, std::uint64_t seed);

struct SweepOptions {
    std::size_t branching = 2;
    double potential_scale = 0.5;
    double ratio_tolerance = 1e-9;
};

struct SweepReport {
    std::size_t instances = 0; // generated
    std::size_t skipped = 0;   // saturated gain or zero MEHC
    double min_ratio = 0;
    double max_ratio = 0;
    std::size_t violations = 0;
    double max_residual = 0;
};

/// MEHC ratio kappa(M^phi) / kappa(M) over random communicating instances.
SweepReport sweep_theorem3(std::size_t num_instances, std::size_t n_states, std::size_t n_actions,
                           std::uint64_t seed, const SweepOptions& options = {});

/// JSON text {instances, skipped, min_ratio, max_ratio, violations, max_residual}.
std::string dump_sweep(const SweepReport& report);

struct ExperimentConfig {
    Mdp mdp;
    std::optional<Potential> potential;
    std::uint64_t horizon = 1;
    double delta = 0.05;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path output_dir;
    std::size_t thin = 1;

    /// Throws Error(InvalidArgument) on T < 1, delta outside (0,1), no seeds or thin 0.
    void check() const;
};

struct ExperimentSummary {
    std::vector<std::uint64_t> seeds;
    std::uint64_t horizon = 0;
    double delta = 0;
    double rho_star = 0;
    double mean_final_regret = 0;
    double max_final_regret = 0;
    double mean_avg_reward = 0;
    std::vector<std::size_t> episodes;
};

/// Runs UCRL2 once per seed (on the shaped MDP when a potential is given).
/// Results are returned in seed order.
std::vector<RegretTrace> run_traces(const ExperimentConfig& config);

ExperimentSummary summarize(const ExperimentConfig& config, const std::vector<RegretTrace>& traces);

/// run_traces, then writes trace_seed<seed>.csv per seed and summary.json into
/// config.output_dir (created if missing).
ExperimentSummary run_experiment(const ExperimentConfig& config);

std::string dump_summary(const ExperimentSummary& summary);

} // namespace mehc
