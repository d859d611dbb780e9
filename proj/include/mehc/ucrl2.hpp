#pragma once

#include "mehc/mdp.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mehc {

/// Observation counts collected by the learner.
struct Statistics {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    double r_max = 1.0;
    std::vector<std::uint64_t> visit_count;      // N(s,a), indexed s * A + a
    std::vector<double> reward_sum;              // indexed s * A + a
    std::vector<std::uint64_t> transition_count; // indexed (s * A + a) * S + s'
    std::uint64_t t = 0;                         // steps taken so far
    std::size_t episode_index = 0;
    std::vector<std::uint64_t> episode_start_counts;

    Statistics() = default;
    Statistics(std::size_t states, std::size_t actions, double reward_bound);

    std::uint64_t visits(std::size_t s, std::size_t a) const { return visit_count[s * n_actions + a]; }
    void record(std::size_t s, std::size_t a, double reward, std::size_t next);
    /// Snapshots N into episode_start_counts and bumps episode_index.
    void start_episode();
};

/// Point estimates the optimistic planner works around.
struct EmpiricalModel {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    double r_max = 1.0;
    std::vector<double> p_hat; // indexed (s * A + a) * S + s'
    std::vector<double> r_hat; // indexed s * A + a

    std::span<const double> row(std::size_t s, std::size_t a) const {
        return {p_hat.data() + (s * n_actions + a) * n_states, n_states};
    }

    /// Empirical means; unvisited pairs get a uniform row and zero reward.
    static EmpiricalModel from_statistics(const Statistics& stats);
    /// The true model's transitions and mean rewards.
    static EmpiricalModel exact(const Mdp& mdp);
};

struct ConfidenceSet {
    std::vector<double> reward_radius;     // half-width, already scaled by r_max
    std::vector<double> transition_radius; // l1 radius
    double delta = 0.05;
};

struct ConfidenceWidths {
    double reward_radius;
    double transition_radius;
};

/**
 * Hoeffding-style widths with the constants of the UCRL2 analysis:
 *   reward     = r_max * sqrt(7 log(2 S A t / delta) / (2 max(1, N)))
 *   transition = sqrt(14 S log(2 A t / delta) / max(1, N))
 */
ConfidenceWidths confidence_widths(std::uint64_t visits, std::uint64_t t, std::size_t n_states,
                                   std::size_t n_actions, double delta, double r_max = 1.0);

/// Widths for every pair at time max(1, stats.t).
ConfidenceSet confidence_set(const Statistics& stats, double delta);

/// Same radii for every pair.
ConfidenceSet uniform_confidence_set(std::size_t n_states, std::size_t n_actions,
                                     double reward_radius, double transition_radius);

/**
 * argmax of sum_j q(j) u(j) over distributions q with |q - p_hat|_1 <= radius.
 *
 * Moves up to radius / 2 mass onto the highest-value state, then drains the
 * lowest-value states until the result sums to one. Ties rank lower indices
 * as higher-valued.
 */
std::vector<double> inner_max_transition(std::span<const double> p_hat, double radius,
                                         std::span<const double> u);

struct EviResult {
    std::vector<double> u; // last iterate, shifted so min(u) = 0
    Policy policy;
    double optimistic_gain = 0;
    std::size_t sweeps = 0;
};

struct EviOptions {
    std::size_t max_iterations = 1'000'000;
    /// Called after every sweep with (i, u_i), unnormalized; i starts at 1.
    std::function<void(std::size_t, std::span<const double>)> on_sweep;
};

/**
 * Extended value iteration over the plausible set around `model`.
 *
 * Starts from u_0 = 0 and stops when the span of u_{i+1} - u_i falls below
 * stop_span. The optimistic gain is the midpoint of that difference's range.
 * Throws Error(NoConvergence) at the iteration cap.
 */
EviResult extended_value_iteration(const EmpiricalModel& model, const ConfidenceSet& confidence,
                                   double stop_span, const EviOptions& options = {});

inline EviResult extended_value_iteration(const Statistics& stats, const ConfidenceSet& confidence,
                                          double stop_span, const EviOptions& options = {}) {
    return extended_value_iteration(EmpiricalModel::from_statistics(stats), confidence, stop_span,
                                    options);
}

struct TraceRecord {
    std::uint64_t t;
    double cumulative_reward;
    double regret;
    std::size_t episode;

    bool operator==(const TraceRecord&) const = default;
};

struct RegretTrace {
    std::vector<TraceRecord> records; // one per step, t = 1..T
    double rho_star = 0;
    std::uint64_t seed = 0;
    std::size_t episodes = 0;

    bool operator==(const RegretTrace&) const = default;
};

struct Ucrl2Options {
    std::size_t initial_state = 0;
};

/**
 * Runs UCRL2 for `horizon` steps.
 *
 * Each episode recomputes the confidence set at the current time, plans with
 * extended value iteration (stop span 1/sqrt(t)) and follows the greedy policy
 * until the visits of the current pair within the episode reach
 * max(1, N at episode start). Regret is accounted against the exact optimal
 * gain of `mdp`.
 */
RegretTrace run_ucrl2(const Mdp& mdp, std::uint64_t horizon, double delta, std::uint64_t seed,
                      const Ucrl2Options& options = {});

/// 34 max(1, kappa) S sqrt(A T log(T / delta)).
double theoretical_bound(double kappa, std::size_t n_states, std::size_t n_actions,
                         double horizon, double delta);

/// Upper bound on the number of episodes after T steps: SA log2(8T / SA) + SA.
double episode_bound(std::size_t n_states, std::size_t n_actions, double horizon);

} // namespace mehc
