#pragma once

#include "mehc/mdp.hpp"

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace mehc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dense row-major n x n matrix of doubles.
struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t size, double fill = 0.0) : n(size), data(size * size, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }

    /// Largest entry (0 for an empty matrix); +inf propagates.
    double max() const;
};

/// Per-step cost c(s, a) accumulated until the target is hit. Must be nonnegative.
using StepCost = std::function<double(std::size_t, std::size_t)>;

/// Cost 1 per step: hitting costs become expected hitting times.
StepCost unit_cost();

/// Cost r_max - mean_reward(s, a): hitting costs of the MEHC definition.
StepCost reward_gap_cost(const Mdp& mdp);

struct SolverOptions {
    double tolerance = 1e-10;
    std::size_t max_iterations = 1'000'000;
    /// Values above divergence_factor * r_max are reported as +inf.
    double divergence_factor = 1e9;
};

/// Exact gain of a policy from every start state, via recurrent-class
/// decomposition of the induced chain.
std::vector<double> gain_of_policy(const Mdp& mdp, const Policy& policy);

struct OptimalGain {
    double gain = 0;
    /// Bias relative to state 0.
    std::vector<double> bias;
    double bias_span = 0;
    /// Greedy policy for the final bias (lowest action index on ties).
    Policy policy;
};

/**
 * Optimal average reward and bias by relative value iteration.
 *
 * Iterates on the aperiodic transform p' = (p + I) / 2, which has the same
 * gains and half-scaled bias, so periodic chains converge. Stops when the span
 * of one-sweep differences drops below options.tolerance.
 *
 * Throws Error(GainNotConstant) when the per-state optimal gains differ by
 * more than 1e-6, and Error(NoConvergence) at the iteration cap.
 */
OptimalGain optimal_gain(const Mdp& mdp, const SolverOptions& options = {});

/**
 * Minimum expected cost to first hit each target, for every (start, target).
 *
 * Each target is made absorbing with zero cost. States from which the target
 * cannot be reached almost surely (and which cannot stay on zero-cost actions
 * forever) get +inf. The remaining values come from stochastic-shortest-path
 * value iteration, polished by exact policy evaluation of the greedy policy.
 * The diagonal is 0.
 */
SquareMatrix hitting_cost_matrix(const Mdp& mdp, const StepCost& step_cost,
                                 const SolverOptions& options = {});

inline SquareMatrix hitting_time_matrix(const Mdp& mdp) {
    return hitting_cost_matrix(mdp, unit_cost());
}

/// Diameter: max expected hitting time over pairs. 0 for a single state.
double diameter(const Mdp& mdp);

/// Maximum expected hitting cost with cost r_max - mean reward. 0 for a single state.
double mehc(const Mdp& mdp);

/// Largest number of policies oracle_hitting_cost will enumerate.
inline constexpr std::size_t kMaxEnumeratedPolicies = 1'000'000;

/**
 * Brute-force hitting cost: minimum over all stationary deterministic
 * policies of the exact expected cost to hit `target` from `start`.
 *
 * Each policy is evaluated by a linear solve on the target-absorbed chain;
 * a reachable recurrent class that avoids the target and has any positive
 * cost makes that policy's cost +inf. Throws Error(EnumerationTooLarge) when
 * A^S exceeds kMaxEnumeratedPolicies.
 */
double oracle_hitting_cost(const Mdp& mdp, std::size_t start, std::size_t target,
                           const StepCost& step_cost);

/// oracle_hitting_cost for every pair.
SquareMatrix oracle_hitting_cost_matrix(const Mdp& mdp, const StepCost& step_cost);

struct StructuralReport {
    double diameter = 0;
    double mehc = 0;
    double optimal_gain = 0;
    double bias_span = 0;
    SquareMatrix hitting_time;
    SquareMatrix hitting_cost;
};

/// All structural parameters of a valid MDP.
StructuralReport analyze(const Mdp& mdp);

} // namespace mehc
