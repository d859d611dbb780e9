#pragma once

#include "mehc/error.hpp"
#include "mehc/rng.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mehc {

/// Probability tolerance used by validation.
inline constexpr double kProbabilityTolerance = 1e-12;

enum class RewardModel {
    /// Every step emits the mean reward.
    Deterministic,
    /// Emits r_max with probability mean / r_max, otherwise 0.
    BernoulliScaled,
};

/**
 * Finite MDP with mean rewards.
 *
 * Transitions are stored densely as an S x A x S table, mean rewards as an
 * S x A table. Construction only checks dimensions; use validate() for the
 * probability and reward-range invariants.
 */
class Mdp {
  public:
    Mdp(std::size_t n_states, std::size_t n_actions, std::vector<double> transition,
        std::vector<double> mean_reward, RewardModel reward_model = RewardModel::Deterministic,
        double r_max = 1.0);

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_actions() const noexcept { return n_actions_; }
    double r_max() const noexcept { return r_max_; }
    RewardModel reward_model() const noexcept { return reward_model_; }

    double transition(std::size_t s, std::size_t a, std::size_t next) const {
        return transition_[(s * n_actions_ + a) * n_states_ + next];
    }
    std::span<const double> row(std::size_t s, std::size_t a) const {
        return {transition_.data() + (s * n_actions_ + a) * n_states_, n_states_};
    }
    double mean_reward(std::size_t s, std::size_t a) const {
        return mean_reward_[s * n_actions_ + a];
    }

    const std::vector<double>& transition_table() const noexcept { return transition_; }
    const std::vector<double>& mean_reward_table() const noexcept { return mean_reward_; }

    /// Copy with the mean rewards replaced (same transitions).
    Mdp with_rewards(std::vector<double> mean_reward, RewardModel model) const;

    /// Divides every transition row by its sum. Rows summing to zero are left alone.
    void renormalize();

    bool operator==(const Mdp&) const = default;

  private:
    std::size_t n_states_;
    std::size_t n_actions_;
    std::vector<double> transition_;
    std::vector<double> mean_reward_;
    RewardModel reward_model_;
    double r_max_;
};

/// Stationary deterministic policy.
struct Policy {
    std::vector<std::size_t> action_of;

    std::size_t operator()(std::size_t s) const { return action_of[s]; }
    bool operator==(const Policy&) const = default;
};

/// Markov chain induced by following a policy.
struct InducedChain {
    std::size_t n_states = 0;
    std::vector<double> transition; // row-major S x S
    std::vector<double> mean_reward;

    double p(std::size_t s, std::size_t next) const { return transition[s * n_states + next]; }
};

struct Violation {
    enum class Kind { RowSum, NegativeProbability, RewardRange, NonFinite, BadRmax };

    Kind kind;
    std::size_t state;
    std::size_t action;
    double value;

    std::string describe() const;
};

/// Every invariant violation of the model; empty iff the model is valid.
std::vector<Violation> validate(const Mdp& mdp);

/// Throws Error(InvalidMdp) listing the first violations, if any.
void require_valid(const Mdp& mdp);

/// Throws Error(InvalidArgument) if the policy does not fit the model.
void check_policy(const Mdp& mdp, const Policy& policy);

InducedChain induced_chain(const Mdp& mdp, const Policy& policy);

struct Step {
    std::size_t next_state;
    double reward;
};

/// Draws one transition and reward. Consumes exactly two uniforms from rng.
Step sample_step(const Mdp& mdp, std::size_t s, std::size_t a, Rng& rng);

/// Number of stationary deterministic policies, saturating at `cap + 1`.
std::size_t count_policies(const Mdp& mdp, std::size_t cap);

/// Calls `visit(policy)` for every stationary deterministic policy, in
/// lexicographic order with state 0 varying fastest.
template <typename Visitor>
void for_each_policy(const Mdp& mdp, Visitor&& visit) {
    Policy policy{std::vector<std::size_t>(mdp.n_states(), 0)};
    for (;;) {
        visit(static_cast<const Policy&>(policy));
        std::size_t s = 0;
        while (s < mdp.n_states() && ++policy.action_of[s] == mdp.n_actions()) {
            policy.action_of[s] = 0;
            ++s;
        }
        if (s == mdp.n_states()) return;
    }
}

} // namespace mehc
