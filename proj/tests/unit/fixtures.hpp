#pragma once

#include "mehc/mdp.hpp"

#include <vector>

namespace mehc::testing {

/// One state, rewards per action.
inline Mdp single_state(std::vector<double> rewards) {
    const std::size_t A = rewards.size();
    return Mdp(1, A, std::vector<double>(A, 1.0), std::move(rewards));
}

/// Deterministic cycle 0 -> 1 -> 2 -> 0 with a single action.
inline Mdp three_cycle(double reward = 0.5) {
    return Mdp(3, 1, {0, 1, 0, /**/ 0, 0, 1, /**/ 1, 0, 0}, {reward, reward, reward});
}

/// Two absorbing states with no way across.
inline Mdp two_absorbing(double r0, double r1) {
    return Mdp(2, 1, {1, 0, /**/ 0, 1}, {r0, r1});
}

} // namespace mehc::testing
