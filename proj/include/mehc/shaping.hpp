#pragma once

#include "mehc/mdp.hpp"
#include "mehc/solve.hpp"

#include <vector>

namespace mehc {

/// Shaped means may leave [0, r_max] by at most this much.
inline constexpr double kShapingTolerance = 1e-12;

/// State potential for potential-based reward shaping.
struct Potential {
    std::vector<double> phi;

    Potential operator-() const;
    bool operator==(const Potential&) const = default;
};

struct ShapingViolation {
    std::size_t state;
    std::size_t action;
    double shaped_mean;
};

/// r(s,a) - phi(s) + sum_s' p(s'|s,a) phi(s') for every pair, indexed s * A + a.
std::vector<double> shaped_means(const Mdp& mdp, const Potential& potential);

/// Pairs whose shaped mean leaves [0, r_max] by more than kShapingTolerance.
std::vector<ShapingViolation> check_validity(const Mdp& mdp, const Potential& potential);

/**
 * The shaped MDP: same transitions, shaped mean rewards, deterministic reward
 * model. Sampled shaped rewards from a stochastic base could leave
 * [0, r_max] even when the means do not, so only mean-level rewards are kept.
 * Throws Error(ShapingOutOfBounds) if any shaped mean is out of range.
 */
Mdp apply_potential(const Mdp& mdp, const Potential& potential);

/// Largest |gain(M, pi, s) - gain(M^phi, pi, s)| over the given policies and all states.
double verify_pi_equivalence(const Mdp& mdp, const Potential& potential,
                             const std::vector<Policy>& policies);

/// Every stationary deterministic policy of the model (use on small models only).
std::vector<Policy> all_policies(const Mdp& mdp);

/**
 * Residuals c_phi(s,s') - (c(s,s') + phi(s) - phi(s')) of the shaped
 * hitting-cost identity, both sides from independent SSP solves.
 *
 * Requires a finite MEHC and an unsaturated optimal gain, since the identity
 * needs the minimizing policies to hit the target. Throws
 * Error(PreconditionViolated) otherwise.
 */
SquareMatrix shaped_cost_shift(const Mdp& mdp, const Potential& potential);

/// Largest absolute entry of a residual matrix (NaN entries count as +inf).
double max_abs(const SquareMatrix& residuals);

} // namespace mehc
