#include "mehc/shaping.hpp"

#include <algorithm>
#include <cmath>

namespace mehc {

namespace {

void check_potential(const Mdp& mdp, const Potential& potential) {
    if (potential.phi.size() != mdp.n_states())
        throw Error(ErrorKind::InvalidArgument,
                    "potential has " + std::to_string(potential.phi.size()) +
                        " entries, MDP has " + std::to_string(mdp.n_states()) + " states");
    for (std::size_t s = 0; s < potential.phi.size(); ++s)
        if (!std::isfinite(potential.phi[s]))
            throw Error(ErrorKind::InvalidArgument,
                        "potential entry " + std::to_string(s) + " is not finite");
}

} // namespace

Potential Potential::operator-() const {
    Potential negated{phi};
    for (double& v : negated.phi) v = -v;
    return negated;
}

std::vector<double> shaped_means(const Mdp& mdp, const Potential& potential) {
    check_potential(mdp, potential);
    std::vector<double> means(mdp.n_states() * mdp.n_actions());
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            double expected = 0;
            auto row = mdp.row(s, a);
            for (std::size_t j = 0; j < row.size(); ++j) expected += row[j] * potential.phi[j];
            means[s * mdp.n_actions() + a] = mdp.mean_reward(s, a) - potential.phi[s] + expected;
        }
    return means;
}

std::vector<ShapingViolation> check_validity(const Mdp& mdp, const Potential& potential) {
    const auto means = shaped_means(mdp, potential);
    std::vector<ShapingViolation> out;
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            double r = means[s * mdp.n_actions() + a];
            if (r < -kShapingTolerance || r > mdp.r_max() + kShapingTolerance)
                out.push_back({s, a, r});
        }
    return out;
}

Mdp apply_potential(const Mdp& mdp, const Potential& potential) {
    const auto violations = check_validity(mdp, potential);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw Error(ErrorKind::ShapingOutOfBounds,
                    std::to_string(violations.size()) + " shaped mean(s) outside [0, r_max]; first at (" +
                        std::to_string(v.state) + ", " + std::to_string(v.action) +
                        ") = " + std::to_string(v.shaped_mean));
    }
    return mdp.with_rewards(shaped_means(mdp, potential), RewardModel::Deterministic);
}

double verify_pi_equivalence(const Mdp& mdp, const Potential& potential,
                             const std::vector<Policy>& policies) {
    const Mdp shaped = apply_potential(mdp, potential);
    double worst = 0;
    for (const auto& policy : policies) {
        const auto original = gain_of_policy(mdp, policy);
        const auto reshaped = gain_of_policy(shaped, policy);
        for (std::size_t s = 0; s < original.size(); ++s)
            worst = std::max(worst, std::abs(original[s] - reshaped[s]));
    }
    return worst;
}

std::vector<Policy> all_policies(const Mdp& mdp) {
    if (count_policies(mdp, kMaxEnumeratedPolicies) > kMaxEnumeratedPolicies)
        throw Error(ErrorKind::EnumerationTooLarge, "too many policies to enumerate");
    std::vector<Policy> out;
    for_each_policy(mdp, [&](const Policy& p) { out.push_back(p); });
    return out;
}

SquareMatrix shaped_cost_shift(const Mdp& mdp, const Potential& potential) {
    const Mdp shaped = apply_potential(mdp, potential);
    const auto costs = hitting_cost_matrix(mdp, reward_gap_cost(mdp));
    if (!std::isfinite(costs.max()))
        throw Error(ErrorKind::PreconditionViolated,
                    "maximum expected hitting cost is infinite; the shift identity needs finite hitting");
    const double gain = optimal_gain(mdp).gain;
    if (gain >= mdp.r_max() - kShapingTolerance)
        throw Error(ErrorKind::PreconditionViolated,
                    "optimal gain is saturated (rho* = r_max); minimizing policies need not hit the target");

    const auto shaped_costs = hitting_cost_matrix(shaped, reward_gap_cost(shaped));
    const auto& phi = potential.phi;
    SquareMatrix residuals(mdp.n_states());
    for (std::size_t s = 0; s < residuals.n; ++s)
        for (std::size_t t = 0; t < residuals.n; ++t)
            residuals(s, t) = shaped_costs(s, t) - (costs(s, t) + phi[s] - phi[t]);
    for (std::size_t s = 0; s < residuals.n; ++s) residuals(s, s) = 0.0;
    return residuals;
}

double max_abs(const SquareMatrix& residuals) {
    double worst = 0;
    for (double r : residuals.data) {
        if (std::isnan(r)) return kInfinity;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

} // namespace mehc
