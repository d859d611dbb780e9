#include "mehc/mdp.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace mehc {

Mdp::Mdp(std::size_t n_states, std::size_t n_actions, std::vector<double> transition,
         std::vector<double> mean_reward, RewardModel reward_model, double r_max)
    : n_states_(n_states), n_actions_(n_actions), transition_(std::move(transition)),
      mean_reward_(std::move(mean_reward)), reward_model_(reward_model), r_max_(r_max) {
    if (n_states_ == 0 || n_actions_ == 0)
        throw Error(ErrorKind::InvalidArgument, "MDP needs at least one state and one action");
    if (transition_.size() != n_states_ * n_actions_ * n_states_)
        throw Error(ErrorKind::InvalidArgument,
                    "transition table has " + std::to_string(transition_.size()) +
                        " entries, expected S*A*S = " +
                        std::to_string(n_states_ * n_actions_ * n_states_));
    if (mean_reward_.size() != n_states_ * n_actions_)
        throw Error(ErrorKind::InvalidArgument,
                    "mean_reward table has " + std::to_string(mean_reward_.size()) +
                        " entries, expected S*A = " + std::to_string(n_states_ * n_actions_));
}

Mdp Mdp::with_rewards(std::vector<double> mean_reward, RewardModel model) const {
    return Mdp(n_states_, n_actions_, transition_, std::move(mean_reward), model, r_max_);
}

void Mdp::renormalize() {
    for (std::size_t row = 0; row < n_states_ * n_actions_; ++row) {
        auto begin = transition_.begin() + static_cast<std::ptrdiff_t>(row * n_states_);
        auto end = begin + static_cast<std::ptrdiff_t>(n_states_);
        double sum = std::accumulate(begin, end, 0.0);
        if (sum > 0)
            for (auto it = begin; it != end; ++it) *it /= sum;
    }
}

std::string Violation::describe() const {
    std::ostringstream out;
    out.precision(17);
    switch (kind) {
    case Kind::RowSum:
        out << "transition row (" << state << ", " << action << ") sums to " << value;
        break;
    case Kind::NegativeProbability:
        out << "transition row (" << state << ", " << action << ") has negative entry "
            << value;
        break;
    case Kind::RewardRange:
        out << "mean_reward(" << state << ", " << action << ") = " << value
            << " is outside [0, r_max]";
        break;
    case Kind::NonFinite:
        out << "non-finite value at (" << state << ", " << action << ")";
        break;
    case Kind::BadRmax:
        out << "r_max = " << value << " must be positive and finite";
        break;
    }
    return out.str();
}

std::vector<Violation> validate(const Mdp& mdp) {
    std::vector<Violation> out;
    const double r_max = mdp.r_max();
    if (!(r_max > 0) || !std::isfinite(r_max))
        out.push_back({Violation::Kind::BadRmax, 0, 0, r_max});

    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            auto row = mdp.row(s, a);
            double sum = 0;
            bool finite = true;
            for (double p : row) {
                if (!std::isfinite(p)) finite = false;
                if (p < 0) out.push_back({Violation::Kind::NegativeProbability, s, a, p});
                sum += p;
            }
            if (!finite)
                out.push_back({Violation::Kind::NonFinite, s, a, sum});
            else if (std::abs(sum - 1.0) > kProbabilityTolerance)
                out.push_back({Violation::Kind::RowSum, s, a, sum});

            double r = mdp.mean_reward(s, a);
            if (!std::isfinite(r))
                out.push_back({Violation::Kind::NonFinite, s, a, r});
            else if (r < 0 || r > r_max)
                out.push_back({Violation::Kind::RewardRange, s, a, r});
        }
    }
    return out;
}

void require_valid(const Mdp& mdp) {
    auto violations = validate(mdp);
    if (violations.empty()) return;
    std::string message = "MDP has " + std::to_string(violations.size()) + " violation(s): ";
    for (std::size_t i = 0; i < violations.size() && i < 5; ++i) {
        if (i) message += "; ";
        message += violations[i].describe();
    }
    throw Error(ErrorKind::InvalidMdp, message);
}

void check_policy(const Mdp& mdp, const Policy& policy) {
    if (policy.action_of.size() != mdp.n_states())
        throw Error(ErrorKind::InvalidArgument,
                    "policy covers " + std::to_string(policy.action_of.size()) +
                        " states, MDP has " + std::to_string(mdp.n_states()));
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        if (policy.action_of[s] >= mdp.n_actions())
            throw Error(ErrorKind::InvalidArgument,
                        "policy action " + std::to_string(policy.action_of[s]) + " at state " +
                            std::to_string(s) + " is out of range");
}

InducedChain induced_chain(const Mdp& mdp, const Policy& policy) {
    check_policy(mdp, policy);
    const std::size_t n = mdp.n_states();
    InducedChain chain{n, std::vector<double>(n * n), std::vector<double>(n)};
    for (std::size_t s = 0; s < n; ++s) {
        auto row = mdp.row(s, policy(s));
        std::copy(row.begin(), row.end(), chain.transition.begin() + static_cast<std::ptrdiff_t>(s * n));
        chain.mean_reward[s] = mdp.mean_reward(s, policy(s));
    }
    return chain;
}

Step sample_step(const Mdp& mdp, std::size_t s, std::size_t a, Rng& rng) {
    if (s >= mdp.n_states() || a >= mdp.n_actions())
        throw Error(ErrorKind::InvalidArgument, "sample_step: state or action out of range");

    auto row = mdp.row(s, a);
    const double u = rng.uniform();
    std::size_t next = 0;
    std::size_t last_support = 0;
    double cumulative = 0;
    bool found = false;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] <= 0) continue;
        last_support = j;
        cumulative += row[j];
        if (!found && u < cumulative) {
            next = j;
            found = true;
        }
    }
    // rounding can leave u above the accumulated mass
    if (!found) next = last_support;

    const double mean = mdp.mean_reward(s, a);
    const double v = rng.uniform();
    double reward = mean;
    if (mdp.reward_model() == RewardModel::BernoulliScaled)
        reward = v < mean / mdp.r_max() ? mdp.r_max() : 0.0;
    return {next, reward};
}

std::size_t count_policies(const Mdp& mdp, std::size_t cap) {
    std::size_t count = 1;
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        if (count > cap / mdp.n_actions()) return cap + 1;
        count *= mdp.n_actions();
    }
    return count;
}

} // namespace mehc
