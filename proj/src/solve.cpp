#include "mehc/solve.hpp"

#include "graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace mehc {

namespace {

constexpr double kNegativeCostTolerance = 1e-12;
constexpr double kGainTolerance = 1e-6;
constexpr double kAperiodicity = 0.5;

/// Cost table indexed s * A + a, with tiny negative values clamped to zero.
std::vector<double> tabulate_cost(const Mdp& mdp, const StepCost& step_cost) {
    std::vector<double> cost(mdp.n_states() * mdp.n_actions());
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            double c = step_cost(s, a);
            if (std::isnan(c) || c < -kNegativeCostTolerance)
                throw Error(ErrorKind::InvalidArgument,
                            "negative step cost " + std::to_string(c) + " at (" +
                                std::to_string(s) + ", " + std::to_string(a) + ")");
            cost[s * mdp.n_actions() + a] = std::max(c, 0.0);
        }
    return cost;
}

detail::Graph chain_graph(const InducedChain& chain) {
    detail::Graph graph(chain.n_states);
    for (std::size_t s = 0; s < chain.n_states; ++s)
        for (std::size_t j = 0; j < chain.n_states; ++j)
            if (chain.p(s, j) > 0) graph[s].push_back(j);
    return graph;
}

double span(const std::vector<double>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

/// Stationary distribution of an irreducible block of the chain.
std::vector<double> stationary(const InducedChain& chain, const std::vector<std::size_t>& members) {
    const auto m = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd system(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            system(j, i) = chain.p(members[static_cast<std::size_t>(i)],
                                   members[static_cast<std::size_t>(j)]) -
                           (i == j ? 1.0 : 0.0);
    system.row(m - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(m - 1) = 1.0;
    Eigen::VectorXd pi = system.fullPivLu().solve(rhs);
    return {pi.data(), pi.data() + m};
}

/// State sets for stochastic-shortest-path solves toward one target.
struct TargetSets {
    std::vector<bool> zero;   // min cost exactly 0 (includes the target)
    std::vector<bool> finite; // min cost finite
};

bool support_within(std::span<const double> row, const std::vector<bool>& set) {
    for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] > 0 && !set[j]) return false;
    return true;
}

TargetSets classify_states(const Mdp& mdp, const std::vector<double>& cost, std::size_t target) {
    const std::size_t n = mdp.n_states();
    const std::size_t n_actions = mdp.n_actions();

    // Greatest set from which zero-cost actions never leave the set.
    std::vector<bool> zero(n, true);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (!zero[s] || s == target) continue;
            bool keep = false;
            for (std::size_t a = 0; a < n_actions && !keep; ++a)
                keep = cost[s * n_actions + a] == 0.0 && support_within(mdp.row(s, a), zero);
            if (!keep) {
                zero[s] = false;
                changed = true;
            }
        }
    }

    // Almost-sure reachability of the zero set: repeatedly drop states that
    // cannot reach it with positive probability using actions that stay inside.
    std::vector<bool> finite(n, true);
    for (bool changed = true; changed;) {
        std::vector<bool> reach = zero;
        for (bool grew = true; grew;) {
            grew = false;
            for (std::size_t s = 0; s < n; ++s) {
                if (reach[s] || !finite[s]) continue;
                for (std::size_t a = 0; a < n_actions; ++a) {
                    auto row = mdp.row(s, a);
                    if (!support_within(row, finite)) continue;
                    bool hits = false;
                    for (std::size_t j = 0; j < n && !hits; ++j) hits = row[j] > 0 && reach[j];
                    if (hits) {
                        reach[s] = true;
                        grew = true;
                        break;
                    }
                }
            }
        }
        changed = false;
        for (std::size_t s = 0; s < n; ++s)
            if (finite[s] && !reach[s]) {
                finite[s] = false;
                changed = true;
            }
    }
    return {zero, finite};
}

/// Exact cost of a policy on the free states (finite but not zero); other
/// states keep their value in `values`. Returns false if the system is singular
/// or the solution is not a plausible nonnegative cost.
bool evaluate_policy_costs(const Mdp& mdp, const std::vector<double>& cost,
                           const std::vector<std::size_t>& free_states,
                           const std::vector<std::size_t>& policy, std::vector<double>& values) {
    const auto m = static_cast<Eigen::Index>(free_states.size());
    if (m == 0) return true;
    std::vector<Eigen::Index> position(mdp.n_states(), -1);
    for (Eigen::Index i = 0; i < m; ++i) position[free_states[static_cast<std::size_t>(i)]] = i;

    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const std::size_t s = free_states[static_cast<std::size_t>(i)];
        const std::size_t a = policy[s];
        rhs(i) = cost[s * mdp.n_actions() + a];
        auto row = mdp.row(s, a);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (row[j] <= 0) continue;
            if (position[j] >= 0)
                system(i, position[j]) -= row[j];
            else
                rhs(i) += row[j] * values[j];
        }
    }
    auto lu = system.fullPivLu();
    if (!lu.isInvertible()) return false;
    Eigen::VectorXd solution = lu.solve(rhs);
    for (Eigen::Index i = 0; i < m; ++i)
        if (!std::isfinite(solution(i)) || solution(i) < -1e-9) return false;
    for (Eigen::Index i = 0; i < m; ++i)
        values[free_states[static_cast<std::size_t>(i)]] = std::max(solution(i), 0.0);
    return true;
}

/// Minimum expected cost to `target` from every state.
std::vector<double> solve_target(const Mdp& mdp, const std::vector<double>& cost,
                                 std::size_t target, const SolverOptions& options) {
    const std::size_t n = mdp.n_states();
    const std::size_t n_actions = mdp.n_actions();
    const auto sets = classify_states(mdp, cost, target);

    std::vector<double> values(n, 0.0);
    std::vector<std::size_t> free_states;
    for (std::size_t s = 0; s < n; ++s) {
        if (!sets.finite[s])
            values[s] = kInfinity;
        else if (!sets.zero[s])
            free_states.push_back(s);
    }
    if (free_states.empty()) return values;

    // Actions that keep the process inside the finite set.
    std::vector<std::vector<std::size_t>> allowed(n);
    for (std::size_t s : free_states)
        for (std::size_t a = 0; a < n_actions; ++a)
            if (support_within(mdp.row(s, a), sets.finite)) allowed[s].push_back(a);

    auto q_value = [&](std::size_t s, std::size_t a) {
        double q = cost[s * n_actions + a];
        auto row = mdp.row(s, a);
        for (std::size_t j = 0; j < n; ++j)
            if (row[j] > 0) q += row[j] * values[j];
        return q;
    };

    const double cap = options.divergence_factor * mdp.r_max();
    bool diverged = false;
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        double change = 0;
        for (std::size_t s : free_states) {
            double best = kInfinity;
            for (std::size_t a : allowed[s]) best = std::min(best, q_value(s, a));
            change = std::max(change, std::abs(best - values[s]));
            values[s] = best;
        }
        if (change < options.tolerance) break;
        if (std::any_of(free_states.begin(), free_states.end(),
                        [&](std::size_t s) { return values[s] > cap; })) {
            diverged = true;
            break;
        }
    }

    if (!diverged) {
        // Policy-iteration polish: exact evaluation of the greedy policy.
        std::vector<std::size_t> policy(n, 0);
        for (std::size_t s : free_states) {
            std::size_t best_action = allowed[s].front();
            double best = q_value(s, best_action);
            for (std::size_t a : allowed[s]) {
                double q = q_value(s, a);
                if (q < best) {
                    best = q;
                    best_action = a;
                }
            }
            policy[s] = best_action;
        }
        std::vector<double> polished = values;
        for (int round = 0; round < 100; ++round) {
            if (!evaluate_policy_costs(mdp, cost, free_states, policy, polished)) break;
            values = polished;
            bool improved = false;
            for (std::size_t s : free_states) {
                double current = q_value(s, policy[s]);
                for (std::size_t a : allowed[s]) {
                    double q = q_value(s, a);
                    if (q < current - 1e-12 * (1.0 + std::abs(current))) {
                        current = q;
                        policy[s] = a;
                        improved = true;
                    }
                }
            }
            if (!improved) break;
        }
    }

    for (std::size_t s : free_states)
        if (values[s] > cap) values[s] = kInfinity;
    return values;
}

double max_off_diagonal(const SquareMatrix& m) {
    double best = 0;
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j)
            if (i != j) best = std::max(best, m(i, j));
    return best;
}

/// Expected cost to absorption for one policy; see oracle_hitting_cost.
double policy_hitting_cost(const Mdp& mdp, const std::vector<double>& cost, const Policy& policy,
                           std::size_t start, std::size_t target) {
    InducedChain chain = induced_chain(mdp, policy);
    const std::size_t n = chain.n_states;
    for (std::size_t j = 0; j < n; ++j) chain.transition[target * n + j] = j == target ? 1.0 : 0.0;
    std::vector<double> step(n);
    for (std::size_t s = 0; s < n; ++s)
        step[s] = s == target ? 0.0 : cost[s * mdp.n_actions() + policy(s)];

    const auto graph = chain_graph(chain);
    const auto reach = detail::reachable_from(graph, start);
    const auto components = detail::strongly_connected(graph);
    const auto closed = detail::closed_components(graph, components);

    std::vector<bool> absorbed(n, false);
    for (std::size_t s = 0; s < n; ++s) {
        if (!reach[s] || !closed[components.component_of[s]]) continue;
        if (step[s] > 0) return kInfinity; // recurrent class avoiding the target with positive cost
        absorbed[s] = true;
    }

    std::vector<std::size_t> transient;
    std::vector<Eigen::Index> position(n, -1);
    for (std::size_t s = 0; s < n; ++s)
        if (reach[s] && !absorbed[s]) {
            position[s] = static_cast<Eigen::Index>(transient.size());
            transient.push_back(s);
        }
    if (position[start] < 0) return 0.0;

    const auto m = static_cast<Eigen::Index>(transient.size());
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const std::size_t s = transient[static_cast<std::size_t>(i)];
        rhs(i) = step[s];
        for (std::size_t j = 0; j < n; ++j)
            if (position[j] >= 0) system(i, position[j]) -= chain.p(s, j);
    }
    Eigen::VectorXd v = system.fullPivLu().solve(rhs);
    return v(position[start]);
}

/// Replaces the iterative gain and bias by the exact solution of
/// rho + h = r_pi + P_pi h, h(0) = 0, for the greedy policy, provided the
/// system is nonsingular and the solution satisfies the optimality equation.
void polish_gain(const Mdp& mdp, OptimalGain& result) {
    const std::size_t n = mdp.n_states();
    const auto m = static_cast<Eigen::Index>(n);
    // unknowns: x(0) = rho, x(j) = h(j) for j >= 1
    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs(m);
    for (std::size_t s = 0; s < n; ++s) {
        const auto i = static_cast<Eigen::Index>(s);
        const std::size_t a = result.policy(s);
        system(i, 0) = 1.0;
        if (s > 0) system(i, i) += 1.0;
        auto row = mdp.row(s, a);
        for (std::size_t j = 1; j < n; ++j) system(i, static_cast<Eigen::Index>(j)) -= row[j];
        rhs(i) = mdp.mean_reward(s, a);
    }
    auto lu = system.fullPivLu();
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd x = lu.solve(rhs);
    std::vector<double> bias(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) bias[j] = x(static_cast<Eigen::Index>(j));
    const double gain = x(0);

    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            double q = mdp.mean_reward(s, a);
            auto row = mdp.row(s, a);
            for (std::size_t j = 0; j < n; ++j) q += row[j] * bias[j];
            if (q - bias[s] - gain > 1e-9) return;
        }
    if (std::abs(gain - result.gain) > 1e-6) return;
    result.gain = gain;
    result.bias = std::move(bias);
}

} // namespace

double SquareMatrix::max() const {
    if (data.empty()) return 0;
    return *std::max_element(data.begin(), data.end());
}

StepCost unit_cost() {
    return [](std::size_t, std::size_t) { return 1.0; };
}

StepCost reward_gap_cost(const Mdp& mdp) {
    return [&mdp](std::size_t s, std::size_t a) { return mdp.r_max() - mdp.mean_reward(s, a); };
}

std::vector<double> gain_of_policy(const Mdp& mdp, const Policy& policy) {
    const InducedChain chain = induced_chain(mdp, policy);
    const std::size_t n = chain.n_states;
    const auto graph = chain_graph(chain);
    const auto components = detail::strongly_connected(graph);
    const auto closed = detail::closed_components(graph, components);

    std::vector<double> gain(n, 0.0);
    std::vector<bool> recurrent(n, false);
    std::vector<std::vector<std::size_t>> members(components.count);
    for (std::size_t s = 0; s < n; ++s) members[components.component_of[s]].push_back(s);

    for (std::size_t c = 0; c < components.count; ++c) {
        if (!closed[c]) continue;
        const auto pi = stationary(chain, members[c]);
        double g = 0;
        for (std::size_t i = 0; i < members[c].size(); ++i) g += pi[i] * chain.mean_reward[members[c][i]];
        for (std::size_t s : members[c]) {
            gain[s] = g;
            recurrent[s] = true;
        }
    }

    // Transient states: g_T = (I - Q)^{-1} P_{T,R} g_R.
    std::vector<std::size_t> transient;
    std::vector<Eigen::Index> position(n, -1);
    for (std::size_t s = 0; s < n; ++s)
        if (!recurrent[s]) {
            position[s] = static_cast<Eigen::Index>(transient.size());
            transient.push_back(s);
        }
    if (transient.empty()) return gain;

    const auto m = static_cast<Eigen::Index>(transient.size());
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const std::size_t s = transient[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < n; ++j) {
            const double p = chain.p(s, j);
            if (p <= 0) continue;
            if (recurrent[j])
                rhs(i) += p * gain[j];
            else
                system(i, position[j]) -= p;
        }
    }
    Eigen::VectorXd g = system.fullPivLu().solve(rhs);
    for (Eigen::Index i = 0; i < m; ++i) gain[transient[static_cast<std::size_t>(i)]] = g(i);
    return gain;
}

namespace {

/// No action can move probability toward states with a larger per-state gain.
bool gain_vector_is_stable(const Mdp& mdp, const std::vector<double>& gain) {
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            double expected = 0;
            auto row = mdp.row(s, a);
            for (std::size_t j = 0; j < row.size(); ++j) expected += row[j] * gain[j];
            if (expected > gain[s] + 1e-10) return false;
        }
    return true;
}

} // namespace

OptimalGain optimal_gain(const Mdp& mdp, const SolverOptions& options) {
    require_valid(mdp);
    const std::size_t n = mdp.n_states();
    const std::size_t n_actions = mdp.n_actions();

    std::vector<double> u(n, 0.0), next(n), diff(n), previous_diff(n, kInfinity);
    auto backup = [&](std::size_t s, std::size_t a, const std::vector<double>& values) {
        double expected = 0;
        auto row = mdp.row(s, a);
        for (std::size_t j = 0; j < n; ++j) expected += row[j] * values[j];
        return mdp.mean_reward(s, a) + kAperiodicity * values[s] + (1 - kAperiodicity) * expected;
    };

    double gain = 0;
    bool converged = false;
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        for (std::size_t s = 0; s < n; ++s) {
            double best = -kInfinity;
            for (std::size_t a = 0; a < n_actions; ++a) best = std::max(best, backup(s, a, u));
            next[s] = best;
            diff[s] = best - u[s];
        }
        auto [lo, hi] = std::minmax_element(diff.begin(), diff.end());
        const double diff_span = *hi - *lo;
        double drift = 0;
        for (std::size_t s = 0; s < n; ++s) drift = std::max(drift, std::abs(diff[s] - previous_diff[s]));

        if (diff_span < options.tolerance || (drift < 1e-13 && diff_span <= kGainTolerance)) {
            gain = 0.5 * (*lo + *hi);
            converged = true;
        } else if (drift < 1e-13 && gain_vector_is_stable(mdp, diff)) {
            throw Error(ErrorKind::GainNotConstant,
                        "optimal gain depends on the start state (per-state gains range over [" +
                            std::to_string(*lo) + ", " + std::to_string(*hi) + "])");
        }
        const double reference = next[0];
        for (std::size_t s = 0; s < n; ++s) u[s] = next[s] - reference;
        if (converged) break;
        previous_diff = diff;
    }
    if (!converged)
        throw Error(ErrorKind::NoConvergence, "relative value iteration hit the iteration cap");

    OptimalGain result;
    result.gain = gain;
    result.bias.resize(n);
    for (std::size_t s = 0; s < n; ++s) result.bias[s] = (1 - kAperiodicity) * u[s];
    result.policy.action_of.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        std::size_t best_action = 0;
        double best = backup(s, 0, u);
        for (std::size_t a = 1; a < n_actions; ++a) {
            double q = backup(s, a, u);
            if (q > best) {
                best = q;
                best_action = a;
            }
        }
        result.policy.action_of[s] = best_action;
    }
    polish_gain(mdp, result);
    result.bias_span = span(result.bias);
    return result;
}

SquareMatrix hitting_cost_matrix(const Mdp& mdp, const StepCost& step_cost,
                                 const SolverOptions& options) {
    const auto cost = tabulate_cost(mdp, step_cost);
    const std::size_t n = mdp.n_states();
    SquareMatrix result(n);
    for (std::size_t target = 0; target < n; ++target) {
        const auto values = solve_target(mdp, cost, target, options);
        for (std::size_t s = 0; s < n; ++s) result(s, target) = s == target ? 0.0 : values[s];
    }
    return result;
}

double diameter(const Mdp& mdp) {
    return max_off_diagonal(hitting_time_matrix(mdp));
}

double mehc(const Mdp& mdp) {
    return max_off_diagonal(hitting_cost_matrix(mdp, reward_gap_cost(mdp)));
}

double oracle_hitting_cost(const Mdp& mdp, std::size_t start, std::size_t target,
                           const StepCost& step_cost) {
    if (start >= mdp.n_states() || target >= mdp.n_states())
        throw Error(ErrorKind::InvalidArgument, "oracle_hitting_cost: state out of range");
    if (count_policies(mdp, kMaxEnumeratedPolicies) > kMaxEnumeratedPolicies)
        throw Error(ErrorKind::EnumerationTooLarge,
                    "A^S exceeds " + std::to_string(kMaxEnumeratedPolicies) + " policies");
    if (start == target) return 0.0;

    const auto cost = tabulate_cost(mdp, step_cost);
    double best = kInfinity;
    for_each_policy(mdp, [&](const Policy& policy) {
        best = std::min(best, policy_hitting_cost(mdp, cost, policy, start, target));
    });
    return best;
}

SquareMatrix oracle_hitting_cost_matrix(const Mdp& mdp, const StepCost& step_cost) {
    SquareMatrix result(mdp.n_states());
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        for (std::size_t t = 0; t < mdp.n_states(); ++t)
            result(s, t) = oracle_hitting_cost(mdp, s, t, step_cost);
    return result;
}

StructuralReport analyze(const Mdp& mdp) {
    require_valid(mdp);
    StructuralReport report;
    report.hitting_time = hitting_time_matrix(mdp);
    report.hitting_cost = hitting_cost_matrix(mdp, reward_gap_cost(mdp));
    report.diameter = max_off_diagonal(report.hitting_time);
    report.mehc = max_off_diagonal(report.hitting_cost);
    const auto gain = optimal_gain(mdp);
    report.optimal_gain = gain.gain;
    report.bias_span = gain.bias_span;
    return report;
}

} // namespace mehc
