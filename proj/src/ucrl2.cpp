#include "mehc/ucrl2.hpp"

#include "mehc/solve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mehc {

Statistics::Statistics(std::size_t states, std::size_t actions, double reward_bound)
    : n_states(states), n_actions(actions), r_max(reward_bound),
      visit_count(states * actions, 0), reward_sum(states * actions, 0.0),
      transition_count(states * actions * states, 0), episode_start_counts(states * actions, 0) {}

void Statistics::record(std::size_t s, std::size_t a, double reward, std::size_t next) {
    const std::size_t pair = s * n_actions + a;
    ++visit_count[pair];
    reward_sum[pair] += reward;
    ++transition_count[pair * n_states + next];
    ++t;
}

void Statistics::start_episode() {
    episode_start_counts = visit_count;
    ++episode_index;
}

EmpiricalModel EmpiricalModel::from_statistics(const Statistics& stats) {
    EmpiricalModel model{stats.n_states, stats.n_actions, stats.r_max,
                         std::vector<double>(stats.transition_count.size()),
                         std::vector<double>(stats.visit_count.size())};
    for (std::size_t pair = 0; pair < stats.visit_count.size(); ++pair) {
        const auto n = stats.visit_count[pair];
        for (std::size_t j = 0; j < stats.n_states; ++j) {
            const std::size_t k = pair * stats.n_states + j;
            model.p_hat[k] = n == 0 ? 1.0 / static_cast<double>(stats.n_states)
                                    : static_cast<double>(stats.transition_count[k]) / static_cast<double>(n);
        }
        model.r_hat[pair] = n == 0 ? 0.0 : stats.reward_sum[pair] / static_cast<double>(n);
    }
    return model;
}

EmpiricalModel EmpiricalModel::exact(const Mdp& mdp) {
    return {mdp.n_states(), mdp.n_actions(), mdp.r_max(), mdp.transition_table(),
            mdp.mean_reward_table()};
}

ConfidenceWidths confidence_widths(std::uint64_t visits, std::uint64_t t, std::size_t n_states,
                                   std::size_t n_actions, double delta, double r_max) {
    if (!(delta > 0 && delta < 1))
        throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1)");
    if (t < 1) throw Error(ErrorKind::InvalidArgument, "t must be at least 1");
    const double n = static_cast<double>(std::max<std::uint64_t>(1, visits));
    const double S = static_cast<double>(n_states);
    const double A = static_cast<double>(n_actions);
    const double time = static_cast<double>(t);
    return {r_max * std::sqrt(7.0 * std::log(2.0 * S * A * time / delta) / (2.0 * n)),
            std::sqrt(14.0 * S * std::log(2.0 * A * time / delta) / n)};
}

ConfidenceSet confidence_set(const Statistics& stats, double delta) {
    ConfidenceSet set{std::vector<double>(stats.visit_count.size()),
                      std::vector<double>(stats.visit_count.size()), delta};
    const std::uint64_t t = std::max<std::uint64_t>(1, stats.t);
    for (std::size_t pair = 0; pair < stats.visit_count.size(); ++pair) {
        auto w = confidence_widths(stats.visit_count[pair], t, stats.n_states, stats.n_actions,
                                   delta, stats.r_max);
        set.reward_radius[pair] = w.reward_radius;
        set.transition_radius[pair] = w.transition_radius;
    }
    return set;
}

ConfidenceSet uniform_confidence_set(std::size_t n_states, std::size_t n_actions,
                                     double reward_radius, double transition_radius) {
    return {std::vector<double>(n_states * n_actions, reward_radius),
            std::vector<double>(n_states * n_actions, transition_radius), 0.0};
}

std::vector<double> inner_max_transition(std::span<const double> p_hat, double radius,
                                         std::span<const double> u) {
    const std::size_t n = p_hat.size();
    std::vector<double> p(p_hat.begin(), p_hat.end());
    if (n == 0 || radius <= 0) return p;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });

    const std::size_t best = order.front();
    p[best] = std::min(1.0, p_hat[best] + radius / 2.0);
    double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (std::size_t k = n; k-- > 1 && total > 1.0;) {
        const std::size_t j = order[k];
        const double removed = std::min(p[j], total - 1.0);
        p[j] -= removed;
        total -= removed;
    }
    return p;
}

EviResult extended_value_iteration(const EmpiricalModel& model, const ConfidenceSet& confidence,
                                   double stop_span, const EviOptions& options) {
    if (!(stop_span > 0)) throw Error(ErrorKind::InvalidArgument, "stop_span must be positive");
    const std::size_t n = model.n_states;
    const std::size_t n_actions = model.n_actions;

    std::vector<double> u(n, 0.0), next(n), diff(n);
    Policy policy{std::vector<std::size_t>(n, 0)};

    for (std::size_t sweep = 1; sweep <= options.max_iterations; ++sweep) {
        for (std::size_t s = 0; s < n; ++s) {
            double best = -kInfinity;
            for (std::size_t a = 0; a < n_actions; ++a) {
                const std::size_t pair = s * n_actions + a;
                const double reward =
                    std::min(model.r_hat[pair] + confidence.reward_radius[pair], model.r_max);
                const auto p = inner_max_transition(model.row(s, a), confidence.transition_radius[pair], u);
                double value = reward;
                for (std::size_t j = 0; j < n; ++j) value += p[j] * u[j];
                if (value > best) {
                    best = value;
                    policy.action_of[s] = a;
                }
            }
            next[s] = best;
            diff[s] = best - u[s];
        }
        if (options.on_sweep) options.on_sweep(sweep, next);

        auto [lo, hi] = std::minmax_element(diff.begin(), diff.end());
        const double gain = 0.5 * (*lo + *hi);
        const bool done = *hi - *lo < stop_span;
        const double shift = *std::min_element(next.begin(), next.end());
        for (std::size_t s = 0; s < n; ++s) u[s] = next[s] - shift;
        if (done) return {u, policy, gain, sweep};
    }
    throw Error(ErrorKind::NoConvergence, "extended value iteration hit the iteration cap");
}

RegretTrace run_ucrl2(const Mdp& mdp, std::uint64_t horizon, double delta, std::uint64_t seed,
                      const Ucrl2Options& options) {
    require_valid(mdp);
    if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1");
    if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1)");
    if (options.initial_state >= mdp.n_states())
        throw Error(ErrorKind::InvalidArgument, "initial state out of range");

    const std::size_t n_actions = mdp.n_actions();
    RegretTrace trace;
    trace.rho_star = optimal_gain(mdp).gain;
    trace.seed = seed;
    trace.records.reserve(horizon);

    Rng rng(seed);
    Statistics stats(mdp.n_states(), n_actions, mdp.r_max());
    std::vector<std::uint64_t> episode_visits(mdp.n_states() * n_actions);
    std::size_t state = options.initial_state;
    double cumulative = 0;

    while (stats.t < horizon) {
        stats.start_episode();
        std::fill(episode_visits.begin(), episode_visits.end(), 0);
        const auto confidence = confidence_set(stats, delta);
        const double time = static_cast<double>(std::max<std::uint64_t>(1, stats.t));
        const auto plan = extended_value_iteration(stats, confidence, 1.0 / std::sqrt(time));

        while (stats.t < horizon) {
            const std::size_t action = plan.policy(state);
            const std::size_t pair = state * n_actions + action;
            if (episode_visits[pair] >= std::max<std::uint64_t>(1, stats.episode_start_counts[pair]))
                break;
            const Step step = sample_step(mdp, state, action, rng);
            stats.record(state, action, step.reward, step.next_state);
            ++episode_visits[pair];
            cumulative += step.reward;
            trace.records.push_back({stats.t, cumulative,
                                     static_cast<double>(stats.t) * trace.rho_star - cumulative,
                                     stats.episode_index});
            state = step.next_state;
        }
    }
    trace.episodes = stats.episode_index;
    return trace;
}

double theoretical_bound(double kappa, std::size_t n_states, std::size_t n_actions, double horizon,
                         double delta) {
    if (!(kappa >= 0) || !std::isfinite(kappa))
        throw Error(ErrorKind::InvalidArgument, "kappa must be finite and nonnegative");
    if (n_states == 0 || n_actions == 0 || !(horizon >= 1))
        throw Error(ErrorKind::InvalidArgument, "S, A must be positive and T at least 1");
    if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1)");
    return 34.0 * std::max(1.0, kappa) * static_cast<double>(n_states) *
           std::sqrt(static_cast<double>(n_actions) * horizon * std::log(horizon / delta));
}

double episode_bound(std::size_t n_states, std::size_t n_actions, double horizon) {
    const double sa = static_cast<double>(n_states * n_actions);
    return sa * std::log2(8.0 * horizon / sa) + sa;
}

} // namespace mehc
