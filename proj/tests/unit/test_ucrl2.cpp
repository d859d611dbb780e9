#include "mehc/harness.hpp"
#include "mehc/solve.hpp"
#include "mehc/ucrl2.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace mehc;

namespace {

const Mdp kToy = toy_mdp(0.11, 0.1, 0.05);

double dot(const std::vector<double>& p, const std::vector<double>& u) {
    return std::inner_product(p.begin(), p.end(), u.begin(), 0.0);
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
    std::vector<double> p(n);
    for (double& v : p) v = -std::log(1.0 - rng.uniform());
    double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= total;
    return p;
}

/// Best value over a 0.002 grid of the 3-point simplex inside the l1 ball.
double grid_max(const std::vector<double>& p_hat, double radius, const std::vector<double>& u) {
    double best = -kInfinity;
    const int steps = 500;
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; i + j <= steps; ++j) {
            std::vector<double> q{i / double(steps), j / double(steps), (steps - i - j) / double(steps)};
            if (l1(q, p_hat) <= radius + 1e-12) best = std::max(best, dot(q, u));
        }
    return best;
}

} // namespace

TEST(ConfidenceWidths, FormulaValues) {
    // log(2 * 2 * 2 * 100 / 0.05) = log(16000); log(2 * 2 * 100 / 0.05) = log(8000)
    auto w = confidence_widths(10, 100, 2, 2, 0.05);
    EXPECT_NEAR(w.reward_radius, 1.8406847640016124, 1e-12);
    EXPECT_NEAR(w.transition_radius, 5.016388252303995, 1e-12);
    auto scaled = confidence_widths(10, 100, 2, 2, 0.05, 3.0);
    EXPECT_NEAR(scaled.reward_radius, 3 * w.reward_radius, 1e-12);
    EXPECT_EQ(scaled.transition_radius, w.transition_radius);
}

TEST(ConfidenceWidths, UnvisitedPairsUseOneVisit) {
    auto zero = confidence_widths(0, 50, 3, 2, 0.1);
    auto one = confidence_widths(1, 50, 3, 2, 0.1);
    EXPECT_EQ(zero.reward_radius, one.reward_radius);
    EXPECT_EQ(zero.transition_radius, one.transition_radius);
}

TEST(ConfidenceWidths, ShrinkWithVisitsAndGrowWithTime) {
    double previous = kInfinity;
    for (std::uint64_t n = 1; n < 1'000'000'000; n *= 10) {
        auto w = confidence_widths(n, 1'000'000'000, 4, 2, 0.05);
        EXPECT_LT(w.reward_radius, previous);
        previous = w.reward_radius;
    }
    EXPECT_LT(previous, 1e-3);
    EXPECT_LT(confidence_widths(5, 10, 2, 2, 0.05).transition_radius,
              confidence_widths(5, 1000, 2, 2, 0.05).transition_radius);
}

TEST(ConfidenceWidths, RejectsBadArguments) {
    EXPECT_THROW(confidence_widths(1, 1, 2, 2, 0.0), Error);
    EXPECT_THROW(confidence_widths(1, 1, 2, 2, 1.0), Error);
    EXPECT_THROW(confidence_widths(1, 0, 2, 2, 0.5), Error);
}

TEST(InnerMax, ZeroRadiusReturnsEstimate) {
    std::vector<double> p{0.2, 0.3, 0.5}, u{3, 1, 2};
    EXPECT_EQ(inner_max_transition(p, 0.0, u), p);
}

TEST(InnerMax, LargeRadiusPutsAllMassOnBestState) {
    std::vector<double> p{0.2, 0.3, 0.5}, u{3, 1, 2};
    EXPECT_EQ(inner_max_transition(p, 2.0, u), (std::vector<double>{1, 0, 0}));
    EXPECT_EQ(inner_max_transition(p, 5.0, u), (std::vector<double>{1, 0, 0}));
}

TEST(InnerMax, SmallExample) {
    std::vector<double> p{0.5, 0.5}, u{1, 0};
    auto q = inner_max_transition(p, 0.2, u);
    EXPECT_NEAR(q[0], 0.6, 1e-15);
    EXPECT_NEAR(q[1], 0.4, 1e-15);
}

TEST(InnerMax, DrainsLowestStatesFirst) {
    std::vector<double> p{0.1, 0.1, 0.8}, u{5, 0, 1};
    auto q = inner_max_transition(p, 0.6, u);
    EXPECT_NEAR(q[0], 0.4, 1e-15);
    EXPECT_NEAR(q[1], 0.0, 1e-15);
    EXPECT_NEAR(q[2], 0.6, 1e-15);
}

TEST(InnerMax, FeasibleAndMatchesGridOracle) {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        auto p = random_simplex(rng, 3);
        std::vector<double> u{rng.uniform(), rng.uniform(), rng.uniform()};
        const double radius = rng.uniform(0, 1.5);
        auto q = inner_max_transition(p, radius, u);
        EXPECT_NEAR(std::accumulate(q.begin(), q.end(), 0.0), 1.0, 1e-12);
        for (double v : q) EXPECT_GE(v, 0.0);
        EXPECT_LE(l1(q, p), radius + 1e-12);
        // The grid can miss the optimum by at most one grid step of mass.
        const double oracle = grid_max(p, radius, u);
        EXPECT_GE(dot(q, u), oracle - 1e-12);
        EXPECT_LE(dot(q, u), oracle + 0.01);
    }
}

TEST(InnerMax, BeatsRandomFeasiblePoints) {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.index(5);
        auto p = random_simplex(rng, n);
        std::vector<double> u(n);
        for (double& v : u) v = rng.uniform(-1, 1);
        const double radius = rng.uniform(0, 1);
        const double value = dot(inner_max_transition(p, radius, u), u);
        for (int k = 0; k < 200; ++k) {
            auto target = random_simplex(rng, n);
            // Mix toward a random point until the l1 constraint holds.
            const double d = l1(target, p);
            const double w = d > radius ? radius / d : 1.0;
            std::vector<double> q(n);
            for (std::size_t j = 0; j < n; ++j) q[j] = (1 - w) * p[j] + w * target[j];
            EXPECT_LE(dot(q, u), value + 1e-12);
        }
    }
}

TEST(Statistics, RecordAndEmpiricalModel) {
    Statistics stats(2, 2, 1.0);
    stats.record(0, 1, 0.5, 1);
    stats.record(0, 1, 1.0, 0);
    stats.record(0, 1, 0.0, 1);
    EXPECT_EQ(stats.t, 3u);
    EXPECT_EQ(stats.visits(0, 1), 3u);
    auto model = EmpiricalModel::from_statistics(stats);
    EXPECT_NEAR(model.r_hat[1], 0.5, 1e-15);
    EXPECT_NEAR(model.row(0, 1)[0], 1.0 / 3, 1e-15);
    EXPECT_NEAR(model.row(0, 1)[1], 2.0 / 3, 1e-15);
    EXPECT_EQ(model.r_hat[0], 0.0);
    EXPECT_EQ(model.row(1, 0)[0], 0.5);

    stats.start_episode();
    EXPECT_EQ(stats.episode_index, 1u);
    EXPECT_EQ(stats.episode_start_counts[1], 3u);
}

TEST(Evi, ExactModelRecoversOptimalGain) {
    auto result = extended_value_iteration(EmpiricalModel::exact(kToy),
                                           uniform_confidence_set(2, 2, 0.0, 0.0), 1e-10);
    EXPECT_NEAR(result.optimistic_gain, 0.9, 1e-9);
    EXPECT_EQ(result.policy.action_of, (std::vector<std::size_t>{1, 0}));
    EXPECT_EQ(*std::min_element(result.u.begin(), result.u.end()), 0.0);
}

TEST(Evi, SingleStateIsOptimisticRewardCappedAtRmax) {
    auto model = EmpiricalModel::exact(mehc::testing::single_state({0.3, 0.6}));
    EXPECT_NEAR(extended_value_iteration(model, uniform_confidence_set(1, 2, 0.2, 0.5), 1e-9).optimistic_gain,
                0.8, 1e-12);
    EXPECT_NEAR(extended_value_iteration(model, uniform_confidence_set(1, 2, 0.7, 0.5), 1e-9).optimistic_gain,
                1.0, 1e-12);
}

TEST(Evi, OptimisticGainDominatesTrueGain) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto mdp = random_mdp(4, 2, 2, seed);
        const double stop = 1e-8;
        auto result = extended_value_iteration(EmpiricalModel::exact(mdp),
                                               uniform_confidence_set(4, 2, 0.05, 0.2), stop);
        EXPECT_GE(result.optimistic_gain, optimal_gain(mdp).gain - stop);
    }
}

TEST(Evi, IterateSpanBoundedByMehc) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto mdp = seed == 0 ? kToy : random_mdp(4, 2, 2, seed);
        const double kappa = mehc::mehc(mdp);
        double worst = 0;
        EviOptions options;
        options.on_sweep = [&](std::size_t, std::span<const double> u) {
            auto [lo, hi] = std::minmax_element(u.begin(), u.end());
            worst = std::max(worst, *hi - *lo);
        };
        extended_value_iteration(EmpiricalModel::exact(mdp), uniform_confidence_set(mdp.n_states(), 2, 0.01, 0.1),
                                 1e-8, options);
        EXPECT_LE(worst, kappa + 1e-6) << "seed " << seed;
    }
}

TEST(Evi, MonitorSeesEverySweep) {
    std::size_t calls = 0, last = 0;
    EviOptions options;
    options.on_sweep = [&](std::size_t i, std::span<const double>) {
        ++calls;
        EXPECT_EQ(i, last + 1);
        last = i;
    };
    auto result = extended_value_iteration(EmpiricalModel::exact(kToy), uniform_confidence_set(2, 2, 0, 0),
                                           1e-6, options);
    EXPECT_EQ(calls, result.sweeps);
}

TEST(Evi, IterationCapRaises) {
    EviOptions options;
    options.max_iterations = 3;
    try {
        extended_value_iteration(EmpiricalModel::exact(kToy), uniform_confidence_set(2, 2, 0, 0), 1e-12, options);
        FAIL() << "expected NoConvergence";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
    }
}

TEST(RunUcrl2, SingleStep) {
    auto trace = run_ucrl2(kToy, 1, 0.05, 3);
    ASSERT_EQ(trace.records.size(), 1u);
    EXPECT_EQ(trace.records[0].t, 1u);
    EXPECT_EQ(trace.records[0].episode, 1u);
    EXPECT_GE(trace.records[0].cumulative_reward, 0.0);
    EXPECT_LE(trace.records[0].cumulative_reward, 1.0);
}

TEST(RunUcrl2, DeterministicInSeed) {
    auto mdp = random_mdp(3, 2, 3, 2, {.reward_model = RewardModel::BernoulliScaled});
    EXPECT_EQ(run_ucrl2(mdp, 3000, 0.05, 5), run_ucrl2(mdp, 3000, 0.05, 5));
    EXPECT_NE(run_ucrl2(mdp, 3000, 0.05, 5).records, run_ucrl2(mdp, 3000, 0.05, 6).records);
}

TEST(RunUcrl2, TraceIdentitiesAndEpisodeBound) {
    auto mdp = random_mdp(3, 2, 2, 9, {.reward_model = RewardModel::BernoulliScaled});
    const std::uint64_t horizon = 5000;
    auto trace = run_ucrl2(mdp, horizon, 0.1, 1);
    ASSERT_EQ(trace.records.size(), horizon);
    EXPECT_NEAR(trace.rho_star, optimal_gain(mdp).gain, 1e-12);
    double previous_reward = 0, previous_regret = 0;
    std::size_t previous_episode = 1;
    for (std::size_t i = 0; i < horizon; ++i) {
        const auto& r = trace.records[i];
        EXPECT_EQ(r.t, i + 1);
        const double step_reward = r.cumulative_reward - previous_reward;
        EXPECT_GE(step_reward, -1e-12);
        EXPECT_LE(step_reward, mdp.r_max() + 1e-12);
        EXPECT_NEAR(r.regret - previous_regret, trace.rho_star - step_reward, 1e-9);
        EXPECT_GE(r.episode, previous_episode);
        previous_reward = r.cumulative_reward;
        previous_regret = r.regret;
        previous_episode = r.episode;
    }
    EXPECT_EQ(trace.episodes, trace.records.back().episode);
    EXPECT_LE(static_cast<double>(trace.episodes), episode_bound(3, 2, horizon));
}

TEST(RunUcrl2, RejectsBadArguments) {
    EXPECT_THROW(run_ucrl2(kToy, 0, 0.05, 0), Error);
    EXPECT_THROW(run_ucrl2(kToy, 10, 1.5, 0), Error);
    Ucrl2Options options;
    options.initial_state = 2;
    EXPECT_THROW(run_ucrl2(kToy, 10, 0.05, 0, options), Error);
}

TEST(Bounds, TheoreticalBoundValue) {
    EXPECT_NEAR(theoretical_bound(2.2, 2, 2, 1e5, 0.05), 254835.66531135718, 1e-6);
}

TEST(Bounds, SmallKappaClampsToOne) {
    EXPECT_EQ(theoretical_bound(0.5, 3, 2, 1e4, 0.1), theoretical_bound(1.0, 3, 2, 1e4, 0.1));
    EXPECT_EQ(theoretical_bound(0.0, 3, 2, 1e4, 0.1), theoretical_bound(1.0, 3, 2, 1e4, 0.1));
}

TEST(Bounds, ScalesLikeSqrtT) {
    const double T = 1e6, delta = 0.05;
    const double ratio = theoretical_bound(2, 4, 2, 4 * T, delta) / theoretical_bound(2, 4, 2, T, delta);
    EXPECT_NEAR(ratio, 2 * std::sqrt(std::log(4 * T / delta) / std::log(T / delta)), 1e-12);
}

TEST(Bounds, EpisodeBoundValue) {
    EXPECT_NEAR(episode_bound(2, 2, 1e4), 61.150849518197795, 1e-9);
}
