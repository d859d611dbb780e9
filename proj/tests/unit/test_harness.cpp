#include "mehc/harness.hpp"
#include "mehc/io.hpp"
#include "mehc/shaping.hpp"
#include "mehc/solve.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>

using namespace mehc;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("mehc_harness_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST(ToyMdp, StructuralValues) {
    auto mdp = toy_mdp(0.11, 0.1, 0.05);
    EXPECT_TRUE(validate(mdp).empty());
    EXPECT_NEAR(mehc::mehc(mdp), 0.11 / 0.05, 1e-10);
    EXPECT_NEAR(diameter(mdp), 1 / 0.05, 1e-10);
    EXPECT_NEAR(optimal_gain(mdp).gain, 0.9, 1e-10);
}

TEST(ToyMdp, CertainSwitchGivesMehcAlpha) {
    auto mdp = toy_mdp(0.3, 0.2, 1.0);
    EXPECT_NEAR(mehc::mehc(mdp), 0.3, 1e-12);
    EXPECT_NEAR(diameter(mdp), 1.0, 1e-12);
}

TEST(ToyMdp, MehcShrinksWhileDiameterGrows) {
    // kappa = alpha / eps and D = 1 / eps, so kappa / D = alpha regardless of eps.
    for (double eps : {0.5, 0.1, 0.01}) {
        auto mdp = toy_mdp(0.11, 0.1, eps);
        EXPECT_NEAR(mehc::mehc(mdp) / diameter(mdp), 0.11, 1e-9);
    }
}

TEST(ToyMdp, RejectsInvalidParameters) {
    EXPECT_THROW(toy_mdp(0.1, 0.11, 0.05), Error);
    EXPECT_THROW(toy_mdp(0.11, 0.0, 0.05), Error);
    EXPECT_THROW(toy_mdp(1.0, 0.1, 0.05), Error);
    EXPECT_THROW(toy_mdp(0.11, 0.1, 0.0), Error);
    EXPECT_THROW(toy_mdp(0.11, 0.1, 1.5), Error);
}

TEST(RandomMdp, ValidAndCommunicating) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto mdp = random_mdp(2 + seed % 6, 1 + seed % 3, 1 + seed % 2, seed);
        EXPECT_TRUE(validate(mdp).empty()) << "seed " << seed;
        EXPECT_TRUE(std::isfinite(diameter(mdp))) << "seed " << seed;
    }
}

TEST(RandomMdp, RespectsBranchingAndRewardScale) {
    RandomMdpOptions options;
    options.allow_noncommunicating = true;
    options.r_max = 3.0;
    auto mdp = random_mdp(6, 2, 2, 17, options);
    EXPECT_EQ(mdp.r_max(), 3.0);
    for (std::size_t s = 0; s < 6; ++s)
        for (std::size_t a = 0; a < 2; ++a) {
            std::size_t support = 0;
            for (double p : mdp.row(s, a)) support += p > 0;
            EXPECT_LE(support, 2u);
            EXPECT_GE(mdp.mean_reward(s, a), 0.0);
            EXPECT_LE(mdp.mean_reward(s, a), 3.0);
        }
}

TEST(RandomMdp, DeterministicInSeed) {
    EXPECT_EQ(random_mdp(5, 3, 2, 123), random_mdp(5, 3, 2, 123));
    EXPECT_FALSE(random_mdp(5, 3, 2, 123) == random_mdp(5, 3, 2, 124));
}

TEST(RandomMdp, RejectsBadArguments) {
    EXPECT_THROW(random_mdp(0, 2, 1, 0), Error);
    EXPECT_THROW(random_mdp(3, 2, 4, 0), Error);
    EXPECT_THROW(random_mdp(3, 2, 0, 0), Error);
}

TEST(RandomPotential, ValidWithPinnedFirstEntry) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto mdp = random_mdp(4, 2, 2, seed);
        auto phi = random_potential(mdp, 0.5, seed);
        EXPECT_EQ(phi.phi[0], 0.0);
        EXPECT_TRUE(check_validity(mdp, phi).empty());
        for (double v : phi.phi) EXPECT_LE(std::abs(v), 0.5);
    }
}

TEST(RandomPotential, TinyScaleGivesNearZeroPotential) {
    auto phi = random_potential(toy_mdp(0.11, 0.1, 0.05), 1e-9, 3);
    for (double v : phi.phi) EXPECT_LE(std::abs(v), 1e-9);
}

TEST(RandomPotential, HalfRewardModelAcceptsFirstDraws) {
    std::vector<double> p{0.5, 0.5, /**/ 0.5, 0.5};
    Mdp mdp(2, 1, p, {0.5, 0.5});
    // Shaped means are 0.5 -+ phi / 2, valid for every |phi| <= 1.
    auto phi = random_potential(mdp, 1.0, 9);
    EXPECT_LE(std::abs(phi.phi[1]), 1.0);
    EXPECT_TRUE(check_validity(mdp, phi).empty());
}

TEST(RandomPotential, ThrowsWhenOnlyZeroIsValid) {
    // Shaped means are phi(1) and -phi(1): only phi(1) = 0 works.
    Mdp mdp(2, 1, {0, 1, /**/ 1, 0}, {0.0, 0.0});
    try {
        random_potential(mdp, 0.5, 0);
        FAIL() << "expected NoValidPotential";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoValidPotential);
    }
}

TEST(RandomPotential, ToyShapingStaysWithinFactorTwo) {
    auto mdp = toy_mdp(0.11, 0.1, 0.05);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto shaped = apply_potential(mdp, random_potential(mdp, 0.1, seed));
        const double kappa = mehc::mehc(shaped);
        EXPECT_GE(kappa, 1.1 - 1e-9);
        EXPECT_LE(kappa, 4.4 + 1e-9);
    }
}

TEST(Sweep, SmallRunHasNoViolations) {
    auto report = sweep_theorem3(60, 3, 2, 11);
    EXPECT_EQ(report.instances, 60u);
    EXPECT_LT(report.skipped, 60u);
    EXPECT_EQ(report.violations, 0u);
    EXPECT_LE(report.max_residual, 1e-6);
    EXPECT_GE(report.min_ratio, 0.5 - 1e-9);
    EXPECT_LE(report.max_ratio, 2.0 + 1e-9);
    EXPECT_LE(report.min_ratio, report.max_ratio);
}

TEST(Sweep, DeterministicAndSerializable) {
    auto a = sweep_theorem3(10, 3, 2, 5);
    auto b = sweep_theorem3(10, 3, 2, 5);
    EXPECT_EQ(dump_sweep(a), dump_sweep(b));
    auto json = nlohmann::json::parse(dump_sweep(a));
    EXPECT_EQ(json["instances"], 10);
    EXPECT_EQ(json["violations"], 0);
}

TEST(Experiment, WritesTracesAndSummary) {
    auto dir = scratch_dir("files");
    ExperimentConfig config{toy_mdp(0.11, 0.1, 0.05), std::nullopt, 500, 0.05, {1, 2, 3}, dir, 1};
    auto summary = run_experiment(config);
    for (int seed : {1, 2, 3}) {
        auto text = read_file(dir / ("trace_seed" + std::to_string(seed) + ".csv"));
        EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 501);
    }
    auto json = nlohmann::json::parse(read_file(dir / "summary.json"));
    EXPECT_EQ(json["T"], 500);
    EXPECT_EQ(json["seeds"].size(), 3u);
    EXPECT_EQ(json["episodes"].size(), 3u);
    EXPECT_NEAR(json["rho_star"].get<double>(), 0.9, 1e-9);
    EXPECT_NEAR(summary.rho_star, 0.9, 1e-9);
    EXPECT_GE(summary.max_final_regret, summary.mean_final_regret);
    std::filesystem::remove_all(dir);
}

TEST(Experiment, ShapingKeepsOptimalGain) {
    auto mdp = random_mdp(3, 2, 2, 4);
    auto phi = random_potential(mdp, 0.3, 4);
    ExperimentConfig plain{mdp, std::nullopt, 50, 0.05, {7}, {}, 1};
    ExperimentConfig shaped{mdp, phi, 50, 0.05, {7}, {}, 1};
    EXPECT_NEAR(run_traces(plain)[0].rho_star, run_traces(shaped)[0].rho_star, 1e-8);
}

TEST(Experiment, SingleStepSummary) {
    ExperimentConfig config{toy_mdp(0.11, 0.1, 0.05), std::nullopt, 1, 0.05, {0}, {}, 1};
    auto summary = summarize(config, run_traces(config));
    EXPECT_GE(summary.mean_avg_reward, 0.0);
    EXPECT_LE(summary.mean_avg_reward, 1.0);
    EXPECT_EQ(summary.episodes, std::vector<std::size_t>{1});
}

TEST(Experiment, ConfigChecks) {
    ExperimentConfig config{toy_mdp(0.11, 0.1, 0.05), std::nullopt, 0, 0.05, {0}, {}, 1};
    EXPECT_THROW(config.check(), Error);
    config.horizon = 10;
    config.seeds.clear();
    EXPECT_THROW(config.check(), Error);
    config.seeds = {1};
    config.delta = 0;
    EXPECT_THROW(config.check(), Error);
    config.delta = 0.1;
    config.thin = 0;
    EXPECT_THROW(config.check(), Error);
    config.thin = 5;
    EXPECT_NO_THROW(config.check());
}
