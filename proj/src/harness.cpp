#include "mehc/harness.hpp"

#include "mehc/io.hpp"
#include "mehc/solve.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mehc {

Mdp toy_mdp(double alpha, double beta, double epsilon) {
    if (!(0 < beta && beta < alpha && alpha < 1))
        throw Error(ErrorKind::InvalidArgument, "toy_mdp requires 0 < beta < alpha < 1");
    if (!(epsilon > 0 && epsilon <= 1))
        throw Error(ErrorKind::InvalidArgument, "toy_mdp requires 0 < epsilon <= 1");
    // (s, a, s') with a = 0 staying and a = 1 switching
    std::vector<double> p = {
        1.0, 0.0,                 // s1, a1
        1.0 - epsilon, epsilon,   // s1, a2
        0.0, 1.0,                 // s2, a1
        epsilon, 1.0 - epsilon,   // s2, a2
    };
    std::vector<double> r = {1.0 - alpha, 1.0 - alpha, 1.0 - beta, 1.0 - beta};
    return Mdp(2, 2, std::move(p), std::move(r), RewardModel::Deterministic, 1.0);
}

std::vector<std::string> toy_state_names() { return {"s1", "s2"}; }
std::vector<std::string> toy_action_names() { return {"a1", "a2"}; }

Mdp random_mdp(std::size_t n_states, std::size_t n_actions, std::size_t branching,
               std::uint64_t seed, const RandomMdpOptions& options) {
    if (n_states == 0 || n_actions == 0)
        throw Error(ErrorKind::InvalidArgument, "random_mdp needs S >= 1 and A >= 1");
    if (branching < 1 || branching > n_states)
        throw Error(ErrorKind::InvalidArgument, "random_mdp needs 1 <= branching <= S");
    if (!(options.r_max > 0)) throw Error(ErrorKind::InvalidArgument, "r_max must be positive");

    Rng rng(seed);
    const std::size_t S = n_states, A = n_actions;
    std::vector<double> p(S * A * S, 0.0), r(S * A);
    std::vector<std::size_t> candidates(S);

    for (std::size_t pair = 0; pair < S * A; ++pair) {
        std::iota(candidates.begin(), candidates.end(), 0);
        for (std::size_t k = 0; k < branching; ++k) {
            std::swap(candidates[k], candidates[k + rng.index(S - k)]);
            p[pair * S + candidates[k]] = -std::log(1.0 - rng.uniform());
        }
        r[pair] = options.r_max * rng.uniform();
    }

    if (!options.allow_noncommunicating) {
        std::vector<std::size_t> order(S);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t k = S; k > 1; --k) std::swap(order[k - 1], order[rng.index(k)]);
        for (std::size_t k = 0; k < S; ++k) {
            const std::size_t s = order[k];
            const std::size_t a = rng.index(A);
            auto row = p.begin() + static_cast<std::ptrdiff_t>((s * A + a) * S);
            std::fill(row, row + static_cast<std::ptrdiff_t>(S), 0.0);
            row[static_cast<std::ptrdiff_t>(order[(k + 1) % S])] = 1.0;
        }
    }

    Mdp mdp(S, A, std::move(p), std::move(r), options.reward_model, options.r_max);
    mdp.renormalize();
    return mdp;
}

Potential random_potential(const Mdp& mdp, double scale, std::uint64_t seed) {
    if (!(scale > 0) || !std::isfinite(scale))
        throw Error(ErrorKind::InvalidArgument, "potential scale must be positive");
    Rng rng(seed);
    Potential potential{std::vector<double>(mdp.n_states(), 0.0)};
    for (int halving = 0; halving <= 20; ++halving, scale /= 2) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            for (std::size_t s = 1; s < mdp.n_states(); ++s) potential.phi[s] = rng.uniform(-scale, scale);
            if (check_validity(mdp, potential).empty()) return potential;
        }
    }
    throw Error(ErrorKind::NoValidPotential, "no valid potential found after 20 halvings of the scale");
}

SweepReport sweep_theorem3(std::size_t num_instances, std::size_t n_states, std::size_t n_actions,
                           std::uint64_t seed, const SweepOptions& options) {
    SweepReport report;
    report.instances = num_instances;
    report.min_ratio = kInfinity;
    report.max_ratio = -kInfinity;

    for (std::size_t i = 0; i < num_instances; ++i) {
        const Mdp mdp = random_mdp(n_states, n_actions, std::min(options.branching, n_states),
                                   derive_seed(seed, 2 * i));
        const double gain = optimal_gain(mdp).gain;
        const double kappa = mehc(mdp);
        if (gain >= mdp.r_max() - kShapingTolerance || !(kappa > 0) || !std::isfinite(kappa)) {
            ++report.skipped;
            continue;
        }
        const Potential potential = random_potential(mdp, options.potential_scale, derive_seed(seed, 2 * i + 1));
        const double ratio = mehc(apply_potential(mdp, potential)) / kappa;
        report.min_ratio = std::min(report.min_ratio, ratio);
        report.max_ratio = std::max(report.max_ratio, ratio);
        if (ratio < 0.5 - options.ratio_tolerance || ratio > 2.0 + options.ratio_tolerance)
            ++report.violations;
        report.max_residual = std::max(report.max_residual, max_abs(shaped_cost_shift(mdp, potential)));
    }
    if (report.skipped == report.instances) report.min_ratio = report.max_ratio = std::nan("");
    return report;
}

std::string dump_sweep(const SweepReport& report) {
    nlohmann::json root;
    root["instances"] = report.instances;
    root["skipped"] = report.skipped;
    root["min_ratio"] = detail::rounded_number(report.min_ratio);
    root["max_ratio"] = detail::rounded_number(report.max_ratio);
    root["violations"] = report.violations;
    root["max_residual"] = detail::rounded_number(report.max_residual);
    return root.dump(2) + "\n";
}

void ExperimentConfig::check() const {
    if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "T must be at least 1");
    if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1)");
    if (seeds.empty()) throw Error(ErrorKind::InvalidArgument, "at least one seed is required");
    if (thin < 1) throw Error(ErrorKind::InvalidArgument, "thin must be at least 1");
}

std::vector<RegretTrace> run_traces(const ExperimentConfig& config) {
    config.check();
    const Mdp mdp = config.potential ? apply_potential(config.mdp, *config.potential) : config.mdp;
    std::vector<RegretTrace> traces;
    traces.reserve(config.seeds.size());
    for (auto seed : config.seeds) traces.push_back(run_ucrl2(mdp, config.horizon, config.delta, seed));
    return traces;
}

ExperimentSummary summarize(const ExperimentConfig& config, const std::vector<RegretTrace>& traces) {
    ExperimentSummary summary;
    summary.seeds = config.seeds;
    summary.horizon = config.horizon;
    summary.delta = config.delta;
    summary.max_final_regret = -kInfinity;
    for (const auto& trace : traces) {
        const auto& last = trace.records.back();
        summary.rho_star = trace.rho_star;
        summary.mean_final_regret += last.regret;
        summary.max_final_regret = std::max(summary.max_final_regret, last.regret);
        summary.mean_avg_reward += last.cumulative_reward / static_cast<double>(last.t);
        summary.episodes.push_back(trace.episodes);
    }
    const auto n = static_cast<double>(traces.size());
    summary.mean_final_regret /= n;
    summary.mean_avg_reward /= n;
    return summary;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    const auto traces = run_traces(config);
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + config.output_dir.string() + ": " + ec.message());
    for (const auto& trace : traces)
        write_file(config.output_dir / ("trace_seed" + std::to_string(trace.seed) + ".csv"),
                   trace_csv(trace, config.thin));
    auto summary = summarize(config, traces);
    write_file(config.output_dir / "summary.json", dump_summary(summary));
    return summary;
}

std::string dump_summary(const ExperimentSummary& summary) {
    nlohmann::json root;
    root["seeds"] = summary.seeds;
    root["T"] = summary.horizon;
    root["delta"] = detail::rounded_number(summary.delta);
    root["rho_star"] = detail::rounded_number(summary.rho_star);
    root["mean_final_regret"] = detail::rounded_number(summary.mean_final_regret);
    root["max_final_regret"] = detail::rounded_number(summary.max_final_regret);
    root["mean_avg_reward"] = detail::rounded_number(summary.mean_avg_reward);
    root["episodes"] = summary.episodes;
    return root.dump(2) + "\n";
}

} // namespace mehc
