// Command-line entry point: analysis, shaping, learning, generation and
// verification sweeps. Data goes to stdout, diagnostics to stderr.
//
// Exit codes: 0 success, 1 domain error (prefixed with the error name),
// 2 usage error.

#include "mehc/harness.hpp"
#include "mehc/io.hpp"
#include "mehc/shaping.hpp"
#include "mehc/solve.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>

namespace {

using namespace mehc;

int analyze_command(const std::string& mdp_path) {
    const auto file = load_mdp(mdp_path);
    std::cout << dump_report(analyze(file.mdp));
    return 0;
}

int shape_command(const std::string& mdp_path, const std::string& potential_path,
                  const std::string& out_path) {
    auto file = load_mdp(mdp_path);
    require_valid(file.mdp);
    const auto potential = load_potential(potential_path);
    save_mdp(out_path, {apply_potential(file.mdp, potential), file.states, file.actions});
    return 0;
}

int learn_command(const std::string& mdp_path, std::uint64_t horizon, double delta,
                  const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
                  const std::string& potential_path, std::size_t thin) {
    const auto file = load_mdp(mdp_path);
    std::optional<Potential> potential;
    if (!potential_path.empty()) potential = load_potential(potential_path);
    ExperimentConfig config{file.mdp, potential, horizon, delta, seeds, out_dir, thin};
    const auto summary = run_experiment(config);
    std::cout << dump_summary(summary);
    return 0;
}

int oracle_command(const std::string& mdp_path) {
    const auto file = load_mdp(mdp_path);
    const Mdp& mdp = file.mdp;
    require_valid(mdp);

    std::cout << "kind\tstart\ttarget\tsolver\toracle\tabs_diff\n";
    double worst = 0;
    auto compare = [&](const char* kind, const StepCost& cost) {
        const auto solver = hitting_cost_matrix(mdp, cost);
        const auto oracle = oracle_hitting_cost_matrix(mdp, cost);
        for (std::size_t s = 0; s < mdp.n_states(); ++s)
            for (std::size_t t = 0; t < mdp.n_states(); ++t) {
                const double a = solver(s, t), b = oracle(s, t);
                const double diff = (std::isinf(a) && std::isinf(b)) ? 0.0 : std::abs(a - b);
                worst = std::max(worst, diff);
                std::cout << kind << '\t' << file.states[s] << '\t' << file.states[t] << '\t'
                          << format_number(a) << '\t' << format_number(b) << '\t'
                          << format_number(diff) << '\n';
            }
    };
    compare("time", unit_cost());
    compare("cost", reward_gap_cost(mdp));
    std::cout << "max_abs_diff\t" << format_number(worst) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural parameters, reward shaping and UCRL2 for tabular MDPs", "mehc"};
    app.require_subcommand(1);

    std::string mdp_path, potential_path, out_path;

    auto* analyze = app.add_subcommand("analyze", "Print the structural report of an MDP file");
    analyze->add_option("mdp", mdp_path, "MDP file")->required();

    auto* shape = app.add_subcommand("shape", "Write the potential-shaped MDP");
    shape->add_option("mdp", mdp_path, "MDP file")->required();
    shape->add_option("--potential", potential_path, "Potential file")->required();
    shape->add_option("-o,--output", out_path, "Output MDP file")->required();

    std::uint64_t horizon = 0;
    double delta = 0.05;
    std::vector<std::uint64_t> seeds;
    std::size_t thin = 1;
    auto* learn = app.add_subcommand("learn", "Run UCRL2 for each seed and write regret traces");
    learn->add_option("mdp", mdp_path, "MDP file")->required();
    learn->add_option("--T", horizon, "Horizon")->required()->check(CLI::PositiveNumber);
    learn->add_option("--delta", delta, "Confidence parameter")->required()->check(CLI::Range(0.0, 1.0));
    learn->add_option("--seeds", seeds, "Seeds (comma separated)")->required()->delimiter(',');
    learn->add_option("--out", out_path, "Output directory")->required();
    learn->add_option("--potential", potential_path, "Shape the MDP with this potential first");
    learn->add_option("--thin", thin, "Write every k-th step")->check(CLI::PositiveNumber);

    auto* gen = app.add_subcommand("gen", "Generate an MDP file");
    gen->require_subcommand(1);
    double alpha = 0.11, beta = 0.1, eps = 0.05;
    auto* gen_toy = gen->add_subcommand("toy", "Two-state example MDP");
    gen_toy->add_option("--alpha", alpha)->required();
    gen_toy->add_option("--beta", beta)->required();
    gen_toy->add_option("--eps", eps)->required();
    gen_toy->add_option("-o,--output", out_path)->required();

    std::size_t states = 4, actions = 2, branching = 2, num = 500;
    std::uint64_t seed = 0;
    bool allow_noncomm = false;
    std::string reward_model = "deterministic";
    auto* gen_random = gen->add_subcommand("random", "Random (communicating) MDP");
    gen_random->add_option("--states", states)->required()->check(CLI::PositiveNumber);
    gen_random->add_option("--actions", actions)->required()->check(CLI::PositiveNumber);
    gen_random->add_option("--branching", branching)->required()->check(CLI::PositiveNumber);
    gen_random->add_option("--seed", seed)->required();
    gen_random->add_option("-o,--output", out_path)->required();
    gen_random->add_flag("--allow-noncomm", allow_noncomm, "Do not plant a spanning cycle");
    gen_random->add_option("--reward-model", reward_model)
        ->check(CLI::IsMember({"deterministic", "bernoulli"}));

    double scale = 0.5;
    auto* sweep = app.add_subcommand("sweep-theorem3", "MEHC ratio sweep under random valid potentials");
    sweep->add_option("--num", num)->required()->check(CLI::PositiveNumber);
    sweep->add_option("--states", states)->required()->check(CLI::PositiveNumber);
    sweep->add_option("--actions", actions)->required()->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed)->required();
    sweep->add_option("--branching", branching, "Successors per row");
    sweep->add_option("--scale", scale, "Initial potential scale");

    auto* oracle = app.add_subcommand("oracle", "Compare SSP hitting costs with policy enumeration");
    oracle->add_option("mdp", mdp_path, "MDP file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*analyze) return analyze_command(mdp_path);
        if (*shape) return shape_command(mdp_path, potential_path, out_path);
        if (*learn) return learn_command(mdp_path, horizon, delta, seeds, out_path, potential_path, thin);
        if (*gen_toy) {
            save_mdp(out_path, {toy_mdp(alpha, beta, eps), toy_state_names(), toy_action_names()});
            return 0;
        }
        if (*gen_random) {
            RandomMdpOptions options;
            options.allow_noncommunicating = allow_noncomm;
            options.reward_model =
                reward_model == "bernoulli" ? RewardModel::BernoulliScaled : RewardModel::Deterministic;
            save_mdp(out_path, with_default_names(random_mdp(states, actions, branching, seed, options)));
            return 0;
        }
        if (*sweep) {
            SweepOptions options;
            options.branching = branching;
            options.potential_scale = scale;
            std::cout << dump_sweep(sweep_theorem3(num, states, actions, seed, options));
            return 0;
        }
        if (*oracle) return oracle_command(mdp_path);
    } catch (const Error& e) {
        std::cerr << e.name() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "Error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
