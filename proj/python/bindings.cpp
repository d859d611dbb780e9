#include "mehc/harness.hpp"
#include "mehc/io.hpp"
#include "mehc/shaping.hpp"
#include "mehc/solve.hpp"
#include "mehc/ucrl2.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace mehc;

namespace {

using Nested2 = std::vector<std::vector<double>>;
using Nested3 = std::vector<Nested2>;

RewardModel reward_model_from(const std::string& name) {
    if (name == "deterministic") return RewardModel::Deterministic;
    if (name == "bernoulli") return RewardModel::BernoulliScaled;
    throw Error(ErrorKind::InvalidArgument, "reward_model must be 'deterministic' or 'bernoulli'");
}

Mdp make_mdp(const Nested3& transition, const Nested2& mean_reward, const std::string& model,
             double r_max) {
    const std::size_t S = transition.size();
    const std::size_t A = S ? transition.front().size() : 0;
    std::vector<double> p, r;
    for (std::size_t s = 0; s < S; ++s) {
        if (transition[s].size() != A || s >= mean_reward.size() || mean_reward[s].size() != A)
            throw Error(ErrorKind::InvalidArgument, "ragged transition or mean_reward at state " + std::to_string(s));
        for (std::size_t a = 0; a < A; ++a) {
            if (transition[s][a].size() != S)
                throw Error(ErrorKind::InvalidArgument,
                            "transition[" + std::to_string(s) + "][" + std::to_string(a) + "] has wrong length");
            p.insert(p.end(), transition[s][a].begin(), transition[s][a].end());
            r.push_back(mean_reward[s][a]);
        }
    }
    return Mdp(S, A, std::move(p), std::move(r), reward_model_from(model), r_max);
}

Nested3 transition_of(const Mdp& mdp) {
    Nested3 out(mdp.n_states());
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            auto row = mdp.row(s, a);
            out[s].emplace_back(row.begin(), row.end());
        }
    return out;
}

Nested2 rewards_of(const Mdp& mdp) {
    Nested2 out(mdp.n_states());
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) out[s].push_back(mdp.mean_reward(s, a));
    return out;
}

Nested2 rows_of(const SquareMatrix& m) {
    Nested2 out(m.n);
    for (std::size_t i = 0; i < m.n; ++i) out[i].assign(m.data.begin() + static_cast<std::ptrdiff_t>(i * m.n),
                                                        m.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * m.n));
    return out;
}

StepCost cost_kind(const Mdp& mdp, const std::string& kind) {
    if (kind == "time") return unit_cost();
    if (kind == "cost") return reward_gap_cost(mdp);
    throw Error(ErrorKind::InvalidArgument, "kind must be 'time' or 'cost'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = R"pbdoc(
        Maximum expected hitting cost, potential-based reward shaping and
        UCRL2 for tabular MDPs.
    )pbdoc";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result([&]() { return py::exception<Error>(m, "MehcError"); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error_type.get_stored(), (std::string(e.name()) + ": " + e.what()).c_str());
        }
    });

    py::class_<Mdp>(m, "Mdp")
        .def(py::init(&make_mdp), py::arg("transition"), py::arg("mean_reward"),
             py::arg("reward_model") = "deterministic", py::arg("r_max") = 1.0)
        .def_property_readonly("n_states", &Mdp::n_states)
        .def_property_readonly("n_actions", &Mdp::n_actions)
        .def_property_readonly("r_max", &Mdp::r_max)
        .def_property_readonly("reward_model", [](const Mdp& mdp) {
            return mdp.reward_model() == RewardModel::Deterministic ? "deterministic" : "bernoulli";
        })
        .def_property_readonly("transition", &transition_of)
        .def_property_readonly("mean_reward", &rewards_of)
        .def("__repr__", [](const Mdp& mdp) {
            return "<mehc.Mdp S=" + std::to_string(mdp.n_states()) + " A=" + std::to_string(mdp.n_actions()) + ">";
        });

    m.def("validate", [](const Mdp& mdp) {
        std::vector<std::string> out;
        for (const auto& v : validate(mdp)) out.push_back(v.describe());
        return out;
    }, "Invariant violations; empty when the MDP is valid.");

    m.def("toy_mdp", &toy_mdp, py::arg("alpha") = 0.11, py::arg("beta") = 0.1, py::arg("epsilon") = 0.05);
    m.def("random_mdp", [](std::size_t S, std::size_t A, std::size_t branching, std::uint64_t seed,
                           bool allow_noncomm) {
        RandomMdpOptions options;
        options.allow_noncommunicating = allow_noncomm;
        return random_mdp(S, A, branching, seed, options);
    }, py::arg("n_states"), py::arg("n_actions"), py::arg("branching"), py::arg("seed"),
       py::arg("allow_noncomm") = false);

    m.def("gain_of_policy", [](const Mdp& mdp, std::vector<std::size_t> policy) {
        return gain_of_policy(mdp, Policy{std::move(policy)});
    });
    m.def("optimal_gain", [](const Mdp& mdp) {
        auto g = optimal_gain(mdp);
        py::dict out;
        out["gain"] = g.gain;
        out["bias"] = g.bias;
        out["bias_span"] = g.bias_span;
        out["policy"] = g.policy.action_of;
        return out;
    });
    m.def("hitting_cost_matrix", [](const Mdp& mdp, const std::string& kind) {
        return rows_of(hitting_cost_matrix(mdp, cost_kind(mdp, kind)));
    }, py::arg("mdp"), py::arg("kind") = "cost", "kind='cost' uses r_max - r, kind='time' unit cost.");
    m.def("oracle_hitting_cost", [](const Mdp& mdp, std::size_t s, std::size_t t, const std::string& kind) {
        return oracle_hitting_cost(mdp, s, t, cost_kind(mdp, kind));
    }, py::arg("mdp"), py::arg("start"), py::arg("target"), py::arg("kind") = "cost");
    m.def("diameter", &mehc::diameter);
    m.def("mehc", &mehc::mehc);
    m.def("analyze", [](const Mdp& mdp) {
        auto r = analyze(mdp);
        py::dict out;
        out["diameter"] = r.diameter;
        out["mehc"] = r.mehc;
        out["optimal_gain"] = r.optimal_gain;
        out["bias_span"] = r.bias_span;
        out["hitting_time"] = rows_of(r.hitting_time);
        out["hitting_cost"] = rows_of(r.hitting_cost);
        return out;
    });

    m.def("check_validity", [](const Mdp& mdp, std::vector<double> phi) {
        std::vector<std::tuple<std::size_t, std::size_t, double>> out;
        for (const auto& v : check_validity(mdp, Potential{std::move(phi)}))
            out.emplace_back(v.state, v.action, v.shaped_mean);
        return out;
    });
    m.def("apply_potential", [](const Mdp& mdp, std::vector<double> phi) {
        return apply_potential(mdp, Potential{std::move(phi)});
    });
    m.def("verify_pi_equivalence", [](const Mdp& mdp, std::vector<double> phi,
                                      std::optional<std::vector<std::vector<std::size_t>>> policies) {
        std::vector<Policy> list;
        if (policies)
            for (auto& p : *policies) list.push_back(Policy{p});
        else
            list = all_policies(mdp);
        return verify_pi_equivalence(mdp, Potential{std::move(phi)}, list);
    }, py::arg("mdp"), py::arg("phi"), py::arg("policies") = py::none());
    m.def("shaped_cost_shift", [](const Mdp& mdp, std::vector<double> phi) {
        return rows_of(shaped_cost_shift(mdp, Potential{std::move(phi)}));
    });
    m.def("random_potential", [](const Mdp& mdp, double scale, std::uint64_t seed) {
        return random_potential(mdp, scale, seed).phi;
    });

    m.def("confidence_widths", [](std::uint64_t n, std::uint64_t t, std::size_t S, std::size_t A,
                                  double delta, double r_max) {
        auto w = confidence_widths(n, t, S, A, delta, r_max);
        return std::make_pair(w.reward_radius, w.transition_radius);
    }, py::arg("visits"), py::arg("t"), py::arg("n_states"), py::arg("n_actions"), py::arg("delta"),
       py::arg("r_max") = 1.0);
    m.def("inner_max_transition", [](std::vector<double> p_hat, double radius, std::vector<double> u) {
        return inner_max_transition(p_hat, radius, u);
    });
    m.def("extended_value_iteration", [](const Mdp& mdp, double reward_radius, double transition_radius,
                                         double stop_span) {
        std::vector<double> spans;
        EviOptions options;
        options.on_sweep = [&](std::size_t, std::span<const double> u) {
            auto [lo, hi] = std::minmax_element(u.begin(), u.end());
            spans.push_back(*hi - *lo);
        };
        auto result = extended_value_iteration(
            EmpiricalModel::exact(mdp),
            uniform_confidence_set(mdp.n_states(), mdp.n_actions(), reward_radius, transition_radius),
            stop_span, options);
        py::dict out;
        out["u"] = result.u;
        out["policy"] = result.policy.action_of;
        out["optimistic_gain"] = result.optimistic_gain;
        out["spans"] = spans;
        return out;
    }, "EVI around the true model with uniform radii; returns per-sweep value spans.",
       py::arg("mdp"), py::arg("reward_radius"), py::arg("transition_radius"), py::arg("stop_span") = 1e-8);
    m.def("run_ucrl2", [](const Mdp& mdp, std::uint64_t horizon, double delta, std::uint64_t seed) {
        RegretTrace trace;
        {
            py::gil_scoped_release release;
            trace = run_ucrl2(mdp, horizon, delta, seed);
        }
        std::vector<std::uint64_t> t;
        std::vector<double> cumulative, regret;
        std::vector<std::size_t> episode;
        for (const auto& r : trace.records) {
            t.push_back(r.t);
            cumulative.push_back(r.cumulative_reward);
            regret.push_back(r.regret);
            episode.push_back(r.episode);
        }
        py::dict out;
        out["t"] = t;
        out["cumulative_reward"] = cumulative;
        out["regret"] = regret;
        out["episode"] = episode;
        out["rho_star"] = trace.rho_star;
        out["episodes"] = trace.episodes;
        out["csv"] = trace_csv(trace);
        return out;
    }, py::arg("mdp"), py::arg("horizon"), py::arg("delta") = 0.05, py::arg("seed") = 0);
    m.def("theoretical_bound", &theoretical_bound, py::arg("kappa"), py::arg("n_states"),
          py::arg("n_actions"), py::arg("horizon"), py::arg("delta"));
    m.def("sweep_theorem3", [](std::size_t num, std::size_t S, std::size_t A, std::uint64_t seed) {
        SweepReport r;
        {
            py::gil_scoped_release release;
            r = sweep_theorem3(num, S, A, seed);
        }
        py::dict out;
        out["instances"] = r.instances;
        out["skipped"] = r.skipped;
        out["min_ratio"] = r.min_ratio;
        out["max_ratio"] = r.max_ratio;
        out["violations"] = r.violations;
        out["max_residual"] = r.max_residual;
        return out;
    });

    m.def("parse_mdp", [](const std::string& text) { return parse_mdp(text).mdp; });
    m.def("dump_mdp", [](const Mdp& mdp) { return dump_mdp(with_default_names(mdp)); });
    m.def("dump_report", [](const Mdp& mdp) { return dump_report(analyze(mdp)); });

    m.attr("__version__") = "0.1.0";
}
