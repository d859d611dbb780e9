import json
import math

import pytest

import mehc


def test_toy_structural_values():
    toy = mehc.toy_mdp(0.11, 0.1, 0.05)
    assert toy.n_states == 2 and toy.n_actions == 2
    report = mehc.analyze(toy)
    assert report["mehc"] == pytest.approx(2.2, abs=1e-9)
    assert report["diameter"] == pytest.approx(20.0, abs=1e-9)
    assert report["optimal_gain"] == pytest.approx(0.9, abs=1e-9)
    assert report["bias_span"] == pytest.approx(0.2, abs=1e-9)
    assert mehc.oracle_hitting_cost(toy, 0, 1) == pytest.approx(2.2, abs=1e-12)


def test_mdp_from_lists_and_validation():
    mdp = mehc.Mdp([[[0.5, 0.4]], [[0.0, 1.0]]], [[0.1], [0.2]])
    problems = mehc.validate(mdp)
    assert len(problems) == 1
    with pytest.raises(mehc.MehcError, match="InvalidMdp"):
        mehc.optimal_gain(mdp)


def test_shaping_round_trip():
    toy = mehc.toy_mdp()
    shaped = mehc.apply_potential(toy, [0.0, 0.1])
    assert shaped.mean_reward[0][1] == pytest.approx(0.895, abs=1e-12)
    assert mehc.mehc(shaped) == pytest.approx(2.1, abs=1e-9)
    assert mehc.verify_pi_equivalence(toy, [0.0, 0.1]) <= 1e-10
    residual = mehc.shaped_cost_shift(toy, [0.0, 0.1])
    assert max(abs(v) for row in residual for v in row) <= 1e-9
    with pytest.raises(mehc.MehcError, match="ShapingOutOfBounds"):
        mehc.apply_potential(toy, [0.0, 100.0])


def test_confidence_and_inner_max():
    reward, transition = mehc.confidence_widths(10, 100, 2, 2, 0.05)
    assert reward == pytest.approx(math.sqrt(7 * math.log(16000) / 20), rel=1e-12)
    assert transition == pytest.approx(math.sqrt(28 * math.log(8000) / 10), rel=1e-12)
    assert mehc.inner_max_transition([0.5, 0.5], 0.2, [1.0, 0.0]) == pytest.approx([0.6, 0.4])


def test_evi_spans_stay_below_mehc():
    toy = mehc.toy_mdp()
    result = mehc.extended_value_iteration(toy, 0.01, 0.1)
    assert max(result["spans"]) <= mehc.mehc(toy) + 1e-6
    assert result["optimistic_gain"] >= 0.9 - 1e-8


def test_ucrl2_is_deterministic():
    toy = mehc.toy_mdp()
    first = mehc.run_ucrl2(toy, 2000, 0.05, 3)
    second = mehc.run_ucrl2(toy, 2000, 0.05, 3)
    assert first["csv"] == second["csv"]
    assert len(first["t"]) == 2000
    assert first["rho_star"] == pytest.approx(0.9)
    assert mehc.theoretical_bound(2.2, 2, 2, 1e5, 0.05) == pytest.approx(254835.665311, rel=1e-9)


def test_file_format_round_trip():
    mdp = mehc.random_mdp(4, 2, 2, seed=5)
    text = mehc.dump_mdp(mdp)
    back = mehc.parse_mdp(text)
    assert back.transition == mdp.transition
    assert back.mean_reward == mdp.mean_reward
    report = json.loads(mehc.dump_report(mdp))
    assert set(report) == {"diameter", "mehc", "optimal_gain", "bias_span", "hitting_time", "hitting_cost"}
    with pytest.raises(mehc.MehcError, match="ParseError"):
        mehc.parse_mdp('{"states": 1}')


def test_sweep_reports_no_violations():
    report = mehc.sweep_theorem3(20, 3, 2, 1)
    assert report["instances"] == 20
    assert report["violations"] == 0
