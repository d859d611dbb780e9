"""Maximum expected hitting cost, potential-based reward shaping and UCRL2
for tabular MDPs (C++ core)."""

from ._core import (
    Mdp,
    MehcError,
    __version__,
    analyze,
    apply_potential,
    check_validity,
    confidence_widths,
    diameter,
    dump_mdp,
    dump_report,
    extended_value_iteration,
    gain_of_policy,
    hitting_cost_matrix,
    inner_max_transition,
    mehc,
    optimal_gain,
    oracle_hitting_cost,
    parse_mdp,
    random_mdp,
    random_potential,
    run_ucrl2,
    shaped_cost_shift,
    sweep_theorem3,
    theoretical_bound,
    toy_mdp,
    validate,
    verify_pi_equivalence,
)

__all__ = [
    "Mdp",
    "MehcError",
    "analyze",
    "apply_potential",
    "check_validity",
    "confidence_widths",
    "diameter",
    "dump_mdp",
    "dump_report",
    "extended_value_iteration",
    "gain_of_policy",
    "hitting_cost_matrix",
    "inner_max_transition",
    "mehc",
    "optimal_gain",
    "oracle_hitting_cost",
    "parse_mdp",
    "random_mdp",
    "random_potential",
    "run_ucrl2",
    "shaped_cost_shift",
    "sweep_theorem3",
    "theoretical_bound",
    "toy_mdp",
    "validate",
    "verify_pi_equivalence",
]
