"""Entropy production and detailed balance for stochastic-limit-type quantum Markov semigroups."""

from .balance import (
    DBReport,
    check_local_global,
    check_slt_balance,
    check_sqdb,
    check_sqdb_theta,
    equivalence_suite,
    modular_half,
)
from .dynamics import DensityMatrix, apply_generator, invariant_state, propagate, superoperator
from .entropy import (
    EPReport,
    build_entangled_state,
    ep_closed_form,
    ep_general,
    is_zero_ep,
    moments,
    phi_maps,
)
from .model import SLTModel, build_components, build_gksl
from .oracle import ep_estimate, relative_entropy, two_point_states

__all__ = [
    "DBReport",
    "DensityMatrix",
    "EPReport",
    "SLTModel",
    "apply_generator",
    "build_components",
    "build_entangled_state",
    "build_gksl",
    "check_local_global",
    "check_slt_balance",
    "check_sqdb",
    "check_sqdb_theta",
    "ep_closed_form",
    "ep_estimate",
    "ep_general",
    "equivalence_suite",
    "invariant_state",
    "is_zero_ep",
    "modular_half",
    "moments",
    "phi_maps",
    "propagate",
    "relative_entropy",
    "superoperator",
    "two_point_states",
]
