from __future__ import annotations

import math

import numpy as np
import pytest

from lindblad_ep import samples
from lindblad_ep.dynamics import invariant_state
from lindblad_ep.entropy import build_entangled_state, ep_closed_form
from lindblad_ep.errors import NegativeTime, NotAState
from lindblad_ep.model import build_components, build_gksl
from lindblad_ep.oracle import (
    backward_pairing,
    ep_estimate,
    forward_pairing,
    relative_entropy,
    state_pairing,
    two_point_states,
)


def test_relative_entropy_values():
    s = np.diag([0.5, 0.5])
    assert abs(relative_entropy(s, s)) < 1e-15
    assert abs(relative_entropy(s, np.diag([0.75, 0.25])) - 0.5 * math.log(4 / 3)) < 1e-14
    assert relative_entropy(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == math.inf
    with pytest.raises(NotAState):
        relative_entropy(np.diag([0.5, 0.6]), s)


def test_two_point_states_at_zero(mismatched):
    tp = two_point_states(mismatched.gksl, mismatched.rho, 0.0)
    D = build_entangled_state(mismatched.rho).D
    assert np.abs(tp.forward_density - D).max() < 1e-10
    assert np.abs(tp.backward_density - D).max() < 1e-10
    with pytest.raises(NegativeTime):
        two_point_states(mismatched.gksl, mismatched.rho, -0.1)


def test_pairings(mismatched):
    rng = np.random.default_rng(0)
    g, rho = mismatched.gksl, mismatched.rho
    tp = two_point_states(g, rho, 0.3)
    assert abs(np.trace(tp.forward_density) - 1) < 1e-10
    assert abs(np.trace(tp.backward_density) - 1) < 1e-10
    for _ in range(20):
        x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        y = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert abs(state_pairing(tp.forward_density, x, y) - forward_pairing(g, rho, 0.3, x, y)) < 1e-9
        assert abs(state_pairing(tp.backward_density, x, y) - backward_pairing(g, rho, 0.3, x, y)) < 1e-9


def test_balanced_states_coincide(qubit, gibbs):
    for b in (qubit, gibbs):
        for t in (0.1, 1.0):
            tp = two_point_states(b.gksl, b.rho, t)
            assert np.abs(tp.forward_density - tp.backward_density).max() < 1e-8
            assert relative_entropy(tp.forward_density, tp.backward_density) < 1e-10


def test_estimates_at_balance(qubit, gibbs):
    for b in (qubit, gibbs):
        res = ep_estimate(b.gksl, b.rho)
        assert abs(res.estimate) <= 1e-6 and res.converged


def test_estimate_matches_closed_form_random():
    rng = np.random.default_rng(11)
    for _ in range(5):
        m = samples.random_model(rng, 3)
        g = build_gksl(m)
        rho = invariant_state(g)
        cf = ep_closed_form(rho, build_components(m)).total_nats_per_time
        res = ep_estimate(g, rho)
        assert res.converged
        assert abs(res.estimate - cf) <= max(1e-6, 0.01 * cf)
        assert all(r.relative_entropy >= -1e-10 for r in res.table)


def test_mismatched_rate_keeps_growing(mismatched):
    # forward mass outside the backward support makes S(t)/t grow like
    # that mass times log(1/t); no finite limit exists
    res = ep_estimate(mismatched.gksl, mismatched.rho, [1e-3, 3e-4, 1e-4, 3e-5, 1e-5])
    rates = [r.rate for r in res.table]
    assert all(b > a for a, b in zip(rates, rates[1:]))
    per_decade = rates[-1] - rates[-3]
    assert abs(per_decade - 0.00702015105247 * math.log(10)) < 0.1 * per_decade
    assert not res.converged
    assert res.estimate > ep_closed_form(mismatched.rho, mismatched.components).total_nats_per_time


def test_mismatched_default_grid_hits_support_violation(mismatched):
    res = ep_estimate(mismatched.gksl, mismatched.rho)
    assert res.estimate == math.inf and not res.converged
    # backward eigenvalues of order t^2 fall below the support cutoff
    assert any(math.isinf(r.rate) for r in res.table)
    assert math.isfinite(res.table[0].rate)


def test_transpose_invariant_generator():
    # real symmetric Kraus set: Theta T Theta = T, backward = first-factor image
    m = samples.three_level_model([(1.0, 1.0), (1.0, 1.0)])
    g = build_gksl(m)
    rho = invariant_state(g)
    tp = two_point_states(g, rho, 0.5)
    assert np.abs(tp.forward_density - tp.backward_density).max() < 1e-10


def test_grid_validation(qubit):
    with pytest.raises(ValueError):
        ep_estimate(qubit.gksl, qubit.rho, [1e-4, 1e-3])
    with pytest.raises(ValueError):
        ep_estimate(qubit.gksl, qubit.rho, [0.0])
