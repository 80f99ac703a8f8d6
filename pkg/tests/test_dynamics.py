from __future__ import annotations

import numpy as np
import pytest
from conftest import rand_complex, rand_density

from lindblad_ep import samples
from lindblad_ep.dynamics import (
    DensityMatrix,
    apply_generator,
    choi_matrix,
    invariant_state,
    propagate,
    semigroup,
    superoperator,
)
from lindblad_ep.errors import DimensionMismatch, MultipleInvariantStates, NegativeTime, NotFaithful
from lindblad_ep.model import SLTModel, build_gksl


def test_unital_and_trace_preserving(qubit):
    g = qubit.gksl
    assert np.abs(apply_generator(g, np.eye(2))).max() < 1e-14
    rng = np.random.default_rng(1)
    s = rand_density(rng, 2)
    assert abs(np.trace(apply_generator(g, s, "schrodinger"))) < 1e-12
    with pytest.raises(DimensionMismatch):
        apply_generator(g, np.eye(3))


def test_excited_population_rate(qubit):
    E22 = np.diag([0.0, 1.0])
    # in the diagonal basis the upper level decays at gamma_minus = 1
    out = apply_generator(qubit.gksl, E22, "schrodinger")
    assert abs(out[1, 1] + 1.0) < 1e-14


def test_superoperator_matches_direct():
    rng = np.random.default_rng(2)
    g = build_gksl(samples.random_model(rng, 3))
    X = rand_complex(rng, 3)
    for direction in ("heisenberg", "schrodinger"):
        S = superoperator(g, direction)
        assert np.abs(S(X) - apply_generator(g, X, direction)).max() < 1e-12


def test_duality():
    rng = np.random.default_rng(3)
    for _ in range(100):
        d = int(rng.integers(2, 6))
        g = build_gksl(samples.random_model(rng, d))
        s, x = rand_complex(rng, d), rand_complex(rng, d)
        lhs = np.trace(apply_generator(g, s, "schrodinger") @ x)
        rhs = np.trace(s @ apply_generator(g, x, "heisenberg"))
        assert abs(lhs - rhs) < 1e-10 * max(1, abs(lhs))


def test_qubit_relaxation(qubit):
    # two-level rate equation: p_e' = -g- p_e + g+ p_g, relaxes to 1/3 at rate 1.5
    p0 = 0.9
    sigma = np.diag([1 - p0, p0])
    for t in (0.0, 0.3, 1.0, 4.0):
        p = propagate(qubit.gksl, sigma, t)[1, 1].real
        assert abs(p - (1 / 3 + (p0 - 1 / 3) * np.exp(-1.5 * t))) < 1e-12
    with pytest.raises(NegativeTime):
        propagate(qubit.gksl, sigma, -1.0)


def test_semigroup_and_cptp():
    rng = np.random.default_rng(4)
    g = build_gksl(samples.random_model(rng, 3))
    X = rand_complex(rng, 3)
    both = propagate(g, propagate(g, X, 0.4), 0.7)
    assert np.abs(both - propagate(g, X, 1.1)).max() < 1e-9
    assert np.abs(propagate(g, X, 0.0) - X).max() < 1e-14
    for t in rng.uniform(0, 10, 5):
        s = propagate(g, rand_density(rng, 3), t)
        assert abs(np.trace(s) - 1) < 1e-10
        assert np.linalg.eigvalsh((s + s.conj().T) / 2)[0] > -1e-10
    for t in (0.01, 0.1, 1.0):
        C = choi_matrix(semigroup(g, t))
        assert np.linalg.eigvalsh((C + C.conj().T) / 2)[0] > -1e-9


def test_invariant_states(qubit, gibbs):
    assert np.abs(qubit.rho.matrix - np.diag([2 / 3, 1 / 3])).max() < 1e-12
    w = np.exp(-np.array([0.0, 1.0, 2.0]))
    assert np.abs(gibbs.rho.matrix - np.diag(w / w.sum())).max() < 1e-10
    sym = samples.three_level_model([(1.0, 1.0), (1.0, 1.0)])
    rho = invariant_state(build_gksl(sym))
    assert np.abs(rho.matrix - np.eye(3) / 3).max() < 1e-12
    for b in (qubit, gibbs):
        for t in (0.1, 1.0, 10.0):
            assert np.abs(propagate(b.gksl, b.rho.matrix, t) - b.rho.matrix).max() < 1e-8
        assert b.rho.commutator_residual < 1e-8


def test_mismatched_state_by_rate_equation(mismatched):
    # classical chain on the levels: down rates g- |V|^2, up rates g+ |V|^2
    down = {(1, 0): 1.0, (2, 1): 1.0, (2, 0): 1.0}
    up = {(0, 1): 0.2, (1, 2): 0.2, (0, 2): 0.8}
    Q = np.zeros((3, 3))
    for (i, j), r in {**down, **up}.items():
        Q[j, i] += r
        Q[i, i] -= r
    A = np.vstack([Q, np.ones(3)])
    p = np.linalg.lstsq(A, np.r_[0, 0, 0, 1.0], rcond=None)[0]
    assert np.abs(p - np.array([11, 6, 5]) / 22).max() < 1e-12
    assert np.abs(np.diag(mismatched.rho.matrix).real - p).max() < 1e-10


def test_degenerate_and_nonfaithful():
    # V diagonal: no transitions, every diagonal state is stationary
    m = SLTModel(np.diag([0.0, 1.0]), np.diag([1.0, 2.0]), {})
    with pytest.raises(MultipleInvariantStates):
        invariant_state(build_gksl(m))
    # pure decay of the upper level: ground state is not faithful
    g = build_gksl(samples.qubit_model(1.0, 1e-12))
    with pytest.raises(NotFaithful):
        invariant_state(g)
    assert not invariant_state(g, require_faithful=False).faithful


def test_density_from_matrix():
    rho = DensityMatrix.from_matrix(np.diag([0.25, 0.75]))
    assert rho.faithful and abs(rho.eigen_floor - 0.25) < 1e-15
    with pytest.raises(ValueError):
        DensityMatrix.from_matrix(np.diag([0.5, 0.6]))
