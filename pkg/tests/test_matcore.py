from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindblad_ep.errors import NonFiniteInput, NonHermitian, NotPSD
from lindblad_ep.matcore import herm_eig, log_on_support, psd_power, psd_sqrt


def test_degenerate_levels_merge():
    spec = herm_eig(np.diag([0.0, 1.0, 1.0]))
    assert list(spec.values) == [0.0, 1.0]
    assert [lv.multiplicity for lv in spec.levels] == [1, 2]
    assert np.abs(spec.projections[1] - np.diag([0, 1, 1])).max() < 1e-12


def test_sigma_x_projections():
    spec = herm_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.abs(spec.values - [-1, 1]).max() < 1e-12
    assert np.abs(spec.projections[0] - 0.5 * np.array([[1, -1], [-1, 1]])).max() < 1e-12
    assert np.abs(spec.projections[1] - 0.5 * np.array([[1, 1], [1, 1]])).max() < 1e-12


def test_near_degenerate_split_by_tolerance():
    M = np.diag([0.0, 1e-12, 1.0])
    assert len(herm_eig(M).levels) == 2
    assert len(herm_eig(M, tol=1e-14).levels) == 3


def test_rejects_bad_input():
    with pytest.raises(NonHermitian):
        herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NonFiniteInput):
        herm_eig(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(NotPSD):
        psd_sqrt(np.diag([1.0, -0.1]))


def test_real_input_keeps_real_basis():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(4, 4))
    spec = herm_eig(A + A.T)
    assert np.abs(spec.basis.imag).max() == 0.0


def test_log_on_support_ignores_kernel():
    L, P = log_on_support(np.diag([0.5, 0.5, 0.0]))
    assert np.abs(L - np.diag([np.log(0.5), np.log(0.5), 0.0])).max() < 1e-14
    assert np.abs(P - np.diag([1, 1, 0])).max() < 1e-14


def test_psd_power_inverse():
    R = np.diag([0.25, 0.75])
    assert np.abs(psd_power(R, -0.5) @ psd_sqrt(R) - np.eye(2)).max() < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10_000))
def test_reconstruction_property(d, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    M = A + A.conj().T
    spec = herm_eig(M)
    assert np.abs(spec.reconstruct() - M).max() < 1e-9
    U = spec.basis
    assert np.abs(U.conj().T @ U - np.eye(d)).max() < 1e-10
    assert all(np.diff(spec.values) > 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10_000))
def test_sqrt_squares_back(d, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    M = A @ A.conj().T
    S = psd_sqrt(M)
    assert np.abs(S @ S - M).max() < 1e-9 * max(1, np.abs(M).max())
