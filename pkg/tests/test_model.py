from __future__ import annotations

import numpy as np
import pytest

from lindblad_ep import samples
from lindblad_ep.errors import MissingRates, UnknownFrequency, ValidationError
from lindblad_ep.matcore import dag, norm
from lindblad_ep.model import (
    SLTModel,
    bohr_frequencies,
    build_component,
    build_gksl,
    eigenoperator,
    validate_special_representation,
)

E12 = np.array([[0.0, 1.0], [0.0, 0.0]])
E21 = E12.T


def test_qubit_component():
    m = samples.qubit_model()
    c = build_component(m, 1.0)
    assert m.frequencies == (1.0,)
    assert np.abs(c.V_omega - E12).max() < 1e-14
    # G = -1/2 (g- V*V + g+ VV*) with g- = 1, g+ = 0.5
    assert np.abs(c.G_omega - np.diag([-0.25, -0.5])).max() < 1e-14
    a, b = c.kraus_pair
    assert np.abs(a - np.sqrt(0.5) * E21).max() < 1e-14
    assert np.abs(b - E12).max() < 1e-14


def test_three_level_frequencies():
    m = samples.gibbs_three_level()
    assert np.abs(np.array(m.frequencies) - [1.0, 2.0]).max() < 1e-12
    V1 = eigenoperator(m.V_eig, m.spectrum, 1.0)
    assert np.abs(V1 - np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]])).max() < 1e-14
    with pytest.raises(UnknownFrequency):
        m.frequency_index(1.5)


def test_eigenoperator_lowers_energy():
    rng = np.random.default_rng(0)
    for _ in range(10):
        m = samples.random_model(rng, 4, rotate=True)
        H = m.H_S_eig
        total = np.zeros_like(H)
        for w in m.frequencies:
            V = eigenoperator(m.V_eig, m.spectrum, w)
            assert norm(H @ V - V @ H + w * V) < 1e-10
            total = total + V + dag(V)
        diag = np.diag(np.diag(m.V_eig))
        assert norm(total + diag - m.V_eig) < 1e-10


def test_bohr_frequencies_degenerate():
    spec = samples.three_level_model([(1, 1), (1, 1)]).spectrum
    assert len(bohr_frequencies(spec)) == 2


def test_validation_errors():
    with pytest.raises(ValidationError, match="H_S not Hermitian"):
        SLTModel(np.array([[0.0, 1.0], [0.0, 1.0]]), samples.SIGMA_X, {0: (1, 1)})
    with pytest.raises(ValidationError, match="strictly positive"):
        samples.qubit_model(0.0, 1.0)
    with pytest.raises(ValidationError, match="out of range"):
        SLTModel(np.diag([0.0, 1.0]), samples.SIGMA_X, {1: (1, 1)})
    with pytest.raises(ValidationError, match="commute"):
        SLTModel(np.diag([0.0, 1.0]), samples.SIGMA_X, {0: (1, 1)}, {0: samples.SIGMA_X})


def test_missing_rates():
    m = samples.three_level_model([(1.0, 0.5)])
    with pytest.raises(MissingRates):
        build_component(m, 2.0)
    assert len(build_gksl(m).kraus) == 2


def test_rotated_model_matches_diagonal():
    rng = np.random.default_rng(5)
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    base = samples.mismatched_three_level()
    rot = SLTModel(Q @ base.H_S @ Q.T, Q @ base.V @ Q.T, base.rates)
    assert rot.real_V_flag
    assert np.abs(np.diag(rot.H_S_eig) - [0, 1, 2]).max() < 1e-12
    # same model up to a signed permutation of basis vectors
    assert np.abs(np.abs(rot.V_eig) - 1).max() < 1e-10


def test_special_representation(qubit):
    rep = validate_special_representation(qubit.gksl.kraus, qubit.rho)
    assert rep.passed
    assert validate_special_representation([], qubit.rho).passed
    bad = validate_special_representation([np.eye(2)], qubit.rho)
    assert not bad.passed
