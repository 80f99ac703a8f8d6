from __future__ import annotations

import numpy as np
import pytest

from lindblad_ep import samples
from lindblad_ep.dynamics import invariant_state
from lindblad_ep.model import build_components, build_gksl


class Built:
    """A model with its generator, components and invariant state."""

    def __init__(self, model):
        self.model = model
        self.gksl = build_gksl(model)
        self.components = build_components(model)
        self.rho = invariant_state(self.gksl, H_S=model.H_S_eig)


@pytest.fixture(scope="session")
def qubit():
    return Built(samples.qubit_model())


@pytest.fixture(scope="session")
def gibbs():
    return Built(samples.gibbs_three_level())


@pytest.fixture(scope="session")
def mismatched():
    return Built(samples.mismatched_three_level())


def rand_complex(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def rand_density(rng, d):
    A = rand_complex(rng, d)
    R = A @ A.conj().T + 0.1 * np.eye(d)
    return R / np.trace(R)


def rand_diag_density(rng, d):
    p = rng.uniform(0.05, 1.0, d)
    return np.diag(p / p.sum())
