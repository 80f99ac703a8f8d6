"""Reference models used by the tests, the acceptance suite and the CLI docs."""

from __future__ import annotations

import numpy as np

from .model import SLTModel

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def qubit_model(gamma_minus: float = 1.0, gamma_plus: float = 0.5) -> SLTModel:
    return SLTModel(np.diag([0.0, 1.0]), SIGMA_X, {0: (gamma_minus, gamma_plus)})


def three_level_model(rates) -> SLTModel:
    """``H_S = diag(0, 1, 2)`` with the all-ones coupling; Bohr frequencies 1 and 2."""
    return SLTModel(np.diag([0.0, 1.0, 2.0]), np.ones((3, 3)), dict(enumerate(rates)))


def gibbs_three_level(beta: float = 1.0) -> SLTModel:
    return three_level_model([(1.0, np.exp(-beta * 1.0)), (1.0, np.exp(-beta * 2.0))])


def mismatched_three_level() -> SLTModel:
    return three_level_model([(1.0, 0.2), (1.0, 0.8)])


def _generic_levels(rng: np.random.Generator, d: int) -> np.ndarray:
    # well separated and without repeated gaps, so each V_omega is one matrix unit
    while True:
        eps = np.sort(rng.uniform(0.0, 3.0, d))
        gaps = [eps[n] - eps[m] for n in range(d) for m in range(n)]
        if min(np.diff(eps)) > 0.1 and min(np.diff(np.sort(gaps)), default=1.0) > 0.05:
            return eps


def random_model(
    rng: np.random.Generator,
    d: int,
    *,
    balanced: bool = False,
    beta: float = 1.0,
    rotate: bool = False,
) -> SLTModel:
    """Random real-coupling model with generic spectrum and rates in [0.1, 2].

    ``balanced`` picks ``gamma_plus = gamma_minus * exp(-beta * omega)``.
    ``rotate`` presents ``H_S`` and ``V`` in a random real orthogonal basis.
    """
    eps = _generic_levels(rng, d)
    A = rng.normal(size=(d, d))
    V = A + A.T
    H = np.diag(eps)
    if rotate:
        Q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        H = Q @ H @ Q.T
        V = Q @ V @ Q.T
    n_freq = d * (d - 1) // 2
    freqs = sorted(eps[n] - eps[m] for n in range(d) for m in range(n))
    rates = {}
    for k in range(n_freq):
        gm = float(rng.uniform(0.1, 2.0))
        if balanced:
            gp = gm * float(np.exp(-beta * freqs[k]))
        else:
            gp = float(rng.uniform(0.1, 2.0))
        rates[k] = (gm, gp)
    return SLTModel(H, V, rates)
