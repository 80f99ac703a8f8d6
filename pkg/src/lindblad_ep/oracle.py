"""Brute-force entropy production from two-point states.

The forward state pairs ``x (x) y`` with ``tr(rho^1/2 x^T rho^1/2 T_t(y))``
and the backward state with ``tr(rho^1/2 T_t(x^T) rho^1/2 y)``.  As
densities on ``h (x) h`` they are ``(id (x) T_*t)(D)`` and
``((Theta T Theta)_*t (x) id)(D)``, where ``Theta`` is the transpose in
the canonical basis.  The entropy production is the right derivative of
their relative entropy at ``t = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import propagate, superoperator
from .entropy import build_entangled_state
from .errors import NegativeTime, NotAState
from .matcore import DEFAULT_LOG_CUTOFF, expm, log_on_support, norm, psd_sqrt
from .model import GKSLForm

DEFAULT_T_GRID = (1e-4, 3e-5, 1e-5, 3e-6, 1e-6, 3e-7, 1e-7)


def commutation_matrix(d: int) -> np.ndarray:
    """``K vec(X) = vec(X^T)`` for column-stacked ``vec``."""
    K = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            K[i + d * j, j + d * i] = 1.0
    return K


def _apply_second(T: np.ndarray, D: np.ndarray, d: int) -> np.ndarray:
    T4 = T.reshape(d, d, d, d, order="F")
    return np.einsum("pqjl,ijkl->ipkq", T4, D.reshape(d, d, d, d)).reshape(d * d, d * d)


def _apply_first(T: np.ndarray, D: np.ndarray, d: int) -> np.ndarray:
    T4 = T.reshape(d, d, d, d, order="F")
    return np.einsum("pqik,ijkl->pjql", T4, D.reshape(d, d, d, d)).reshape(d * d, d * d)


@dataclass(frozen=True, eq=False)
class TwoPointStates:
    t: float
    forward_density: np.ndarray
    backward_density: np.ndarray


def two_point_states(g: GKSLForm, rho, t: float) -> TwoPointStates:
    if t < 0:
        raise NegativeTime(f"t = {t} < 0")
    ent = build_entangled_state(rho)
    d = ent.dim
    S = superoperator(g, "schrodinger").matrix
    K = commutation_matrix(d)
    T = expm(t * S)
    T_rev = expm(t * (K @ S @ K))
    return TwoPointStates(t, _apply_second(T, ent.D, d), _apply_first(T_rev, ent.D, d))


def relative_entropy(sigma, tau, cutoff: float = DEFAULT_LOG_CUTOFF) -> float:
    """``tr sigma (log sigma - log tau)`` in nats; ``inf`` if supp sigma leaves supp tau."""
    sigma = np.asarray(sigma, dtype=complex)
    tau = np.asarray(tau, dtype=complex)
    for name, M in (("sigma", sigma), ("tau", tau)):
        tr = np.trace(M)
        if abs(tr - 1) > 1e-8:
            raise NotAState(f"{name} has trace {tr.real:.12g}")
    log_s, _ = log_on_support(sigma, cutoff)
    log_t, P_t = log_on_support(tau, cutoff)
    outside = float(np.trace(sigma @ (np.eye(len(tau)) - P_t)).real)
    if outside > 1e3 * cutoff:
        return math.inf
    return float(np.trace(sigma @ (log_s - log_t)).real)


@dataclass(frozen=True)
class OracleRow:
    t: float
    relative_entropy: float
    rate: float  # S(t)/t


@dataclass(frozen=True)
class OracleResult:
    estimate: float
    uncertainty: float
    converged: bool
    table: tuple[OracleRow, ...]
    extrapolations: tuple[float, ...]


def ep_estimate(g: GKSLForm, rho, t_grid=DEFAULT_T_GRID, rel_tol: float = 0.01, abs_tol: float = 1e-8) -> OracleResult:
    """Right derivative of ``S(forward_t, backward_t)`` at zero.

    ``S(t)/t`` is linear in ``t`` to leading order, so consecutive grid
    points are combined by linear (first-order Richardson) extrapolation to
    ``t = 0``.  The uncertainty is the spread of the last two
    extrapolations; ``converged`` is false when it exceeds
    ``max(abs_tol, rel_tol * |estimate|)``.
    """
    ts = [float(t) for t in t_grid]
    if not ts or any(t <= 0 for t in ts):
        raise ValueError("t_grid must be non-empty and strictly positive")
    if any(b >= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t_grid must be strictly decreasing")
    rows = []
    for t in ts:
        tp = two_point_states(g, rho, t)
        S = relative_entropy(tp.forward_density, tp.backward_density)
        rows.append(OracleRow(t, S, S / t))
    rates = [r.rate for r in rows]
    if any(math.isinf(x) for x in rates):
        return OracleResult(math.inf, math.inf, False, tuple(rows), ())
    rich = tuple(
        (t1 * f2 - t2 * f1) / (t1 - t2)
        for (t1, f1), (t2, f2) in zip(zip(ts, rates), zip(ts[1:], rates[1:]))
    )
    if rich:
        est = rich[-1]
        unc = abs(rich[-1] - rich[-2]) if len(rich) > 1 else abs(rates[-1] - est)
    else:
        est, unc = rates[-1], math.inf
    converged = unc <= max(abs_tol, rel_tol * abs(est))
    return OracleResult(est, unc, converged, tuple(rows), rich)


def forward_pairing(g: GKSLForm, rho, t: float, x, y) -> complex:
    """``tr(rho^1/2 x^T rho^1/2 T_t(y))`` evaluated directly on ``h``."""
    s = psd_sqrt(np.asarray(getattr(rho, "matrix", rho)))
    return complex(np.trace(s @ np.asarray(x).T @ s @ propagate(g, y, t, "heisenberg")))


def backward_pairing(g: GKSLForm, rho, t: float, x, y) -> complex:
    """``tr(rho^1/2 T_t(x^T) rho^1/2 y)`` evaluated directly on ``h``."""
    s = psd_sqrt(np.asarray(getattr(rho, "matrix", rho)))
    return complex(np.trace(s @ propagate(g, np.asarray(x).T, t, "heisenberg") @ s @ np.asarray(y)))


def state_pairing(density, x, y) -> complex:
    return complex(np.trace(density @ np.kron(x, y)))


def states_close(tp: TwoPointStates) -> float:
    return norm(tp.forward_density - tp.backward_density)
