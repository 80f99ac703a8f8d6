"""Generator evaluation, semigroup propagation and the invariant state.

Superoperators use column stacking: ``vec(A X B) = (B^T kron A) vec(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    DimensionMismatch,
    MultipleInvariantStates,
    NegativeTime,
    NotFaithful,
    NumericalFailure,
)
from .matcore import comm, dag, expm, hermitize, norm
from .model import GKSLForm

Direction = Literal["heisenberg", "schrodinger"]

FAITHFUL_THRESHOLD = 1e-8


def vec(X: np.ndarray) -> np.ndarray:
    return np.asarray(X).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape(d, d, order="F")


@dataclass(frozen=True, eq=False)
class Superoperator:
    dim: int
    matrix: np.ndarray
    direction: str

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(X), self.dim)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    eigen_floor: float
    faithful_threshold: float = FAITHFUL_THRESHOLD
    residual: float | None = None
    commutator_residual: float | None = None

    @classmethod
    def from_matrix(cls, M, faithful_threshold: float = FAITHFUL_THRESHOLD) -> "DensityMatrix":
        """Validate a user-supplied density matrix (Hermitian, unit trace, PSD)."""
        M = np.array(M, dtype=complex)
        if norm(M - dag(M)) > 1e-12 * max(1.0, norm(M)):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(M) - 1) > 1e-10:
            raise ValueError(f"density matrix has trace {np.trace(M).real:.12g}")
        floor = float(np.linalg.eigvalsh(hermitize(M))[0])
        if floor < -1e-10:
            raise ValueError(f"density matrix has negative eigenvalue {floor:.3e}")
        return cls(hermitize(M), floor, faithful_threshold)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def faithful(self) -> bool:
        # threshold is relative to the uniform weight 1/d
        return self.eigen_floor >= self.faithful_threshold / self.dim

    def require_faithful(self) -> "DensityMatrix":
        if not self.faithful:
            raise NotFaithful(
                f"smallest eigenvalue {self.eigen_floor:.3e} is below "
                f"{self.faithful_threshold:g}/d; reduce to the recurrent subspace first"
            )
        return self


def _as_rho(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "matrix", rho))


def superoperator(g: GKSLForm, direction: Direction = "schrodinger") -> Superoperator:
    d = g.dim
    one = np.eye(d)
    H = g.H
    if direction == "heisenberg":
        S = 1j * (np.kron(one, H) - np.kron(H.T, one))
        for L in g.kraus:
            LL = dag(L) @ L
            S = S - 0.5 * (np.kron(one, LL) - 2 * np.kron(L.T, dag(L)) + np.kron(LL.T, one))
    elif direction == "schrodinger":
        S = -1j * (np.kron(one, H) - np.kron(H.T, one))
        for L in g.kraus:
            LL = dag(L) @ L
            S = S + np.kron(L.conj(), L) - 0.5 * (np.kron(one, LL) + np.kron(LL.T, one))
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return Superoperator(d, np.asarray(S, dtype=complex), direction)


def apply_generator(g: GKSLForm, x, direction: Direction = "heisenberg") -> np.ndarray:
    """Evaluate the generator (Heisenberg) or its trace dual (Schrodinger) on ``x``."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (g.dim, g.dim):
        raise DimensionMismatch(f"operator has shape {x.shape}, generator acts on dim {g.dim}")
    if direction == "heisenberg":
        out = 1j * comm(g.H, x)
        for L in g.kraus:
            LL = dag(L) @ L
            out -= 0.5 * (LL @ x - 2 * dag(L) @ x @ L + x @ LL)
    elif direction == "schrodinger":
        out = -1j * comm(g.H, x)
        for L in g.kraus:
            LL = dag(L) @ L
            out += L @ x @ dag(L) - 0.5 * (LL @ x + x @ LL)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return out


def semigroup(g: GKSLForm, t: float, direction: Direction = "schrodinger") -> Superoperator:
    """``T_t = exp(t L)`` (or its predual) as a superoperator matrix."""
    if t < 0:
        raise NegativeTime(f"t = {t} < 0")
    S = superoperator(g, direction)
    return Superoperator(g.dim, expm(t * S.matrix), direction)


def propagate(g: GKSLForm, X, t: float, direction: Direction = "schrodinger") -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.shape != (g.dim, g.dim):
        raise DimensionMismatch(f"operator has shape {X.shape}, generator acts on dim {g.dim}")
    return semigroup(g, t, direction)(X)


def choi_matrix(T: Superoperator) -> np.ndarray:
    """``sum_ij E_ij kron T(E_ij)``; PSD iff ``T`` is completely positive."""
    d = T.dim
    C = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d))
            E[i, j] = 1.0
            C += np.kron(E, T(E))
    return C


def invariant_state(
    g: GKSLForm,
    tol: float = 1e-9,
    *,
    H_S=None,
    faithful_threshold: float = FAITHFUL_THRESHOLD,
    require_faithful: bool = True,
    null_tol: float = 1e-9,
) -> DensityMatrix:
    """Unique stationary density of the predual semigroup.

    The kernel of the Schrodinger superoperator is read off its SVD.  A
    second singular value below ``null_tol * s_max`` means the stationary
    subspace is degenerate and we refuse to pick a state.
    """
    S = superoperator(g, "schrodinger").matrix
    _, s, Vh = np.linalg.svd(S)
    scale = max(1.0, s[0])
    if len(s) > 1 and s[-2] <= null_tol * scale:
        n_null = int(np.sum(s <= null_tol * scale))
        raise MultipleInvariantStates(
            f"stationary subspace has dimension {n_null}; the invariant state is not unique"
        )
    rho = unvec(Vh[-1].conj(), g.dim)
    rho = hermitize(rho / np.trace(rho))
    w, U = np.linalg.eigh(rho)
    if w[0] < 0:
        if w[0] < -1e-8:
            raise NumericalFailure(f"stationary solution has eigenvalue {w[0]:.3e}")
        w = np.clip(w, 0.0, None)
        rho = hermitize((U * w) @ dag(U))
        rho = rho / np.trace(rho).real
    residual = norm(apply_generator(g, rho, "schrodinger"))
    if residual > tol * scale:
        raise NumericalFailure(f"||L_*(rho)|| = {residual:.3e} exceeds {tol:g}")
    comm_res = None if H_S is None else norm(comm(rho, np.asarray(H_S)))
    out = DensityMatrix(
        rho,
        float(np.linalg.eigvalsh(rho)[0]),
        faithful_threshold,
        residual=residual,
        commutator_residual=comm_res,
    )
    if require_faithful:
        out.require_faithful()
    return out
