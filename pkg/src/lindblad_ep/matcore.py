"""Dense complex linear algebra with explicit tolerance rules.

Everything here works on small (d <= 64) dense matrices and returns new
arrays; inputs are never modified.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NonFiniteInput, NonHermitian, NotPSD

DEFAULT_EIG_TOL = 1e-10
DEFAULT_LOG_CUTOFF = 1e-12
DEFAULT_PSD_TOL = 1e-10


def as_matrix(M, name="matrix") -> np.ndarray:
    """Return ``M`` as a square complex128 array, rejecting NaN/Inf."""
    A = np.array(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteInput(f"{name} has non-finite entries")
    return A


def dag(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def hermitize(A: np.ndarray) -> np.ndarray:
    return (A + A.conj().T) / 2


def norm(A) -> float:
    """Frobenius norm; used for every residual in the package."""
    return float(np.linalg.norm(A))


def comm(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def default_tol(M: np.ndarray) -> float:
    return DEFAULT_EIG_TOL * max(1.0, norm(M))


@dataclass(frozen=True, eq=False)
class Level:
    value: float
    projection: np.ndarray
    vectors: np.ndarray  # orthonormal columns spanning the eigenspace

    @property
    def multiplicity(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Distinct eigenvalues (strictly increasing) with their projections."""

    levels: tuple[Level, ...]
    tol_used: float

    @property
    def dim(self) -> int:
        return self.levels[0].projection.shape[0]

    @property
    def values(self) -> np.ndarray:
        return np.array([lv.value for lv in self.levels])

    @property
    def projections(self) -> list[np.ndarray]:
        return [lv.projection for lv in self.levels]

    @property
    def basis(self) -> np.ndarray:
        """Unitary whose columns are eigenvectors, grouped level by level."""
        return np.hstack([lv.vectors for lv in self.levels])

    def reconstruct(self) -> np.ndarray:
        return sum(lv.value * lv.projection for lv in self.levels)


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    # first non-negligible component of every column made real positive
    out = vecs.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        big = np.abs(col) > 1e-6 * np.abs(col).max()
        j = int(np.argmax(big))
        out[:, k] = col * (abs(col[j]) / col[j])
    return out


def herm_eig(M, tol: float | None = None) -> SpectralData:
    """Spectral decomposition of a Hermitian matrix with level merging.

    Eigenvalues closer than ``tol`` (single linkage on the sorted list) form
    one level whose projection is the sum of the individual ones.  The
    default tolerance is ``1e-10 * max(1, ||M||)``.
    """
    M = as_matrix(M, "M")
    if tol is None:
        tol = default_tol(M)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if norm(M - dag(M)) > tol * max(1.0, norm(M)):
        raise NonHermitian(f"matrix is not Hermitian (||M - M*|| = {norm(M - dag(M)):.3e})")
    if not np.any(M.imag):
        # real symmetric input keeps a real eigenbasis
        w, U = np.linalg.eigh(hermitize(M.real))
        U = U.astype(complex)
    else:
        w, U = np.linalg.eigh(hermitize(M))
    U = _fix_phases(U)

    groups: list[list[int]] = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[k - 1] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])

    levels = []
    for g in groups:
        vecs = U[:, g]
        levels.append(Level(float(np.mean(w[g])), vecs @ dag(vecs), vecs))
    return SpectralData(tuple(levels), float(tol))


def _eigh_psd(M, tol: float, what: str):
    M = as_matrix(M, what)
    if norm(M - dag(M)) > 1e-8 * max(1.0, norm(M)):
        raise NonHermitian(f"{what} is not Hermitian")
    w, U = np.linalg.eigh(hermitize(M))
    scale = max(abs(w[0]), abs(w[-1]), 0.0)
    if w[0] < -tol * scale:
        raise NotPSD(f"{what} has eigenvalue {w[0]:.3e} (below -{tol:g} * {scale:.3e})")
    return np.clip(w, 0.0, None), U


def psd_sqrt(M, tol: float = DEFAULT_PSD_TOL) -> np.ndarray:
    """Square root of a PSD matrix; eigenvalues in [-tol*|M|, 0) are clamped."""
    w, U = _eigh_psd(M, tol, "M")
    return hermitize((U * np.sqrt(w)) @ dag(U))


def psd_power(M, p: float, tol: float = DEFAULT_PSD_TOL) -> np.ndarray:
    """``M**p`` for a positive definite ``M`` (negative ``p`` needs full rank)."""
    w, U = _eigh_psd(M, tol, "M")
    if p < 0 and w[0] <= 0:
        raise NotPSD("negative power of a singular matrix")
    return hermitize((U * w**p) @ dag(U))


def log_on_support(M, cutoff: float = DEFAULT_LOG_CUTOFF, psd_tol: float = DEFAULT_PSD_TOL):
    """Natural log of a PSD matrix restricted to its support.

    Eigenvalues ``<= cutoff * lambda_max`` count as kernel; the log is zero
    there.  Returns ``(log_M, support_projection)``.
    """
    w, U = _eigh_psd(M, psd_tol, "M")
    lam_max = w[-1] if len(w) else 0.0
    keep = w > cutoff * lam_max if lam_max > 0 else np.zeros_like(w, dtype=bool)
    Uk = U[:, keep]
    log_M = (Uk * np.log(w[keep])) @ dag(Uk)
    return hermitize(log_M), Uk @ dag(Uk)


def expm(M) -> np.ndarray:
    M = np.array(M, dtype=complex)
    if not np.all(np.isfinite(M)):
        raise NonFiniteInput("expm input has non-finite entries")
    return scipy.linalg.expm(M)
