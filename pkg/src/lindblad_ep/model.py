"""Quantum Markov semigroups of stochastic limit type.

A model is given by a system Hamiltonian ``H_S``, a coupling operator ``V``,
and a pair of rates ``(gamma_minus, gamma_plus)`` for each Bohr frequency
that participates.  From this data we build the eigenoperators ``V_omega``,
the per-frequency generators and the special GKSL representation with
Kraus operators paired as

    L_{2l-1} = sqrt(gamma_plus) V_omega^*,   L_{2l} = sqrt(gamma_minus) V_omega.

All derived objects live in the canonical eigenbasis of ``H_S`` (see
:class:`SLTModel`), since the reversing transpose depends on the basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import MissingRates, NonFiniteInput, UnknownFrequency, ValidationError
from .matcore import (
    SpectralData,
    as_matrix,
    comm,
    dag,
    default_tol,
    herm_eig,
    norm,
)

REAL_TOL = 1e-12


def _frequency_clusters(spec: SpectralData):
    """Group positive level differences into Bohr frequencies.

    Returns ``[(omega, [(n, m), ...]), ...]`` sorted by omega, where each
    pair has ``eps_n - eps_m`` within the merge tolerance of its neighbours.
    """
    eps = spec.values
    diffs = sorted(
        (eps[n] - eps[m], n, m)
        for n in range(len(eps))
        for m in range(len(eps))
        if eps[n] > eps[m]
    )
    clusters: list[list[tuple[float, int, int]]] = []
    for item in diffs:
        if clusters and item[0] - clusters[-1][-1][0] <= spec.tol_used:
            clusters[-1].append(item)
        else:
            clusters.append([item])
    return [
        (float(np.mean([c[0] for c in cl])), [(c[1], c[2]) for c in cl]) for cl in clusters
    ]


def bohr_frequencies(spec: SpectralData) -> list[float]:
    """Sorted positive differences of distinct eigenvalues, deduplicated."""
    return [w for w, _ in _frequency_clusters(spec)]


def _match_cluster(spec: SpectralData, omega: float):
    clusters = _frequency_clusters(spec)
    if clusters:
        k = int(np.argmin([abs(w - omega) for w, _ in clusters]))
        w, pairs = clusters[k]
        if abs(w - omega) <= max(spec.tol_used, 1e-12 * abs(omega)):
            return k, pairs
    raise UnknownFrequency(f"{omega!r} is not a Bohr frequency of the spectrum")


def eigenoperator(V, spec: SpectralData, omega: float) -> np.ndarray:
    """``V_omega = sum P_m V P_n`` over level pairs with ``eps_n - eps_m = omega``."""
    V = as_matrix(V, "V")
    _, pairs = _match_cluster(spec, omega)
    P = spec.projections
    return sum(P[m] @ V @ P[n] for n, m in pairs)


@dataclass(frozen=True, eq=False)
class SLTModel:
    """User-level description of a stochastic-limit-type semigroup.

    ``H_S``, ``V`` and ``H_omega`` are stored as supplied.  When ``H_S`` is
    not diagonal the model is rotated to the canonical eigenbasis returned by
    :func:`herm_eig`; the ``*_eig`` attributes hold the rotated operators and
    every downstream quantity is expressed there.

    ``rates`` and ``H_omega`` are keyed by the index of the Bohr frequency in
    the sorted list ``frequencies``.
    """

    H_S: np.ndarray
    V: np.ndarray
    rates: Mapping[int, tuple[float, float]]
    H_omega: Mapping[int, np.ndarray] = field(default_factory=dict)
    eig_tol: float | None = None

    # derived in __post_init__
    dim: int = field(init=False, repr=False)
    basis: np.ndarray = field(init=False, repr=False)
    spectrum: SpectralData = field(init=False, repr=False)
    frequencies: tuple[float, ...] = field(init=False, repr=False)
    H_S_eig: np.ndarray = field(init=False, repr=False)
    V_eig: np.ndarray = field(init=False, repr=False)
    H_omega_eig: dict = field(init=False, repr=False)
    real_V_flag: bool = field(init=False, repr=False)

    def __post_init__(self):
        H_S = _checked(self.H_S, "H_S")
        d = H_S.shape[0]
        V = _checked(self.V, "V")
        if V.shape != (d, d):
            raise ValidationError(f"expected shape {(d, d)}, got {V.shape}", "V")
        tol = self.eig_tol if self.eig_tol is not None else default_tol(H_S)
        if norm(H_S - dag(H_S)) > tol * max(1.0, norm(H_S)):
            raise ValidationError("H_S not Hermitian", "H_S")

        spec_orig = herm_eig(H_S, tol)
        U = spec_orig.basis
        freqs = bohr_frequencies(spec_orig)

        rates = {}
        for key, pair in dict(self.rates).items():
            k = int(key)
            if not 0 <= k < len(freqs):
                raise ValidationError(
                    f"omega_index {k} out of range (model has {len(freqs)} Bohr frequencies)",
                    f"rates[{k}]",
                )
            gm, gp = (float(x) for x in pair)
            if not (gm > 0 and gp > 0 and np.isfinite(gm) and np.isfinite(gp)):
                raise ValidationError("rates must be strictly positive", f"rates[{k}]")
            rates[k] = (gm, gp)

        H_om = {}
        for key, H in dict(self.H_omega).items():
            k = int(key)
            where = f"H_omega[{k}]"
            if not 0 <= k < len(freqs):
                raise ValidationError(f"omega_index {k} out of range", where)
            H = _checked(H, where)
            if H.shape != (d, d):
                raise ValidationError(f"expected shape {(d, d)}, got {H.shape}", where)
            if norm(H - dag(H)) > 1e-10 * max(1.0, norm(H)):
                raise ValidationError("H_omega not Hermitian", where)
            if norm(comm(H, H_S)) > 1e-10 * max(1.0, norm(H) * norm(H_S)):
                raise ValidationError("H_omega does not commute with H_S", where)
            H_om[k] = H

        V_eig = dag(U) @ V @ U
        H_om_eig = {k: dag(U) @ H @ U for k, H in H_om.items()}
        imag = max([np.abs(V_eig.imag).max()] + [np.abs(H.imag).max() for H in H_om_eig.values()])
        scale = max([1.0, norm(V_eig)] + [norm(H) for H in H_om_eig.values()])
        real_flag = bool(imag <= REAL_TOL * scale)
        if real_flag:
            V_eig = V_eig.real.astype(complex)
            H_om_eig = {k: H.real.astype(complex) for k, H in H_om_eig.items()}

        eps = spec_orig.values
        mults = [lv.multiplicity for lv in spec_orig.levels]
        H_S_eig = np.diag(np.repeat(eps, mults)).astype(complex)
        # tol is reused unchanged: the rotated spectrum has the same gaps
        spec = herm_eig(H_S_eig, spec_orig.tol_used)

        s = object.__setattr__
        s(self, "H_S", H_S)
        s(self, "V", V)
        s(self, "rates", rates)
        s(self, "H_omega", H_om)
        s(self, "dim", d)
        s(self, "basis", U)
        s(self, "spectrum", spec)
        s(self, "frequencies", tuple(freqs))
        s(self, "H_S_eig", H_S_eig)
        s(self, "V_eig", V_eig)
        s(self, "H_omega_eig", H_om_eig)
        s(self, "real_V_flag", real_flag)

    def frequency_index(self, omega: float) -> int:
        k, _ = _match_cluster(self.spectrum, omega)
        return k

    @property
    def active_indices(self) -> list[int]:
        return sorted(self.rates)

    def with_rates(self, rates) -> "SLTModel":
        return SLTModel(self.H_S, self.V, rates, self.H_omega, self.eig_tol)


def _checked(M, name) -> np.ndarray:
    try:
        return as_matrix(M, name)
    except (ValueError, NonFiniteInput) as exc:
        raise ValidationError(str(exc), name) from None


@dataclass(frozen=True, eq=False)
class FrequencyComponent:
    index: int
    omega: float
    V_omega: np.ndarray
    gamma_minus: float
    gamma_plus: float
    H_omega: np.ndarray
    G_omega: np.ndarray

    @property
    def kraus_pair(self) -> tuple[np.ndarray, np.ndarray]:
        """``(L_{2l-1}, L_{2l}) = (sqrt(g+) V*, sqrt(g-) V)``."""
        return (
            np.sqrt(self.gamma_plus) * dag(self.V_omega),
            np.sqrt(self.gamma_minus) * self.V_omega,
        )

    def heisenberg(self, x: np.ndarray) -> np.ndarray:
        V, G = self.V_omega, self.G_omega
        return (
            dag(G) @ x
            + self.gamma_minus * dag(V) @ x @ V
            + self.gamma_plus * V @ x @ dag(V)
            + x @ G
        )

    def local_gksl(self) -> "GKSLForm":
        return GKSLForm(
            H=self.H_omega,
            G=self.G_omega,
            kraus=self.kraus_pair,
            omegas=(self.omega,),
        )


@dataclass(frozen=True, eq=False)
class GKSLForm:
    """``L(x) = i[H, x] - 1/2 sum (L*L x - 2 L* x L + x L*L)``.

    ``G = -1/2 sum L*L - iH``; ``omegas[l]`` is the Bohr frequency of the
    Kraus pair ``kraus[2l], kraus[2l+1]``.
    """

    H: np.ndarray
    G: np.ndarray
    kraus: tuple[np.ndarray, ...]
    omegas: tuple[float, ...] = ()

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    @property
    def b(self) -> int:
        return len(self.kraus) // 2


def build_component(model: SLTModel, omega: float) -> FrequencyComponent:
    k = model.frequency_index(omega)
    if k not in model.rates:
        raise MissingRates(f"no rates given for Bohr frequency index {k} (omega={omega:g})")
    gm, gp = model.rates[k]
    w = model.frequencies[k]
    V_w = eigenoperator(model.V_eig, model.spectrum, w)
    H_w = model.H_omega_eig.get(k, np.zeros((model.dim, model.dim), dtype=complex))
    G_w = -0.5 * (gm * dag(V_w) @ V_w + gp * V_w @ dag(V_w)) - 1j * H_w
    return FrequencyComponent(k, w, V_w, gm, gp, H_w, G_w)


def build_components(model: SLTModel) -> list[FrequencyComponent]:
    return [build_component(model, model.frequencies[k]) for k in model.active_indices]


def build_gksl(model: SLTModel) -> GKSLForm:
    return gksl_from_components(build_components(model), model.dim)


def gksl_from_components(components: Sequence[FrequencyComponent], dim: int) -> GKSLForm:
    zero = np.zeros((dim, dim), dtype=complex)
    H = sum((c.H_omega for c in components), zero)
    G = sum((c.G_omega for c in components), zero)
    kraus: list[np.ndarray] = []
    for c in components:
        kraus.extend(c.kraus_pair)
    return GKSLForm(H=H, G=G, kraus=tuple(kraus), omegas=tuple(c.omega for c in components))


@dataclass(frozen=True)
class RepresentationReport:
    max_trace: float
    gram_sigma_min: float
    passed: bool


def validate_special_representation(kraus, rho, tol: float = 1e-10) -> RepresentationReport:
    """Check ``tr(rho L) = 0`` and Hilbert-Schmidt independence of the Kraus list."""
    rho = np.asarray(getattr(rho, "matrix", rho))
    kraus = list(kraus)
    if not kraus:
        return RepresentationReport(0.0, float("inf"), True)
    max_tr = max(abs(np.trace(rho @ L)) for L in kraus)
    B = np.column_stack([L.reshape(-1) for L in kraus])
    sigma_min = float(np.linalg.svd(dag(B) @ B, compute_uv=False).min())
    return RepresentationReport(float(max_tr), sigma_min, bool(max_tr <= tol and sigma_min >= tol))
