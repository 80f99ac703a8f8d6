"""Entropy production of stochastic-limit-type semigroups.

Two routes are provided.  The general route works in ``h (x) h`` with the
rank-one reference density ``D = |r><r|``, ``r = sum_j sqrt(rho_j) e_j (x) e_j``,
and the completely positive parts of the forward/backward generators
applied to it; the entropy production is the relative entropy
``tr A (log A - log B)`` of those two images.  The closed form only needs
the per-frequency moments

    nu_minus = tr(rho V*V),  nu_plus = tr(rho V V*),
    mu = tr(rho^1/2 V* rho^1/2 V).

The closed form relies on ``(V (x) 1) r`` being parallel to ``(1 (x) V*) r``
for every frequency; :func:`collinearity_residuals` measures how far a model
is from that.  When it fails, the supports of the two images differ and the
general route reports an infinite entropy production.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import DensityMatrix
from .errors import (
    ComplexCoupling,
    DimensionMismatch,
    DriftConditionFailed,
    NotDiagonal,
    NotFaithful,
    RangeMismatch,
)
from .matcore import DEFAULT_LOG_CUTOFF, dag, log_on_support, norm, psd_sqrt
from .model import FrequencyComponent, GKSLForm

TINY = 1e-300


def _density(rho) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix.from_matrix(rho)


def _real(M: np.ndarray, tol: float = 1e-12) -> bool:
    return float(np.abs(np.imag(M)).max(initial=0.0)) <= tol * max(1.0, norm(M))


@dataclass(frozen=True, eq=False)
class EntangledState:
    r: np.ndarray
    D: np.ndarray
    weights: np.ndarray  # diagonal of rho in the canonical basis

    @property
    def dim(self) -> int:
        return len(self.weights)


def build_entangled_state(rho) -> EntangledState:
    """Purification ``r`` of ``rho`` with the conjugation fixed by the canonical basis."""
    rho = _density(rho)
    if not rho.faithful:
        raise NotFaithful(f"rho is not faithful (smallest eigenvalue {rho.eigen_floor:.3e})")
    M = rho.matrix
    off = norm(M - np.diag(np.diag(M)))
    if off > 1e-10:
        raise NotDiagonal(f"rho has off-diagonal mass {off:.3e} in the canonical basis")
    p = np.diag(M).real
    d = len(p)
    r = np.zeros(d * d, dtype=complex)
    for j in range(d):
        r[j * d + j] = np.sqrt(p[j])
    return EntangledState(r, np.outer(r, r.conj()), p)


def _kraus_list(ops) -> list[np.ndarray]:
    if isinstance(ops, GKSLForm):
        return list(ops.kraus)
    out: list[np.ndarray] = []
    for item in ops:
        if isinstance(item, FrequencyComponent):
            out.extend(item.kraus_pair)
        else:
            out.append(np.asarray(item, dtype=complex))
    return out


def phi_maps(ops, ent: EntangledState) -> tuple[np.ndarray, np.ndarray]:
    """Forward/backward completely positive parts applied to ``D``.

    ``ops`` is a GKSLForm, a list of FrequencyComponents or a list of Kraus
    operators.  Forward acts on the second tensor factor, backward on the
    first.
    """
    d = ent.dim
    one = np.eye(d)
    fwd = np.zeros((d * d, d * d), dtype=complex)
    bwd = np.zeros((d * d, d * d), dtype=complex)
    for L in _kraus_list(ops):
        if L.shape != (d, d):
            raise DimensionMismatch(f"Kraus operator of shape {L.shape} for dim {d}")
        a = np.kron(one, L) @ ent.r
        b = np.kron(L, one) @ ent.r
        fwd += np.outer(a, a.conj())
        bwd += np.outer(b, b.conj())
    return fwd, bwd


def check_scalar_product_lemma(rho, X, Y) -> tuple[float, float]:
    """Residuals of the two inner-product identities for ``r``.

    ``<(Y (x) 1) r, (1 (x) X) r> = tr((rho^1/2 conj(Y*))^* X rho^1/2)`` and
    ``<(1 (x) Y) r, (1 (x) X) r> = tr(rho Y* X)``.
    """
    ent = build_entangled_state(rho)
    d = ent.dim
    one = np.eye(d)
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    s = np.diag(np.sqrt(ent.weights))
    rho_m = np.diag(ent.weights)
    lhs1 = np.vdot(np.kron(Y, one) @ ent.r, np.kron(one, X) @ ent.r)
    # theta Y* theta is entrywise conjugation of Y* in the canonical basis
    rhs1 = np.trace(dag(s @ dag(Y).conj()) @ X @ s)
    lhs2 = np.vdot(np.kron(one, Y) @ ent.r, np.kron(one, X) @ ent.r)
    rhs2 = np.trace(rho_m @ dag(Y) @ X)
    return float(abs(lhs1 - rhs1)), float(abs(lhs2 - rhs2))


@dataclass(frozen=True)
class MomentTriple:
    omega: float
    nu_minus: float
    nu_plus: float
    mu: float

    @property
    def schwarz_gap(self) -> float:
        """``nu_plus * nu_minus - mu**2``; never negative beyond rounding."""
        return self.nu_plus * self.nu_minus - self.mu**2


def moments(rho, component: FrequencyComponent) -> MomentTriple:
    rho = _density(rho)
    R = rho.matrix
    s = psd_sqrt(R)
    V = component.V_omega
    nu_m = np.trace(R @ dag(V) @ V).real
    nu_p = np.trace(R @ V @ dag(V)).real
    mu = np.trace(s @ dag(V) @ s @ V).real
    return MomentTriple(component.omega, float(nu_m), float(nu_p), float(mu))


@dataclass(frozen=True)
class OmegaTerm:
    omega: float
    gamma_minus: float
    gamma_plus: float
    moments: MomentTriple
    term_flux: float
    term_schwarz: float
    dropped: bool = False

    @property
    def total(self) -> float:
        return self.term_flux + self.term_schwarz


@dataclass(frozen=True)
class EPReport:
    """Entropy production in nats per unit time."""

    total_nats_per_time: float
    method: str
    per_omega: tuple[OmegaTerm, ...] = ()
    diagnostics: dict = field(default_factory=dict)


def _flux_schwarz(gm, gp, m: MomentTriple) -> tuple[float, float]:
    a = gm * m.nu_minus
    b = gp * m.nu_plus
    args = (a, b, m.nu_minus, m.nu_plus, m.mu**2)
    if min(args) < TINY:
        return math.inf, math.inf
    flux = (a - b) * (math.log(a) - math.log(b))
    schwarz = (a + b) * (
        math.log(m.nu_plus) + math.log(m.nu_minus) - 2 * math.log(m.mu)
    )
    return flux, schwarz


def ep_closed_form(rho, components: Sequence[FrequencyComponent]) -> EPReport:
    """Entropy production from second moments of the eigenoperators.

    Each frequency contributes the flux term
    ``(g- nu- - g+ nu+) log(g- nu- / (g+ nu+))`` and the Schwarz term
    ``(g- nu- + g+ nu+) log(nu+ nu- / mu^2)``; both are non-negative.
    A frequency whose eigenoperator vanishes is skipped.
    """
    rho = _density(rho)
    for c in components:
        if not (_real(c.V_omega) and _real(c.H_omega)):
            raise ComplexCoupling(
                f"V_omega or H_omega is not real at omega={c.omega:g}; closed form does not apply"
            )
    if not rho.faithful:
        raise NotFaithful("closed form needs a faithful invariant state")
    terms = []
    for c in components:
        m = moments(rho, c)
        if m.nu_minus <= 0.0 and m.nu_plus <= 0.0:
            terms.append(OmegaTerm(c.omega, c.gamma_minus, c.gamma_plus, m, 0.0, 0.0, True))
            continue
        flux, schwarz = _flux_schwarz(c.gamma_minus, c.gamma_plus, m)
        terms.append(OmegaTerm(c.omega, c.gamma_minus, c.gamma_plus, m, flux, schwarz))
    total = math.fsum(t.total for t in terms)
    diag = {}
    try:
        col = collinearity_residuals(rho, components)
        diag["collinearity_residual"] = max(col, default=0.0)
    except NotDiagonal:
        diag["collinearity_residual"] = math.nan
    return EPReport(total, "closed_form", tuple(terms), diag)


def collinearity_residuals(rho, components: Sequence[FrequencyComponent]) -> list[float]:
    """``||(V (x) 1) r - (mu/nu+) (1 (x) V*) r||`` for each frequency."""
    ent = build_entangled_state(rho)
    one = np.eye(ent.dim)
    out = []
    for c in components:
        m = moments(rho, c)
        V = c.V_omega
        lhs = np.kron(V, one) @ ent.r
        if m.nu_plus <= 0:
            out.append(norm(lhs))
            continue
        rhs = (m.mu / m.nu_plus) * (np.kron(one, dag(V)) @ ent.r)
        out.append(norm(lhs - rhs))
    return out


def phi_forward_block_matrix(rho, components: Sequence[FrequencyComponent]):
    """Forward image of ``D`` in the basis of normalized ``(1 (x) V) r, (1 (x) V*) r``.

    Returns ``(M, leak)`` where ``M`` is the ``2b x 2b`` matrix of the
    forward image in that basis (ordered ``V_1, V_1*, V_2, ...``) and
    ``leak`` is the norm of the part of the image outside their span.
    """
    ent = build_entangled_state(rho)
    one = np.eye(ent.dim)
    cols = []
    for c in components:
        for X in (c.V_omega, dag(c.V_omega)):
            v = np.kron(one, X) @ ent.r
            cols.append(v / norm(v))
    B = np.column_stack(cols) if cols else np.zeros((ent.dim**2, 0))
    fwd, _ = phi_maps(components, ent)
    M = dag(B) @ fwd @ B
    P = B @ dag(B)
    leak = norm(fwd - P @ fwd @ P)
    return M, leak


def drift_residual(rho, G) -> float:
    """``||rho^1/2 G^T - G rho^1/2||``."""
    s = psd_sqrt(_density(rho).matrix)
    G = np.asarray(G)
    return norm(s @ G.T - G @ s)


def ep_general(
    rho,
    g: GKSLForm,
    *,
    strict: bool = True,
    cutoff: float = DEFAULT_LOG_CUTOFF,
    range_tol: float = 1e-8,
    drift_tol: float = 1e-8,
) -> EPReport:
    """Entropy production as ``tr A (log A - log B)`` on ``h (x) h``.

    ``A`` and ``B`` are the forward and backward images of ``D``.  The
    drift condition ``rho^1/2 G^T = G rho^1/2`` must hold.  If the supports
    of ``A`` and ``B`` differ, ``strict`` raises :class:`RangeMismatch`;
    otherwise the relative-entropy convention applies and the result is
    ``+inf`` whenever ``A`` has weight outside the support of ``B``.
    """
    rho = _density(rho)
    dres = drift_residual(rho, g.G)
    if dres > drift_tol:
        raise DriftConditionFailed(f"||rho^1/2 G^T - G rho^1/2|| = {dres:.3e}")
    ent = build_entangled_state(rho)
    A, B = phi_maps(g, ent)
    diag = {"drift_residual": dres}
    if not g.kraus or norm(A) == 0.0 and norm(B) == 0.0:
        return EPReport(0.0, "general", (), {**diag, "range_mismatch": 0.0, "symmetrized": 0.0})

    logA, PA = log_on_support(A, cutoff)
    logB, PB = log_on_support(B, cutoff)
    mismatch = norm(PA - PB)
    diag["range_mismatch"] = mismatch
    if mismatch > range_tol:
        if strict:
            raise RangeMismatch(f"supports of forward/backward images differ by {mismatch:.3e}")
        leak = float(np.trace(A @ (np.eye(len(A)) - PB)).real)
        diag["mass_outside_backward_support"] = leak
        diag["symmetrized"] = math.inf
        return EPReport(math.inf, "general", (), diag)

    # restrict both logs to the symmetrized common support
    P = (PA @ PB + PB @ PA) / 2
    lA = P @ logA @ P
    lB = P @ logB @ P
    total = float(np.trace(A @ (lA - lB)).real)
    diag["symmetrized"] = float(0.5 * np.trace((A - B) @ (lA - lB)).real)
    return EPReport(total, "general", (), diag)


@dataclass(frozen=True)
class ZeroEPVerdict:
    holds: bool
    violations: tuple[float, ...]
    witnesses: tuple[tuple[float, float, float], ...]  # (omega, flux residual, schwarz residual)


def is_zero_ep(moment_list: Sequence[MomentTriple], rates, tol: float = 1e-8) -> ZeroEPVerdict:
    """Zero entropy production test: per frequency ``g- nu- = g+ nu+`` and ``nu- nu+ = mu^2``.

    ``rates`` is a sequence of ``(gamma_minus, gamma_plus)`` aligned with
    ``moment_list``.
    """
    bad = []
    wit = []
    for m, (gm, gp) in zip(moment_list, rates, strict=True):
        flux = abs(gm * m.nu_minus - gp * m.nu_plus)
        sch = abs(m.nu_minus * m.nu_plus - m.mu**2)
        wit.append((m.omega, flux, sch))
        if flux > tol or sch > tol:
            bad.append(m.omega)
    return ZeroEPVerdict(not bad, tuple(bad), tuple(wit))


def zero_ep_verdict(rho, components: Sequence[FrequencyComponent], tol: float = 1e-8):
    ms = [moments(rho, c) for c in components]
    return is_zero_ep(ms, [(c.gamma_minus, c.gamma_plus) for c in components], tol)
