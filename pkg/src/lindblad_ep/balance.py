"""Standard quantum detailed balance checks for stochastic-limit-type semigroups.

All verdicts compare Frobenius-norm residuals with one absolute tolerance
(default ``1e-8``), so that the booleans from different checks can be
compared with each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import DensityMatrix, apply_generator
from .entropy import zero_ep_verdict
from .errors import HypothesisViolated, InconsistentVerdicts, NotFaithful
from .matcore import dag, norm, psd_power, psd_sqrt
from .model import (
    FrequencyComponent,
    SLTModel,
    build_components,
    build_gksl,
    gksl_from_components,
)

VERDICT_TOL = 1e-8


@dataclass(frozen=True)
class Verdict:
    passed: bool
    residual: float
    details: dict = field(default_factory=dict)


def _rho(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "matrix", rho), dtype=complex)


def _require_faithful(R: np.ndarray, threshold: float = 1e-8):
    floor = float(np.linalg.eigvalsh(R)[0])
    if floor < threshold / R.shape[0]:
        raise NotFaithful(f"rho has smallest eigenvalue {floor:.3e}")


def modular_half(rho, x) -> np.ndarray:
    """``sigma_{-i/2}(x) = rho^1/2 x rho^-1/2``."""
    R = _rho(rho)
    _require_faithful(R)
    return psd_sqrt(R) @ np.asarray(x) @ psd_power(R, -0.5)


def solve_u(targets: Sequence[np.ndarray], basis: Sequence[np.ndarray]):
    """Least-squares ``u`` with ``targets[l] = sum_m u[l, m] basis[m]``.

    Returns ``(u, residual)``.  On the kernel of the basis map ``u`` is
    completed by the identity, so a dependent basis still yields a square
    candidate that can be tested for unitarity.
    """
    k = len(basis)
    if k == 0:
        return np.zeros((0, 0), dtype=complex), 0.0
    B = np.column_stack([np.asarray(b).reshape(-1) for b in basis])
    T = np.column_stack([np.asarray(t).reshape(-1) for t in targets])
    Bp = np.linalg.pinv(B, rcond=1e-10)
    P_null = np.eye(k) - Bp @ B
    C = Bp @ T + P_null
    return C.T, norm(B @ C - T)


def _unitarity(u: np.ndarray) -> float:
    return norm(u @ dag(u) - np.eye(len(u)))


def check_sqdb(rho, kraus, tol: float = VERDICT_TOL) -> Verdict:
    """``rho^1/2 L_l* = sum_m u_lm L_m rho^1/2`` with ``u`` unitary and symmetric."""
    R = _rho(rho)
    s = psd_sqrt(R)
    kraus = [np.asarray(L) for L in kraus]
    u, res = solve_u([s @ dag(L) for L in kraus], [L @ s for L in kraus])
    uni = _unitarity(u)
    sym = norm(u - u.T)
    ok = res <= tol and uni <= tol and sym <= tol
    return Verdict(bool(ok), res, {"u": u, "unitarity": uni, "symmetry": sym})


def check_sqdb_theta(rho, G, kraus, tol: float = VERDICT_TOL) -> Verdict:
    """(i) ``rho^1/2 G^T = G rho^1/2``; (ii) ``rho^1/2 L_l^T = sum u_lm L_m rho^1/2``, ``u = u*`` unitary."""
    R = _rho(rho)
    s = psd_sqrt(R)
    G = np.asarray(G)
    drift = norm(s @ G.T - G @ s)
    kraus = [np.asarray(L) for L in kraus]
    u, res = solve_u([s @ L.T for L in kraus], [L @ s for L in kraus])
    uni = _unitarity(u)
    herm = norm(u - dag(u))
    ok_i = drift <= tol
    ok_ii = res <= tol and uni <= tol and herm <= tol
    return Verdict(
        bool(ok_i and ok_ii),
        max(drift, res),
        {
            "u": u,
            "drift_residual": drift,
            "drift_pass": bool(ok_i),
            "kraus_residual": res,
            "kraus_pass": bool(ok_ii),
            "unitarity": uni,
            "self_adjointness": herm,
        },
    )


def check_slt_balance(rho, components: Sequence[FrequencyComponent], tol: float = VERDICT_TOL) -> Verdict:
    """Per frequency ``sqrt(g+) rho^1/2 V = sqrt(g-) V rho^1/2``.

    When a frequency passes, the modular relations ``rho V rho^-1 = (g-/g+) V``
    and ``rho H_omega rho^-1 = H_omega`` and the commutation of ``rho`` with
    ``V*V`` and ``V V*`` are also measured and reported.
    """
    R = _rho(rho)
    s = psd_sqrt(R)
    R_inv = psd_power(R, -1.0)
    per = []
    for c in components:
        V = c.V_omega
        res = norm(np.sqrt(c.gamma_plus) * s @ V - np.sqrt(c.gamma_minus) * V @ s)
        entry = {"omega": c.omega, "residual": res, "passed": bool(res <= tol)}
        if res <= tol:
            entry["modular_V"] = norm(R @ V @ R_inv - (c.gamma_minus / c.gamma_plus) * V)
            entry["modular_H"] = norm(R @ c.H_omega @ R_inv - c.H_omega)
            entry["commutes_VV"] = max(
                norm(R @ dag(V) @ V - dag(V) @ V @ R), norm(R @ V @ dag(V) - V @ dag(V) @ R)
            )
        per.append(entry)
    worst = max((e["residual"] for e in per), default=0.0)
    return Verdict(all(e["passed"] for e in per), worst, {"per_omega": per})


def check_paired_kraus(rho, components: Sequence[FrequencyComponent], tol: float = VERDICT_TOL) -> Verdict:
    """``rho^1/2 L_{2l-1}* = L_{2l} rho^1/2`` for every pair."""
    s = psd_sqrt(_rho(rho))
    res = [norm(s @ dag(a) - b @ s) for a, b in (c.kraus_pair for c in components)]
    worst = max(res, default=0.0)
    return Verdict(bool(worst <= tol), worst, {"per_pair": res})


@dataclass(frozen=True)
class DBReport:
    sqdb: Verdict
    sqdb_theta: Verdict
    slt_condition3: Verdict
    paired_kraus: Verdict
    zero_ep: Verdict
    tol: float
    local_results: tuple = ()

    @property
    def witness_u(self):
        u = self.sqdb_theta.details.get("u")
        return u if self.sqdb_theta.passed else None

    @property
    def equivalence_flags(self) -> dict:
        return {
            "zero_ep": self.zero_ep.passed,
            "paired_kraus": self.paired_kraus.passed,
            "slt_condition3": self.slt_condition3.passed,
            "sqdb_theta": self.sqdb_theta.passed,
        }

    @property
    def consistent(self) -> bool:
        return len(set(self.equivalence_flags.values())) == 1

    @property
    def all_pass(self) -> bool:
        return self.consistent and self.zero_ep.passed and self.sqdb.passed


def equivalence_suite(
    model: SLTModel | Sequence[FrequencyComponent],
    rho,
    tol: float = VERDICT_TOL,
    *,
    strict: bool = True,
) -> DBReport:
    """Evaluate the four equivalent balance conditions with one tolerance.

    With ``strict`` a disagreement raises :class:`InconsistentVerdicts`
    carrying the report.
    """
    comps = build_components(model) if isinstance(model, SLTModel) else list(model)
    dim = _rho(rho).shape[0]
    g = gksl_from_components(comps, dim)
    zv = zero_ep_verdict(rho, comps, tol)
    worst_zero = max((max(w[1], w[2]) for w in zv.witnesses), default=0.0)
    report = DBReport(
        sqdb=check_sqdb(rho, g.kraus, tol),
        sqdb_theta=check_sqdb_theta(rho, g.G, g.kraus, tol),
        slt_condition3=check_slt_balance(rho, comps, tol),
        paired_kraus=check_paired_kraus(rho, comps, tol),
        zero_ep=Verdict(zv.holds, worst_zero, {"violations": list(zv.violations)}),
        tol=tol,
    )
    if strict and not report.consistent:
        raise InconsistentVerdicts(f"balance verdicts disagree: {report.equivalence_flags}", report)
    return report


def _check_H_omega_span(c: FrequencyComponent, tol: float) -> float:
    H = c.H_omega
    if norm(H) == 0.0:
        return 0.0
    V = c.V_omega
    A = np.column_stack([(dag(V) @ V).reshape(-1), (V @ dag(V)).reshape(-1)])
    coef, *_ = np.linalg.lstsq(A, H.reshape(-1), rcond=None)
    return norm(A @ coef - H.reshape(-1))


@dataclass(frozen=True)
class LocalGlobalReport:
    global_pass: bool
    local: tuple[dict, ...]
    consistent: bool


def check_local_global(model: SLTModel, rho, tol: float = VERDICT_TOL) -> LocalGlobalReport:
    """Global SQDB-Theta versus the same condition for every single frequency.

    Requires each ``H_omega`` to lie in the span of ``V*V`` and ``V V*``.
    Consistent means: global pass iff every local generator fixes ``rho``
    and passes its own check.
    """
    comps = build_components(model)
    for c in comps:
        fit = _check_H_omega_span(c, tol)
        if fit > tol:
            raise HypothesisViolated(
                f"H_omega at omega={c.omega:g} is not a combination of V*V and VV* (residual {fit:.3e})"
            )
    g = build_gksl(model)
    R = _rho(rho)
    glob = check_sqdb_theta(R, g.G, g.kraus, tol).passed
    local = []
    for c in comps:
        lg = c.local_gksl()
        inv = norm(apply_generator(lg, R, "schrodinger"))
        v = check_sqdb_theta(R, lg.G, lg.kraus, tol)
        local.append(
            {"omega": c.omega, "invariance_residual": inv, "sqdb_theta": v.passed, "residual": v.residual}
        )
    locals_ok = all(e["sqdb_theta"] and e["invariance_residual"] <= tol for e in local)
    return LocalGlobalReport(glob, tuple(local), bool(glob == locals_ok))


def db_report(model: SLTModel, rho: DensityMatrix, tol: float = VERDICT_TOL, strict: bool = True) -> DBReport:
    rep = equivalence_suite(model, rho, tol, strict=strict)
    try:
        lg = check_local_global(model, rho, tol)
        local = lg.local
    except HypothesisViolated:
        local = ()
    return DBReport(rep.sqdb, rep.sqdb_theta, rep.slt_condition3, rep.paired_kraus, rep.zero_ep, tol, local)
