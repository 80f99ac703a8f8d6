"""Analysis pipelines behind the CLI commands and their serializers."""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .balance import DBReport, Verdict, check_local_global, equivalence_suite
from .dynamics import invariant_state
from .entropy import EPReport, ep_closed_form, ep_general, moments
from .errors import HypothesisViolated, LindbladEPError, UnsupportedFormat
from .matcore import norm
from .model import SLTModel, build_components, build_gksl
from .modelfile import model_to_dict
from .oracle import DEFAULT_T_GRID, ep_estimate

COMMANDS = ("analyze", "ep", "check-db", "oracle", "sweep")
CSV_HEADER = ("omega", "gamma_minus", "gamma_plus", "nu_minus", "nu_plus", "mu", "ep_term", "ep_total", "db_pass")
ENV_PREFIX = "LEP_TOL_"


@dataclass(frozen=True)
class Tolerances:
    verdict: float = 1e-8  # balance checks and zero-EP moment test
    eig: float = 1e-10  # eigenvalue merging, relative to max(1, ||H_S||)
    cutoff: float = 1e-12  # log support, relative to the largest eigenvalue
    faithful: float = 1e-8  # smallest eigenvalue of rho, relative to 1/d
    zero_ep: float = 1e-9  # EP value counted as zero
    invariant: float = 1e-9  # residual of L_*(rho)

    @classmethod
    def resolve(cls, file_values: dict | None = None, env=None, flags: dict | None = None) -> "Tolerances":
        """Defaults, then the model file, then ``LEP_TOL_*`` variables, then flags."""
        env = os.environ if env is None else env
        t = cls()
        for source in (file_values or {}, _from_env(env), flags or {}):
            t = replace(t, **{k: float(v) for k, v in source.items() if v is not None})
        return t


def _from_env(env) -> dict:
    out = {}
    for f in fields(Tolerances):
        key = ENV_PREFIX + f.name.upper()
        if key in env:
            try:
                out[f.name] = float(env[key])
            except ValueError:
                raise LindbladEPError(f"{key} is not a number: {env[key]!r}") from None
    return out


def _verdict_dict(v: Verdict) -> dict:
    out = {"passed": v.passed, "residual": v.residual}
    for k, val in v.details.items():
        if k == "u":
            continue
        out[k] = val
    return out


def _ep_dict(rep: EPReport) -> dict:
    out = {"method": rep.method, "total_nats_per_time": rep.total_nats_per_time, "diagnostics": rep.diagnostics}
    if rep.per_omega:
        out["per_omega"] = [
            {
                "omega": t.omega,
                "gamma_minus": t.gamma_minus,
                "gamma_plus": t.gamma_plus,
                "nu_minus": t.moments.nu_minus,
                "nu_plus": t.moments.nu_plus,
                "mu": t.moments.mu,
                "term_flux": t.term_flux,
                "term_schwarz": t.term_schwarz,
                "dropped": t.dropped,
            }
            for t in rep.per_omega
        ]
    return out


def _db_dict(rep: DBReport) -> dict:
    out = {
        "sqdb": _verdict_dict(rep.sqdb),
        "sqdb_theta": _verdict_dict(rep.sqdb_theta),
        "slt_condition3": _verdict_dict(rep.slt_condition3),
        "paired_kraus": _verdict_dict(rep.paired_kraus),
        "zero_ep": _verdict_dict(rep.zero_ep),
        "equivalence": rep.equivalence_flags,
        "consistent": rep.consistent,
    }
    u = rep.witness_u
    out["witness_u"] = None if u is None else [[[float(z.real), float(z.imag)] for z in row] for row in u]
    return out


def _spectral(model: SLTModel) -> dict:
    return {
        "levels": [lv.value for lv in model.spectrum.levels],
        "degeneracies": [lv.multiplicity for lv in model.spectrum.levels],
        "bohr_frequencies": list(model.frequencies),
        "real_coupling": model.real_V_flag,
    }


def _state(model: SLTModel, tol: Tolerances):
    g = build_gksl(model)
    rho = invariant_state(g, tol.invariant, H_S=model.H_S_eig, faithful_threshold=tol.faithful)
    info = {
        "diagonal": [float(x) for x in np.diag(rho.matrix).real],
        "off_diagonal_norm": norm(rho.matrix - np.diag(np.diag(rho.matrix))),
        "eigen_floor": rho.eigen_floor,
        "faithful": rho.faithful,
        "residual": rho.residual,
        "commutator_residual": rho.commutator_residual,
        "commutes_with_H_S": bool(rho.commutator_residual <= 1e-8),
    }
    return g, rho, info


def _ep_section(model, g, rho, tol: Tolerances) -> dict:
    comps = build_components(model)
    cf = ep_closed_form(rho, comps)
    gen = ep_general(rho, g, strict=False, cutoff=tol.cutoff)
    return {
        "closed_form": _ep_dict(cf),
        "general": _ep_dict(gen),
        "agree": bool(_agree(cf.total_nats_per_time, gen.total_nats_per_time)),
        "zero": bool(cf.total_nats_per_time <= tol.zero_ep),
    }


def _agree(a: float, b: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= max(1e-8, 1e-6 * max(abs(a), abs(b)))


def _db_section(model, rho, tol: Tolerances) -> dict:
    rep = equivalence_suite(model, rho, tol.verdict)
    out = _db_dict(rep)
    try:
        lg = check_local_global(model, rho, tol.verdict)
        out["local_global"] = {"global_pass": lg.global_pass, "local": list(lg.local), "consistent": lg.consistent}
    except HypothesisViolated as exc:
        out["local_global"] = {"skipped": str(exc)}
    return out


def _oracle_section(g, rho, t_grid) -> dict:
    res = ep_estimate(g, rho, t_grid)
    return {
        "estimate": res.estimate,
        "uncertainty": res.uncertainty,
        "converged": res.converged,
        "table": [{"t": r.t, "relative_entropy": r.relative_entropy, "rate": r.rate} for r in res.table],
        "extrapolations": list(res.extrapolations),
    }


def run(command: str, model: SLTModel, options: dict | None = None) -> dict:
    """Build the report dictionary for one CLI command.

    ``options`` may hold ``tolerances`` (a :class:`Tolerances`), ``t_grid``
    (oracle), and ``grid`` (sweep: ``(field, omega_index, values)``).
    """
    options = options or {}
    tol = options.get("tolerances") or Tolerances()
    if command not in COMMANDS:
        raise LindbladEPError(f"unknown command {command!r}")
    report = {"command": command, "tolerances": asdict(tol)}
    if command == "sweep":
        report["rows"] = sweep(model, options["grid"], tol)
        return report

    report["model"] = model_to_dict(model)
    report["spectrum"] = _spectral(model)
    g, rho, info = _state(model, tol)
    report["invariant_state"] = info
    summary = {}
    if command in ("analyze", "ep", "oracle"):
        report["entropy_production"] = _ep_section(model, g, rho, tol)
        summary["ep_formulas_agree"] = report["entropy_production"]["agree"]
        summary["zero_ep"] = report["entropy_production"]["zero"]
    if command in ("analyze", "check-db"):
        report["detailed_balance"] = _db_section(model, rho, tol)
        summary["db_consistent"] = report["detailed_balance"]["consistent"]
        summary["db_pass"] = all(report["detailed_balance"]["equivalence"].values())
    if command in ("analyze", "oracle"):
        t_grid = options.get("t_grid") or DEFAULT_T_GRID
        report["oracle"] = _oracle_section(g, rho, t_grid)
        summary["oracle_converged"] = report["oracle"]["converged"]
    report["summary"] = summary
    return report


def parse_grid(spec: str):
    """``gamma_plus[0]=0.1:1.0:10`` (linspace) or ``gamma_minus[1]=0.5,1,2``."""
    try:
        lhs, rhs = spec.split("=", 1)
        name, idx = lhs.strip().rstrip("]").split("[")
        k = int(idx)
    except ValueError:
        raise LindbladEPError(f"bad grid spec {spec!r}; expected e.g. gamma_plus[0]=0.1:1.0:10") from None
    name = name.strip()
    if name not in ("gamma_minus", "gamma_plus"):
        raise LindbladEPError(f"grid field must be gamma_minus or gamma_plus, got {name!r}")
    try:
        if ":" in rhs:
            a, b, n = rhs.split(":")
            values = [float(x) for x in np.linspace(float(a), float(b), int(n))]
        else:
            values = [float(x) for x in rhs.split(",") if x.strip()]
    except ValueError:
        raise LindbladEPError(f"bad grid values {rhs!r}") from None
    if not values:
        raise LindbladEPError("empty grid")
    return name, k, values


def sweep(model: SLTModel, grid, tol: Tolerances) -> list[dict]:
    """One row per grid value, describing the swept frequency."""
    name, k, values = grid
    if k not in model.rates:
        raise LindbladEPError(f"omega_index {k} has no rates to sweep")
    rows = []
    for val in values:
        rates = dict(model.rates)
        gm, gp = rates[k]
        rates[k] = (val, gp) if name == "gamma_minus" else (gm, val)
        m = model.with_rates(rates)
        g, rho, _ = _state(m, tol)
        comps = build_components(m)
        cf = ep_closed_form(rho, comps)
        db = equivalence_suite(m, rho, tol.verdict)
        comp = next(c for c in comps if c.index == k)
        mom = moments(rho, comp)
        term = next(t for t in cf.per_omega if t.omega == comp.omega)
        rows.append(
            {
                "omega": comp.omega,
                "gamma_minus": comp.gamma_minus,
                "gamma_plus": comp.gamma_plus,
                "nu_minus": mom.nu_minus,
                "nu_plus": mom.nu_plus,
                "mu": mom.mu,
                "ep_term": term.total,
                "ep_total": cf.total_nats_per_time,
                "db_pass": all(db.equivalence_flags.values()),
            }
        )
    return rows


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _json(obj, out: io.StringIO, indent: int):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        items = sorted(obj.items())
        for n, (k, v) in enumerate(items):
            out.write(f"{pad}  {json.dumps(k)}: ")
            _json(v, out, indent + 1)
            out.write(",\n" if n < len(items) - 1 else "\n")
        out.write(pad + "}")
    elif isinstance(obj, list):
        if not obj:
            out.write("[]")
            return
        if all(not isinstance(v, (dict, list)) for v in obj):
            out.write("[")
            for n, v in enumerate(obj):
                _json(v, out, 0)
                if n < len(obj) - 1:
                    out.write(", ")
            out.write("]")
            return
        out.write("[\n")
        for n, v in enumerate(obj):
            out.write(pad + "  ")
            _json(v, out, indent + 1)
            out.write(",\n" if n < len(obj) - 1 else "\n")
        out.write(pad + "]")
    elif isinstance(obj, bool) or obj is None:
        out.write(json.dumps(obj))
    elif isinstance(obj, float):
        out.write(fmt_float(obj))
    elif isinstance(obj, int):
        out.write(str(obj))
    else:
        out.write(json.dumps(obj))


def to_json(report: dict) -> str:
    """Sorted keys, floats with 17 significant digits, non-finite floats as strings."""
    buf = io.StringIO()
    _json(_plain(report), buf, 0)
    buf.write("\n")
    return buf.getvalue()


def to_csv(report: dict) -> str:
    if "rows" not in report:
        raise UnsupportedFormat("csv output is only available for sweep")
    lines = [",".join(CSV_HEADER)]
    for row in report["rows"]:
        cells = []
        for key in CSV_HEADER:
            v = row[key]
            if isinstance(v, bool):
                cells.append("true" if v else "false")
            else:
                cells.append(fmt_float(float(v)).strip('"'))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _human(obj, out: list, prefix: str):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _human(obj[k], out, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for n, v in enumerate(obj):
            _human(v, out, f"{prefix}[{n}]")
    elif isinstance(obj, list):
        out.append(f"{prefix}: " + ", ".join(_scalar(v) for v in obj))
    else:
        out.append(f"{prefix}: {_scalar(obj)}")


def _scalar(v) -> str:
    if isinstance(v, float):
        return format(v, ".6g")
    return str(v)


def to_human(report: dict) -> str:
    lines: list[str] = []
    _human(_plain({k: v for k, v in report.items() if k != "model"}), lines, "")
    return "\n".join(lines) + "\n"


def emit_report(report: dict, fmt: str = "json") -> bytes:
    if fmt == "json":
        text = to_json(report)
    elif fmt == "csv":
        text = to_csv(report)
    elif fmt == "human":
        text = to_human(report)
    else:
        raise UnsupportedFormat(f"unknown format {fmt!r}")
    return text.encode("utf-8")
