"""JSON model files.

Layout::

    {
      "schema_version": "1",
      "dimension": 2,
      "H_S": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]],
      "V":   [[0, 1], [1, 0]],
      "rates": [{"omega_index": 0, "gamma_minus": 1.0, "gamma_plus": 0.5}],
      "H_omega": [{"omega_index": 0, "matrix": [[0, 0], [0, 0]]}],
      "tolerances": {"verdict": 1e-8}
    }

Matrix entries are ``[re, im]`` pairs or plain reals, rows first.
``omega_index`` points into the sorted list of Bohr frequencies of ``H_S``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import LindbladEPError, ParseError, ValidationError
from .model import SLTModel

SCHEMA_VERSION = "1"
TOLERANCE_KEYS = ("verdict", "eig", "cutoff", "faithful", "zero_ep", "invariant")


@dataclass
class ModelFile:
    model: SLTModel
    schema_version: str = SCHEMA_VERSION
    tolerances: dict = field(default_factory=dict)


def _entry(x, where: str) -> complex:
    if isinstance(x, bool):
        raise ValidationError("expected a number or [re, im] pair", where)
    if isinstance(x, (int, float)):
        return complex(float(x), 0.0)
    if isinstance(x, list) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(float(x[0]), float(x[1]))
    raise ValidationError("expected a number or [re, im] pair", where)


def _matrix(obj, d: int, where: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != d:
        raise ValidationError(f"expected {d} rows", where)
    M = np.zeros((d, d), dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != d:
            raise ValidationError(f"expected {d} entries", f"{where}[{i}]")
        for j, x in enumerate(row):
            M[i, j] = _entry(x, f"{where}[{i}][{j}]")
    if not np.all(np.isfinite(M)):
        raise ValidationError("non-finite entry", where)
    return M


def _number(obj, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ValidationError("expected a number", where)
    return float(obj)


def _index(obj, where: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ValidationError("expected an integer", where)
    return obj


def _require(data: dict, key: str):
    if key not in data:
        raise ValidationError("missing field", key)
    return data[key]


def load_text(text: str) -> ModelFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", 1, 1)

    version = str(data.get("schema_version", SCHEMA_VERSION))
    if version != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema version {version!r}", "schema_version")
    d = _index(_require(data, "dimension"), "dimension")
    if d < 1:
        raise ValidationError("dimension must be positive", "dimension")
    H_S = _matrix(_require(data, "H_S"), d, "H_S")
    V = _matrix(_require(data, "V"), d, "V")

    rates = {}
    raw_rates = _require(data, "rates")
    if not isinstance(raw_rates, list):
        raise ValidationError("expected a list", "rates")
    for n, item in enumerate(raw_rates):
        where = f"rates[{n}]"
        if not isinstance(item, dict):
            raise ValidationError("expected an object", where)
        k = _index(_require_at(item, "omega_index", where), f"{where}.omega_index")
        if k in rates:
            raise ValidationError(f"duplicate omega_index {k}", where)
        gm = _number(_require_at(item, "gamma_minus", where), f"{where}.gamma_minus")
        gp = _number(_require_at(item, "gamma_plus", where), f"{where}.gamma_plus")
        if not (gm > 0 and gp > 0):
            raise ValidationError("rates must be strictly positive", where)
        rates[k] = (gm, gp)

    H_omega = {}
    raw_H = data.get("H_omega", [])
    if not isinstance(raw_H, list):
        raise ValidationError("expected a list", "H_omega")
    for n, item in enumerate(raw_H):
        where = f"H_omega[{n}]"
        if not isinstance(item, dict):
            raise ValidationError("expected an object", where)
        k = _index(_require_at(item, "omega_index", where), f"{where}.omega_index")
        H_omega[k] = _matrix(_require_at(item, "matrix", where), d, f"{where}.matrix")

    tols = {}
    raw_t = data.get("tolerances", {})
    if not isinstance(raw_t, dict):
        raise ValidationError("expected an object", "tolerances")
    for key, val in raw_t.items():
        if key not in TOLERANCE_KEYS:
            raise ValidationError(f"unknown tolerance {key!r}", "tolerances")
        tols[key] = _number(val, f"tolerances.{key}")
        if not tols[key] > 0:
            raise ValidationError("tolerance must be positive", f"tolerances.{key}")

    try:
        model = SLTModel(H_S, V, rates, H_omega, eig_tol=tols.get("eig"))
    except ValidationError:
        raise
    except LindbladEPError as exc:
        raise ValidationError(str(exc), "model") from None
    return ModelFile(model, version, tols)


def _require_at(item: dict, key: str, where: str):
    if key not in item:
        raise ValidationError("missing field", f"{where}.{key}")
    return item[key]


def load(path_or_text) -> ModelFile:
    """Read a model file from a path, or parse ``path_or_text`` directly if it looks like JSON."""
    if isinstance(path_or_text, Path) or not str(path_or_text).lstrip().startswith("{"):
        text = Path(path_or_text).read_text(encoding="utf-8")
    else:
        text = str(path_or_text)
    return load_text(text)


def parse_model(path_or_text) -> SLTModel:
    return load(path_or_text).model


def matrix_to_pairs(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def model_to_dict(model: SLTModel, tolerances: dict | None = None) -> dict:
    """Inverse of :func:`load_text` on the stored (unrotated) operators."""
    out = {
        "schema_version": SCHEMA_VERSION,
        "dimension": model.dim,
        "H_S": matrix_to_pairs(model.H_S),
        "V": matrix_to_pairs(model.V),
        "rates": [
            {"omega_index": k, "gamma_minus": gm, "gamma_plus": gp}
            for k, (gm, gp) in sorted(model.rates.items())
        ],
    }
    if model.H_omega:
        out["H_omega"] = [
            {"omega_index": k, "matrix": matrix_to_pairs(H)} for k, H in sorted(model.H_omega.items())
        ]
    if tolerances:
        out["tolerances"] = dict(sorted(tolerances.items()))
    return out
