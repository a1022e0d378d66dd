"""Problem-spec files and deterministic report serialization.

Files are UTF-8 JSON.  Complex numbers are written as ``[re, im]`` (plain numbers
are accepted on input).  Coordinate indices are 0-based.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import expr as ex
from .coefficients import CoefficientSet, SignBranch, as_complex
from .errors import IoFailure, SchemaViolation
from .periodic import PeriodicPolynomial
from .polynomial import MultiPoly

SYSTEMS = ("difference", "pde", "pdde", "single_circular")
DEFAULT_RADII = (1.2, 1.6, 2.0, 2.5, 3.0)


@dataclass(frozen=True)
class VerificationParams:
    samples: int = 1000
    radius: float | None = None
    seed: int = 0
    tolerance: float = 1e-9
    fd_check: bool = False
    workers: int = 1


@dataclass(frozen=True)
class OrderParams:
    radii: tuple[float, ...] = DEFAULT_RADII
    samples: int = 4096


@dataclass(frozen=True)
class CircularData:
    kind: str
    h: MultiPoly | None = None
    beta: ex.Expr | None = None


@dataclass(frozen=True)
class ProblemSpec:
    system: str
    dimension: int
    shift: tuple[complex, ...] | None = None
    coeffs: CoefficientSet | None = None
    branch: SignBranch = SignBranch.PLUS
    family: str = "i"
    corollary: bool = False
    linear_tail: tuple | None = None
    psi: PeriodicPolynomial | None = None
    b2: complex = 0j
    branch_indices: tuple[int | None, int | None] = (None, None)
    a1_sign: int = 1
    pivot: int | None = None
    pair: tuple[ex.Expr, ex.Expr] | None = None
    circular: CircularData | None = None
    verification: VerificationParams = field(default_factory=VerificationParams)
    order: OrderParams = field(default_factory=OrderParams)

    def with_seed(self, seed: int) -> "ProblemSpec":
        v = self.verification
        return ProblemSpec(**{**self.__dict__, "verification": VerificationParams(
            v.samples, v.radius, seed, v.tolerance, v.fd_check, v.workers)})

    def to_json(self) -> dict:
        v, o = self.verification, self.order
        data: dict[str, Any] = {
            "system": self.system,
            "dimension": self.dimension,
            "shift": None if self.shift is None else [_cx(x) for x in self.shift],
            "coefficients": None if self.coeffs is None else {
                "a": _cx(self.coeffs.a), "b": _cx(self.coeffs.b), "c": _cx(self.coeffs.C),
                "alpha": _cx(self.coeffs.alpha), "beta": _cx(self.coeffs.beta),
                "gamma": _cx(self.coeffs.gamma)},
            "branch": self.branch.value,
            "family": self.family,
            "corollary": self.corollary,
            "carrier": {
                "linear_tail": None if self.linear_tail is None else
                [None if x is None else _cx(x) for x in self.linear_tail],
                "psi": {"terms": []} if self.psi is None else self.psi.to_json(),
                "b2": _cx(self.b2),
                "branch_indices": {"shift": self.branch_indices[0], "phase": self.branch_indices[1]},
                "a1_sign": self.a1_sign,
                "pivot": self.pivot,
            },
            "pair": None if self.pair is None else {"f1": self.pair[0].to_json(), "f2": self.pair[1].to_json()},
            "circular": None if self.circular is None else {
                "kind": self.circular.kind,
                "h": None if self.circular.h is None else self.circular.h.to_json(),
                "beta": None if self.circular.beta is None else self.circular.beta.to_json()},
            "verification": {"samples": v.samples, "radius": v.radius, "seed": v.seed,
                             "tolerance": v.tolerance, "fd_check": v.fd_check, "workers": v.workers},
            "order": {"radii": list(o.radii), "samples": o.samples},
        }
        return data


def _cx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


# parsing

class _Collector:
    def __init__(self, text: str):
        self.text = text
        self.violations: list[str] = []

    def line_of(self, key: str) -> int | None:
        needle = f'"{key}"'
        for no, line in enumerate(self.text.splitlines(), 1):
            if needle in line:
                return no
        return None

    def add(self, path: str, message: str) -> None:
        line = self.line_of(path.split(".")[-1].split("[")[0])
        where = f" (line {line})" if line else ""
        self.violations.append(f"{path}: {message}{where}")


def _complex(col: _Collector, path: str, value) -> complex | None:
    try:
        if isinstance(value, bool):
            raise ValueError("boolean")
        return as_complex(value)
    except (TypeError, ValueError):
        col.add(path, f"expected a number or [re, im], got {value!r}")
        return None


def _int(col, path, value, minimum=None) -> int | None:
    if isinstance(value, bool) or not isinstance(value, int):
        col.add(path, f"expected an integer, got {value!r}")
        return None
    if minimum is not None and value < minimum:
        col.add(path, f"must be >= {minimum}")
        return None
    return value


def _real(col, path, value, positive=False) -> float | None:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        col.add(path, f"expected a finite real number, got {value!r}")
        return None
    if positive and not value > 0:
        col.add(path, "must be positive")
        return None
    return float(value)


def _expr(col, path, data, dim) -> ex.Expr | None:
    try:
        e = ex.from_json(data)
    except (KeyError, TypeError, ValueError) as err:
        col.add(path, f"invalid expression: {err}")
        return None
    if e.dim != dim:
        col.add(path, f"expression dimension {e.dim} differs from dimension {dim}")
        return None
    return e


def parse_problem_text(text: str) -> ProblemSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaViolation([f"invalid JSON: {err.msg} (line {err.lineno}, column {err.colno})"]) from err
    return parse_problem_data(data, text)


def parse_problem_data(data, text: str = "") -> ProblemSpec:
    col = _Collector(text)
    if not isinstance(data, dict):
        raise SchemaViolation(["top level must be an object"])
    known = {"system", "dimension", "shift", "coefficients", "branch", "family", "corollary",
             "carrier", "pair", "circular", "verification", "order"}
    for key in data:
        if key not in known:
            col.add(key, "unknown key")

    system = data.get("system")
    if system not in SYSTEMS:
        col.add("system", f"must be one of {', '.join(SYSTEMS)}")
    dim = _int(col, "dimension", data.get("dimension"), minimum=1)
    if dim is None:
        raise SchemaViolation(col.violations)

    shift = None
    if data.get("shift") is not None:
        raw = data["shift"]
        if not isinstance(raw, list) or len(raw) != dim:
            col.add("shift", f"must be a list of {dim} complex numbers")
        else:
            vals = [_complex(col, f"shift[{i}]", x) for i, x in enumerate(raw)]
            if None not in vals:
                shift = tuple(vals)
                if system in ("difference", "pdde") and all(x == 0 for x in shift):
                    col.add("shift", "shift must be nonzero")
    elif system in ("difference", "pdde"):
        col.add("shift", f"required for the {system} system")

    coeffs = None
    raw = data.get("coefficients")
    if raw is not None:
        if not isinstance(raw, dict):
            col.add("coefficients", "must be an object")
        else:
            vals = {}
            for key in ("a", "b", "c", "alpha", "beta", "gamma"):
                if key not in raw:
                    col.add(f"coefficients.{key}", "missing")
                else:
                    vals[key] = _complex(col, f"coefficients.{key}", raw[key])
            extra = set(raw) - {"a", "b", "c", "alpha", "beta", "gamma"}
            for key in sorted(extra):
                col.add(f"coefficients.{key}", "unknown key")
            if len(vals) == 6 and None not in vals.values():
                coeffs = CoefficientSet(a=vals["a"], b=vals["b"], C=vals["c"], alpha=vals["alpha"],
                                        beta=vals["beta"], gamma=vals["gamma"])
    elif system != "single_circular":
        col.add("coefficients", "required")

    try:
        branch = SignBranch.parse(data.get("branch", "plus"))
    except ValueError:
        col.add("branch", "must be 'plus' or 'minus'")
        branch = SignBranch.PLUS
    family = data.get("family", "i")
    if family not in ("i", "ii"):
        col.add("family", "must be 'i' or 'ii'")
    corollary = data.get("corollary", False)
    if not isinstance(corollary, bool):
        col.add("corollary", "must be true or false")

    carrier = data.get("carrier") or {}
    if not isinstance(carrier, dict):
        col.add("carrier", "must be an object")
        carrier = {}
    for key in set(carrier) - {"linear_tail", "psi", "b2", "branch_indices", "a1_sign", "pivot"}:
        col.add(f"carrier.{key}", "unknown key")
    tail = None
    if carrier.get("linear_tail") is not None:
        raw = carrier["linear_tail"]
        if not isinstance(raw, list) or len(raw) != dim - 1:
            col.add("carrier.linear_tail", f"must list {dim - 1} entries")
        else:
            tail = tuple(None if x is None else _complex(col, f"carrier.linear_tail[{i}]", x)
                         for i, x in enumerate(raw))
            if sum(x is None for x in raw) > 1:
                col.add("carrier.linear_tail", "at most one entry may be null")
    psi = None
    raw = carrier.get("psi")
    if raw is not None and raw.get("terms"):
        if shift is None:
            col.add("carrier.psi", "a periodic part needs a shift")
        else:
            try:
                psi = PeriodicPolynomial.from_json(raw, shift)
            except (KeyError, TypeError, ValueError) as err:
                col.add("carrier.psi", str(err))
    b2 = _complex(col, "carrier.b2", carrier.get("b2", 0)) if "b2" in carrier else 0j
    bi = carrier.get("branch_indices") or {}
    branch_indices = (None, None)
    if not isinstance(bi, dict):
        col.add("carrier.branch_indices", "must be an object with 'shift' and 'phase'")
    else:
        parts = []
        for key in ("shift", "phase"):
            v = bi.get(key)
            parts.append(None if v is None else _int(col, f"carrier.branch_indices.{key}", v))
        branch_indices = tuple(parts)
    a1_sign = carrier.get("a1_sign", 1)
    if a1_sign not in (1, -1) or isinstance(a1_sign, bool):
        col.add("carrier.a1_sign", "must be 1 or -1")
    pivot = carrier.get("pivot")
    if pivot is not None and _int(col, "carrier.pivot", pivot, minimum=0) is not None and pivot >= dim:
        col.add("carrier.pivot", f"must be below {dim}")

    pair = None
    if data.get("pair") is not None:
        raw = data["pair"]
        if not isinstance(raw, dict) or set(raw) != {"f1", "f2"}:
            col.add("pair", "must be an object with f1 and f2")
        else:
            e1, e2 = _expr(col, "pair.f1", raw["f1"], dim), _expr(col, "pair.f2", raw["f2"], dim)
            if e1 is not None and e2 is not None:
                pair = (e1, e2)

    circular = None
    if data.get("circular") is not None:
        raw = data["circular"]
        kind = raw.get("kind") if isinstance(raw, dict) else None
        if kind not in ("entire", "meromorphic"):
            col.add("circular.kind", "must be 'entire' or 'meromorphic'")
        else:
            h = beta = None
            if raw.get("h") is not None:
                try:
                    h = MultiPoly.from_json(raw["h"])
                    if h.dim != dim:
                        col.add("circular.h", f"dimension {h.dim} differs from {dim}")
                except (KeyError, TypeError, ValueError) as err:
                    col.add("circular.h", f"invalid polynomial: {err}")
            if raw.get("beta") is not None:
                beta = _expr(col, "circular.beta", raw["beta"], dim)
            if kind == "entire" and h is None:
                col.add("circular.h", "required for the entire kind")
            if kind == "meromorphic" and beta is None:
                col.add("circular.beta", "required for the meromorphic kind")
            circular = CircularData(kind, h, beta)
    elif system == "single_circular" and pair is None:
        col.add("circular", "required for the single_circular system unless a pair is given")

    raw = data.get("verification") or {}
    vd = VerificationParams()
    samples = _int(col, "verification.samples", raw.get("samples", vd.samples), minimum=1)
    radius = raw.get("radius")
    if radius is not None:
        radius = _real(col, "verification.radius", radius, positive=True)
    seed = _int(col, "verification.seed", raw.get("seed", vd.seed), minimum=0)
    tol = _real(col, "verification.tolerance", raw.get("tolerance", vd.tolerance), positive=True)
    fd_check = raw.get("fd_check", False)
    if not isinstance(fd_check, bool):
        col.add("verification.fd_check", "must be true or false")
    workers = _int(col, "verification.workers", raw.get("workers", 1), minimum=1)
    verification = VerificationParams(samples or 1, radius, seed or 0, tol or vd.tolerance,
                                      bool(fd_check), workers or 1)

    raw = data.get("order") or {}
    radii = raw.get("radii", list(DEFAULT_RADII))
    if not isinstance(radii, list) or not all(isinstance(r, (int, float)) and not isinstance(r, bool)
                                              for r in radii):
        col.add("order.radii", "must be a list of numbers")
        radii = list(DEFAULT_RADII)
    osamples = _int(col, "order.samples", raw.get("samples", 4096), minimum=1)
    order = OrderParams(tuple(float(r) for r in radii), osamples or 4096)

    if col.violations:
        raise SchemaViolation(col.violations)
    return ProblemSpec(system, dim, shift, coeffs, branch, family, corollary, tail, psi, b2,
                       branch_indices, a1_sign, pivot, pair, circular, verification, order)


def parse_problem_file(path) -> ProblemSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise IoFailure(f"cannot read {path}: {err}") from err
    return parse_problem_text(text)


# canonical JSON

def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot be written")
    if x == 0:
        return "0.0"
    return format(x, ".17g") if not float(x).is_integer() or abs(x) >= 1e17 else f"{x:.1f}"


def _to_plain(obj):
    if isinstance(obj, dict):
        return {str(k): _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _to_plain(obj.tolist())
    return obj


def _render(obj, indent: int) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_render(v, 0) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + _render(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sorted(obj.items())
        return "{\n" + ",\n".join(f"{inner}{json.dumps(k)}: {_render(v, indent + 1)}" for k, v in items) \
            + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(obj) -> str:
    """Sorted keys, two-space indent, floats with 17 significant digits."""
    return _render(_to_plain(obj), 0) + "\n"


def write_text(text: str, path) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as err:
        raise IoFailure(f"cannot write {path}: {err}") from err


def write_problem_file(spec: ProblemSpec, path) -> None:
    write_text(dumps_canonical(spec.to_json()), path)


def write_report(report: dict, path) -> None:
    write_text(dumps_canonical(report), path)
