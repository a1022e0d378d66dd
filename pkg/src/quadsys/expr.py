"""Expression trees for entire and meromorphic functions on C^n.

Trees are immutable.  Evaluation is vectorized: every evaluator accepts either
one point (a length-n sequence) or an ``(m, n)`` array of points.

Only constant folding and zero pruning are performed when building trees; there
is no algebraic simplification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import singledispatch
from typing import Mapping, Sequence

import numpy as np

from .coefficients import as_complex
from .errors import EvaluationOverflow, PoleEncountered
from .polynomial import MultiPoly

POLE_TOL = 1e-12
LN2 = math.log(2.0)
# above this |Im w| the exponential forms of cos/sin are used for log-magnitudes
_ASYMPTOTIC_IM = 20.0


class Expr:
    """Base class of expression nodes."""

    dim: int

    def to_json(self) -> dict:
        raise NotImplementedError

    def __call__(self, z):
        return evaluate(self, z)


def _common_dim(children: Sequence[Expr]) -> int:
    dims = {c.dim for c in children}
    if len(dims) != 1:
        raise ValueError(f"children disagree on dimension: {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True)
class Const(Expr):
    value: complex
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "value", as_complex(self.value))

    def to_json(self):
        return {"kind": "const", "dim": self.dim, "re": self.value.real, "im": self.value.imag}


@dataclass(frozen=True)
class Poly(Expr):
    poly: MultiPoly

    @property
    def dim(self) -> int:
        return self.poly.dim

    def to_json(self):
        return self.poly.to_json()


@dataclass(frozen=True)
class _Unary(Expr):
    child: Expr

    @property
    def dim(self) -> int:
        return self.child.dim

    def to_json(self):
        return {"kind": self.kind, "child": self.child.to_json()}


class Cos(_Unary):
    kind = "cos"


class Sin(_Unary):
    kind = "sin"


class Exp(_Unary):
    kind = "exp"


@dataclass(frozen=True)
class _Nary(Expr):
    children: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError(f"{type(self).__name__} needs at least one child")
        _common_dim(self.children)

    @property
    def dim(self) -> int:
        return self.children[0].dim

    def to_json(self):
        return {"kind": self.kind, "children": [c.to_json() for c in self.children]}


class Sum(_Nary):
    kind = "sum"


class Product(_Nary):
    kind = "product"


@dataclass(frozen=True)
class Quotient(Expr):
    num: Expr
    den: Expr

    def __post_init__(self):
        _common_dim((self.num, self.den))

    @property
    def dim(self) -> int:
        return self.num.dim

    def to_json(self):
        return {"kind": "quotient", "num": self.num.to_json(), "den": self.den.to_json()}


@dataclass(frozen=True)
class Scale(Expr):
    factor: complex
    child: Expr

    def __post_init__(self):
        object.__setattr__(self, "factor", as_complex(self.factor))

    @property
    def dim(self) -> int:
        return self.child.dim

    def to_json(self):
        return {"kind": "scale", "re": self.factor.real, "im": self.factor.imag,
                "child": self.child.to_json()}


# folding constructors

def const(value, dim: int) -> Const:
    return Const(value, dim)


def poly(p: MultiPoly) -> Expr:
    if p.is_constant():
        return Const(p.constant_term(), p.dim)
    return Poly(p)


def _as_const(e: Expr):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Poly) and e.poly.is_constant():
        return e.poly.constant_term()
    return None


def is_zero(e: Expr) -> bool:
    return _as_const(e) == 0


def add(*terms: Expr) -> Expr:
    if not terms:
        raise ValueError("add() needs at least one term")
    dim = _common_dim(terms)
    flat: list[Expr] = []
    total = 0j
    for t in terms:
        for u in (t.children if isinstance(t, Sum) else (t,)):
            c = _as_const(u)
            if c is not None:
                total += c
            else:
                flat.append(u)
    if total != 0 or not flat:
        flat.append(Const(total, dim))
    return flat[0] if len(flat) == 1 else Sum(tuple(flat))


def scale(factor, e: Expr) -> Expr:
    factor = as_complex(factor)
    c = _as_const(e)
    if factor == 0 or c == 0:
        return Const(0, e.dim)
    if c is not None:
        return Const(factor * c, e.dim)
    if factor == 1:
        return e
    if isinstance(e, Scale):
        return scale(factor * e.factor, e.child)
    return Scale(factor, e)


def mul(*factors: Expr) -> Expr:
    if not factors:
        raise ValueError("mul() needs at least one factor")
    dim = _common_dim(factors)
    coef = 1 + 0j
    flat: list[Expr] = []
    for f in factors:
        for u in (f.children if isinstance(f, Product) else (f,)):
            c = _as_const(u)
            if c is not None:
                coef *= c
            elif isinstance(u, Scale):
                coef *= u.factor
                flat.append(u.child)
            else:
                flat.append(u)
    if coef == 0:
        return Const(0, dim)
    if not flat:
        return Const(coef, dim)
    body = flat[0] if len(flat) == 1 else Product(tuple(flat))
    return scale(coef, body)


def sub(x: Expr, y: Expr) -> Expr:
    return add(x, scale(-1, y))


# evaluation

def _points(e: Expr, z) -> tuple[np.ndarray, bool]:
    Z = np.asarray(z, dtype=complex)
    single = Z.ndim == 1
    if single:
        Z = Z[None, :]
    if Z.ndim != 2 or Z.shape[1] != e.dim:
        raise ValueError(f"expected points of dimension {e.dim}, got shape {np.shape(z)}")
    return Z, single


def _checked(values: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise EvaluationOverflow(f"{what} left the floating range; use eval_log_magnitude")
    return values


@singledispatch
def _ev(e: Expr, Z: np.ndarray, pole_tol: float) -> np.ndarray:
    raise TypeError(f"cannot evaluate {type(e).__name__}")


@_ev.register
def _(e: Const, Z, pole_tol):
    return np.full(Z.shape[0], e.value, dtype=complex)


@_ev.register
def _(e: Poly, Z, pole_tol):
    return _checked(np.atleast_1d(e.poly(Z)), "polynomial value")


@_ev.register
def _(e: Cos, Z, pole_tol):
    return _checked(np.cos(_ev(e.child, Z, pole_tol)), "cos")


@_ev.register
def _(e: Sin, Z, pole_tol):
    return _checked(np.sin(_ev(e.child, Z, pole_tol)), "sin")


@_ev.register
def _(e: Exp, Z, pole_tol):
    return _checked(np.exp(_ev(e.child, Z, pole_tol)), "exp")


@_ev.register
def _(e: Sum, Z, pole_tol):
    total = _ev(e.children[0], Z, pole_tol)
    for c in e.children[1:]:
        total = total + _ev(c, Z, pole_tol)
    return _checked(total, "sum")


@_ev.register
def _(e: Product, Z, pole_tol):
    total = _ev(e.children[0], Z, pole_tol)
    for c in e.children[1:]:
        total = total * _ev(c, Z, pole_tol)
    return _checked(total, "product")


@_ev.register
def _(e: Quotient, Z, pole_tol):
    den = _ev(e.den, Z, pole_tol)
    mask = np.abs(den) < pole_tol
    if mask.any():
        raise PoleEncountered("quotient denominator vanishes", mask=mask)
    return _checked(_ev(e.num, Z, pole_tol) / den, "quotient")


@_ev.register
def _(e: Scale, Z, pole_tol):
    return _checked(e.factor * _ev(e.child, Z, pole_tol), "scale")


def evaluate(e: Expr, z, pole_tol: float = POLE_TOL):
    """Exact recursive evaluation.  Returns a complex for one point, an array otherwise."""
    Z, single = _points(e, z)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        out = _ev(e, Z, pole_tol)
    return complex(out[0]) if single else out


# log-magnitude evaluation (complex logarithms: real part ln|v|, imaginary part an argument)

@singledispatch
def _lg(e: Expr, Z: np.ndarray, pole_tol: float) -> np.ndarray:
    raise TypeError(f"cannot evaluate {type(e).__name__}")


@_lg.register
def _(e: Const, Z, pole_tol):
    return np.full(Z.shape[0], np.log(e.value) if e.value != 0 else -np.inf, dtype=complex)


@_lg.register
def _(e: Poly, Z, pole_tol):
    return np.log(np.atleast_1d(e.poly(Z)))


@_lg.register
def _(e: Cos, Z, pole_tol):
    w = _ev(e.child, Z, pole_tol)
    out = np.log(np.cos(np.where(np.abs(w.imag) < _ASYMPTOTIC_IM, w, 0)))
    up = w.imag >= _ASYMPTOTIC_IM
    down = w.imag <= -_ASYMPTOTIC_IM
    # cos w = e^{-iw} (1 + e^{2iw}) / 2 for Im w > 0, mirrored below
    out[up] = -1j * w[up] - LN2 + np.log1p(np.exp(2j * w[up]))
    out[down] = 1j * w[down] - LN2 + np.log1p(np.exp(-2j * w[down]))
    return out


@_lg.register
def _(e: Sin, Z, pole_tol):
    w = _ev(e.child, Z, pole_tol)
    out = np.log(np.sin(np.where(np.abs(w.imag) < _ASYMPTOTIC_IM, w, 0)))
    up = w.imag >= _ASYMPTOTIC_IM
    down = w.imag <= -_ASYMPTOTIC_IM
    # sin w = -e^{-iw} (1 - e^{2iw}) / (2i) for Im w > 0, mirrored below
    out[up] = -1j * w[up] + np.log1p(-np.exp(2j * w[up])) - LN2 + 0.5j * np.pi
    out[down] = 1j * w[down] + np.log1p(-np.exp(-2j * w[down])) - LN2 - 0.5j * np.pi
    return out


@_lg.register
def _(e: Exp, Z, pole_tol):
    return _ev(e.child, Z, pole_tol).astype(complex)


@_lg.register
def _(e: Sum, Z, pole_tol):
    logs = np.stack([_lg(c, Z, pole_tol) for c in e.children])
    top = logs.real.max(axis=0)
    finite = np.isfinite(top)
    out = np.full(Z.shape[0], -np.inf, dtype=complex)
    if finite.any():
        shifted = np.exp(logs[:, finite] - top[finite])
        out[finite] = top[finite] + np.log(shifted.sum(axis=0))
    return out


@_lg.register
def _(e: Product, Z, pole_tol):
    return sum(_lg(c, Z, pole_tol) for c in e.children)


@_lg.register
def _(e: Quotient, Z, pole_tol):
    den = _lg(e.den, Z, pole_tol)
    mask = den.real < math.log(pole_tol)
    if mask.any():
        raise PoleEncountered("quotient denominator vanishes", mask=mask)
    return _lg(e.num, Z, pole_tol) - den


@_lg.register
def _(e: Scale, Z, pole_tol):
    if e.factor == 0:
        return np.full(Z.shape[0], -np.inf, dtype=complex)
    return np.log(e.factor) + _lg(e.child, Z, pole_tol)


def eval_log_magnitude(e: Expr, z, pole_tol: float = POLE_TOL):
    """ln|e(z)| without forming e(z); ``-inf`` marks a zero."""
    Z, single = _points(e, z)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        out = _lg(e, Z, pole_tol).real
    return float(out[0]) if single else out


# shift

@singledispatch
def shift(e: Expr, c) -> Expr:
    """Return the expression z -> e(z + c); polynomial leaves are re-expanded."""
    raise TypeError(f"cannot shift {type(e).__name__}")


@shift.register
def _(e: Const, c):
    return e


@shift.register
def _(e: Poly, c):
    if len(c) != e.dim:
        raise ValueError("shift dimension mismatch")
    return Poly(e.poly.shift(c))


@shift.register
def _(e: _Unary, c):
    return type(e)(shift(e.child, c))


@shift.register
def _(e: _Nary, c):
    return type(e)(tuple(shift(x, c) for x in e.children))


@shift.register
def _(e: Quotient, c):
    return Quotient(shift(e.num, c), shift(e.den, c))


@shift.register
def _(e: Scale, c):
    return Scale(e.factor, shift(e.child, c))


# differentiation

@singledispatch
def differentiate(e: Expr, axis: int) -> Expr:
    """Analytic partial derivative with respect to z_{axis+1} (axis is 0-based)."""
    raise TypeError(f"cannot differentiate {type(e).__name__}")


@differentiate.register
def _(e: Const, axis):
    return Const(0, e.dim)


@differentiate.register
def _(e: Poly, axis):
    if not 0 <= axis < e.dim:
        raise ValueError(f"axis {axis} out of range for dimension {e.dim}")
    return poly(e.poly.diff(axis))


@differentiate.register
def _(e: Cos, axis):
    return scale(-1, mul(Sin(e.child), differentiate(e.child, axis)))


@differentiate.register
def _(e: Sin, axis):
    return mul(Cos(e.child), differentiate(e.child, axis))


@differentiate.register
def _(e: Exp, axis):
    return mul(e, differentiate(e.child, axis))


@differentiate.register
def _(e: Sum, axis):
    return add(*(differentiate(c, axis) for c in e.children))


@differentiate.register
def _(e: Product, axis):
    terms = []
    for i, c in enumerate(e.children):
        dc = differentiate(c, axis)
        if is_zero(dc):
            continue
        terms.append(mul(*e.children[:i], dc, *e.children[i + 1:]))
    return add(*terms) if terms else Const(0, e.dim)


@differentiate.register
def _(e: Quotient, axis):
    dn = differentiate(e.num, axis)
    dd = differentiate(e.den, axis)
    top = sub(mul(dn, e.den), mul(e.num, dd))
    if is_zero(top):
        return Const(0, e.dim)
    return Quotient(top, mul(e.den, e.den))


@differentiate.register
def _(e: Scale, axis):
    return scale(e.factor, differentiate(e.child, axis))


def fd_derivative(e: Expr, axis: int, z, h: float | None = None) -> complex:
    """Central difference along one complex coordinate."""
    z = np.asarray(z, dtype=complex)
    if h is None:
        h = 1e-5 * max(1.0, float(np.linalg.norm(z)))
    if not h > 0:
        raise ValueError("step must be positive")
    step = np.zeros(e.dim, dtype=complex)
    step[axis] = h
    pts = np.stack([z + step, z - step])
    vals = evaluate(e, pts)
    return complex((vals[0] - vals[1]) / (2 * h))


# serialization

def from_json(data: Mapping) -> Expr:
    kind = data["kind"]
    if kind == "const":
        return Const(complex(float(data.get("re", 0.0)), float(data.get("im", 0.0))), int(data["dim"]))
    if kind == "poly":
        return Poly(MultiPoly.from_json(data))
    if kind in ("cos", "sin", "exp"):
        return {"cos": Cos, "sin": Sin, "exp": Exp}[kind](from_json(data["child"]))
    if kind in ("sum", "product"):
        return {"sum": Sum, "product": Product}[kind](tuple(from_json(c) for c in data["children"]))
    if kind == "quotient":
        return Quotient(from_json(data["num"]), from_json(data["den"]))
    if kind == "scale":
        return Scale(complex(float(data.get("re", 0.0)), float(data.get("im", 0.0))), from_json(data["child"]))
    raise ValueError(f"unknown expression kind {kind!r}")


def contains_quotient(e: Expr) -> bool:
    if isinstance(e, Quotient):
        return True
    if isinstance(e, _Unary) or isinstance(e, Scale):
        return contains_quotient(e.child)
    if isinstance(e, _Nary):
        return any(contains_quotient(c) for c in e.children)
    return False
