"""Sparse multivariate polynomials with complex coefficients."""

from __future__ import annotations

from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .coefficients import as_complex


def _exp_key(exp: Iterable[int], n: int) -> tuple[int, ...]:
    key = tuple(int(e) for e in exp)
    if len(key) != n:
        raise ValueError(f"exponent vector {key} does not have length {n}")
    if any(e < 0 for e in key):
        raise ValueError(f"negative exponent in {key}")
    return key


class MultiPoly:
    """Polynomial in ``dim`` complex variables stored as ``{exponent tuple: coefficient}``.

    Zero coefficients are never stored and terms are kept in sorted exponent order.
    Instances are treated as immutable.
    """

    __slots__ = ("dim", "_terms")

    def __init__(self, dim: int, terms: Mapping[Sequence[int], complex] | None = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = int(dim)
        clean: dict[tuple[int, ...], complex] = {}
        for exp, coef in (terms or {}).items():
            key = _exp_key(exp, self.dim)
            c = clean.get(key, 0j) + as_complex(coef)
            if c == 0:
                clean.pop(key, None)
            else:
                clean[key] = c
        self._terms = dict(sorted(clean.items()))  # fixed order keeps evaluation reproducible

    # constructors

    @classmethod
    def constant(cls, dim: int, value) -> "MultiPoly":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def variable(cls, dim: int, axis: int) -> "MultiPoly":
        exp = [0] * dim
        exp[axis] = 1
        return cls(dim, {tuple(exp): 1})

    @classmethod
    def linear(cls, coeffs: Sequence, constant=0) -> "MultiPoly":
        dim = len(coeffs)
        terms = {(0,) * dim: constant}
        for axis, c in enumerate(coeffs):
            exp = [0] * dim
            exp[axis] = 1
            terms[tuple(exp)] = c
        return cls(dim, terms)

    # inspection

    @property
    def terms(self) -> dict[tuple[int, ...], complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def constant_term(self) -> complex:
        return self._terms.get((0,) * self.dim, 0j)

    def linear_part(self) -> list[complex]:
        out = [0j] * self.dim
        for exp, c in self._terms.items():
            if sum(exp) == 1:
                out[exp.index(1)] = c
        return out

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self):
        return hash((self.dim, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return f"MultiPoly({self.dim}, 0)"
        parts = []
        for exp, c in sorted(self._terms.items()):
            mono = "*".join(f"z{j + 1}^{e}" if e > 1 else f"z{j + 1}" for j, e in enumerate(exp) if e)
            parts.append(f"({c:g})" + (f"*{mono}" if mono else ""))
        return f"MultiPoly({self.dim}, " + " + ".join(parts) + ")"

    # arithmetic

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.dim != self.dim:
                raise ValueError(f"dimension mismatch {self.dim} vs {other.dim}")
            return other
        return MultiPoly.constant(self.dim, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for exp, c in other._terms.items():
            terms[exp] = terms.get(exp, 0j) + c
        return MultiPoly(self.dim, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = as_complex(other)
            return MultiPoly(self.dim, {e: v * c for e, v in self._terms.items()})
        other = self._coerce(other)
        terms: dict[tuple[int, ...], complex] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                key = tuple(x + y for x, y in zip(e1, e2))
                terms[key] = terms.get(key, 0j) + c1 * c2
        return MultiPoly(self.dim, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(self.dim, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # calculus and evaluation

    def diff(self, axis: int) -> "MultiPoly":
        terms = {}
        for exp, c in self._terms.items():
            if exp[axis]:
                new = list(exp)
                new[axis] -= 1
                terms[tuple(new)] = c * exp[axis]
        return MultiPoly(self.dim, terms)

    def shift(self, c: Sequence) -> "MultiPoly":
        """Return p(z + c), expanded term by term with integer binomial coefficients."""
        c = [as_complex(x) for x in c]
        if len(c) != self.dim:
            raise ValueError("shift dimension mismatch")
        out: dict[tuple[int, ...], complex] = {}
        for exp, coef in self._terms.items():
            partial = {(): coef}
            for j, e in enumerate(exp):
                nxt = {}
                for prefix, val in partial.items():
                    for k in range(e + 1):
                        w = comb(e, k) * (c[j] ** (e - k) if e - k else 1)
                        if w == 0:
                            continue
                        key = prefix + (k,)
                        nxt[key] = nxt.get(key, 0j) + val * w
                partial = nxt
            for key, val in partial.items():
                out[key] = out.get(key, 0j) + val
        return MultiPoly(self.dim, out)

    def __call__(self, z):
        """Evaluate at a point (length ``dim``) or at points stacked on the last axis."""
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.dim:
            raise ValueError(f"point dimension {z.shape[-1]} != {self.dim}")
        total = np.zeros(z.shape[:-1], dtype=complex)
        for exp, coef in self._terms.items():
            mono = np.full(z.shape[:-1], coef, dtype=complex)
            for j, e in enumerate(exp):
                if e:
                    mono = mono * z[..., j] ** e
            total = total + mono
        return total if total.ndim else complex(total)

    # serialization

    def to_json(self) -> dict:
        return {
            "kind": "poly",
            "dim": self.dim,
            "terms": [{"exp": list(exp), "re": c.real, "im": c.imag}
                      for exp, c in sorted(self._terms.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MultiPoly":
        dim = int(data["dim"])
        terms: dict[tuple[int, ...], complex] = {}
        for t in data.get("terms", []):
            key = _exp_key(t["exp"], dim)
            terms[key] = terms.get(key, 0j) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        return cls(dim, terms)


def univariate_compose(coeffs: Sequence, form: MultiPoly) -> MultiPoly:
    """Expand H(s) = sum_k coeffs[k] s^k for a polynomial s."""
    out = MultiPoly.constant(form.dim, 0)
    power = MultiPoly.constant(form.dim, 1)
    for k, h in enumerate(coeffs):
        if k:
            power = power * form
        h = as_complex(h)
        if h != 0:
            out = out + power * h
    return out
