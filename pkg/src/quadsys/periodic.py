"""Polynomials that are periodic under a fixed shift vector c.

A linear form s(z) = sum_j d_j z_j with sum_j d_j c_j = 0 satisfies
s(z + c) = s(z), so any polynomial H(s) is c-periodic.  Psi is a finite sum
of such terms.  Coordinate indices are 0-based throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import expr as ex
from .coefficients import as_complex
from .errors import DimensionTooSmall, EmptyNullSpace
from .polynomial import MultiPoly, univariate_compose

NULL_TOL = 1e-12


def _point(c) -> tuple[complex, ...]:
    return tuple(as_complex(x) for x in c)


@dataclass(frozen=True)
class NullLinearForm:
    """Linear form supported on ``support`` whose coefficients annihilate the shift."""

    dim: int
    support: tuple[int, ...]
    d: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(j) for j in self.support))
        object.__setattr__(self, "d", tuple(as_complex(x) for x in self.d))
        if len(self.support) < 2:
            raise EmptyNullSpace("a null form needs at least two coordinates")
        if len(set(self.support)) != len(self.support):
            raise ValueError(f"repeated coordinate in support {self.support}")
        if any(not 0 <= j < self.dim for j in self.support):
            raise ValueError(f"support {self.support} outside 0..{self.dim - 1}")
        if len(self.d) != len(self.support):
            raise ValueError("d and support differ in length")
        if all(x == 0 for x in self.d):
            raise ValueError("null form is identically zero")

    def pairing(self, c) -> complex:
        return sum(dj * as_complex(c[j]) for j, dj in zip(self.support, self.d))

    def annihilates(self, c, tol: float = NULL_TOL) -> bool:
        scale = max(1.0, max(abs(x) for x in self.d) * max(abs(as_complex(x)) for x in c))
        return abs(self.pairing(c)) <= tol * scale

    def to_multipoly(self) -> MultiPoly:
        coeffs = [0j] * self.dim
        for j, dj in zip(self.support, self.d):
            coeffs[j] = dj
        return MultiPoly.linear(coeffs)


def sample_null_form(c, support: Sequence[int], rng_seed: int | np.random.Generator) -> NullLinearForm:
    """Random nonzero vector orthogonal (bilinearly) to c restricted to ``support``.

    A complex Gaussian draw v is projected with d = v - (v.c) conj(c)/|c|^2.
    """
    c = _point(c)
    support = tuple(int(j) for j in support)
    if len(support) < 2:
        raise EmptyNullSpace("a null form needs at least two coordinates")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    cs = np.array([c[j] for j in support], dtype=complex)
    norm2 = float(np.vdot(cs, cs).real)
    while True:
        v = rng.standard_normal(len(support)) + 1j * rng.standard_normal(len(support))
        d = v if norm2 == 0 else v - (v @ cs) * np.conj(cs) / norm2
        size = np.linalg.norm(d)
        if size > 1e-8:
            return NullLinearForm(len(c), support, tuple(d / size))


@dataclass(frozen=True)
class PeriodicTerm:
    form: NullLinearForm
    H: tuple[complex, ...]  # low to high degree

    def __post_init__(self):
        object.__setattr__(self, "H", tuple(as_complex(h) for h in self.H))


@dataclass(frozen=True)
class PeriodicPolynomial:
    """Psi(z) = sum_k H_k(s_k(z)) for c-annihilating linear forms s_k."""

    shift: tuple[complex, ...]
    terms: tuple[PeriodicTerm, ...] = ()
    validate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "shift", _point(self.shift))
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.form.dim != self.dim:
                raise ValueError("form dimension differs from the shift dimension")
            if self.validate and not t.form.annihilates(self.shift):
                raise ValueError(f"form on {t.form.support} does not annihilate the shift "
                                 f"(pairing {abs(t.form.pairing(self.shift)):.3g})")

    @property
    def dim(self) -> int:
        return len(self.shift)

    @classmethod
    def zero(cls, shift) -> "PeriodicPolynomial":
        return cls(shift, ())

    def is_zero(self) -> bool:
        return all(all(h == 0 for h in t.H) for t in self.terms)

    def degree(self) -> int:
        return max((max((k for k, h in enumerate(t.H) if h != 0), default=0) for t in self.terms),
                   default=0)

    def to_multipoly(self) -> MultiPoly:
        out = MultiPoly.constant(self.dim, 0)
        for t in self.terms:
            out = out + univariate_compose(t.H, t.form.to_multipoly())
        return out

    def to_expr(self) -> ex.Expr:
        """Structural lowering: each power of s stays a product of copies of s.

        Keeping s unexpanded means s(z + c) is evaluated as one linear form, so no
        cancellation between large expanded monomials enters the periodic difference.
        """
        parts: list[ex.Expr] = []
        for t in self.terms:
            s = ex.poly(t.form.to_multipoly())
            for k, h in enumerate(t.H):
                if h == 0:
                    continue
                if k == 0:
                    parts.append(ex.Const(h, self.dim))
                else:
                    parts.append(ex.scale(h, s if k == 1 else ex.Product((s,) * k)))
        return ex.add(*parts) if parts else ex.Const(0, self.dim)

    def __call__(self, z):
        return ex.evaluate(self.to_expr(), z)

    def to_json(self) -> dict:
        return {"terms": [{"support": list(t.form.support),
                           "d": [[x.real, x.imag] for x in t.form.d],
                           "H": [[h.real, h.imag] for h in t.H]} for t in self.terms]}

    @classmethod
    def from_json(cls, data: Mapping, shift) -> "PeriodicPolynomial":
        shift = _point(shift)
        terms = []
        for t in data.get("terms", []):
            form = NullLinearForm(len(shift), t["support"], [as_complex(x) for x in t["d"]])
            terms.append(PeriodicTerm(form, tuple(as_complex(h) for h in t["H"])))
        return cls(shift, tuple(terms))


def _random_unit_disc(rng: np.random.Generator, size: int) -> np.ndarray:
    radius = np.sqrt(rng.uniform(0.0, 1.0, size))
    angle = rng.uniform(0.0, 2 * np.pi, size)
    return radius * np.exp(1j * angle)


def build_psi(c, degree_budget: int, term_count: int, rng_seed: int,
              exhaustive: bool = False) -> PeriodicPolynomial:
    """Random member of the periodic family.

    Each term draws from its own stream ``default_rng([rng_seed, term_index])``.
    Terms have degree between 2 and ``degree_budget``; lower-degree parts would be
    absorbed into the linear carrier.  With ``exhaustive`` (n <= 4) one term is
    produced for every coordinate subset of size >= 2 and ``term_count`` is ignored.
    """
    c = _point(c)
    n = len(c)
    if n < 2:
        raise DimensionTooSmall("periodic polynomials need n >= 2")
    if degree_budget < 2 and (term_count > 0 or exhaustive):
        raise ValueError("degree_budget must be at least 2 for nontrivial terms")
    if term_count < 0:
        raise ValueError("term_count must be non-negative")
    if exhaustive:
        if n > 4:
            raise ValueError("exhaustive enumeration is limited to n <= 4")
        supports = [s for size in range(2, n + 1) for s in itertools.combinations(range(n), size)]
    else:
        supports = [None] * term_count

    terms = []
    for index, support in enumerate(supports):
        rng = np.random.default_rng([rng_seed, index])
        if support is None:
            size = int(rng.integers(2, n + 1))
            support = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        form = sample_null_form(c, support, rng)
        degree = int(rng.integers(2, degree_budget + 1))
        H = _random_unit_disc(rng, degree + 1)
        while abs(H[-1]) < 1e-3:
            H[-1] = _random_unit_disc(rng, 1)[0]
        terms.append(PeriodicTerm(form, tuple(complex(h) for h in H)))
    return PeriodicPolynomial(c, tuple(terms))


@dataclass(frozen=True)
class PeriodicityReport:
    samples: int
    radius: float
    max_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tol

    def to_dict(self) -> dict:
        return {"samples": self.samples, "radius": self.radius,
                "max_deviation": self.max_deviation, "tol": self.tol, "pass": self.passed}


def sample_polydisc(n: int, samples: int, radius: float, rng_seed: int) -> np.ndarray:
    """Uniform points of the closed polydisc; row i comes from ``default_rng([seed, i])``."""
    out = np.empty((samples, n), dtype=complex)
    for i in range(samples):
        rng = np.random.default_rng([rng_seed, i])
        out[i] = radius * _random_unit_disc(rng, n)
    return out


def check_periodicity(psi, samples: int, radius: float, rng_seed: int, tol: float = 1e-9,
                      shift=None) -> PeriodicityReport:
    """Max |Psi(z + c) - Psi(z)| over the polydisc.

    ``psi`` may also be a bare expression, in which case ``shift`` is required.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not radius > 0:
        raise ValueError("radius must be positive")
    if isinstance(psi, PeriodicPolynomial):
        e = psi.to_expr()
        shift = psi.shift if shift is None else _point(shift)
    else:
        e = psi
        if shift is None:
            raise ValueError("a shift is required for a bare expression")
        shift = _point(shift)
    Z = sample_polydisc(e.dim, samples, radius, rng_seed)
    diff = ex.evaluate(e, Z + np.asarray(shift)) - ex.evaluate(e, Z)
    return PeriodicityReport(samples, float(radius), float(np.max(np.abs(diff))), tol)


def pair_forms(c, pivot: int) -> list[NullLinearForm]:
    """The two-variable null forms c_j z_p - c_p z_j through a fixed pivot coordinate."""
    c = _point(c)
    out = []
    for j in range(len(c)):
        if j == pivot:
            continue
        support = (min(pivot, j), max(pivot, j))
        d = (c[j], -c[pivot]) if support[0] == pivot else (-c[pivot], c[j])
        if any(x != 0 for x in d):
            out.append(NullLinearForm(len(c), support, d))
    return out


def single_pair_fit_residual(psi: PeriodicPolynomial, pivot: int = 0, max_degree: int | None = None,
                             samples: int = 400, radius: float = 1.0, rng_seed: int = 0) -> float:
    """Smallest relative least-squares residual of Psi against polynomials in one pair form.

    For each pair form s through ``pivot`` the basis is {1, z_1..z_n, s^2..s^D}; a
    small value means Psi admits a single-pair representation.
    """
    if max_degree is None:
        max_degree = max(psi.degree(), 2)
    Z = sample_polydisc(psi.dim, samples, radius, rng_seed)
    target = np.atleast_1d(psi(Z))
    scale = np.linalg.norm(target)
    if scale == 0:
        return 0.0
    best = np.inf
    for form in pair_forms(psi.shift, pivot):
        s = form.to_multipoly()(Z)
        cols = [np.ones(samples, dtype=complex)] + [Z[:, j] for j in range(psi.dim)]
        cols += [s**k for k in range(2, max_degree + 1)]
        basis = np.stack(cols, axis=1)
        coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
        best = min(best, float(np.linalg.norm(basis @ coef - target) / scale))
    return best
