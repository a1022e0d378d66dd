"""Residual certification of candidate pairs and checks of the reduction steps.

Residuals are scaled: |A(f, g)| divided by the largest of the six constituent
term magnitudes (floor 1), which measures relative cancellation even where the
waves are of size e^40.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import expr as ex
from .builder import SolutionPair, safe_radius
from .coefficients import (
    CoefficientSet,
    SignBranch,
    as_complex,
    compute_R_constants,
    derive_constants,
    psqrt,
)
from .errors import EvaluationOverflow, PoleEncountered, ZeroShiftCoordinate
from .periodic import _random_unit_disc

KINDS = ("difference", "pde", "pdde", "single_circular")
DEFAULT_TOL = 1e-9
MAX_RESAMPLE = 20


@dataclass(frozen=True)
class SystemSpec:
    kind: str
    coeffs: CoefficientSet
    shift: tuple[complex, ...] | None
    dim: int
    axis: int = 0  # derivative is always with respect to z_1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown system kind {self.kind!r}")
        if self.kind in ("difference", "pdde"):
            if self.shift is None or all(as_complex(x) == 0 for x in self.shift):
                raise ZeroShiftCoordinate("shift must be nonzero")
        if self.shift is not None:
            object.__setattr__(self, "shift", tuple(as_complex(x) for x in self.shift))
            if len(self.shift) != self.dim:
                raise ValueError("shift length differs from the dimension")


def scaled_residual(coeffs: CoefficientSet, f, g) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    value = coeffs.quadratic(f, g)
    terms = np.stack([np.abs(t) * np.ones(f.shape) for t in coeffs.term_magnitudes(f, g)])
    return np.abs(value) / np.maximum(terms.max(axis=0), 1.0)


@dataclass(frozen=True)
class ResidualReport:
    kind: str
    samples: int
    radius: float
    seed: int
    tol: float
    max_scaled_residual: float
    argmax: tuple[complex, ...]
    per_equation: dict
    resampled: int = 0
    im_bound: float | None = None
    fd_max_mismatch: float | None = None

    @property
    def passed(self) -> bool:
        ok = self.max_scaled_residual < self.tol
        if self.fd_max_mismatch is not None:
            ok = ok and self.fd_max_mismatch <= 1e-6
        return ok

    def to_dict(self) -> dict:
        return {"kind": self.kind, "samples": self.samples, "radius": self.radius, "seed": self.seed,
                "tol": self.tol, "max_scaled_residual": self.max_scaled_residual,
                "argmax": list(self.argmax), "per_equation": dict(self.per_equation),
                "resampled": self.resampled, "im_bound": self.im_bound,
                "fd_max_mismatch": self.fd_max_mismatch, "pass": self.passed}


def _sample_row(n: int, radius: float, seed: int, index: int, attempt: int) -> np.ndarray:
    key = [seed, index] if attempt == 0 else [seed, index, attempt]
    return radius * _random_unit_disc(np.random.default_rng(key), n)


def _equations(spec: SystemSpec, e1: ex.Expr, e2: ex.Expr):
    """Pairs (first argument, second argument) of A for each equation, as point -> value maps."""
    c = np.asarray(spec.shift, dtype=complex) if spec.shift is not None else None
    if spec.kind == "single_circular":
        return {"A(f1, f2)": (lambda Z: ex.evaluate(e1, Z), lambda Z: ex.evaluate(e2, Z))}
    if spec.kind == "difference":
        return {"A(f1(z), f2(z+c))": (lambda Z: ex.evaluate(e1, Z), lambda Z: ex.evaluate(e2, Z + c)),
                "A(f2(z), f1(z+c))": (lambda Z: ex.evaluate(e2, Z), lambda Z: ex.evaluate(e1, Z + c))}
    d1 = ex.differentiate(e1, spec.axis)
    d2 = ex.differentiate(e2, spec.axis)
    if spec.kind == "pde":
        return {"A(f1, d1 f2)": (lambda Z: ex.evaluate(e1, Z), lambda Z: ex.evaluate(d2, Z)),
                "A(f2, d1 f1)": (lambda Z: ex.evaluate(e2, Z), lambda Z: ex.evaluate(d1, Z))}
    return {"A(f1(z+c), d1 f2(z))": (lambda Z: ex.evaluate(e1, Z + c), lambda Z: ex.evaluate(d2, Z)),
            "A(f2(z+c), d1 f1(z))": (lambda Z: ex.evaluate(e2, Z + c), lambda Z: ex.evaluate(d1, Z))}


def _fd_mismatch(spec: SystemSpec, exprs, Z: np.ndarray) -> np.ndarray:
    """Mixed absolute/relative gap between analytic and central-difference derivatives."""
    worst = np.zeros(Z.shape[0])
    h = 1e-5 * np.maximum(1.0, np.linalg.norm(Z, axis=1))
    step = np.zeros_like(Z)
    step[:, spec.axis] = h
    for e in exprs:
        an = ex.evaluate(ex.differentiate(e, spec.axis), Z)
        fd = (ex.evaluate(e, Z + step) - ex.evaluate(e, Z - step)) / (2 * h)
        worst = np.maximum(worst, np.abs(an - fd) / np.maximum(1.0, np.abs(an)))
    return worst


def _evaluate_chunk(spec, equations, Z, seed, start, radius, fd_exprs):
    """Scaled residuals on one block of samples, resampling points that hit poles."""
    Z = Z.copy()
    attempts = np.zeros(Z.shape[0], dtype=int)
    resampled = 0
    while True:
        try:
            out = {}
            for name, (left, right) in equations.items():
                f, g = left(Z), right(Z)
                out[name] = scaled_residual(spec.coeffs, f, g)
            mism = _fd_mismatch(spec, fd_exprs, Z) if fd_exprs else None
            return Z, out, mism, resampled
        except PoleEncountered as err:
            if err.mask is None:
                raise
            idx = np.flatnonzero(np.asarray(err.mask))
            if len(idx) == 0:
                raise
            for i in idx:
                attempts[i] += 1
                if attempts[i] > MAX_RESAMPLE:
                    raise PoleEncountered(f"sample {start + i} kept landing on a pole", mask=err.mask)
                Z[i] = _sample_row(Z.shape[1], radius, seed, start + i, int(attempts[i]))
                resampled += 1


def verify_system(spec: SystemSpec, pair, samples: int = 1000, radius: float | None = None, seed: int = 0,
                  tol: float = DEFAULT_TOL, fd_check: bool = False, workers: int = 1,
                  chunk: int = 250) -> ResidualReport:
    """Max scaled residual of both equations over uniform samples of a polydisc.

    Sample i is drawn from ``default_rng([seed, i])``, so the report does not
    depend on ``workers`` or ``chunk``.  With ``radius=None`` a builder pair uses
    its safe radius (carrier bounded by 40); bare expression pairs use radius 1.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if isinstance(pair, SolutionPair):
        e1, e2 = pair.expr1, pair.expr2
    else:
        e1, e2 = pair
    if e1.dim != spec.dim or e2.dim != spec.dim:
        raise ValueError("pair dimension differs from the system dimension")
    im_bound = None
    if radius is None:
        if isinstance(pair, SolutionPair) and pair.is_wave:
            radius, im_bound = safe_radius(pair), 40.0
        else:
            radius = 1.0
    if not radius > 0:
        raise ValueError("radius must be positive")

    equations = _equations(spec, e1, e2)
    fd_exprs = (e1, e2) if fd_check and spec.kind in ("pde", "pdde") else ()
    Z = np.stack([_sample_row(spec.dim, radius, seed, i, 0) for i in range(samples)])
    starts = list(range(0, samples, chunk))

    def run(start):
        return _evaluate_chunk(spec, equations, Z[start:start + chunk], seed, start, radius, fd_exprs)

    try:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(run, starts))
        else:
            parts = [run(s) for s in starts]
    except EvaluationOverflow as err:
        raise EvaluationOverflow(f"{err}; radius {radius:g} is too large, use a smaller one") from err

    Zall = np.concatenate([p[0] for p in parts])
    per = {name: np.concatenate([p[1][name] for p in parts]) for name in equations}
    stacked = np.stack(list(per.values()))
    flat = stacked.max(axis=0)
    worst = int(np.argmax(flat))
    fd = None
    if fd_exprs:
        fd = float(np.max(np.concatenate([p[2] for p in parts])))
    return ResidualReport(
        kind=spec.kind, samples=samples, radius=float(radius), seed=seed, tol=tol,
        max_scaled_residual=float(flat[worst]), argmax=tuple(complex(x) for x in Zall[worst]),
        per_equation={name: float(v.max()) for name, v in per.items()},
        resampled=sum(p[3] for p in parts), im_bound=im_bound, fd_max_mismatch=fd,
    )


def system_for_pair(pair: SolutionPair, kind: str | None = None) -> SystemSpec:
    """The system a builder pair was constructed for."""
    if kind is None:
        kind = {"diff": "difference", "pdde": "pdde", "circular": "single_circular"}[pair.family.split("_")[0]]
    return SystemSpec(kind, pair.coeffs, pair.shift, pair.dim)


# reduction identities

@dataclass(frozen=True)
class ReductionFrame:
    F: complex
    G: complex
    U: complex
    V: complex

    @classmethod
    def from_uv(cls, U, V, xi1, eta1) -> "ReductionFrame":
        return cls(U * xi1 - V * eta1, U * eta1 + V * xi1, U, V)


@dataclass(frozen=True)
class IdentityReport:
    name: str
    samples: int
    max_scaled_error: float
    tol: float
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_scaled_error < self.tol

    def to_dict(self) -> dict:
        return {"name": self.name, "samples": self.samples, "max_scaled_error": self.max_scaled_error,
                "tol": self.tol, "pass": self.passed, **self.detail}


def _complex_normal(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def check_reduction_identity(coeffs: CoefficientSet, samples: int = 50, seed: int = 0,
                             tol: float = 1e-10) -> IdentityReport:
    """A(F + T1, G + T2) = a F^2 + 2 alpha F G + b G^2 + Delta/D at random (F, G)."""
    d = derive_constants(coeffs, SignBranch.PLUS)
    rng = np.random.default_rng(seed)
    F, G = _complex_normal(rng, samples), _complex_normal(rng, samples)
    a, b, al = coeffs.a, coeffs.b, coeffs.alpha
    const = d.Delta / d.Dq
    lhs = coeffs.quadratic(F + d.T1, G + d.T2)
    rhs = a * F**2 + 2 * al * F * G + b * G**2 + const
    scale = np.maximum.reduce([np.abs(t) * np.ones(samples) for t in
                               (*coeffs.term_magnitudes(F + d.T1, G + d.T2),
                                a * F**2, 2 * al * F * G, b * G**2, const)] + [np.ones(samples)])
    err = float(np.max(np.abs(lhs - rhs) / scale))
    return IdentityReport("reduction", samples, err, tol, {"constant": complex(const)})


def check_rotation_identity(coeffs: CoefficientSet, branch, samples: int = 50, seed: int = 0,
                            tol: float = 1e-10, points: Sequence[tuple] | None = None) -> IdentityReport:
    """a F^2 + 2 alpha F G + b G^2 = A U^2 + B V^2 with F = U xi - V eta, G = U eta + V xi."""
    d = derive_constants(coeffs, branch)
    if points is None:
        rng = np.random.default_rng(seed)
        U, V = _complex_normal(rng, samples), _complex_normal(rng, samples)
    else:
        U = np.array([p[0] for p in points], dtype=complex)
        V = np.array([p[1] for p in points], dtype=complex)
    frame = ReductionFrame.from_uv(U, V, d.xi1, d.eta1)
    F, G = frame.F, frame.G
    a, b, al = coeffs.a, coeffs.b, coeffs.alpha
    lhs = a * F**2 + 2 * al * F * G + b * G**2
    rhs = d.Aplus * U**2 + d.Bminus * V**2
    scale = np.maximum.reduce([np.abs(a * F**2), np.abs(2 * al * F * G), np.abs(b * G**2),
                               np.abs(d.Aplus * U**2), np.abs(d.Bminus * V**2), np.ones(len(U))])
    err = float(np.max(np.abs(lhs - rhs) / scale))
    return IdentityReport("rotation", len(U), err, tol, {"branch": SignBranch.parse(branch).value})


# non-existence probe for the partial differential system

@dataclass(frozen=True)
class CaseVerdict:
    case: str
    infeasible: bool
    magnitude: float | None
    tag: str

    def to_dict(self) -> dict:
        return {"case": self.case, "infeasible": self.infeasible,
                "magnitude": self.magnitude, "tag": self.tag}


@dataclass(frozen=True)
class NonexistenceReport:
    branch: SignBranch
    c0_squared: complex
    c0: complex
    cases: tuple[CaseVerdict, ...]
    rotation_obstruction: float
    tol: float

    @property
    def infeasible(self) -> bool:
        return all(c.infeasible for c in self.cases)

    @property
    def obstruction(self) -> float:
        return self.cases[0].magnitude

    def to_dict(self) -> dict:
        return {"branch": self.branch.value, "c0_squared": self.c0_squared, "c0": self.c0,
                "cases": [c.to_dict() for c in self.cases],
                "rotation_obstruction": self.rotation_obstruction, "tol": self.tol,
                "verdict": "infeasible" if self.infeasible else "undecided"}


def probe_pde_nonexistence(coeffs: CoefficientSet, branch, tol: float = 1e-9) -> NonexistenceReport:
    """Family-level certificate that the wave form cannot solve the pde system.

    Case A needs R22 R23 = R21, equivalently xi eta (A - B) = 0; its magnitude is
    the measured obstruction.  Cases B-D are structural (they force a constant
    carrier or the identity -1 = 1) and carry no numeric content.
    """
    branch = SignBranch.parse(branch)
    d = derive_constants(coeffs, branch)
    R = compute_R_constants(d)
    c0sq = R.R23 / (R.R21 * R.R22)
    gap = abs(R.R22 * R.R23 - R.R21)
    rot = abs(2j * d.xi1 * d.eta1 * (d.Aplus - d.Bminus))
    cases = (
        CaseVerdict("A", gap > tol, float(gap), "R22 R23 = R21 forces a = b and alpha = 0"),
        CaseVerdict("B", True, None, "carrier forced constant"),
        CaseVerdict("C", True, None, "carrier forced constant"),
        CaseVerdict("D", True, None, "forces -1 = 1"),
    )
    return NonexistenceReport(branch, c0sq, psqrt(c0sq), cases, float(rot), tol)
