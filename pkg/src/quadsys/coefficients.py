"""Equation coefficients and the constants derived from them.

The quadratic form is

    A(f, g) = a f^2 + 2 alpha f g + b g^2 + 2 beta f + 2 gamma g + C.

Every radical is evaluated once with the principal square root and then
reused wherever the same quantity appears, so the sign conventions of the
amplitude constants are consistent by construction.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

from .errors import DegenerateDenominator, DegenerateRadical, InadmissibleCoefficients

DEFAULT_TOL = 1e-12
SQRT2 = math.sqrt(2.0)


def as_complex(value) -> complex:
    """Coerce a scalar (or a ``[re, im]`` pair) to a finite complex number."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex pair must have two entries, got {value!r}")
        value = complex(float(value[0]), float(value[1]))
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite complex value {z!r}")
    return z


def psqrt(z: complex) -> complex:
    """Principal square root with the argument of ``z`` taken in (-pi, pi].

    ``cmath.sqrt`` honours the sign of a zero imaginary part, which would put
    ``-x - 0j`` on the lower side of the cut; the ``+ 0.0`` folds -0.0 to +0.0.
    """
    z = complex(z)
    return cmath.sqrt(complex(z.real, z.imag + 0.0))


class SignBranch(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is SignBranch.PLUS else -1

    @classmethod
    def parse(cls, value) -> "SignBranch":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        if text in ("plus", "+", "+1", "1"):
            return cls.PLUS
        if text in ("minus", "-", "-1"):
            return cls.MINUS
        raise ValueError(f"unknown sign branch {value!r}")


@dataclass(frozen=True)
class CoefficientSet:
    a: complex
    b: complex
    C: complex
    alpha: complex
    beta: complex
    gamma: complex

    def __post_init__(self):
        for name in ("a", "b", "C", "alpha", "beta", "gamma"):
            object.__setattr__(self, name, as_complex(getattr(self, name)))

    @classmethod
    def from_tuple(cls, values) -> "CoefficientSet":
        """Build from ``(a, b, alpha, beta, gamma, C)``, the order used in worked examples."""
        a, b, alpha, beta, gamma, C = values
        return cls(a=a, b=b, C=C, alpha=alpha, beta=beta, gamma=gamma)

    def as_tuple(self) -> tuple[complex, ...]:
        return (self.a, self.b, self.alpha, self.beta, self.gamma, self.C)

    @property
    def Delta(self) -> complex:
        a, b, C, al, be, ga = self.a, self.b, self.C, self.alpha, self.beta, self.gamma
        return a * b * C + 2 * al * be * ga - a * ga**2 - b * be**2 - C * al**2

    @property
    def Dq(self) -> complex:
        return self.a * self.b - self.alpha**2

    def quadratic(self, f, g):
        """Evaluate A(f, g); works elementwise on numpy arrays."""
        return (self.a * f * f + 2 * self.alpha * f * g + self.b * g * g
                + 2 * self.beta * f + 2 * self.gamma * g + self.C)

    def term_magnitudes(self, f, g):
        """Magnitudes of the six constituent terms of A(f, g)."""
        return (abs(self.a * f * f), abs(2 * self.alpha * f * g), abs(self.b * g * g),
                abs(2 * self.beta * f), abs(2 * self.gamma * g), abs(self.C))

    def admissibility(self, tol: float = DEFAULT_TOL) -> "AdmissibilityReport":
        return check_admissibility(self, tol)


@dataclass(frozen=True)
class AdmissibilityCheck:
    name: str
    magnitude: float
    passed: bool


@dataclass(frozen=True)
class AdmissibilityReport:
    checks: tuple[AdmissibilityCheck, ...]
    tol: float

    @property
    def admissible(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "admissible": self.admissible,
            "tol": self.tol,
            "checks": [{"name": c.name, "magnitude": c.magnitude, "passed": c.passed}
                       for c in self.checks],
        }


def check_admissibility(coeffs: CoefficientSet, tol: float = DEFAULT_TOL) -> AdmissibilityReport:
    if not tol > 0:
        raise ValueError("tol must be positive")
    values = {
        "ab != 0": coeffs.a * coeffs.b,
        "Delta != 0": coeffs.Delta,
        "alpha^2 != 0": coeffs.alpha**2,
        "alpha^2 != ab": coeffs.alpha**2 - coeffs.a * coeffs.b,
    }
    checks = tuple(AdmissibilityCheck(name, abs(v), abs(v) >= tol) for name, v in values.items())
    return AdmissibilityReport(checks, tol)


def _require_admissible(coeffs: CoefficientSet, tol: float) -> None:
    report = check_admissibility(coeffs, tol)
    if not report.admissible:
        raise InadmissibleCoefficients("inadmissible coefficients: " + ", ".join(report.failures()))


def _nonzero_root(value: complex, what: str, tol: float) -> complex:
    root = psqrt(value)
    if abs(root) < tol:
        raise DegenerateRadical(f"radical {what} vanishes")
    return root


@dataclass(frozen=True)
class DerivedConstants:
    Delta: complex
    Dq: complex
    xi1: complex
    eta1: complex
    Aplus: complex
    Bminus: complex
    D11: complex
    D12: complex
    E11: complex
    E12: complex
    T1: complex
    T2: complex
    branch: SignBranch
    # shared radicals, kept for inspection
    disc_root: complex = field(repr=False, default=0j)
    root_A: complex = field(repr=False, default=0j)
    root_B: complex = field(repr=False, default=0j)

    def table(self) -> dict[str, complex]:
        return {name: getattr(self, name) for name in
                ("Delta", "Dq", "xi1", "eta1", "Aplus", "Bminus",
                 "D11", "D12", "E11", "E12", "T1", "T2")}


def derive_constants(coeffs: CoefficientSet, branch: SignBranch, tol: float = DEFAULT_TOL) -> DerivedConstants:
    """Centre, eigen-rotation and circle-normalisation constants for one sign branch."""
    _require_admissible(coeffs, tol)
    branch = SignBranch.parse(branch)
    sg = branch.sign
    a, b, al, be, ga = coeffs.a, coeffs.b, coeffs.alpha, coeffs.beta, coeffs.gamma
    Delta, Dq = coeffs.Delta, coeffs.Dq

    s = psqrt((a - b) ** 2 + 4 * al**2)
    k = (b - a) + sg * s
    norm = _nonzero_root(k**2 + 4 * al**2, "((b-a) +- sqrt(...))^2 + 4 alpha^2", tol)
    xi1 = 2 * al / norm
    eta1 = k / norm
    Aplus = ((a + b) + sg * s) / 2
    Bminus = ((a + b) - sg * s) / 2
    root_A = _nonzero_root(Dq * Aplus / -Delta, "D A / -Delta", tol)
    root_B = _nonzero_root(Dq * Bminus / -Delta, "D B / -Delta", tol)

    return DerivedConstants(
        Delta=Delta, Dq=Dq, xi1=xi1, eta1=eta1, Aplus=Aplus, Bminus=Bminus,
        D11=xi1 / root_A, D12=eta1 / root_B, E11=eta1 / root_A, E12=xi1 / root_B,
        T1=(al * ga - b * be) / Dq, T2=(al * be - a * ga) / Dq,
        branch=branch, disc_root=s, root_A=root_A, root_B=root_B,
    )


@dataclass(frozen=True)
class RConstants:
    R11: complex
    R12: complex
    R13: complex
    R14: complex
    R21: complex
    R22: complex
    R23: complex
    R24: complex

    def table(self) -> dict[str, complex]:
        return {f"R{i}": getattr(self, f"R{i}") for i in (11, 12, 13, 14, 21, 22, 23, 24)}


def r_constants_from_amplitudes(D11, D12, E11, E12, T1, T2, tol: float = DEFAULT_TOL) -> RConstants:
    """R-constants for any amplitude quadruple (general or normalised corollary case).

    A gap below ``tol`` between T1 and T2 (resp. in T2) is snapped to an exact zero
    in R14 (resp. R24).
    """
    den = 1j * E11 - E12
    if abs(den) < tol:
        raise DegenerateDenominator("iE11 - E12 vanishes")
    r13 = (1j * E11 + E12) / den
    gap = T2 - T1
    R14 = 0j if abs(gap) < tol else 2j * gap / den
    R24 = 0j if abs(T2) < tol else 2j * T2 / den
    return RConstants(
        R11=(1j * D11 - D12) / den,
        R12=(1j * D11 + D12) / den,
        R13=r13,
        R14=R14,
        R21=(-D11 - 1j * D12) / den,
        R22=(D11 - 1j * D12) / den,
        R23=r13,
        R24=R24,
    )


def compute_R_constants(derived: DerivedConstants, tol: float = DEFAULT_TOL) -> RConstants:
    return r_constants_from_amplitudes(derived.D11, derived.D12, derived.E11, derived.E12,
                                       derived.T1, derived.T2, tol)


@dataclass(frozen=True)
class CorollaryConstants:
    K11: complex
    K12: complex
    K13: complex
    K14: complex
    A11c: complex
    A12c: complex
    B11c: complex
    B12c: complex
    branch: SignBranch

    def table(self) -> dict[str, complex]:
        return {name: getattr(self, name) for name in
                ("K11", "K12", "K13", "K14", "A11c", "A12c", "B11c", "B12c")}


def compute_corollary_constants(coeffs: CoefficientSet, branch: SignBranch,
                                tol: float = DEFAULT_TOL) -> CorollaryConstants:
    """Amplitudes for the normalised equation a f^2 + 2 alpha f g + b g^2 = 1.

    Only ab != 0 and alpha^2 != 0, ab are required; beta, gamma and C are ignored.
    """
    report = check_admissibility(coeffs, tol)
    bad = [n for n in report.failures() if n != "Delta != 0"]
    if bad:
        raise InadmissibleCoefficients("inadmissible coefficients: " + ", ".join(bad))
    branch = SignBranch.parse(branch)
    sg = branch.sign
    a, b, al = coeffs.a, coeffs.b, coeffs.alpha
    s = psqrt((a - b) ** 2 + 4 * al**2)
    K14 = (b - a) + sg * s
    K11 = _nonzero_root((a + b) + sg * s, "K11", tol)
    K12 = _nonzero_root(K14**2 + 4 * al**2, "K12", tol)
    K13 = _nonzero_root((a + b) - sg * s, "K13", tol)
    return CorollaryConstants(
        K11=K11, K12=K12, K13=K13, K14=K14,
        A11c=2 * SQRT2 * al / (K11 * K12),
        A12c=SQRT2 * K14 / (K12 * K13),
        B11c=SQRT2 * K14 / (K11 * K12),
        B12c=2 * SQRT2 * al / (K12 * K13),
        branch=branch,
    )
