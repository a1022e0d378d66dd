"""Closed-form candidate pairs and the exponential constraints that tie them together.

Every family is a pair of waves

    f(z) = offset + cos_amp * cos(h(z)) + sin_amp * sin(h(z)),
    h(z) = L(z) + Psi(z) + carrier_shift + phase,

sharing one carrier L + Psi.  The constraints on L(c) and on the phase gap
b1 - b2 are solved as e^{2i lam} = target over integer branches; the branch pair
is then chosen so that the unsquared coefficient identities (the ones obtained by
matching the e^{ih} and e^{-ih} parts of both equations) hold as well.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import expr as ex
from .coefficients import (
    CoefficientSet,
    RConstants,
    SignBranch,
    as_complex,
    compute_corollary_constants,
    derive_constants,
    psqrt,
    r_constants_from_amplitudes,
)
from .errors import (
    InfeasibleBranch,
    RequiresT1EqualsT2,
    RequiresT2Zero,
    ZeroShiftCoordinate,
    ZeroTarget,
)
from .periodic import PeriodicPolynomial
from .polynomial import MultiPoly

BRANCH_WINDOW = 8
CONSTRAINT_TOL = 1e-10
SAFE_IM_BOUND = 40.0

DIFFERENCE_FAMILIES = ("diff_i", "diff_ii")
PDDE_FAMILIES = ("pdde_i", "pdde_ii")
CIRCULAR_FAMILIES = ("circular_entire", "circular_meromorphic")
FAMILIES = DIFFERENCE_FAMILIES + PDDE_FAMILIES + CIRCULAR_FAMILIES


@dataclass(frozen=True)
class WaveSolution:
    cos_amp: complex
    sin_amp: complex
    offset: complex
    phase: complex
    linear: tuple[complex, ...]
    psi: PeriodicPolynomial
    carrier_shift: complex = 0j

    def __post_init__(self):
        for name in ("cos_amp", "sin_amp", "offset", "phase", "carrier_shift"):
            object.__setattr__(self, name, as_complex(getattr(self, name)))
        object.__setattr__(self, "linear", tuple(as_complex(x) for x in self.linear))
        if len(self.linear) != self.psi.dim:
            raise ValueError("linear form and Psi disagree on dimension")

    @property
    def dim(self) -> int:
        return len(self.linear)

    def carrier_poly(self) -> MultiPoly:
        """L(z) + carrier_shift + phase (Psi excluded)."""
        return MultiPoly.linear(self.linear, self.carrier_shift + self.phase)

    def argument(self) -> ex.Expr:
        arg = ex.poly(self.carrier_poly())
        if not self.psi.is_zero():
            arg = ex.add(arg, self.psi.to_expr())
        return arg

    def to_expr(self) -> ex.Expr:
        arg = self.argument()
        return ex.add(ex.scale(self.cos_amp, ex.Cos(arg)),
                      ex.scale(self.sin_amp, ex.Sin(arg)),
                      ex.Const(self.offset, self.dim))

    def with_phase(self, phase) -> "WaveSolution":
        return WaveSolution(self.cos_amp, self.sin_amp, self.offset, phase,
                            self.linear, self.psi, self.carrier_shift)


@dataclass(frozen=True)
class SolutionPair:
    """Candidate pair plus the data it was generated from.

    ``f1``/``f2`` are waves for the quadratic families and bare expressions for
    the circular baseline.  ``meta`` records generating data (L(c), branch
    indices, pivot) and is not used for equality.
    """

    f1: object
    f2: object
    family: str
    coeffs: CoefficientSet
    branch: SignBranch | None = None
    shift: tuple[complex, ...] | None = None
    corollary: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.shift is not None:
            object.__setattr__(self, "shift", tuple(as_complex(x) for x in self.shift))
        if isinstance(self.f1, WaveSolution) and isinstance(self.f2, WaveSolution):
            if self.f1.linear != self.f2.linear or self.f1.psi != self.f2.psi:
                raise ValueError("both waves must share the carrier L + Psi")

    @property
    def dim(self) -> int:
        return self.expr1.dim

    @property
    def expr1(self) -> ex.Expr:
        return self.f1.to_expr() if isinstance(self.f1, WaveSolution) else self.f1

    @property
    def expr2(self) -> ex.Expr:
        return self.f2.to_expr() if isinstance(self.f2, WaveSolution) else self.f2

    @property
    def is_wave(self) -> bool:
        return isinstance(self.f1, WaveSolution) and isinstance(self.f2, WaveSolution)


@dataclass(frozen=True)
class ConstraintRow:
    name: str
    lhs: complex
    rhs: complex
    tol: float

    @property
    def abs_diff(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        return self.abs_diff <= self.tol * max(1.0, abs(self.rhs))

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "abs_diff": self.abs_diff, "pass": self.passed}


@dataclass(frozen=True)
class ConstraintReport:
    rows: tuple[ConstraintRow, ...]
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[str]:
        return [r.name for r in self.rows if not r.passed]

    def row(self, name: str) -> ConstraintRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def flags(self) -> list[str]:
        out = []
        if any(r.name == LINEAR_CARRIER_ROW and not r.passed for r in self.rows):
            out.append("NonlinearCarrier")
        return out

    def to_dict(self) -> dict:
        return {"pass": self.passed, "rows": [r.to_dict() for r in self.rows],
                "flags": self.flags, "notes": list(self.notes)}


LINEAR_CARRIER_ROW = "linear carrier (Psi = 0)"


def solve_exp_constraint(target, k: int = 0, tol: float = 1e-12) -> complex:
    """lam = Log(target)/(2i) + k*pi, so that e^{2i lam} = target."""
    target = as_complex(target)
    if abs(target) < tol:
        raise ZeroTarget("e^{2i lam} = 0 has no solution")
    return cmath.log(target) / 2j + k * math.pi


def _branch_range(window: int) -> list[int]:
    return sorted(range(-window, window + 1), key=lambda k: (abs(k), k))


def _point(c) -> tuple[complex, ...]:
    c = tuple(as_complex(x) for x in c)
    if not c:
        raise ValueError("empty shift vector")
    if all(x == 0 for x in c):
        raise ZeroShiftCoordinate("shift must be nonzero")
    return c


# amplitude data shared by the general and the normalised (corollary) pipelines

@dataclass(frozen=True)
class _Amplitudes:
    D11: complex
    D12: complex
    E11: complex
    E12: complex
    T1: complex
    T2: complex
    R: RConstants


def _amplitudes(coeffs: CoefficientSet, branch, corollary: bool, tol: float = 1e-12) -> _Amplitudes:
    if corollary:
        _require_normalised(coeffs)
        k = compute_corollary_constants(coeffs, branch, tol)
        D11, D12, E11, E12, T1, T2 = k.A11c, k.A12c, k.B11c, k.B12c, 0j, 0j
    else:
        d = derive_constants(coeffs, branch, tol)
        D11, D12, E11, E12, T1, T2 = d.D11, d.D12, d.E11, d.E12, d.T1, d.T2
    R = r_constants_from_amplitudes(D11, D12, E11, E12, T1, T2, tol)
    return _Amplitudes(D11, D12, E11, E12, T1, T2, R)


def _require_normalised(coeffs: CoefficientSet) -> None:
    if coeffs.beta != 0 or coeffs.gamma != 0 or coeffs.C != -1:
        raise ValueError("the normalised system needs beta = gamma = 0 and C = -1")


def normalised_coefficients(a, b, alpha) -> CoefficientSet:
    """Coefficients of a f^2 + 2 alpha f g + b g^2 = 1."""
    return CoefficientSet(a=a, b=b, C=-1, alpha=alpha, beta=0, gamma=0)


def _e(x: complex) -> complex:
    return cmath.exp(1j * x)


def unsquared_rows(family: str, R: RConstants, L: complex, delta: complex,
                   a1: complex = 1) -> list[tuple[str, complex, complex]]:
    """Identities from matching the e^{ih} and e^{-ih} parts of both equations."""
    if family == "diff_i":
        return [("R11 e^{i(L(c)+d)} = R13", R.R11 * _e(L + delta), R.R13),
                ("R11 e^{i(L(c)-d)} = R13", R.R11 * _e(L - delta), R.R13),
                ("R12 e^{-i(L(c)+d)} = 1", R.R12 * _e(-(L + delta)), 1),
                ("R12 e^{-i(L(c)-d)} = 1", R.R12 * _e(-(L - delta)), 1)]
    if family == "diff_ii":
        return [("R11 e^{i(L(c)+d)} = 1", R.R11 * _e(L + delta), 1),
                ("R11 e^{i(-L(c)+d)} = 1", R.R11 * _e(-L + delta), 1),
                ("R12 e^{-i(L(c)+d)} = R13", R.R12 * _e(-(L + delta)), R.R13),
                ("R12 e^{i(L(c)-d)} = R13", R.R12 * _e(L - delta), R.R13)]
    if family == "pdde_i":
        return [("R22 a1 e^{i(L(c)-d)} = 1", R.R22 * a1 * _e(L - delta), 1),
                ("R22 a1 e^{i(L(c)+d)} = 1", R.R22 * a1 * _e(L + delta), 1),
                ("R21 a1 e^{i(-L(c)+d)} = R23", R.R21 * a1 * _e(-L + delta), R.R23),
                ("R21 a1 e^{i(-L(c)-d)} = R23", R.R21 * a1 * _e(-L - delta), R.R23)]
    if family == "pdde_ii":
        return [("R21 a1 e^{i(-L(c)+d)} = 1", R.R21 * a1 * _e(-L + delta), 1),
                ("-R21 a1 e^{i(L(c)+d)} = 1", -R.R21 * a1 * _e(L + delta), 1),
                ("R22 a1 e^{i(L(c)-d)} = R23", R.R22 * a1 * _e(L - delta), R.R23),
                ("-R22 a1 e^{i(-L(c)-d)} = R23", -R.R22 * a1 * _e(-L - delta), R.R23)]
    raise ValueError(f"no unsquared identities for family {family!r}")


def _display_targets(family: str, R: RConstants) -> tuple[complex, complex]:
    """Right-hand sides of e^{2iL(c)} = . and e^{2i(b1-b2)} = . ."""
    if family == "diff_i":
        return R.R13**2 / R.R11**2, R.R13 / (R.R11 * R.R12)
    if family == "diff_ii":
        return R.R13 / (R.R11 * R.R12), 1 / R.R11**2
    if family == "pdde_i":
        return R.R21 / (R.R22 * R.R23), 1 + 0j
    if family == "pdde_ii":
        return -1 + 0j, -R.R22 / (R.R21 * R.R23)
    raise ValueError(family)


_DISPLAY_NAMES = {
    "diff_i": ("e^{2iL(c)} = R13^2/R11^2", "e^{2i(b1-b2)} = R13/(R11 R12)"),
    "diff_ii": ("e^{2iL(c)} = R13/(R11 R12)", "e^{2i(b1-b2)} = 1/R11^2"),
    "pdde_i": ("e^{2iL(c)} = R21/(R22 R23)", "e^{2i(b1-b2)} = 1"),
    "pdde_ii": ("e^{2iL(c)} = -1", "e^{2i(b1-b2)} = -R22/(R21 R23)"),
}


def _rows_ok(rows, tol) -> bool:
    return all(abs(l - r) <= tol * max(1.0, abs(r)) for _, l, r in rows)


def _rows_residual(rows) -> float:
    return max(abs(l - r) / max(1.0, abs(r)) for _, l, r in rows)


def _pick_delta(family, R, L, a1, delta_target, window, tol, fixed_k=None):
    """Smallest-|k| phase gap satisfying the unsquared rows for the given L(c)."""
    ks = [fixed_k] if fixed_k is not None else _branch_range(window)
    best = None
    for k in ks:
        delta = solve_exp_constraint(delta_target, k)
        rows = unsquared_rows(family, R, L, delta, a1)
        res = _rows_residual(rows)
        if _rows_ok(rows, tol):
            return k, delta, res
        if best is None or res < best[2]:
            best = (k, delta, res)
    return None if fixed_k is None else best


def _family_tag(kind: str, family) -> str:
    prefix = "diff_" if kind == "difference" else "pdde_"
    tag = str(family).lower().removeprefix(prefix)
    if tag not in ("i", "ii"):
        raise ValueError(f"family must be 'i' or 'ii' for the {kind} system, got {family!r}")
    return prefix + tag


def _wave_pair(amp: _Amplitudes, family: str, linear, psi, b1, b2, carrier_shift=0j):
    sign2 = -1 if family.endswith("_i") else 1
    f1 = WaveSolution(amp.D11, -amp.D12, amp.T1, b1, linear, psi, carrier_shift)
    f2 = WaveSolution(amp.D11, sign2 * amp.D12, amp.T1, b2, linear, psi, carrier_shift)
    return f1, f2


def build_difference_family(coeffs: CoefficientSet, branch, c, family, psi: PeriodicPolynomial | None = None,
                            tail: Sequence | None = None, b2=0, branch_indices: tuple[int | None, int | None] | None = None,
                            pivot: int | None = None, window: int = BRANCH_WINDOW,
                            tol: float = CONSTRAINT_TOL, corollary: bool = False):
    """Pair of the shifted-argument difference system and its constraint report.

    ``tail`` lists the linear coefficients a_r for every coordinate except the
    pivot (the first nonzero coordinate of c unless given); the pivot coefficient
    is back-solved from L(c).  ``branch_indices`` = (k_L, k_delta) pins the
    logarithm branches (None entries are searched); otherwise the smallest branch pair that satisfies the
    unsquared identities is taken, falling back to (0, 0) when none does.
    """
    branch = SignBranch.parse(branch)
    c = _point(c)
    n = len(c)
    family = _family_tag("difference", family)
    amp = _amplitudes(coeffs, branch, corollary)
    if abs(amp.T1 - amp.T2) > 1e-12 * max(1.0, abs(amp.T1)):
        raise RequiresT1EqualsT2(f"T1 = {amp.T1} differs from T2 = {amp.T2}")
    if pivot is None:
        pivot = next(j for j, x in enumerate(c) if x != 0)
    if c[pivot] == 0:
        raise ZeroShiftCoordinate(f"shift coordinate {pivot} is zero and cannot carry a_{pivot}")
    tail = [0j] * (n - 1) if tail is None else [as_complex(x) for x in tail]
    if len(tail) != n - 1:
        raise ValueError(f"tail must have {n - 1} entries")
    psi = PeriodicPolynomial.zero(c) if psi is None else psi
    if psi.shift != c:
        raise ValueError("Psi was built for a different shift")

    R = amp.R
    tL, tD = _display_targets(family, R)
    notes = []
    fixed_L, fixed_D = branch_indices if branch_indices is not None else (None, None)
    if fixed_L is not None and fixed_D is not None:
        kL, kD = fixed_L, fixed_D
    else:
        feasible = []
        for kL in ([fixed_L] if fixed_L is not None else _branch_range(window)):
            L = solve_exp_constraint(tL, kL)
            for kD in ([fixed_D] if fixed_D is not None else _branch_range(window)):
                delta = solve_exp_constraint(tD, kD)
                if _rows_ok(unsquared_rows(family, R, L, delta), tol):
                    feasible.append((abs(kL) + abs(kD), abs(kL), abs(kD), kL, kD))
        if feasible:
            kL, kD = min(feasible)[3:]
        else:
            kL = 0 if fixed_L is None else fixed_L
            kD = 0 if fixed_D is None else fixed_D
            notes.append("no branch pair in the search window satisfies the unsquared identities; "
                         f"using (k_L, k_delta) = ({kL}, {kD})")
    L, delta = solve_exp_constraint(tL, kL), solve_exp_constraint(tD, kD)

    others = [j for j in range(n) if j != pivot]
    linear = [0j] * n
    for j, a in zip(others, tail):
        linear[j] = a
    linear[pivot] = (L - sum(linear[j] * c[j] for j in others)) / c[pivot]
    b2 = as_complex(b2)
    b1 = b2 + delta
    f1, f2 = _wave_pair(amp, family, linear, psi, b1, b2)
    pair = SolutionPair(f1, f2, family, coeffs, branch, c, corollary,
                        meta={"L_c": L, "b1": b1, "b2": b2, "pivot": pivot,
                              "branch_indices": {"shift": kL, "phase": kD}})
    report = check_constraints(pair, tol)
    return pair, ConstraintReport(report.rows, tuple(notes) + report.notes)


def build_pdde_family(coeffs: CoefficientSet, branch, c, family, tail: Sequence | None = None, b2=0,
                      a1_sign: int = 1, branch_index: int | None = None, phase_index: int | None = None,
                      window: int = BRANCH_WINDOW, tol: float = CONSTRAINT_TOL, corollary: bool = False):
    """Pair of the differential-difference system and its constraint report.

    a_1 is fixed by a_1^2 = R23/(R21 R22) (root chosen by ``a1_sign``).  ``tail``
    gives a_2..a_n; one entry may be None and is then solved so that L(c) hits the
    selected branch.  With a fully specified tail L(c) is frozen and the branch
    search only checks it.
    """
    branch = SignBranch.parse(branch)
    c = _point(c)
    n = len(c)
    family = _family_tag("pdde", family)
    amp = _amplitudes(coeffs, branch, corollary)
    if abs(amp.T2) > 1e-12:
        raise RequiresT2Zero(f"T2 = {amp.T2} is not zero")
    if a1_sign not in (1, -1):
        raise ValueError("a1_sign must be +1 or -1")
    R = amp.R
    a1 = a1_sign * psqrt(R.R23 / (R.R21 * R.R22))

    if tail is None:
        tail = [0j] * (n - 1)
        free = next((j for j in range(1, n) if c[j] != 0), None)
        if free is not None:
            tail[free - 1] = None
    else:
        tail = [None if x is None else as_complex(x) for x in tail]
    if len(tail) != n - 1:
        raise ValueError(f"tail must have {n - 1} entries")
    holes = [j + 1 for j, x in enumerate(tail) if x is None]
    if len(holes) > 1:
        raise ValueError("at most one tail coefficient can be left free")
    if holes and c[holes[0]] == 0:
        raise ZeroShiftCoordinate(f"shift coordinate {holes[0]} is zero and cannot carry a_{holes[0]}")

    tL, tD = _display_targets(family, R)
    known = a1 * c[0] + sum(x * c[j + 1] for j, x in enumerate(tail) if x is not None)
    ks = [branch_index] if branch_index is not None else _branch_range(window)
    chosen = None
    best_miss = math.inf
    for kL in ks:
        L = solve_exp_constraint(tL, kL)
        if not holes:
            miss = abs(L - known)
            best_miss = min(best_miss, miss)
            if miss > tol * max(1.0, abs(L)):
                continue
            L = known
        picked = _pick_delta(family, R, L, a1, tD, window, tol, phase_index)
        if picked is None:
            continue
        chosen = (kL, L, picked)
        break
    if chosen is None:
        if not holes:
            raise InfeasibleBranch("L(c) fixed by the linear form misses every branch of the "
                                   "exponential constraint", best_miss)
        raise InfeasibleBranch("no phase branch satisfies the coefficient identities", math.inf)
    kL, L, (kD, delta, _) = chosen

    linear = [a1] + [0j if x is None else x for x in tail]
    if holes:
        j = holes[0]
        linear[j] = (L - known) / c[j]
    b2 = as_complex(b2)
    b1 = b2 + delta
    L_c = sum(a * x for a, x in zip(linear, c))
    f1, f2 = _wave_pair(amp, family, linear, PeriodicPolynomial.zero(c), b1, b2, -L_c)
    pair = SolutionPair(f1, f2, family, coeffs, branch, c, corollary,
                        meta={"L_c": L_c, "a1": a1, "b1": b1, "b2": b2,
                              "branch_indices": {"shift": kL, "phase": kD}})
    return pair, check_constraints(pair, tol)


def build_corollary_family(a, b, alpha, branch, c, family, kind: str = "difference", **free):
    """Same pipelines for a f^2 + 2 alpha f g + b g^2 = 1 with the normalised amplitudes."""
    coeffs = normalised_coefficients(a, b, alpha)
    if kind == "difference":
        return build_difference_family(coeffs, branch, c, family, corollary=True, **free)
    if kind == "pdde":
        return build_pdde_family(coeffs, branch, c, family, corollary=True, **free)
    raise ValueError(f"kind must be 'difference' or 'pdde', got {kind!r}")


CIRCULAR_COEFFS = CoefficientSet(a=1, b=1, C=-1, alpha=0, beta=0, gamma=0)


def build_circular_pair(h: MultiPoly | None = None, kind: str = "entire", beta: ex.Expr | None = None) -> SolutionPair:
    """(cos h, sin h), or ((1 - beta^2)/(1 + beta^2), 2 beta/(1 + beta^2)), solving f^2 + g^2 = 1."""
    if kind == "entire":
        if h is None:
            raise ValueError("entire kind needs a polynomial h")
        arg = ex.poly(h)
        return SolutionPair(ex.Cos(arg), ex.Sin(arg), "circular_entire", CIRCULAR_COEFFS)
    if kind == "meromorphic":
        if beta is None:
            raise ValueError("meromorphic kind needs a beta expression")
        one = ex.Const(1, beta.dim)
        sq = ex.mul(beta, beta)
        den = ex.add(one, sq)
        return SolutionPair(ex.Quotient(ex.sub(one, sq), den), ex.Quotient(ex.scale(2, beta), den),
                            "circular_meromorphic", CIRCULAR_COEFFS)
    raise ValueError(f"unknown circular kind {kind!r}")


def perturb_phase(pair: SolutionPair, amount=0.1) -> SolutionPair:
    """Copy of a wave pair with b1 moved by ``amount``."""
    f1 = pair.f1.with_phase(pair.f1.phase + as_complex(amount))
    return SolutionPair(f1, pair.f2, pair.family, pair.coeffs, pair.branch, pair.shift,
                        pair.corollary, dict(pair.meta))


def check_constraints(pair: SolutionPair, tol: float = CONSTRAINT_TOL) -> ConstraintReport:
    """Recompute every constraint of the pair's family from the coefficients and the waves."""
    if not pair.is_wave:
        return ConstraintReport((), ("circular pairs carry no constraints",))
    amp = _amplitudes(pair.coeffs, pair.branch, pair.corollary)
    R = amp.R
    f1, f2, c = pair.f1, pair.f2, pair.shift
    L = sum(a * x for a, x in zip(f1.linear, c))
    delta = f1.phase - f2.phase
    a1 = f1.linear[0]
    tL, tD = _display_targets(pair.family, R)
    nL, nD = _DISPLAY_NAMES[pair.family]
    sign2 = -1 if pair.family.endswith("_i") else 1

    rows = []
    add = lambda name, lhs, rhs: rows.append(ConstraintRow(name, as_complex(lhs), as_complex(rhs), tol))
    add("f1 cos amplitude", f1.cos_amp, amp.D11)
    add("f1 sin amplitude", f1.sin_amp, -amp.D12)
    add("f2 cos amplitude", f2.cos_amp, amp.D11)
    add("f2 sin amplitude", f2.sin_amp, sign2 * amp.D12)
    add("offsets = T1", max((f1.offset, f2.offset), key=lambda v: abs(v - amp.T1)), amp.T1)
    if pair.family in DIFFERENCE_FAMILIES:
        add("T1 = T2", amp.T1, amp.T2)
        add(nL, cmath.exp(2j * L), tL)
        add(nD, cmath.exp(2j * delta), tD)
        add("R13 = R11 R12", R.R13, R.R11 * R.R12)
        worst = max((abs(t.form.pairing(c)) for t in f1.psi.terms), default=0.0)
        add("Psi periodic (max |d.c|)", worst, 0)
        add("carrier shift = 0", f1.carrier_shift, 0)
    else:
        add("T2 = 0", amp.T2, 0)
        add("a1^2 = R23/(R21 R22)", a1**2, R.R23 / (R.R21 * R.R22))
        add(nD, cmath.exp(2j * delta), tD)
        add(nL, cmath.exp(2j * L), tL)
        biggest = max((abs(h) for t in f1.psi.terms for h in t.H), default=0.0)
        add(LINEAR_CARRIER_ROW, biggest, 0)
        add("carrier shift = -L(c)", f1.carrier_shift, -L)
    for name, lhs, rhs in unsquared_rows(pair.family, R, L, delta, a1):
        add(name, lhs, rhs)
    return ConstraintReport(tuple(rows))


def safe_radius(pair: SolutionPair, bound: float = SAFE_IM_BOUND, cap: float = 10.0) -> float:
    """Largest polydisc radius (up to ``cap``) on which a crude bound keeps |h| <= ``bound``.

    The bound sums |coefficient| r^|e| over the carrier expanded at z and at z + c,
    plus the constant phase, so cos/sin values stay below about e^bound.
    """
    if not pair.is_wave:
        return 1.0
    carriers = []
    for w in (pair.f1, pair.f2):
        h = w.carrier_poly() + (w.psi.to_multipoly() if not w.psi.is_zero() else 0)
        carriers.append(h)
        if pair.shift is not None:
            carriers.append(h.shift(pair.shift))

    def worst(r):
        return max(sum(abs(coef) * r ** sum(e) for e, coef in h.items()) for h in carriers)

    if worst(cap) <= bound:
        return cap
    lo, hi = 0.0, cap
    if worst(lo) > bound:
        raise ValueError(f"carrier exceeds the bound {bound} even at the origin")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if worst(mid) <= bound else (lo, mid)
    return lo
