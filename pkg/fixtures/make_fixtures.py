"""Regenerate the problem-spec fixtures in this directory: python fixtures/make_fixtures.py"""

import math
from pathlib import Path

from quadsys import expr as ex
from quadsys.coefficients import CoefficientSet, SignBranch, derive_constants
from quadsys.periodic import NullLinearForm, PeriodicPolynomial, PeriodicTerm
from quadsys.polynomial import MultiPoly
from quadsys.problem import CircularData, ProblemSpec, VerificationParams, write_problem_file

HERE = Path(__file__).resolve().parent

EX1_COEFFS = CoefficientSet.from_tuple((3, 1, -2, 2, -2, -1))
EX1_SHIFT = (3, 1, -2)
EX1_FORM = NullLinearForm(3, (0, 1, 2), (2, -4, 1))
EX2_COEFFS = CoefficientSet.from_tuple((2, 3, 2, -1, -1, -1))
EX2_SHIFT = (math.sqrt(3), -2, 1)


def example1() -> ProblemSpec:
    psi = PeriodicPolynomial(EX1_SHIFT, (PeriodicTerm(EX1_FORM, (0, 0, 0, 0, 0, 1)),))
    return ProblemSpec(
        system="difference", dimension=3, shift=EX1_SHIFT, coeffs=EX1_COEFFS, branch=SignBranch.PLUS,
        family="ii", linear_tail=(math.log(3) / 2j, 3), psi=psi, b2=1 / 2j, branch_indices=(0, 0),
        verification=VerificationParams(samples=1000, radius=0.25))


def _printed_wave(cos_amp, sin_amp, offset, phase, cos_power, sin_power):
    lin = MultiPoly.linear((2, math.log(3) / 2j, 3), phase)
    s = ex.poly(EX1_FORM.to_multipoly())

    def arg(k):
        return ex.add(ex.poly(lin), ex.Product((s,) * k))

    return ex.add(ex.scale(cos_amp, ex.Cos(arg(cos_power))), ex.scale(sin_amp, ex.Sin(arg(sin_power))),
                  ex.Const(offset, 3))


def example1_printed() -> ProblemSpec:
    """Explicit mixed-exponent pair, with exponents 5/2 (f1) and 5/4 (f2) inside cos/sin."""
    d = derive_constants(EX1_COEFFS, SignBranch.PLUS)
    b1, b2 = (1 + math.log(5)) / 2j, 1 / 2j
    f1 = _printed_wave(d.D11, -d.D12, d.T1, b1, 5, 2)
    f2 = _printed_wave(d.D11, d.D12, d.T1, b2, 5, 4)
    base = example1()
    return ProblemSpec(**{**base.__dict__, "pair": (f1, f2)})


def example2() -> ProblemSpec:
    return ProblemSpec(
        system="pdde", dimension=3, shift=EX2_SHIFT, coeffs=EX2_COEFFS, branch=SignBranch.PLUS,
        family="ii", linear_tail=(-math.pi / 4, -math.sqrt(2)), b2=1 / 2j)


def example2_pde_probe() -> ProblemSpec:
    return ProblemSpec(system="pde", dimension=3, coeffs=EX2_COEFFS)


def circular_entire() -> ProblemSpec:
    h = MultiPoly(2, {(2, 0): 1, (0, 1): 0.5j})
    return ProblemSpec(system="single_circular", dimension=2, circular=CircularData("entire", h=h),
                       verification=VerificationParams(samples=500, radius=1.0, tolerance=1e-10))


def circular_meromorphic() -> ProblemSpec:
    beta = ex.Poly(MultiPoly.variable(1, 0))
    return ProblemSpec(system="single_circular", dimension=1,
                       circular=CircularData("meromorphic", beta=beta),
                       verification=VerificationParams(samples=500, radius=2.0, tolerance=1e-10))


FIXTURES = {
    "example1.json": example1,
    "example1_printed.json": example1_printed,
    "example2.json": example2,
    "example2_pde_probe.json": example2_pde_probe,
    "circular_entire.json": circular_entire,
    "circular_meromorphic.json": circular_meromorphic,
}

if __name__ == "__main__":
    for name, make in FIXTURES.items():
        write_problem_file(make(), HERE / name)
        print("wrote", name)
