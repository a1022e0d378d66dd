import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_admissible
from quadsys.coefficients import (
    CoefficientSet,
    SignBranch,
    as_complex,
    check_admissibility,
    compute_corollary_constants,
    compute_R_constants,
    derive_constants,
    psqrt,
    r_constants_from_amplitudes,
)
from quadsys.errors import DegenerateDenominator, InadmissibleCoefficients

EX1 = CoefficientSet.from_tuple((3, 1, -2, 2, -2, -1))
EX2 = CoefficientSet.from_tuple((2, 3, 2, -1, -1, -1))

finite = st.floats(-3, 3, allow_nan=False)
cplx = st.builds(complex, finite, finite)


def test_example_admissibility_values():
    rep = check_admissibility(EX1, 1e-12)
    assert rep.admissible
    assert EX1.Delta == 1 and EX1.Dq == -1
    assert check_admissibility(EX2).admissible
    assert EX2.Delta == -3 and EX2.Dq == 2


def test_alpha_squared_equal_ab_is_rejected():
    rep = check_admissibility(CoefficientSet.from_tuple((1, 1, 1, 0.3, -2, 5)))
    assert not rep.admissible
    assert rep.failures() == ["alpha^2 != ab"]
    with pytest.raises(InadmissibleCoefficients):
        derive_constants(CoefficientSet.from_tuple((1, 1, 1, 0.3, -2, 5)), "plus")


def test_report_lists_each_condition():
    rep = check_admissibility(CoefficientSet.from_tuple((0, 1, 0, 0, 0, 0)))
    names = [c.name for c in rep.checks]
    assert names == ["ab != 0", "Delta != 0", "alpha^2 != 0", "alpha^2 != ab"]
    assert set(rep.failures()) == {"ab != 0", "Delta != 0", "alpha^2 != 0", "alpha^2 != ab"}
    with pytest.raises(ValueError):
        check_admissibility(EX1, 0)


def test_non_finite_inputs_rejected():
    with pytest.raises(ValueError):
        CoefficientSet(a=float("nan"), b=1, C=1, alpha=1, beta=0, gamma=0)
    assert as_complex([1, -2]) == 1 - 2j


def test_psqrt_takes_upper_side_of_cut():
    assert psqrt(complex(-4, -0.0)) == 2j
    assert psqrt(-4) == 2j


def test_example1_constants_match_printed_forms():
    d = derive_constants(EX1, SignBranch.PLUS)
    assert d.T1 == pytest.approx(-2) and d.T2 == pytest.approx(-2)
    mp.mp.dps = 40
    D11 = -2 / mp.sqrt(10 + 6 * mp.sqrt(5))
    D12 = (-1 + mp.sqrt(5)) / mp.sqrt(mp.mpc(30 - 14 * mp.sqrt(5)))
    assert abs(d.D11 - complex(D11)) < 1e-12
    assert abs(d.D12 - complex(D12)) < 1e-12


def test_example2_constants_match_printed_forms():
    d = derive_constants(EX2, SignBranch.PLUS)
    assert d.T1 == pytest.approx(0.5, abs=1e-15) and abs(d.T2) < 1e-15
    mp.mp.dps = 40
    D11 = 4 * mp.sqrt(3) / mp.sqrt(204 + 44 * mp.sqrt(17))
    D12 = mp.sqrt(3) * (1 + mp.sqrt(17)) / mp.sqrt(136 - 24 * mp.sqrt(17))
    assert abs(d.D11 - complex(D11)) < 1e-12
    assert abs(d.D12 - complex(D12)) < 1e-12


def test_zero_linear_coefficients_give_zero_centre():
    d = derive_constants(CoefficientSet.from_tuple((2, -1, 0.7, 0, 0, 3)), "minus")
    assert d.T1 == 0 and d.T2 == 0


def test_radicals_are_shared():
    d = derive_constants(EX2, "minus")
    assert d.D11 * d.root_A == pytest.approx(d.xi1)
    assert d.E11 * d.root_A == pytest.approx(d.eta1)
    assert d.D12 * d.root_B == pytest.approx(d.eta1)
    assert d.E12 * d.root_B == pytest.approx(d.xi1)


def test_R_constants_for_example1():
    R = compute_R_constants(derive_constants(EX1, "plus"))
    assert R.R13 / (R.R11 * R.R12) == pytest.approx(3, abs=1e-12)
    assert 1 / R.R11**2 == pytest.approx(5, abs=1e-12)
    assert R.R14 == 0
    assert R.R13 is R.R23


def test_R13_unimodular_for_real_E():
    R = r_constants_from_amplitudes(0.3, -1.2, 0.8, 2.5, 0, 1)
    assert abs(R.R13) == pytest.approx(1, abs=1e-15)
    assert R.R24 != 0


def test_degenerate_denominator():
    with pytest.raises(DegenerateDenominator):
        r_constants_from_amplitudes(1, 1, 1, 1j, 0, 0)


def test_corollary_K14_examples():
    k = compute_corollary_constants(CoefficientSet.from_tuple((2, 3, 1, 0, 0, -1)), "plus")
    assert k.K14 == pytest.approx(1 + math.sqrt(5))
    k = compute_corollary_constants(CoefficientSet.from_tuple((1.5, 1.5, 0.4, 0, 0, -1)), "plus")
    assert k.K14 == pytest.approx(2 * 0.4)


def test_corollary_ignores_delta():
    # beta = gamma = 0, C = 0 gives Delta = 0 but the normalised amplitudes exist
    k = compute_corollary_constants(CoefficientSet.from_tuple((2, 3, 1, 0, 0, 0)), "minus")
    assert (k.K11 * k.K13) ** 2 == pytest.approx(4 * (2 * 3 - 1))


def test_corollary_coincidence_sweep():
    rng = np.random.default_rng(3)
    for _ in range(120):
        cs = random_admissible(rng)
        cs = CoefficientSet(a=cs.a, b=cs.b, C=-1, alpha=cs.alpha, beta=0, gamma=0)
        for br in SignBranch:
            d = derive_constants(cs, br)
            k = compute_corollary_constants(cs, br)
            for x, y in ((k.A11c, d.D11), (k.A12c, d.D12), (k.B11c, d.E11), (k.B12c, d.E12)):
                assert abs(x - y) <= 1e-10 * max(1, abs(y))


@settings(max_examples=200, deadline=None)
@given(a=cplx, b=cplx, alpha=cplx, beta=cplx, gamma=cplx, C=cplx, br=st.sampled_from(list(SignBranch)))
def test_eigen_invariants(a, b, alpha, beta, gamma, C, br):
    cs = CoefficientSet(a=a, b=b, C=C, alpha=alpha, beta=beta, gamma=gamma)
    if not check_admissibility(cs, 1e-3).admissible or abs((a - b) ** 2 + 4 * alpha**2) < 1e-3:
        return
    try:
        d = derive_constants(cs, br, tol=1e-6)
    except ArithmeticError:
        return
    scale = 1 + abs(a) + abs(b) + abs(alpha)
    assert abs(d.xi1**2 + d.eta1**2 - 1) < 1e-12 * scale**2
    assert abs(d.Aplus + d.Bminus - (a + b)) < 1e-12 * scale
    assert abs(d.Aplus * d.Bminus - cs.Dq) < 1e-12 * scale**2
    R = compute_R_constants(d)
    assert (R.R14 == 0) == (abs(d.T1 - d.T2) < 1e-12)
    assert (R.R24 == 0) == (abs(d.T2) < 1e-12)
    assert abs(R.R22 * R.R23 - R.R21) > 1e-9


def test_case_a_obstruction_sweep():
    rng = np.random.default_rng(11)
    for _ in range(200):
        cs = random_admissible(rng)
        for br in SignBranch:
            R = compute_R_constants(derive_constants(cs, br))
            assert abs(R.R22 * R.R23 - R.R21) > 1e-9


def test_table_keys():
    d = derive_constants(EX1, "plus")
    assert set(d.table()) >= {"Delta", "Dq", "D11", "D12", "E11", "E12", "T1", "T2"}
    assert list(compute_R_constants(d).table()) == ["R11", "R12", "R13", "R14", "R21", "R22", "R23", "R24"]
