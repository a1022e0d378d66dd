import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_admissible
from quadsys import expr as ex
from quadsys.builder import CIRCULAR_COEFFS, build_circular_pair, build_pdde_family
from quadsys.cli import build_pair
from quadsys.coefficients import CoefficientSet, SignBranch
from quadsys.errors import EvaluationOverflow, InadmissibleCoefficients, PoleEncountered, ZeroShiftCoordinate
from quadsys.polynomial import MultiPoly
from quadsys.problem import parse_problem_file
from quadsys.verifier import (
    SystemSpec,
    check_reduction_identity,
    check_rotation_identity,
    probe_pde_nonexistence,
    scaled_residual,
    system_for_pair,
    verify_system,
)

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
EX1 = CoefficientSet.from_tuple((3, 1, -2, 2, -2, -1))
EX2 = CoefficientSet.from_tuple((2, 3, 2, -1, -1, -1))
CIRCLE1 = SystemSpec("single_circular", CIRCULAR_COEFFS, None, 1)


def test_scaled_residual_normalisation():
    # f = g = 1 on the unit circle equation: |1 + 1 - 1| / max(1, 1, 1) = 1
    assert scaled_residual(CIRCULAR_COEFFS, 1.0, 1.0) == pytest.approx(1)
    big = scaled_residual(CIRCULAR_COEFFS, 1e8, 0.0)
    assert big == pytest.approx(1, rel=1e-12)
    assert scaled_residual(CIRCULAR_COEFFS, math.cos(0.3), math.sin(0.3)) < 1e-15


def test_zero_shift_rejected():
    with pytest.raises(ZeroShiftCoordinate, match="shift must be nonzero"):
        SystemSpec("difference", EX1, (0, 0, 0), 3)
    with pytest.raises(ValueError):
        SystemSpec("bogus", EX1, None, 3)


def test_wrong_pair_fails_with_argmax():
    f = ex.Exp(ex.Poly(MultiPoly.variable(1, 0)))
    rep = verify_system(CIRCLE1, (f, f), samples=50)
    assert not rep.passed
    assert len(rep.argmax) == 1
    assert set(rep.per_equation) == {"A(f1, f2)"}


def test_report_independent_of_workers_and_chunks():
    pair, _ = build_pdde_family(EX2, "plus", (math.sqrt(3), -2, 1), "ii")
    spec = system_for_pair(pair)
    a = verify_system(spec, pair, samples=300, seed=4)
    b = verify_system(spec, pair, samples=300, seed=4, workers=3, chunk=37)
    assert a == b
    assert verify_system(spec, pair, samples=300, seed=5) != a


def test_example1_pair_fails_verification():
    spec = parse_problem_file(FIXTURES / "example1.json")
    pair, _ = build_pair(spec)
    rep = verify_system(system_for_pair(pair), pair, samples=200, radius=0.25)
    assert rep.max_scaled_residual > 1


def test_meromorphic_pair_away_from_poles():
    beta = ex.Poly(MultiPoly.variable(1, 0))
    rep = verify_system(CIRCLE1, build_circular_pair(kind="meromorphic", beta=beta),
                        samples=500, radius=2.0, tol=1e-10)
    assert rep.passed


def test_persistent_pole_gives_up():
    q = ex.Quotient(ex.Const(1, 1), ex.Const(0, 1))
    with pytest.raises(PoleEncountered, match="kept landing on a pole"):
        verify_system(CIRCLE1, (q, q), samples=3)


def test_overflow_suggests_smaller_radius():
    f = ex.Cos(ex.Poly(MultiPoly(1, {(3,): 1})))
    with pytest.raises(EvaluationOverflow, match="smaller"):
        verify_system(CIRCLE1, (f, f), samples=20, radius=50)


def test_fd_cross_check_reported():
    pair, _ = build_pdde_family(EX2, "plus", (math.sqrt(3), -2, 1), "i")
    rep = verify_system(system_for_pair(pair), pair, samples=100, fd_check=True)
    assert rep.fd_max_mismatch is not None and rep.fd_max_mismatch < 1e-6


def test_reduction_identity_constant():
    rep = check_reduction_identity(EX1, samples=30)
    assert rep.passed
    assert rep.detail["constant"] == pytest.approx(-1)


def test_rotation_identity_at_given_points():
    rep = check_rotation_identity(EX2, "minus", points=[(1, 0), (0, 1), (2 + 1j, -3)])
    assert rep.passed and rep.samples == 3


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_identities_on_random_coefficients(seed):
    cs = random_admissible(np.random.default_rng(seed))
    assert check_reduction_identity(cs, seed=seed).passed
    for br in SignBranch:
        assert check_rotation_identity(cs, br, seed=seed).passed


def test_probe_example2():
    for br in SignBranch:
        rep = probe_pde_nonexistence(EX2, br)
        assert rep.infeasible
        assert rep.obstruction > 1e-9
        assert rep.rotation_obstruction > 1e-9
        assert rep.c0 ** 2 == pytest.approx(rep.c0_squared)
        assert [c.case for c in rep.cases] == ["A", "B", "C", "D"]


def test_probe_rejects_inadmissible():
    with pytest.raises(InadmissibleCoefficients):
        probe_pde_nonexistence(CoefficientSet.from_tuple((1, 1, 0, 0, 0, -1)), "plus")
