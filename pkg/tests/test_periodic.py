import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadsys import expr as ex
from quadsys.errors import DimensionTooSmall, EmptyNullSpace
from quadsys.periodic import (
    NullLinearForm,
    PeriodicPolynomial,
    PeriodicTerm,
    build_psi,
    check_periodicity,
    pair_forms,
    sample_null_form,
    single_pair_fit_residual,
)
from quadsys.polynomial import MultiPoly

C3 = (3, 1, -2)
nonzero = st.floats(0.2, 2).flatmap(lambda r: st.sampled_from([r, -r]))
shifts = st.lists(st.builds(complex, nonzero, st.floats(-1, 1)), min_size=2, max_size=5)


def test_example_form_is_valid():
    form = NullLinearForm(3, (0, 1, 2), (2, -4, 1))
    assert form.pairing(C3) == 0 and form.annihilates(C3)


def test_two_coordinate_null_space_is_the_cross_form():
    c = (1.5, -0.7j)
    form = sample_null_form(c, (0, 1), 4)
    ratio = form.d[0] / c[1]
    assert form.d[1] == pytest.approx(-ratio * c[0])


def test_null_form_on_subset():
    form = sample_null_form((1, 1, 1, 1), (1, 2), 0)
    assert form.d[0] == pytest.approx(-form.d[1])


def test_null_form_errors_and_determinism():
    with pytest.raises(EmptyNullSpace):
        sample_null_form(C3, (1,), 0)
    assert sample_null_form(C3, (0, 2), 9) == sample_null_form(C3, (0, 2), 9)
    with pytest.raises(ValueError):
        PeriodicPolynomial(C3, (PeriodicTerm(NullLinearForm(3, (0, 1), (1, 1)), (0, 0, 1)),))


@settings(max_examples=60, deadline=None)
@given(shifts, st.integers(0, 2**32 - 1))
def test_sampled_forms_annihilate(c, seed):
    rng = np.random.default_rng(seed)
    support = tuple(sorted(rng.choice(len(c), size=int(rng.integers(2, len(c) + 1)), replace=False)))
    assert sample_null_form(c, support, seed).annihilates(c)


def test_empty_psi():
    psi = build_psi(C3, 4, 0, 1)
    assert psi.is_zero()
    assert check_periodicity(psi, 20, 1.0, 0).max_deviation == 0


def test_small_dimension():
    with pytest.raises(DimensionTooSmall):
        build_psi((1,), 3, 1, 0)


def test_example_quintic_is_periodic():
    psi = PeriodicPolynomial(C3, (PeriodicTerm(NullLinearForm(3, (0, 1, 2), (2, -4, 1)), (0,) * 5 + (1,)),))
    rep = check_periodicity(psi, 200, 1.0, 0)
    assert rep.passed


def test_non_periodic_linear_term_fails():
    rep = check_periodicity(ex.Poly(MultiPoly.variable(3, 0)), 20, 1.0, 0, shift=C3)
    assert not rep.passed
    assert rep.max_deviation == pytest.approx(3)


@settings(max_examples=40, deadline=None)
@given(shifts, st.integers(2, 5), st.integers(1, 4), st.integers(0, 10**6))
def test_built_psi_is_periodic_under_c_and_2c(c, budget, count, seed):
    psi = build_psi(c, budget, count, seed)
    assert len(psi.terms) == count
    assert 2 <= psi.degree() <= budget
    assert check_periodicity(psi, 50, 1.0, seed).passed
    assert check_periodicity(psi.to_expr(), 50, 1.0, seed, shift=[2 * x for x in c]).passed


def test_exhaustive_enumeration():
    psi = build_psi(C3, 3, 0, 5, exhaustive=True)
    assert sorted(t.form.support for t in psi.terms) == [(0, 1), (0, 1, 2), (0, 2), (1, 2)]
    with pytest.raises(ValueError):
        build_psi((1,) * 5, 3, 0, 5, exhaustive=True)


def test_build_is_deterministic():
    assert build_psi(C3, 4, 3, 77) == build_psi(C3, 4, 3, 77)
    assert build_psi(C3, 4, 3, 77) != build_psi(C3, 4, 3, 78)


def test_two_pair_psi_has_no_single_pair_representation():
    c = (1.3, -0.8, 2.1)
    s12 = NullLinearForm(3, (0, 1), (c[1], -c[0]))
    s23 = NullLinearForm(3, (1, 2), (c[2], -c[1]))
    psi = PeriodicPolynomial(c, (PeriodicTerm(s12, (0, 0, 1)), PeriodicTerm(s23, (0, 0, 1))))
    assert check_periodicity(psi, 100, 1.0, 0).passed
    assert single_pair_fit_residual(psi, pivot=0) > 1e-3
    single = PeriodicPolynomial(c, (PeriodicTerm(s12, (0, 0, 1)),))
    assert single_pair_fit_residual(single, pivot=0) < 1e-10


def test_pair_forms_annihilate():
    for f in pair_forms(C3, 1):
        assert f.annihilates(C3) and 1 in f.support


def test_structural_and_expanded_forms_agree():
    psi = build_psi(C3, 5, 3, 2)
    Z = np.random.default_rng(0).standard_normal((10, 3))
    assert np.allclose(psi(Z), psi.to_multipoly()(Z), rtol=1e-12)


def test_json_round_trip():
    psi = build_psi(C3, 4, 2, 3)
    assert PeriodicPolynomial.from_json(psi.to_json(), C3) == psi
