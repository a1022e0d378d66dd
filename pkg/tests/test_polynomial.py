import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadsys.polynomial import MultiPoly, univariate_compose

small = st.builds(complex, st.integers(-3, 3), st.integers(-3, 3))
exps2 = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys2 = st.dictionaries(exps2, small, max_size=5).map(lambda t: MultiPoly(2, t))
points2 = st.tuples(small, small)


def test_zero_coefficients_are_not_stored():
    p = MultiPoly(2, {(1, 0): 1, (0, 1): 0})
    assert p.terms == {(1, 0): 1}
    assert (p - p).is_zero()


def test_bad_exponents_rejected():
    with pytest.raises(ValueError):
        MultiPoly(2, {(1,): 1})
    with pytest.raises(ValueError):
        MultiPoly(2, {(1, -1): 1})
    with pytest.raises(ValueError):
        MultiPoly(0)


def test_shift_binomial():
    z1 = MultiPoly.variable(3, 0)
    assert (z1 * z1).shift((1, 0, 0)) == MultiPoly(3, {(2, 0, 0): 1, (1, 0, 0): 2, (0, 0, 0): 1})


def test_annihilating_form_is_shift_invariant():
    s = MultiPoly.linear((2, -4, 1))
    assert s((3, 1, -2)) == 0
    assert (s**5).shift((3, 1, -2)) == s**5


def test_linear_part_and_degree():
    p = MultiPoly.linear((1, 2j), 5) + MultiPoly(2, {(2, 1): 3})
    assert p.linear_part() == [1, 2j]
    assert p.constant_term() == 5
    assert p.degree() == 3


def test_vectorised_evaluation():
    p = MultiPoly(2, {(1, 1): 2, (0, 0): 1})
    Z = np.array([[1, 2], [3j, 1]])
    assert np.allclose(p(Z), [5, 1 + 6j])
    assert p((1, 2)) == 5


@given(polys2, polys2, points2)
def test_ring_homomorphism(p, q, z):
    assert abs((p * q)(z) - p(z) * q(z)) <= 1e-9 * max(1, abs(p(z) * q(z)))
    assert abs((p + q)(z) - (p(z) + q(z))) <= 1e-12 * max(1, abs(p(z)) + abs(q(z)))


@given(polys2, points2, points2)
def test_shift_matches_translated_evaluation(p, z, c):
    lhs = p.shift(c)(z)
    rhs = p(tuple(a + b for a, b in zip(z, c)))
    assert abs(lhs - rhs) <= 1e-9 * max(1, abs(rhs))


@settings(max_examples=50)
@given(polys2, points2)
def test_diff_commutes_with_shift(p, c):
    assert p.shift(c).diff(0) == p.diff(0).shift(c)


@given(polys2)
def test_json_round_trip(p):
    assert MultiPoly.from_json(p.to_json()) == p


def test_univariate_compose():
    s = MultiPoly.linear((1, -1))
    assert univariate_compose((1, 0, 2), s) == 1 + 2 * s * s
