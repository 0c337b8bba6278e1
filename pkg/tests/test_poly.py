from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rzrelax.errors import (
    CapacityError,
    NonOrthogonalError,
    ParseError,
    PreconditionError,
)
from rzrelax.poly import (
    NEG_INF,
    Polynomial,
    TruncatedSeries,
    a_transform,
    dehomogenize,
    exp_series,
    homogenize,
    linear_form,
    log_series,
    monomials_up_to,
    poly,
    restrict_line,
    restrict_vars,
    rotate,
    shift,
    truncate,
)

DISK = "1 - x1^2 - x2^2"


def test_eval_examples():
    p = poly(DISK)
    assert p.eval([0, 0]) == 1
    assert p.eval([1, 0]) == 0
    assert poly("(1+x1)*(1+2*x1)").eval([1]) == 6


def test_eval_exact_for_rationals_float_otherwise():
    p = poly("1/3*x1^2")
    assert p.eval([Fraction(1, 2)]) == Fraction(1, 12)
    assert isinstance(p.eval([0.5]), float)


def test_zero_polynomial_degree_sentinel():
    z = Polynomial({}, 2)
    assert z.degree == NEG_INF
    assert z.degree < 0
    assert z.is_zero()


def test_no_stored_zero_terms():
    p = poly("x1 + x2") - poly("x2", 2)
    assert list(p.terms) == [(1, 0)]


def test_truncate_examples():
    p = poly("1 + x1 + x1^2 + x1^3")
    assert truncate(p, 2) == poly("1 + x1 + x1^2")
    assert truncate(p, 0) == Polynomial.constant(1, 1)


def test_log_series_examples():
    assert log_series(poly("1 + x1"), 3).poly == poly("x1 - 1/2*x1^2 + 1/3*x1^3")
    assert log_series(Polynomial.constant(1, 2), 4).poly.is_zero()
    got = log_series(poly("(1+x1)*(1+x2)"), 2).poly
    assert got == poly("x1 + x2 - 1/2*x1^2 - 1/2*x2^2")


def test_exp_series_examples():
    assert exp_series(Polynomial({}, 2), 3).poly == Polynomial.constant(1, 2)
    assert exp_series(poly("x1"), 2).poly == poly("1 + x1 + 1/2*x1^2")


def test_exp_needs_zero_constant():
    with pytest.raises(PreconditionError):
        exp_series(poly("1 + x1"), 2)


def test_series_cutoff_cap():
    with pytest.raises(CapacityError):
        log_series(poly("1 + x1"), 50)


def test_truncated_series_arithmetic_retruncates():
    s = TruncatedSeries(poly("1 + x1"), 2)
    assert (s * s * s).poly == poly("1 + 3*x1 + 3*x1^2")


def test_homogenize_examples():
    assert homogenize(poly(DISK), 2) == poly("x1^2 - x2^2 - x3^2")
    assert homogenize(poly("1 + x1"), 1) == poly("x1 + x2")
    assert homogenize(poly("1 + x1"), 3) == poly("x1^3 + x1^2*x2")


def test_homogenize_below_degree_rejected():
    with pytest.raises(PreconditionError):
        homogenize(poly(DISK), 1)


def test_a_transform_examples():
    assert a_transform(poly("1 + x1"), [-1]) == Polynomial.constant(1, 1)
    p = poly("1 - x1^2")
    assert a_transform(p, [0]) == p
    assert a_transform(p, [Fraction(1, 2)]) == poly("1 + x1 - 3/4*x1^2")


def test_shift_rotate_restrict_examples():
    assert shift(poly("1 - x1^2"), [1]) == poly("-2*x1 - x1^2")
    p = poly(DISK)
    assert rotate(p, np.eye(2, dtype=int)) == p
    assert restrict_line(p, [3, 4]) == poly("1 - 25*x1^2")
    assert restrict_vars(poly("1 + x1 + x2 + x1*x2"), [0]) == poly("1 + x1")


def test_rotate_rejects_non_orthogonal():
    with pytest.raises(NonOrthogonalError):
        rotate(poly(DISK), [[1, 1], [0, 1]])
    with pytest.raises(NonOrthogonalError):
        rotate(poly(DISK), np.array([[1.0, 0.1], [0.0, 1.0]]))


def test_rotate_by_rational_rotation_preserves_disk():
    U = [[Fraction(3, 5), Fraction(-4, 5)], [Fraction(4, 5), Fraction(3, 5)]]
    assert rotate(poly(DISK), U) == poly(DISK)


def test_parser_accepts_products_and_decimals():
    assert poly("(1 + x1)^2") == poly("1 + 2*x1 + x1^2")
    assert poly("0.5*x2", 2).coeff((0, 1)) == Fraction(1, 2)
    assert poly("-x1").coeff((1,)) == -1


@pytest.mark.parametrize("bad", ["", "1 +", "x0", "x1^-1", "2**x1", "(1 + x1"])
def test_parser_rejects_malformed(bad):
    with pytest.raises(ParseError):
        poly(bad)


def test_monomial_order_is_graded():
    mons = monomials_up_to(2, 2)
    assert mons == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


# -- properties ---------------------------------------------------------------

small = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def polynomials(draw, n_vars=2, max_degree=3, constant_one=False):
    terms = {}
    for alpha in monomials_up_to(n_vars, max_degree):
        if draw(st.booleans()):
            terms[alpha] = draw(small)
    if constant_one:
        terms[(0,) * n_vars] = Fraction(1)
    return Polynomial(terms, n_vars)


@settings(max_examples=60, deadline=None)
@given(polynomials(constant_one=True), st.integers(0, 5))
def test_exp_inverts_log(p, cutoff):
    assert exp_series(log_series(p, cutoff), cutoff).poly == truncate(p, cutoff)


@settings(max_examples=60, deadline=None)
@given(polynomials(constant_one=True), polynomials(constant_one=True),
       st.integers(0, 5))
def test_log_is_additive(p, q, cutoff):
    assert log_series(p * q, cutoff) == log_series(p, cutoff) + log_series(q, cutoff)


@settings(max_examples=60, deadline=None)
@given(polynomials())
def test_homogenize_then_dehomogenize(p):
    if not p.is_zero():
        assert dehomogenize(homogenize(p, p.degree)) == p


@settings(max_examples=60, deadline=None)
@given(polynomials(max_degree=2), st.lists(small, min_size=2, max_size=2),
       st.lists(small, min_size=2, max_size=2))
def test_a_transform_composes(p, a, b):
    if p.is_zero():
        return
    pa = a_transform(p, a)
    if pa.degree != p.degree:
        return
    assert a_transform(pa, b) == a_transform(p, [x + y for x, y in zip(a, b)])


@settings(max_examples=80, deadline=None)
@given(polynomials(n_vars=3))
def test_print_parse_round_trip(p):
    assert poly(str(p), 3) == p


def test_linear_form_builds_affine():
    assert linear_form([2, -1]) == poly("1 + 2*x1 - x2")
