from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from instances import linear_product, rational_detrep, rz_mixed
from rzrelax.errors import CapacityError, DimensionError, PreconditionError
from rzrelax.moments import (
    DetRep,
    cubic_moments_closed_form,
    detrep_expand,
    detrep_moment,
    dirac_moments,
    hurwitz_product,
    moment_apply,
    moment_table,
    random_detrep,
)
from rzrelax.pencil import block_rotation, pythagorean_rotation
from rzrelax.poly import (
    Polynomial,
    a_transform,
    monomials_up_to,
    poly,
    restrict_vars,
    rotate,
    shift,
)

DISK = poly("1 - x1^2 - x2^2")


def test_moment_table_constant_polynomial():
    t = moment_table(Polynomial.constant(1, 2), 0, 3)
    assert t.value((0, 0)) == 0
    assert all(v == 0 for _, v in t.rows())


def test_moment_table_two_roots():
    t = moment_table(poly("(1+x1)*(1+2*x1)"), 2, 3)
    assert (t[(1,)], t[(2,)], t[(3,)]) == (3, 5, 9)


def test_moment_table_unit_disk():
    t = moment_table(DISK, 2, 3)
    assert t((0, 0)) == 2
    assert t((1, 0)) == t((0, 1)) == t((1, 1)) == 0
    assert t((2, 0)) == t((0, 2)) == 2
    assert all(t(a) == 0 for a in monomials_up_to(2, 3) if sum(a) == 3)


def test_moment_table_lists_every_monomial_once():
    t = moment_table(poly("1 + x1 + x2*x3"), 2, 3)
    keys = [a for a, _ in t.rows()]
    assert keys == monomials_up_to(3, 3)[1:]


def test_moment_table_preconditions():
    with pytest.raises(PreconditionError):
        moment_table(poly("x1 + x1^2"), 2, 3)
    with pytest.raises(PreconditionError):
        moment_table(DISK, 1, 3)
    with pytest.raises(CapacityError):
        moment_table(DISK, 2, 13)
    with pytest.raises(CapacityError):
        moment_table(DISK, 2, 3)((4, 0))


def test_moment_table_normalizes_constant():
    assert moment_table(DISK * 5, 2, 3) == moment_table(DISK, 2, 3)


def test_cubic_closed_form_examples():
    t = cubic_moments_closed_form(poly("1 + 3*x1"))
    assert (t[(1,)], t[(2,)], t[(3,)]) == (3, 9, 27)
    z = cubic_moments_closed_form(Polynomial.constant(4, 2), 0)
    assert all(v == 0 for _, v in z.rows())
    assert cubic_moments_closed_form(DISK) == moment_table(DISK, 2, 3)


def test_cubic_closed_form_matches_series():
    rng = np.random.default_rng(11)
    for _ in range(500):
        n = int(rng.integers(1, 6))
        terms = {a: Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))
                 for a in monomials_up_to(n, 5) if rng.random() < 0.3}
        terms[(0,) * n] = Fraction(1)
        p = Polynomial(terms, n)
        d = max(p.degree, 0)
        assert cubic_moments_closed_form(p, d) == moment_table(p, d, 3)


def test_moment_apply_examples():
    t = moment_table(poly("(1+x1)*(1+2*x1)"), 2, 3)
    assert moment_apply(t, Polynomial.constant(1, 1)) == 2
    assert moment_apply(t, poly("(1+x1)^2")) == 13
    assert moment_apply(moment_table(DISK, 2, 3), poly("x1*x2")) == 0
    with pytest.raises(CapacityError):
        moment_apply(t, poly("x1^4"))


def test_dirac_examples():
    empty = dirac_moments([], 3, n_vars=1)
    assert empty.value((0,)) == 0 and empty.value((1,)) == 0
    assert dirac_moments([[1], [2]], 3)[(3,)] == 9
    assert dirac_moments([[1, 0], [0, 1]], 2)[(1, 1)] == 0
    with pytest.raises(DimensionError):
        dirac_moments([], 3)


def test_product_rule():
    rng = np.random.default_rng(12)
    for _ in range(50):
        n = int(rng.integers(1, 4))
        p, q = rz_mixed(rng, n), rz_mixed(rng, n)
        tp, tq = moment_table(p, p.degree, 4), moment_table(q, q.degree, 4)
        tpq = moment_table(p * q, p.degree + q.degree, 4)
        assert all(tpq(a) == tp(a) + tq(a) for a in monomials_up_to(n, 4))


def test_rotation_invariance():
    rng = np.random.default_rng(13)
    for _ in range(40):
        n = 3
        p = rz_mixed(rng, n)
        U = block_rotation(3, 0, 1, pythagorean_rotation(2, 1)).dot(
            block_rotation(3, 1, 2, pythagorean_rotation(3, 1)))
        t, tU = moment_table(p, p.degree, 3), moment_table(rotate(p, U), p.degree, 3)
        for alpha in monomials_up_to(n, 3):
            q = Polynomial({alpha: 1}, n)
            assert abs(moment_apply(tU, rotate(q, U)) - moment_apply(t, q)) <= 1e-9


def test_a_transform_shifts_functional():
    rng = np.random.default_rng(14)
    for _ in range(40):
        n = int(rng.integers(1, 4))
        p, _ = linear_product(rng, n, int(rng.integers(1, 4)))
        a = [Fraction(int(rng.integers(-2, 3)), 3) for _ in range(n)]
        pa = a_transform(p, a)
        if pa.degree != p.degree or pa.constant_term == 0:
            continue
        d = p.degree
        ta, t = moment_table(pa, d, 3), moment_table(p, d, 3)
        for alpha in monomials_up_to(n, 3):
            f = Polynomial({alpha: 1}, n)
            assert moment_apply(ta, f) == moment_apply(t, shift(f, a))


def test_restriction_is_subtable():
    rng = np.random.default_rng(15)
    for _ in range(40):
        p = rz_mixed(rng, 4)
        r = restrict_vars(p, [0, 1])
        tp, tr = moment_table(p, p.degree, 3), moment_table(r, p.degree, 3)
        for alpha in monomials_up_to(2, 3):
            assert tr(alpha) == tp(alpha + (0, 0))


def test_dirac_oracle_agreement():
    rng = np.random.default_rng(16)
    for _ in range(60):
        n = int(rng.integers(1, 4))
        p, pts = linear_product(rng, n, int(rng.integers(1, 5)))
        assert moment_table(p, len(pts), 4) == dirac_moments(pts, 4)


def _words(alpha):
    letters = [i for i, k in enumerate(alpha) for _ in range(k)]
    return set(permutations(letters))


def test_hurwitz_examples():
    rng = np.random.default_rng(17)
    A = [rng.standard_normal((2, 2)) for _ in range(2)]
    assert np.allclose(hurwitz_product(A, (1, 0)), A[0])
    assert np.allclose(hurwitz_product(A, (1, 1)), A[0] @ A[1] + A[1] @ A[0])
    direct = sum(np.linalg.multi_dot([A[i] for i in w]) for w in _words((2, 1)))
    assert np.allclose(hurwitz_product(A, (2, 1)), direct)


def test_hurwitz_matches_word_enumeration():
    rng = np.random.default_rng(18)
    for alpha in [(2, 2), (1, 1, 1), (3, 0, 1), (1, 2, 1)]:
        A = [rng.standard_normal((3, 3)) for _ in alpha]
        direct = sum(np.linalg.multi_dot([A[i] for i in w]) if len(w) > 1 else A[w[0]]
                     for w in _words(alpha))
        assert np.allclose(hurwitz_product(A, alpha), direct)


def test_hurwitz_cap():
    with pytest.raises(CapacityError):
        hurwitz_product([np.eye(2)], (7,))


def test_detrep_moment_examples():
    rng = np.random.default_rng(19)
    rep = random_detrep(rng, 3, 2)
    A = rep.complex_coeffs()
    assert detrep_moment(rep, (1, 0)) == pytest.approx(np.trace(A[0]).real)
    assert detrep_moment(rep, (1, 1)) == pytest.approx(np.trace(A[0] @ A[1]).real)
    diag = DetRep((np.diag([1.0, 2.0]), np.diag([-1.0, 3.0])))
    oracle = dirac_moments([[1, -1], [2, 3]], 3)
    for alpha in monomials_up_to(2, 3)[1:]:
        assert detrep_moment(diag, alpha) == pytest.approx(float(oracle(alpha)))


def test_detrep_expand_examples():
    rep = DetRep((np.diag([-1, 1]), np.array([[0, 1], [1, 0]])))
    assert detrep_expand(rep) == DISK
    zero = DetRep((np.zeros((2, 2)), np.zeros((2, 2))))
    assert detrep_expand(zero) == Polynomial.constant(1, 2)
    diag = DetRep((np.diag([1, 2]), np.diag([3, -1])))
    assert detrep_expand(diag) == poly("(1 + x1 + 3*x2)*(1 + 2*x1 - x2)")


def test_detrep_expand_matches_moments_complex():
    rng = np.random.default_rng(20)
    for _ in range(20):
        rep = rational_detrep(rng, 3, 2)
        t = moment_table(detrep_expand(rep), 3, 3)
        for alpha in monomials_up_to(2, 3)[1:]:
            assert abs(float(t(alpha)) - detrep_moment(rep, alpha)) <= 1e-9


def test_detrep_expand_float_path():
    rng = np.random.default_rng(21)
    rep = random_detrep(rng, 3, 2)
    p = detrep_expand(rep)
    x = rng.standard_normal(2)
    assert float(p.eval([float(v) for v in x])) == pytest.approx(
        np.linalg.det(rep.matrix_at(x)).real, rel=1e-9, abs=1e-12)
