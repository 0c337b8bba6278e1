from fractions import Fraction

import numpy as np
import pytest

from instances import rational_detrep, rz_quadratic
from rzrelax.detrep import (
    PerfectKind,
    circle_pencil,
    coefficient_residual,
    cofactor_target,
    det_sym_polynomial,
    exactness_check_detrep,
    hv2_quadratic,
    lincofactor_rep,
    perfect_family,
    perfectness_falsifier,
    quadratic_pencil_det_identity,
    rational_sqrt,
    saunderson_pencil,
    sym_from_vec,
    vec_from_sym,
)
from rzrelax.errors import PreconditionError
from rzrelax.geometry import real_zero_probe
from rzrelax.linalg import HermitianMatrix, det_exact
from rzrelax.moments import DetRep, detrep_expand, detrep_moment, moment_table
from rzrelax.poly import Polynomial, monomials_up_to, poly

DISK = poly("1 - x1^2 - x2^2")


def _real(A):
    return A.re if isinstance(A, HermitianMatrix) else np.asarray(A)


def _close(rep, p, tol=1e-8):
    return coefficient_residual(detrep_expand(rep), p) <= tol


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(2) is None
    assert rational_sqrt(0) == 0


def test_hv2_unit_disk():
    rep = hv2_quadratic(DISK)
    A1, A2 = (np.asarray(_real(A), dtype=float) for A in rep.coeffs)
    assert np.allclose(A1, np.diag([-1, 1]))
    assert np.allclose(A2, [[0, 1], [1, 0]])
    assert detrep_expand(rep) == DISK


def test_hv2_examples():
    p = poly("(1 + x1)*(1 + x2)")
    assert _close(hv2_quadratic(p), p)
    rep = hv2_quadratic(Polynomial.constant(1, 2))
    assert all(not np.any(np.asarray(_real(A), dtype=float)) for A in rep.coeffs)


def test_hv2_random_and_degenerate():
    rng = np.random.default_rng(60)
    for k in range(200):
        scale = Fraction(0) if k % 4 == 0 else Fraction(1)
        p = rz_quadratic(rng, 2, first_row_scale=scale)
        assert _close(hv2_quadratic(p), p), str(p)


def test_hv2_preconditions():
    with pytest.raises(PreconditionError):
        hv2_quadratic(poly("1 + x1^2 + x2^2"))
    with pytest.raises(PreconditionError):
        hv2_quadratic(poly("2 - x1^2"))
    with pytest.raises(PreconditionError):
        hv2_quadratic(poly("1 + x1 + x2 + x3"))


def test_circle_pencil_examples():
    M = circle_pencil([-1, -1])
    det0 = det_exact(M.evaluate([1, 0, 0]))
    assert det0 == 1
    one = circle_pencil([-1])
    assert _equal_rows(one.evaluate([Fraction(2), Fraction(3)]), [[2, 3], [3, 2]])


def test_circle_pencil_identity():
    rng = np.random.default_rng(61)
    for n in range(1, 5):
        d = [Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3))) for _ in range(n)]
        M = circle_pencil(d)
        det0 = det_exact(M.evaluate([1] + [0] * n))
        for _ in range(5):
            x = [Fraction(int(rng.integers(-5, 6)), 2) for _ in range(n + 1)]
            lhs = det_exact(M.evaluate(x))
            rhs = x[0] ** (n - 1) * (x[0] ** 2 + sum(di * xi ** 2 for di, xi in zip(d, x[1:]))) * det0
            assert lhs == rhs


def _equal_rows(M, rows):
    return all(M[i][j] == rows[i][j] for i in range(len(rows)) for j in range(len(rows)))


def test_lincofactor_examples():
    rep = lincofactor_rep(DISK)
    assert rep.size == 3 and detrep_expand(rep) == DISK
    sq = poly("(1 + 1/2*x1)^2")
    rep = lincofactor_rep(sq)
    assert np.allclose(np.asarray(_real(rep.coeffs[0]), dtype=float), np.eye(2) / 2)
    assert detrep_expand(rep) == sq
    line = poly("1 - x1^2")
    rep = lincofactor_rep(line)
    assert rep.size == 2 and detrep_expand(rep) == line


def test_lincofactor_random():
    rng = np.random.default_rng(62)
    for _ in range(100):
        p = rz_quadratic(rng, int(rng.integers(1, 6)))
        rep = lincofactor_rep(p)
        assert _close(rep, cofactor_target(p))


def test_quadratic_pencil_det_identity_exact():
    rng = np.random.default_rng(63)
    for _ in range(20):
        p = rz_quadratic(rng, int(rng.integers(1, 5)))
        lhs, rhs = quadratic_pencil_det_identity(p)
        assert lhs == rhs


def test_constructed_reps_are_real_zero():
    rng = np.random.default_rng(64)
    for _ in range(10):
        rep = rational_detrep(rng, 3, 3)
        assert real_zero_probe(detrep_expand(rep), seed=int(rng.integers(100))).passed


def test_hurwitz_trace_agreement_for_constructed_reps():
    rng = np.random.default_rng(65)
    for _ in range(10):
        p = rz_quadratic(rng, 2)
        rep = hv2_quadratic(p)
        t = moment_table(detrep_expand(rep), 2, 3)
        for alpha in monomials_up_to(2, 3)[1:]:
            assert abs(float(t(alpha)) - detrep_moment(rep, alpha)) <= 1e-9


def test_perfect_family_examples():
    fam = perfect_family(PerfectKind.DIAGONAL, 3)
    assert len(fam.generators) == 3 and fam.full_rank
    fam = perfect_family("FULL_SYMMETRIC", 2)
    assert len(fam.generators) == 3 and fam.full_rank
    assert np.array_equal(fam.generators[1], [[0, 1], [1, 0]])
    fam = perfect_family(PerfectKind.POWERS_OF_A, 3, np.diag([1.0, 2.0, 3.0]))
    assert fam.rank == 3
    fam = perfect_family(PerfectKind.POWERS_OF_A, 3, np.diag([1.0, 1.0, 2.0]))
    assert fam.rank == 2 and not fam.full_rank
    with pytest.raises(PreconditionError):
        perfect_family(PerfectKind.POWERS_OF_A, 2)


def test_falsifier_finds_nothing_in_diagonal_span():
    fam = perfect_family(PerfectKind.DIAGONAL, 3)
    report = perfectness_falsifier(fam.generators, samples=50, probes=50)
    assert report.candidate is None and report.evidence_only


def test_exactness_check_diagonal_and_full():
    diag = DetRep((np.diag([1.0, -2.0, 0.5]), np.diag([0.0, 1.0, -1.0])))
    assert exactness_check_detrep(diag, rays=16).exact
    gens = perfect_family(PerfectKind.FULL_SYMMETRIC, 2).generators
    full = DetRep(tuple(gens))
    report = exactness_check_detrep(full, rays=16)
    assert report.exact and report.containment_violations == 0


def test_exactness_check_never_violates_containment():
    rng = np.random.default_rng(66)
    rep = rational_detrep(rng, 3, 2, complex_entries=False)
    assert exactness_check_detrep(rep, rays=16).containment_violations == 0


def test_sym_vec_round_trip():
    v = np.arange(6.0)
    assert np.array_equal(vec_from_sym(sym_from_vec(v, 3)), v)


def test_derived_cone_pencil_structure():
    for d in (1, 2, 3):
        sp = saunderson_pencil(d)
        n = d * (d + 1) // 2
        assert sp.M.size == n and sp.N.size == n - 1 and sp.M.n_vars == n
        vecs = np.array([vec_from_sym(B) for B in sp.B])
        assert np.allclose(vecs @ vecs.T, np.eye(n))
        assert all(abs(np.trace(B)) < 1e-12 for B in sp.B[1:])


def test_derived_cone_of_2x2_is_trace_halfspace():
    sp = saunderson_pencil(2)
    rng = np.random.default_rng(67)
    agree = 0
    for _ in range(500):
        X = rng.standard_normal((2, 2))
        X = X + X.T
        tr = np.trace(X)
        if abs(tr) < 1e-6:
            continue
        N = np.asarray(sp.N.evaluate(vec_from_sym(X)), dtype=float)
        assert (np.linalg.eigvalsh(N).min() >= -1e-9) == (tr >= 0)
        agree += 1
    assert agree > 450


def test_derived_cone_pencil_d1_is_half_line():
    sp = saunderson_pencil(1)
    assert np.asarray(sp.M.evaluate([2.0]), dtype=float)[0, 0] > 0
    assert np.asarray(sp.M.evaluate([-2.0]), dtype=float)[0, 0] < 0


def test_det_sym_polynomial():
    assert det_sym_polynomial(2) == poly("x1*x3 - x2^2")
