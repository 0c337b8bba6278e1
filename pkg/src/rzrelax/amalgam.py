"""Real-zero amalgamation in the cases with a constructive answer.

Given ``p(x, y)`` and ``q(x, z)`` agreeing on ``x`` (``p(x, 0) = q(x, 0)``),
find a real-zero ``r(x, y, z)`` with ``r(x, y, 0) = p`` and
``r(x, 0, z) = q``.  Variables of the result are ordered ``x, y, z``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .detrep import hv2_quadratic
from .errors import (
    DimensionError,
    NotRealZeroError,
    NumericalError,
    PreconditionError,
)
from .geometry import decompose_quadratic, quadratic_rz_certificate, real_zero_probe
from .linalg import PSDVerdict, inverse_exact, to_float
from .moments import DetRep, detrep_expand
from .poly import (
    Polynomial,
    as_fraction,
    dehomogenize,
    homogenize,
    restrict_vars,
)

COMPLETION_DELTA = 1e-8
SPECTRUM_TOL = 1e-8
SNAP_TOL = 1e-12


def _check_degree(p: Polynomial, d: int, name: str):
    if not p.is_zero() and p.degree > d:
        raise PreconditionError(f"deg {name} = {p.degree} exceeds the bound {d}")


def _probe_or_raise(r: Polynomial, trials: int, seed: int):
    verdict = real_zero_probe(r, trials=trials, seed=seed)
    if not verdict.passed:
        raise NotRealZeroError(
            f"amalgam failed the real-zero probe: {verdict.counterexample}")


def amalgamate_disjoint(p: Polynomial, q: Polynomial, d: int,
                        verify: bool = True, trials: int = 64,
                        seed: int = 0) -> Polynomial:
    """Amalgam of ``p(y)`` and ``q(z)`` in disjoint variables.

    ``r = 1/(d! p(0)) * sum_i (d^i/dx0^i p~)(1, y) * (d^(d-i)/dx0^(d-i) q~)(0, z)``
    with ``p~, q~`` the degree-``d`` homogenizations.  Requires
    ``p(0) = q(0) != 0`` and both degrees at most ``d``.
    """
    _check_degree(p, d, "p")
    _check_degree(q, d, "q")
    c = p.constant_term
    if not c or q.constant_term != c:
        raise PreconditionError("need p(0) = q(0) != 0")
    m, n = p.n_vars, q.n_vars
    ph, qh = homogenize(p, d), homogenize(q, d)
    r = Polynomial({}, m + n)
    for i in range(d + 1):
        left = dehomogenize(ph.diff(0, i))
        right = restrict_vars(qh.diff(0, d - i), range(1, n + 1))
        if left.is_zero() or right.is_zero():
            continue
        r = r + left.embed(m + n, range(m)) * right.embed(m + n, range(m, m + n))
    r = r / (factorial(d) * c)
    if verify:
        _probe_or_raise(r, trials, seed)
    return r


def additive_convolution_1d(f: Polynomial, g: Polynomial, d: int) -> Polynomial:
    """``h`` with ``h(x + y) = sum_{i+j=d} f^(i)(x) g^(j)(y)``."""
    if f.n_vars != 1 or g.n_vars != 1:
        raise DimensionError("univariate polynomials expected")
    _check_degree(f, d, "f")
    _check_degree(g, d, "g")
    h = Polynomial({}, 1)
    for i in range(d + 1):
        gj = g.diff(0, d - i).constant_term
        if gj:
            h = h + f.diff(0, i) * gj
    return h


@dataclass(frozen=True)
class AmalgamProblem:
    """``p`` in ``(x, y)`` and ``q`` in ``(x, z)`` with ``shared`` x-variables."""

    shared: int
    p: Polynomial
    q: Polynomial
    degree: int = 2

    def __post_init__(self):
        l = self.shared
        if l < 0 or l > self.p.n_vars or l > self.q.n_vars:
            raise DimensionError("shared block larger than a factor")
        _check_degree(self.p, self.degree, "p")
        _check_degree(self.q, self.degree, "q")
        if restrict_vars(self.p, range(l)) != restrict_vars(self.q, range(l)):
            raise PreconditionError("p(x, 0) and q(x, 0) differ")

    @property
    def m(self) -> int:
        return self.p.n_vars - self.shared

    @property
    def n(self) -> int:
        return self.q.n_vars - self.shared


def _quadratic_from_blocks(A, b, n_vars) -> Polynomial:
    terms = {(0,) * n_vars: Fraction(1)}
    for i in range(n_vars):
        e = [0] * n_vars
        e[i] = 1
        terms[tuple(e)] = b[i]
        for j in range(i, n_vars):
            e2 = [0] * n_vars
            e2[i] += 1
            e2[j] += 1
            terms[tuple(e2)] = A[i][j] if i == j else 2 * A[i][j]
    return Polynomial(terms, n_vars)


def _completion_block(P_yx, P_xx, Q_xz, l: int):
    # K_yz = P_yx P_xx^+ Q_xz, exact when the shared block is invertible
    m, n = P_yx.shape[0], Q_xz.shape[1]
    if l == 0 or m == 0 or n == 0:
        return np.full((m, n), Fraction(0), dtype=object), "empty"
    try:
        inv = inverse_exact(P_xx)
        return P_yx.dot(inv).dot(Q_xz), "inverse"
    except ZeroDivisionError:
        pinv = np.linalg.pinv(to_float(P_xx))
        K = to_float(P_yx) @ pinv @ to_float(Q_xz)
        return np.vectorize(as_fraction, otypes=[object])(K), "pseudo-inverse"


def amalgamate_quadratic(problem: AmalgamProblem) -> Polynomial:
    """Degree-2 amalgam by completing the discriminant matrix.

    With ``P = bb^T - 4A`` for ``p`` and ``Q`` for ``q`` (both PSD), the
    unknown ``y``-``z`` block of the joint discriminant is filled with
    ``P_yx P_xx^+ Q_xz``, which yields a PSD completion.
    """
    if problem.degree != 2:
        raise PreconditionError("quadratic amalgamation needs degree bound 2")
    p, q, l = problem.p, problem.q, problem.shared
    m, n = problem.m, problem.n
    c = p.constant_term
    if not c:
        raise PreconditionError("p(0) must be nonzero")
    cert_p, cert_q = quadratic_rz_certificate(p), quadratic_rz_certificate(q)
    if not (cert_p.passed and cert_q.passed):
        raise PreconditionError("an input discriminant is not PSD")
    Ap, bp = decompose_quadratic(p)
    Aq, bq = decompose_quadratic(q)
    P, Q = cert_p.matrix, cert_q.matrix
    xs, ys, zs = range(l), range(l, l + m), range(l, l + n)
    K, method = _completion_block(P[np.ix_(ys, xs)], P[np.ix_(xs, xs)],
                                  Q[np.ix_(xs, zs)], l)

    total = l + m + n
    A = [[Fraction(0)] * total for _ in range(total)]
    b = [Fraction(0)] * total
    for i in range(l + m):
        b[i] = bp[i]
        for j in range(l + m):
            A[i][j] = Ap[i, j]
    for i_q in range(l + n):
        i = i_q if i_q < l else i_q + m
        b[i] = bq[i_q]
        for j_q in range(l + n):
            j = j_q if j_q < l else j_q + m
            A[i][j] = Aq[i_q, j_q]

    def fill(Kblock):
        for a in range(m):
            for z in range(n):
                val = (bp[l + a] * bq[l + z] - Kblock[a, z]) / 4
                A[l + a][l + m + z] = A[l + m + z][l + a] = val

    fill(K)
    r = _quadratic_from_blocks(A, b, total)
    verdict = quadratic_rz_certificate(r).verdict
    if verdict == PSDVerdict.NOT_PSD and method == "pseudo-inverse":
        Pxx = to_float(P[np.ix_(xs, xs)]) + COMPLETION_DELTA * np.eye(l)
        Kf = (to_float(P[np.ix_(ys, xs)]) @ np.linalg.inv(Pxx)
              @ to_float(Q[np.ix_(xs, zs)]))
        fill(np.vectorize(as_fraction, otypes=[object])(Kf))
        r = _quadratic_from_blocks(A, b, total)
        verdict = quadratic_rz_certificate(r).verdict
    if verdict == PSDVerdict.NOT_PSD:
        raise NumericalError("completed discriminant is not PSD")
    return r * c


def amalgamate_deg2_onevar(p: Polynomial, q: Polynomial) -> Polynomial:
    """Glue 2x2 representations of ``p(x, y)`` and ``q(x, z)``.

    After diagonalizing the shared ``x`` coefficients the two
    representations share ``det(I + x D)``, and
    ``det(I + x D + y B + z C)`` restricts to ``p`` and ``q``.  The
    restriction parts are set exactly; only the ``yz`` coefficient comes
    from floating point.
    """
    if p.n_vars != 2 or q.n_vars != 2:
        raise DimensionError("need p(x, y) and q(x, z)")
    AmalgamProblem(1, p, q, 2)
    c = p.constant_term
    if not c:
        raise PreconditionError("p(0) must be nonzero")
    pn, qn = p / c, q / c
    Rp, Rq = hv2_quadratic(pn), hv2_quadratic(qn)
    Ax, B = to_float(Rp.coeffs[0].re), to_float(Rp.coeffs[1].re)
    Ax2, C = to_float(Rq.coeffs[0].re), to_float(Rq.coeffs[1].re)
    alpha, V = np.linalg.eigh(Ax)
    alpha2, W = np.linalg.eigh(Ax2)
    if np.max(np.abs(alpha - alpha2)) > SPECTRUM_TOL * (1 + np.abs(alpha).max()):
        raise PreconditionError("shared coefficient spectra differ")
    glued = DetRep((np.diag(alpha), V.T @ B @ V, W.T @ C @ W))
    r_float = detrep_expand(glued)
    cross = r_float.coeff((0, 1, 1))
    near = cross.limit_denominator(1000)
    if abs(float(cross - near)) <= SNAP_TOL * (1 + abs(float(cross))):
        cross = near
    r = (pn.embed(3, [0, 1]) + qn.embed(3, [0, 2])
         - restrict_vars(pn, [0]).embed(3, [0]))
    r = r + Polynomial({(0, 1, 1): cross}, 3)
    for key in r_float.terms:
        if key[1] == 0 or key[2] == 0:
            err = abs(float(r_float.coeff(key) - r.coeff(key)))
            if err > 1e-8:
                raise NumericalError(f"glued representation off by {err:.2e}")
    return r * c
