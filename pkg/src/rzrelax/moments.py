"""Pseudo-moment tables of real-zero polynomials.

For ``p`` with ``p(0) != 0`` the pseudo-moments are the rationals ``L(x^a)``
determined by

    -log(p(-x) / p(0)) = sum_{a != 0} multinomial(a) / |a| * L(x^a) x^a

together with ``L(1) = d`` (the virtual degree).  When ``p`` is a product of
linear forms ``1 + a_i^T x`` these are the moments of the counting measure on
the points ``a_i``; when ``p = det(I + sum x_i A_i)`` they are normalized
traces of Hurwitz products of the ``A_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DimensionError, NumericalError, PreconditionError
from .linalg import GaussianRational, HermitianMatrix, det_exact
from .poly import (
    MAX_CUTOFF,
    Polynomial,
    _unpack,
    as_fraction,
    format_monomial,
    format_rational,
    log_euler_parts,
    monomials_up_to,
    multinomial,
)

MAX_HURWITZ_DEGREE = 6
MAX_DETREP_SIZE = 8
MAX_DETREP_VARS = 6


@dataclass(frozen=True)
class MomentTable:
    """Pseudo-moments ``L(x^a)`` for ``1 <= |a| <= cutoff``.

    Zero values are not stored; :meth:`value` returns 0 for them and
    :meth:`rows` lists every monomial in graded-lex order.  ``L(1)`` is the
    virtual degree.
    """

    n_vars: int
    virtual_degree: Fraction
    cutoff: int
    values: dict = field(repr=False)

    def value(self, alpha) -> Fraction:
        alpha = tuple(alpha)
        if len(alpha) != self.n_vars:
            raise DimensionError(f"monomial {alpha} has the wrong length")
        k = sum(alpha)
        if k == 0:
            return self.virtual_degree
        if k > self.cutoff:
            raise CapacityError(
                f"moment of degree {k} beyond cutoff {self.cutoff}")
        return self.values.get(alpha, Fraction(0))

    __call__ = value
    __getitem__ = value

    def rows(self):
        """``(alpha, value)`` for every monomial of degree 1..cutoff."""
        for alpha in monomials_up_to(self.n_vars, self.cutoff)[1:]:
            yield alpha, self.values.get(alpha, Fraction(0))

    def to_json_rows(self) -> list[dict]:
        return [{"monomial": format_monomial(a), "value": format_rational(v)}
                for a, v in self.rows()]


def moment_table(p: Polynomial, virtual_degree, cutoff: int) -> MomentTable:
    """Exact pseudo-moments of ``p`` up to total degree ``cutoff``.

    Parameters
    ----------
    p : Polynomial
        Must not vanish at the origin.
    virtual_degree : int
        The value of ``L(1)``; must be at least ``deg p``.
    cutoff : int
        Largest moment degree, at most 12.
    """
    if cutoff > MAX_CUTOFF:
        raise CapacityError(f"moment cutoff is capped at {MAX_CUTOFF}")
    c0 = p.constant_term
    if not c0:
        raise PreconditionError("p(0) must be nonzero")
    d = as_fraction(virtual_degree)
    if d < p.degree:
        raise PreconditionError(
            f"virtual degree {d} is below deg p = {p.degree}")
    q = p if c0 == 1 else p / c0
    euler = log_euler_parts(q, cutoff)
    values = {}
    n = p.n_vars
    for k in range(1, cutoff + 1):
        sign = 1 if k % 2 else -1
        for key, v in euler[k].items():
            alpha = _unpack(key, n)
            values[alpha] = Fraction(sign * v) / multinomial(alpha)
    return MomentTable(n, d, cutoff, values)


def cubic_moments_closed_form(p: Polynomial, virtual_degree=None) -> MomentTable:
    """Moments up to degree 3 from explicit formulas in the coefficients.

    Independent of the series machinery; ``p`` is first scaled so that
    ``p(0) = 1``.
    """
    c0 = p.constant_term
    if not c0:
        raise PreconditionError("p(0) must be nonzero")
    q = p / c0
    n = p.n_vars

    def e(*idx):
        alpha = [0] * n
        for i in idx:
            alpha[i] += 1
        return tuple(alpha)

    def c(*idx):
        return q.coeff(e(*idx))

    values = {}
    for i in range(n):
        a_i, a_ii, a_iii = c(i), c(i, i), c(i, i, i)
        values[e(i)] = a_i
        values[e(i, i)] = a_i ** 2 - 2 * a_ii
        values[e(i, i, i)] = 3 * (a_iii - a_i * a_ii + a_i ** 3 / 3)
    for i in range(n):
        for j in range(i + 1, n):
            a_i, a_j, a_ij = c(i), c(j), c(i, j)
            values[e(i, j)] = -a_ij + a_i * a_j
            for s, t in ((i, j), (j, i)):
                a_s, a_t = c(s), c(t)
                values[e(s, s, t)] = (c(s, s, t) - a_s * c(s, t)
                                      - a_t * c(s, s) + a_s ** 2 * a_t)
            for k in range(j + 1, n):
                a_k = c(k)
                values[e(i, j, k)] = (c(i, j, k) - a_i * c(j, k)
                                      - a_j * c(i, k) - a_k * c(i, j)
                                      + 2 * a_i * a_j * a_k) / 2
    d = p.degree if virtual_degree is None else as_fraction(virtual_degree)
    return MomentTable(n, as_fraction(d), 3,
                       {k: v for k, v in values.items() if v})


def moment_apply(table: MomentTable, q: Polynomial) -> Fraction:
    """Apply the linear functional to ``q`` (needs deg q <= cutoff)."""
    if q.n_vars != table.n_vars:
        raise DimensionError("polynomial and moment table disagree on n_vars")
    if not q.is_zero() and q.degree > table.cutoff:
        raise CapacityError(
            f"deg q = {q.degree} exceeds moment cutoff {table.cutoff}")
    return sum((c * table.value(a) for a, c in q.items()), Fraction(0))


def dirac_moments(points, cutoff: int, virtual_degree=None,
                  n_vars: int | None = None) -> MomentTable:
    """Moments of the counting measure on ``points`` (exact for rationals).

    These equal the pseudo-moments of ``prod_i (1 + a_i^T x)``.  An empty
    support needs ``n_vars`` and gives the zero functional.
    """
    pts = [[as_fraction(v) for v in a] for a in points]
    if not pts and n_vars is None:
        raise DimensionError("an empty support needs n_vars")
    n = len(pts[0]) if pts else n_vars
    if any(len(a) != n for a in pts):
        raise DimensionError("points have inconsistent dimension")
    values = {}
    for alpha in monomials_up_to(n, cutoff)[1:]:
        total = Fraction(0)
        for a in pts:
            term = Fraction(1)
            for x, k in zip(a, alpha):
                if k:
                    term *= x ** k
            total += term
        if total:
            values[alpha] = total
    d = len(pts) if virtual_degree is None else virtual_degree
    return MomentTable(n, as_fraction(d), cutoff, values)


# -- determinantal representations -------------------------------------------

@dataclass(frozen=True)
class DetRep:
    """Hermitian matrices ``A_1..A_n`` representing ``det(I + sum x_i A_i)``."""

    coeffs: tuple

    def __post_init__(self):
        mats = tuple(A if isinstance(A, HermitianMatrix)
                     else HermitianMatrix.real(np.asarray(A))
                     for A in self.coeffs)
        if not mats:
            raise DimensionError("need at least one coefficient matrix")
        if len({A.size for A in mats}) != 1:
            raise DimensionError("coefficient matrices differ in size")
        object.__setattr__(self, "coeffs", mats)

    @property
    def size(self) -> int:
        return self.coeffs[0].size

    @property
    def n_vars(self) -> int:
        return len(self.coeffs)

    @property
    def exact(self) -> bool:
        return all(A.exact for A in self.coeffs)

    def complex_coeffs(self) -> list[np.ndarray]:
        return [A.to_complex() for A in self.coeffs]

    def matrix_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        M = np.eye(self.size, dtype=complex)
        for xi, A in zip(x, self.complex_coeffs()):
            M = M + xi * A
        return M


def hurwitz_product(mats, alpha) -> np.ndarray:
    """Sum over all words with letter counts ``alpha`` of the ordered
    products of the matrices.

    Every word starts with some letter ``i``, so the sum satisfies
    ``H(alpha) = sum_i A_i H(alpha - e_i)``; the recursion is memoized on
    ``alpha``.
    """
    mats = [np.asarray(A, dtype=complex) if not isinstance(A, HermitianMatrix)
            else A.to_complex() for A in mats]
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != len(mats):
        raise DimensionError("alpha must have one entry per matrix")
    if sum(alpha) > MAX_HURWITZ_DEGREE:
        raise CapacityError(
            f"Hurwitz products are capped at degree {MAX_HURWITZ_DEGREE}")
    size = mats[0].shape[0]

    @lru_cache(maxsize=None)
    def rec(beta):
        if not any(beta):
            return np.eye(size, dtype=complex)
        out = np.zeros((size, size), dtype=complex)
        for i, b in enumerate(beta):
            if b:
                rest = beta[:i] + (b - 1,) + beta[i + 1:]
                out = out + mats[i] @ rec(rest)
        return out

    return rec(alpha)


def detrep_moment(rep: DetRep, alpha, tol: float = 1e-10) -> float:
    """``tr(H(alpha)) / multinomial(alpha)``: the pseudo-moment of the
    represented polynomial, computed from the matrices."""
    alpha = tuple(alpha)
    if len(alpha) != rep.n_vars:
        raise DimensionError("alpha must have one entry per variable")
    if not any(alpha):
        return float(rep.size)
    H = hurwitz_product(rep.complex_coeffs(), alpha)
    tr = np.trace(H) / multinomial(alpha)
    scale = 1.0
    for A, k in zip(rep.complex_coeffs(), alpha):
        scale *= max(1.0, np.linalg.norm(A)) ** k
    if abs(tr.imag) > tol * scale:
        raise NumericalError(
            f"imaginary residue {abs(tr.imag):.3e} in Hurwitz trace")
    return float(tr.real)


def _interp_nodes(degree: int, exact: bool):
    # nested node sequence 0, 1, -1, 2, -2, ... (scaled into [-1, 1] for floats)
    half = max(1, (degree + 1) // 2)
    nodes = []
    for j in range(degree + 1):
        k = (j + 1) // 2 * (1 if j % 2 else -1)
        nodes.append(Fraction(k) if exact else k / half)
    return nodes


def _newton_weights(nodes):
    # w[k][j] with f[t_0..t_k] = sum_j w[k][j] f(t_j)
    weights = []
    for k in range(len(nodes)):
        row = []
        for j in range(k + 1):
            den = Fraction(1) if isinstance(nodes[j], Fraction) else 1.0
            for i in range(k + 1):
                if i != j:
                    den *= nodes[j] - nodes[i]
            row.append(1 / den)
        weights.append(row)
    return weights


def _newton_basis(nodes):
    # coefficient lists (lowest first) of prod_{j<k} (t - t_j)
    basis = [[1]]
    for k in range(1, len(nodes)):
        prev = basis[-1]
        t = nodes[k - 1]
        nxt = [0] * (len(prev) + 1)
        for e, c in enumerate(prev):
            nxt[e + 1] += c
            nxt[e] -= t * c
        basis.append(nxt)
    return basis


def interpolate_total_degree(func, n_vars: int, degree: int, exact: bool):
    """Recover a polynomial of total degree <= ``degree`` from its values.

    ``func`` receives a tuple of node coordinates.  Uses nested Newton
    interpolation on the simplex lattice, so exactly ``C(degree + n, n)``
    values are requested.  Returns a dict from exponent tuples to values.
    """
    nodes = _interp_nodes(degree, exact)
    weights = _newton_weights(nodes)
    basis = _newton_basis(nodes)
    cache: dict = {}

    def value(idx):
        if idx not in cache:
            cache[idx] = func(tuple(nodes[i] for i in idx))
        return cache[idx]

    def rec(g, m, deg):
        if m == 0:
            return {(): g(())}
        out: dict = {}
        for k in range(deg + 1):
            def gk(rest, k=k):
                return sum(weights[k][j] * g((j,) + rest) for j in range(k + 1))
            ck = rec(gk, m - 1, deg - k)
            for beta, v in ck.items():
                if not v:
                    continue
                for e, b in enumerate(basis[k]):
                    if b:
                        key = (e,) + beta
                        out[key] = out.get(key, 0) + v * b
        return out

    return rec(value, n_vars, degree)


def detrep_expand(rep: DetRep, clean_tol: float = 1e-13) -> Polynomial:
    """Expand ``det(I + sum x_i A_i)`` as a polynomial.

    Exact when every matrix entry is rational (Gaussian-rational elimination
    is used for complex Hermitian input).  Otherwise values are computed in
    floating point and coefficients below ``clean_tol`` times the largest one
    are dropped.
    """
    if rep.size > MAX_DETREP_SIZE or rep.n_vars > MAX_DETREP_VARS:
        raise CapacityError(
            f"expansion supports size <= {MAX_DETREP_SIZE} and "
            f"n <= {MAX_DETREP_VARS}")
    d, n = rep.size, rep.n_vars
    if rep.exact:
        complex_entries = any(v for A in rep.coeffs for v in A.im.flat)
        mats = []
        for A in rep.coeffs:
            if complex_entries:
                mats.append([[GaussianRational(A.re[i, j], A.im[i, j])
                              for j in range(d)] for i in range(d)])
            else:
                mats.append([[as_fraction(A.re[i, j]) for j in range(d)]
                             for i in range(d)])

        def det_at(x):
            rows = [[(1 if i == j else 0) + sum(xi * M[i][j]
                                                  for xi, M in zip(x, mats))
                     for j in range(d)] for i in range(d)]
            val = det_exact(rows)
            if isinstance(val, GaussianRational):
                if val.im:
                    raise NumericalError("Hermitian determinant is not real")
                val = val.re
            return as_fraction(val)

        coeffs = interpolate_total_degree(det_at, n, d, exact=True)
        return Polynomial({k: v for k, v in coeffs.items() if v}, n)

    cmats = rep.complex_coeffs()

    def det_float(x):
        M = np.eye(d, dtype=complex)
        for xi, A in zip(x, cmats):
            M = M + xi * A
        return float(np.linalg.det(M).real)

    coeffs = interpolate_total_degree(det_float, n, d, exact=False)
    coeffs[(0,) * n] = 1.0
    big = max((abs(v) for v in coeffs.values()), default=1.0)
    return Polynomial({k: v for k, v in coeffs.items()
                       if abs(v) > clean_tol * big}, n)


def random_detrep(rng, size: int, n_vars: int, hermitian: bool = True,
                  scale: float = 1.0) -> DetRep:
    """Random Gaussian Hermitian (or real symmetric) coefficients."""
    mats = []
    for _ in range(n_vars):
        X = rng.standard_normal((size, size))
        re = scale * (X + X.T) / 2
        if hermitian:
            Y = rng.standard_normal((size, size))
            im = scale * (Y - Y.T) / 2
        else:
            im = np.zeros((size, size))
        mats.append(HermitianMatrix(re, im))
    return DetRep(tuple(mats))


__all__ = [
    "MomentTable", "moment_table", "cubic_moments_closed_form",
    "moment_apply", "dirac_moments", "DetRep", "hurwitz_product",
    "detrep_moment", "detrep_expand", "interpolate_total_degree",
    "random_detrep",
]
