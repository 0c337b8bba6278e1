"""Linear matrix pencils built from pseudo-moments.

A pencil ``A_0 + x_1 A_1 + ... + x_n A_n`` is stored with exact rational
coefficients whenever they come from exact moment tables.  The sets cut out
by these pencils are outer approximations of the rigidly convex set of the
underlying polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import DimensionError, NotInteriorError, PreconditionError
from .linalg import (
    DEFAULT_POLICY,
    PSDVerdict,
    TolerancePolicy,
    is_exact_matrix,
    is_psd,
    matrix_to_json,
    monic_normalize,
    to_float,
)
from .moments import MomentTable, moment_apply, moment_table
from .poly import (
    Polynomial,
    as_fraction,
    dehomogenize,
    is_exact,
    linear_form,
    monomials_up_to,
    rotate,
    shift,
)


def _object_matrix(rows) -> np.ndarray:
    rows = list(rows)
    n = len(rows)
    out = np.empty((n, n), dtype=object)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            out[i, j] = v
    return out


@dataclass(frozen=True)
class Pencil:
    """Affine symmetric pencil ``A_0 + sum_i x_i A_i``.

    ``coeffs[0]`` is the constant term.  Coefficients are object arrays of
    Fractions for exact pencils and float arrays otherwise.
    """

    coeffs: tuple

    def __post_init__(self):
        mats = tuple(np.asarray(A) for A in self.coeffs)
        if not mats:
            raise DimensionError("a pencil needs a constant term")
        shapes = {A.shape for A in mats}
        if len(shapes) != 1:
            raise DimensionError("pencil coefficients differ in shape")
        shape = shapes.pop()
        if len(shape) != 2 or shape[0] != shape[1]:
            raise DimensionError("pencil coefficients must be square")
        object.__setattr__(self, "coeffs", mats)

    @property
    def n_vars(self) -> int:
        return len(self.coeffs) - 1

    @property
    def size(self) -> int:
        return self.coeffs[0].shape[0]

    @property
    def exact(self) -> bool:
        return all(is_exact_matrix(A) for A in self.coeffs)

    def evaluate(self, point) -> np.ndarray:
        """``A_0 + sum x_i A_i``; exact when pencil and point are rational."""
        point = list(point)
        if len(point) != self.n_vars:
            raise DimensionError(
                f"point has {len(point)} coordinates, pencil has {self.n_vars}")
        if self.exact and all(is_exact(v) for v in point):
            out = self.coeffs[0].copy()
            for x, A in zip(point, self.coeffs[1:]):
                x = as_fraction(x)
                if x:
                    out = out + A * x
            return out
        mats = self.float_coeffs()
        out = mats[0].copy()
        for x, A in zip(point, mats[1:]):
            out += float(x) * A
        return out

    __call__ = evaluate

    def float_coeffs(self) -> list[np.ndarray]:
        return [to_float(A) for A in self.coeffs]

    def direction_matrix(self, direction) -> np.ndarray:
        """``sum_i a_i A_i`` (float)."""
        mats = self.float_coeffs()
        out = np.zeros_like(mats[0])
        for a, A in zip(direction, mats[1:]):
            out += float(a) * A
        return out

    def delete_first(self) -> "Pencil":
        return Pencil(tuple(A[1:, 1:] for A in self.coeffs))

    def to_json(self) -> dict:
        return {"n_vars": self.n_vars, "size": self.size,
                "coeffs": [matrix_to_json(A) for A in self.coeffs]}


@dataclass(frozen=True)
class HomogeneousPencil:
    """Linear pencil ``sum_i x_i C_i`` without constant term."""

    coeffs: tuple

    def __post_init__(self):
        mats = tuple(np.asarray(A) for A in self.coeffs)
        if len({A.shape for A in mats}) != 1:
            raise DimensionError("pencil coefficients differ in shape")
        object.__setattr__(self, "coeffs", mats)

    @property
    def n_vars(self) -> int:
        return len(self.coeffs)

    @property
    def size(self) -> int:
        return self.coeffs[0].shape[0]

    def evaluate(self, point) -> np.ndarray:
        point = list(point)
        if len(point) != self.n_vars:
            raise DimensionError("point has the wrong number of coordinates")
        if all(is_exact_matrix(C) for C in self.coeffs) and \
                all(is_exact(v) for v in point):
            out = self.coeffs[0] * as_fraction(point[0])
            for x, C in zip(point[1:], self.coeffs[1:]):
                out = out + C * as_fraction(x)
            return out
        out = np.zeros(self.coeffs[0].shape)
        for x, C in zip(point, self.coeffs):
            out += float(x) * to_float(C)
        return out

    __call__ = evaluate

    def to_json(self) -> dict:
        return {"n_vars": self.n_vars, "size": self.size,
                "coeffs": [matrix_to_json(C) for C in self.coeffs]}


def _localizing_pencil(table: MomentTable, basis) -> Pencil:
    """Moment matrix ``L(m_j m_k)`` plus localizing matrices ``L(x_i m_j m_k)``."""
    n = table.n_vars
    s = len(basis)

    def mat(shift_alpha):
        rows = []
        for j in range(s):
            row = []
            for k in range(s):
                alpha = tuple(a + b + c for a, b, c in
                              zip(basis[j], basis[k], shift_alpha))
                row.append(table.value(alpha))
            rows.append(row)
        return _object_matrix(rows)

    coeffs = [mat((0,) * n)]
    for i in range(n):
        e = [0] * n
        e[i] = 1
        coeffs.append(mat(tuple(e)))
    return Pencil(tuple(coeffs))


def build_pencil(table: MomentTable) -> Pencil:
    """The ``(n+1) x (n+1)`` pencil over the basis ``1, x_1, ..., x_n``.

    The (0, 0) entry of the constant term is the virtual degree.  Needs
    moments up to degree 3.
    """
    if table.cutoff < 3:
        raise PreconditionError("the pencil needs moments up to degree 3")
    n = table.n_vars
    basis = monomials_up_to(n, 1)
    return _localizing_pencil(table, basis)


def build_pencil_inf(table: MomentTable) -> Pencil:
    """Pencil with the first row and column removed (virtual degree -> inf)."""
    return build_pencil(table).delete_first()


def pencil_eval(pencil: Pencil, point) -> np.ndarray:
    return pencil.evaluate(point)


def quadratic_form_identity_check(table: MomentTable, point, vector):
    """Both sides of ``v^T M(a) v = L((v_0 + sum v_i x_i)^2 (1 + a^T x))``.

    Returns the pair ``(lhs, rhs)``; exact for rational input.
    """
    n = table.n_vars
    point = [as_fraction(v) for v in point]
    vector = [as_fraction(v) for v in vector]
    if len(point) != n or len(vector) != n + 1:
        raise DimensionError("need a point in R^n and a vector in R^(n+1)")
    M = build_pencil(table).evaluate(point)
    lhs = sum(vector[i] * M[i, j] * vector[j]
              for i in range(n + 1) for j in range(n + 1))
    form = linear_form(vector[1:], vector[0])
    rhs = moment_apply(table, form * form * linear_form(point, 1))
    return as_fraction(lhs), rhs


def build_hierarchy_pencil(p: Polynomial, level: int) -> Pencil:
    """Level-``level`` pencil over all monomials of degree <= level.

    Uses the pseudo-moments of ``p`` with virtual degree ``deg p``; the
    pencil has size ``C(level + n, n)``.
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    table = moment_table(p, p.degree, 2 * level + 1)
    basis = monomials_up_to(p.n_vars, level)
    assert len(basis) == comb(level + p.n_vars, p.n_vars)
    return _localizing_pencil(table, basis)


@dataclass(frozen=True)
class HalfSpace:
    """``{b : c0 + c . b >= 0}``; the whole space when ``c`` vanishes."""

    c0: Fraction
    c: tuple

    @property
    def is_full_space(self) -> bool:
        return not any(self.c)

    def contains(self, point) -> bool:
        return self.c0 + sum(ci * as_fraction(x) for ci, x in
                             zip(self.c, point)) >= 0

    def gauge(self, direction) -> float:
        """Largest ``t`` with ``t * direction`` inside (inf if unbounded)."""
        slope = float(sum(ci * as_fraction(x) for ci, x in
                          zip(self.c, direction)))
        return float("inf") if slope >= 0 else float(self.c0) / -slope


def halfspace(table: MomentTable) -> HalfSpace:
    """The linear (degree-0) relaxation ``d + sum_i L(x_i) b_i >= 0``."""
    n = table.n_vars
    c = tuple(table.value(tuple(int(i == j) for j in range(n)))
              for i in range(n))
    return HalfSpace(table.virtual_degree, c)


# -- homogeneous and shifted constructions ----------------------------------

def householder_to_first_axis(e) -> np.ndarray:
    """Orthogonal symmetric ``U`` with ``U e = ||e|| u_1``."""
    e = np.asarray(e, dtype=float)
    n = len(e)
    norm = np.linalg.norm(e)
    if norm == 0:
        raise PreconditionError("direction must be nonzero")
    w = e.copy()
    w[0] -= norm
    if np.linalg.norm(w) <= 1e-15 * norm:
        return np.eye(n)
    return np.eye(n) - 2.0 * np.outer(w, w) / (w @ w)


def homogeneous_pencil(p: Polynomial, e, check: bool = True,
                       trials: int = 32, seed: int = 0) -> HomogeneousPencil:
    """Linear pencil ``M_{p,e}`` for a homogeneous ``p`` hyperbolic in ``e``.

    With a Householder ``U`` mapping ``e`` to ``||e|| u_1``, the polynomial
    ``r = p(U^T x)`` dehomogenized in the first coordinate supplies moments
    for the affine pencil ``M*`` of ``r`` in homogeneous coordinates, and
    ``M_{p,e}(x) = U^T M*(U x) U``.
    """
    from .geometry import hyperbolicity_probe

    if p.is_zero() or not p.is_homogeneous():
        raise PreconditionError("p must be a nonzero homogeneous polynomial")
    n = p.n_vars
    e = list(e)
    if len(e) != n:
        raise DimensionError("direction has the wrong length")
    if check:
        verdict = hyperbolicity_probe(p, e, trials=trials, seed=seed)
        if not verdict.passed:
            raise PreconditionError("p does not look hyperbolic in direction e")
    if all(is_exact(v) for v in e) and all(v == 0 for v in e[1:]) and e[0] > 0:
        U = np.eye(n, dtype=object)
        U = np.vectorize(as_fraction, otypes=[object])(U)
    else:
        U = householder_to_first_axis([float(v) for v in e])
    q = rotate(p, U.T)
    r = dehomogenize(q)
    base = build_pencil(moment_table(r, p.degree, 3))
    tilde = base.coeffs
    exact = base.exact and U.dtype == object
    if not exact:
        tilde = [to_float(A) for A in tilde]
        Uf = np.asarray(U, dtype=float)
    else:
        Uf = U
    coeffs = []
    for i in range(n):
        acc = tilde[0] * Uf[0, i]
        for k in range(1, n):
            acc = acc + tilde[k] * Uf[k, i]
        coeffs.append(Uf.T.dot(acc).dot(Uf))
    return HomogeneousPencil(tuple(coeffs))


def shifted_pencil_family(p: Polynomial, anchors, margin: float = 1e-9):
    """Pencils of ``p(x + a) / p(a)`` for each interior anchor ``a``.

    A point ``x`` lies in the intersection of the translated sets when
    ``M_a(x - a)`` is PSD for every anchor.  Anchors must satisfy
    ``gauge_C(a) > 1 + margin`` (strictly inside the rigidly convex set).
    """
    from .geometry import ray_gauge_C

    family = []
    for a in anchors:
        a = [as_fraction(v) for v in a]
        if len(a) != p.n_vars:
            raise DimensionError("anchor has the wrong length")
        if any(a):
            g = ray_gauge_C(p, [float(v) for v in a])
            if not g.gauge > 1 + margin:
                raise NotInteriorError(
                    f"anchor {[float(v) for v in a]} is not strictly interior")
        pa = shift(p, a)
        pa = pa / pa.constant_term
        family.append((tuple(a), build_pencil(moment_table(pa, p.degree, 3))))
    return family


def member_pencil(pencil: Pencil, point,
                  policy: TolerancePolicy = DEFAULT_POLICY) -> PSDVerdict:
    return is_psd(pencil.evaluate(point), policy)


def reduce_pencil(pencil: Pencil, policy: TolerancePolicy = DEFAULT_POLICY):
    return monic_normalize(pencil.coeffs, policy)


def pythagorean_rotation(m: int, k: int) -> np.ndarray:
    """Exact rational 2x2 rotation from the triple (m^2-k^2, 2mk, m^2+k^2)."""
    h = m * m + k * k
    c, s = Fraction(m * m - k * k, h), Fraction(2 * m * k, h)
    return _object_matrix([[c, -s], [s, c]])


def block_rotation(n: int, i: int, j: int, R) -> np.ndarray:
    """Embed the 2x2 rotation ``R`` in coordinates ``i, j`` of ``I_n``."""
    U = _object_matrix([[Fraction(int(a == b)) for b in range(n)]
                        for a in range(n)])
    U[i, i], U[i, j], U[j, i], U[j, j] = R[0, 0], R[0, 1], R[1, 0], R[1, 1]
    return U


def pencil_determinant(pencil: Pencil) -> Polynomial:
    """``det(A_0 + sum x_i A_i)`` as a polynomial of degree <= size.

    Exact for rational pencils (evaluation at integer nodes, exact
    elimination, Newton interpolation); float otherwise.
    """
    from .linalg import det_exact
    from .moments import interpolate_total_degree

    n, s = pencil.n_vars, pencil.size
    if pencil.exact:
        mats = [[[as_fraction(v) for v in row] for row in A]
                for A in pencil.coeffs]

        def det_at(x):
            rows = [[mats[0][i][j] + sum(xi * M[i][j]
                                         for xi, M in zip(x, mats[1:]))
                     for j in range(s)] for i in range(s)]
            return as_fraction(det_exact(rows))

        coeffs = interpolate_total_degree(det_at, n, s, exact=True)
    else:
        mats = pencil.float_coeffs()

        def det_at(x):
            M = mats[0].copy()
            for xi, A in zip(x, mats[1:]):
                M += xi * A
            return float(np.linalg.det(M))

        coeffs = interpolate_total_degree(det_at, n, s, exact=False)
    return Polynomial({k: v for k, v in coeffs.items() if v}, n)
