"""Explicit determinantal representations.

* 2x2 representations of planar real-zero quadratics,
* the bordered "circle" pencil and the linear-cofactor representation of
  quadratics in any number of variables,
* perfect coefficient families and a sampled exactness check,
* the pencil describing the first derivative cone of the PSD cone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NumericalError, PreconditionError
from .geometry import (
    decompose_quadratic,
    quadratic_rz_certificate,
    ray_gauge_C,
    ray_gauge_S,
    sample_directions,
)
from .linalg import PSDVerdict, is_psd, to_float
from .moments import DetRep, detrep_expand, moment_table
from .pencil import (
    HomogeneousPencil,
    _object_matrix,
    build_pencil,
    householder_to_first_axis,
    pencil_determinant,
)
from .poly import Polynomial, as_fraction, linear_form, rotate

HV2_EPS = 1e-9
RESIDUAL_TOL = 1e-8


def rational_sqrt(q) -> Fraction | None:
    """Exact square root of a non-negative rational, or ``None``."""
    q = as_fraction(q)
    if q < 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def _sqrt(q):
    exact = rational_sqrt(q)
    return exact if exact is not None else math.sqrt(max(float(q), 0.0))


def _mixed(rows) -> np.ndarray:
    # object array when every entry is exact, float array otherwise
    if all(isinstance(v, (int, Fraction)) for r in rows for v in r):
        return _object_matrix([[as_fraction(v) for v in r] for r in rows])
    return np.array([[float(v) for v in r] for r in rows])


def coefficient_residual(p: Polynomial, q: Polynomial) -> float:
    """Largest absolute coefficient difference."""
    keys = set(p.terms) | set(q.terms)
    return max((abs(float(p.coeff(k) - q.coeff(k))) for k in keys), default=0.0)


def _check_residual(rep: DetRep, target: Polynomial, what: str) -> float:
    res = coefficient_residual(detrep_expand(rep), target)
    if res > RESIDUAL_TOL:
        raise NumericalError(f"{what}: expansion residual {res:.3e}")
    return res


def _hv2_formula(A, b):
    a11, a12 = A[0, 0], A[0, 1]
    b1, b2 = b
    r = b1 * b1 - 4 * a11
    k12 = b1 * b2 - 4 * a12
    k22 = b2 * b2 - 4 * A[1, 1]
    s = r * k22 - k12 * k12
    sqrt_r = _sqrt(r)
    ratio = k12 / sqrt_r if isinstance(sqrt_r, Fraction) else float(k12) / sqrt_r
    off = _sqrt(max(s / r, 0))
    A1 = _mixed([[(b1 - sqrt_r) / 2, 0], [0, (b1 + sqrt_r) / 2]])
    A2 = _mixed([[b2 / 2 - ratio / 2, off / 2], [off / 2, b2 / 2 + ratio / 2]])
    return A1, A2


def hv2_quadratic(p: Polynomial, eps: float = HV2_EPS) -> DetRep:
    """Symmetric 2x2 matrices with ``p = det(I + x1 A1 + x2 A2)``.

    ``p`` is a planar real-zero polynomial of degree <= 2 with ``p(0) = 1``.
    Quantities under the square roots are formed exactly; when
    ``r = b1^2 - 4 a11`` is at most ``eps`` the plane is first rotated so
    that the discriminant's leading eigenvector becomes the first axis.
    """
    if p.n_vars != 2:
        raise PreconditionError("hv2 needs a polynomial in two variables")
    if p.constant_term != 1:
        raise PreconditionError("hv2 needs p(0) = 1")
    cert = quadratic_rz_certificate(p)
    if not cert.passed:
        raise PreconditionError("polynomial is not real zero (discriminant not PSD)")
    A, b = decompose_quadratic(p)
    K = cert.matrix
    if not any(K.flat):
        half = [as_fraction(v) / 2 for v in b]
        mats = [_mixed([[h, 0], [0, h]]) for h in half]
        rep = DetRep(tuple(mats))
    elif K[0, 0] > eps:
        rep = DetRep(_hv2_formula(A, b))
    else:
        _, vecs = np.linalg.eigh(to_float(K))
        V = vecs[:, ::-1]
        B1, B2 = _hv2_formula(*decompose_quadratic(rotate(p, V)))
        B1, B2 = to_float(B1), to_float(B2)
        rep = DetRep((V[0, 0] * B1 + V[0, 1] * B2, V[1, 0] * B1 + V[1, 1] * B2))
    _check_residual(rep, p, "hv2")
    return rep


def circle_pencil(d_vec) -> HomogeneousPencil:
    """Bordered matrix in ``x0, x1, ..., xn``.

    First row ``(x0, -d_1 x_1, ..., -d_n x_n)``, diagonal ``-d_i x0``.  Its
    determinant is ``x0^(n-1) (x0^2 + sum d_i x_i^2) det M(1, 0)``.
    """
    d = [as_fraction(v) for v in d_vec]
    n = len(d)
    zero = Fraction(0)
    C0 = _object_matrix([[zero] * (n + 1) for _ in range(n + 1)])
    C0[0, 0] = Fraction(1)
    for i in range(n):
        C0[i + 1, i + 1] = -d[i]
    coeffs = [C0]
    for i in range(n):
        C = _object_matrix([[zero] * (n + 1) for _ in range(n + 1)])
        C[0, i + 1] = C[i + 1, 0] = -d[i]
        coeffs.append(C)
    return HomogeneousPencil(tuple(coeffs))


def cofactor_target(p: Polynomial) -> Polynomial:
    """``p * ((1 + trunc_1 p) / 2)^(n-1)`` for ``p(0) = 1``."""
    n = p.n_vars
    b = [p.coeff(tuple(int(i == j) for j in range(n))) for i in range(n)]
    ell = linear_form([v / 2 for v in b], 1)
    return p * ell ** max(n - 1, 0)


def lincofactor_rep(p: Polynomial) -> DetRep:
    """``(n+1) x (n+1)`` symmetric rep of ``p * ((1 + trunc_1 p)/2)^(n-1)``.

    With ``l = 1 + b^T x / 2`` and ``A - b b^T / 4 = U diag(d) U^T`` (all
    ``d_i <= 0``) one has ``p = l^2 + sum d_i (U^T x)_i^2``.  The bordered
    matrix evaluated at ``(l, U^T x)`` and normalized at the origin gives

        A_k = (b_k / 2) I + sum_i sqrt(-d_i) U_ki (E_0i + E_i0).

    The perfect-square case (all ``d_i = 0``) reduces to ``(b_k/2) I``.
    Exact when ``A - bb^T/4`` is diagonal with rational square roots.
    """
    if p.constant_term != 1:
        raise PreconditionError("lincofactor needs p(0) = 1")
    cert = quadratic_rz_certificate(p)
    if not cert.passed:
        raise PreconditionError("polynomial is not real zero (discriminant not PSD)")
    A, b = decompose_quadratic(p)
    n = p.n_vars
    W = -cert.matrix / 4
    diagonal = all(W[i, j] == 0 for i in range(n) for j in range(n) if i != j)
    if diagonal:
        dvals = [W[i, i] for i in range(n)]
        U = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        roots = [_sqrt(-v) if v < 0 else 0 for v in dvals]
    else:
        vals, vecs = np.linalg.eigh(to_float(W))
        scale = 1.0 + np.abs(vals).max()
        U = vecs.tolist()
        roots = [math.sqrt(-v) if v < -1e-14 * scale else 0.0 for v in vals]
    mats = []
    for k in range(n):
        rows = [[b[k] / 2 if i == j else 0 for j in range(n + 1)]
                for i in range(n + 1)]
        for i in range(n):
            if roots[i]:
                rows[0][i + 1] = rows[i + 1][0] = roots[i] * U[k][i]
        mats.append(_mixed(rows))
    rep = DetRep(tuple(mats))
    _check_residual(rep, cofactor_target(p), "lincofactor")
    return rep


def quadratic_pencil_det_identity(p: Polynomial):
    """Both sides of ``det M_p = det M_p(0) * ((1 + trunc_1 p)/2)^(n-1) * p``.

    ``M_p`` is the moment pencil of a quadratic with ``p(0) = 1`` (virtual
    degree 2).  Returns ``(lhs, rhs)`` as exact polynomials.
    """
    if p.constant_term != 1 or p.degree > 2:
        raise PreconditionError("need a quadratic with p(0) = 1")
    M = build_pencil(moment_table(p, 2, 3))
    lhs = pencil_determinant(M)
    det0 = lhs.constant_term
    rhs = cofactor_target(p) * det0
    return lhs, rhs


# -- perfect families ---------------------------------------------------------

class PerfectKind(enum.Enum):
    SCALAR_IDENTITY = "SCALAR_IDENTITY"
    DIAGONAL = "DIAGONAL"
    FULL_SYMMETRIC = "FULL_SYMMETRIC"
    POWERS_OF_A = "POWERS_OF_A"


@dataclass(frozen=True)
class PerfectFamily:
    """Generators of a perfect subspace with a rank certificate."""

    kind: PerfectKind
    size: int
    generators: tuple
    rank: int

    @property
    def full_rank(self) -> bool:
        return self.rank == len(self.generators)


def _unit(d, i, j):
    E = np.zeros((d, d))
    E[i, j] = E[j, i] = 1.0
    return E


def perfect_family(kind, size: int, A=None) -> PerfectFamily:
    kind = PerfectKind(kind)
    if size < 1:
        raise PreconditionError("size must be positive")
    d = size
    if kind == PerfectKind.SCALAR_IDENTITY:
        gens = [np.eye(d)]
    elif kind == PerfectKind.DIAGONAL:
        gens = [_unit(d, i, i) for i in range(d)]
    elif kind == PerfectKind.FULL_SYMMETRIC:
        gens = [_unit(d, i, j) for i in range(d) for j in range(i, d)]
    else:
        if A is None:
            raise PreconditionError("POWERS_OF_A needs a matrix")
        A = to_float(A)
        if A.shape != (d, d) or not np.allclose(A, A.T):
            raise PreconditionError("A must be a symmetric d x d matrix")
        gens = [np.eye(d)]
        for _ in range(d - 1):
            gens.append(gens[-1] @ A)
    stack = np.array([G.ravel() for G in gens])
    rank = int(np.linalg.matrix_rank(stack))
    return PerfectFamily(kind, d, tuple(gens), rank)


@dataclass(frozen=True)
class FalsifierReport:
    """Evidence-only search result; never a proof of perfectness."""

    candidate: np.ndarray | None
    samples: int
    evidence_only: bool = True


def perfectness_falsifier(generators, samples: int = 200, probes: int = 200,
                          seed: int = 0) -> FalsifierReport:
    """Look for ``A`` in the span with ``tr(M^2 A) >= 0`` on sampled ``M``
    from the span although ``A`` is not PSD."""
    rng = np.random.default_rng(seed)
    gens = [to_float(G) for G in generators]
    probe_mats = list(gens) + [
        sum(c * G for c, G in zip(rng.standard_normal(len(gens)), gens))
        for _ in range(probes)]
    for _ in range(samples):
        A = sum(c * G for c, G in zip(rng.standard_normal(len(gens)), gens))
        if is_psd(A) != PSDVerdict.NOT_PSD:
            continue
        scale = 1e-9 * (1 + np.linalg.norm(A))
        if all(np.trace(M @ M @ A) >= -scale * (1 + np.linalg.norm(M)) ** 2
               for M in probe_mats):
            return FalsifierReport(A, samples)
    return FalsifierReport(None, samples)


@dataclass(frozen=True)
class ExactnessReport:
    rays: int
    max_deviation: float
    containment_violations: int
    tol: float

    @property
    def exact(self) -> bool:
        return self.max_deviation <= self.tol


def _gap(gc: float, gs: float, t_max: float) -> float:
    if gc >= t_max and gs >= t_max:
        return 0.0
    if math.isinf(gc) or math.isinf(gs):
        return math.inf
    return abs(gc - gs)


def exactness_check_detrep(rep: DetRep, rays: int = 32, seed: int = 0,
                           tol: float = 1e-6, t_max: float = 1e6
                           ) -> ExactnessReport:
    """Compare gauges of ``C(p)`` and ``S_d(p)`` (``d`` = matrix size)."""
    p = detrep_expand(rep)
    pencil = build_pencil(moment_table(p, rep.size, 3))
    worst, violations = 0.0, 0
    for a in sample_directions(p.n_vars, rays, seed):
        gc = ray_gauge_C(p, a).gauge
        gs = ray_gauge_S(pencil, a, t_max=t_max).gauge
        worst = max(worst, _gap(gc, gs, t_max))
        if gc > gs + 1e-7 and not gs >= t_max:
            violations += 1
    return ExactnessReport(rays, worst, violations, tol)


# -- derived cone of the PSD cone ---------------------------------------------

def sym_from_vec(v, d: int) -> np.ndarray:
    """Symmetric matrix from its upper triangle listed row by row."""
    M = np.zeros((d, d))
    k = 0
    for i in range(d):
        for j in range(i, d):
            M[i, j] = M[j, i] = v[k]
            k += 1
    return M


def vec_from_sym(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    d = M.shape[0]
    return np.array([M[i, j] for i in range(d) for j in range(i, d)])


@dataclass(frozen=True)
class DerivedConePencil:
    """Pencil ``M`` in the entries of a symmetric matrix and the pencil
    ``N`` obtained by deleting its first row and column."""

    size: int
    M: HomogeneousPencil
    N: HomogeneousPencil
    U: np.ndarray
    B: tuple


def saunderson_pencil(d: int) -> DerivedConePencil:
    """Entries ``d sqrt(d) tr(B_i X B_j)`` with ``B_i`` the matrices whose
    upper-triangle vectors are the rows of a Householder ``U`` sending
    ``vec(I)`` to ``||vec(I)|| u_1``.  ``N(X) PSD`` describes the first
    derivative cone (in direction ``I``) of the PSD cone."""
    if d < 1:
        raise PreconditionError("d must be positive")
    n = d * (d + 1) // 2
    U = householder_to_first_axis(vec_from_sym(np.eye(d)))
    B = tuple(sym_from_vec(U[i], d) for i in range(n))
    scale = d * math.sqrt(d)
    coeffs = []
    for rho in range(n):
        S = sym_from_vec(np.eye(n)[rho], d)
        C = np.array([[scale * np.trace(B[i] @ S @ B[j]) for j in range(n)]
                      for i in range(n)])
        coeffs.append((C + C.T) / 2)
    M = HomogeneousPencil(tuple(coeffs))
    N = HomogeneousPencil(tuple(C[1:, 1:] for C in coeffs))
    return DerivedConePencil(d, M, N, U, B)


def det_sym_polynomial(d: int) -> Polynomial:
    """``det X`` in the upper-triangle entries of a symmetric ``d x d`` X."""
    n = d * (d + 1) // 2
    index = {}
    k = 0
    for i in range(d):
        for j in range(i, d):
            index[(i, j)] = index[(j, i)] = k
            k += 1
    var = [Polynomial.variable(t, n) for t in range(n)]
    from itertools import permutations

    total = Polynomial({}, n)
    for perm in permutations(range(d)):
        sign = 1
        for i in range(d):
            for j in range(i + 1, d):
                if perm[i] > perm[j]:
                    sign = -sign
        term = Polynomial.constant(sign, n)
        for i in range(d):
            term = term * var[index[(i, perm[i])]]
        total = total + term
    return total
