"""Membership and gauge oracles.

Covers rigidly convex sets, spectrahedra and hyperbolicity cones, plus the
probabilistic real-zero and hyperbolicity checks.  Real-rootedness is
*probed* along random directions, never decided.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DimensionError,
    NotInteriorError,
    NotPSDError,
    NotRealZeroError,
    PreconditionError,
)
from .linalg import (
    DEFAULT_POLICY,
    PSDVerdict,
    TolerancePolicy,
    is_psd,
    monic_normalize,
    to_float,
)
from .pencil import Pencil
from .poly import Polynomial, as_fraction, restrict_line

ROOT_TOL = 1e-7
CLUSTER_RADIUS = 1e-6


class GaugeStatus(enum.Enum):
    EXACT_ROOT = "EXACT_ROOT"
    BISECTED = "BISECTED"
    UNBOUNDED = "UNBOUNDED"


@dataclass(frozen=True)
class RayGaugeResult:
    """``sup {t >= 0 : t * direction in the set}``; ``inf`` when unbounded."""

    direction: tuple
    gauge: float
    status: GaugeStatus
    residual: float = 0.0

    def __post_init__(self):
        if self.gauge < 0:
            raise ValueError("gauge must be non-negative")
        if (self.status == GaugeStatus.UNBOUNDED) != math.isinf(self.gauge):
            raise ValueError("UNBOUNDED status iff infinite gauge")

    @property
    def unbounded(self) -> bool:
        return self.status == GaugeStatus.UNBOUNDED


@dataclass(frozen=True)
class RZVerdict:
    """Outcome of a probabilistic real-rootedness probe.

    ``counterexample`` is ``(direction, root)`` and is present exactly when
    the probe failed.
    """

    passed: bool
    counterexample: tuple | None
    directions_tested: int
    tol: float
    method: str = "probabilistic"

    def __post_init__(self):
        if self.passed == (self.counterexample is not None):
            raise ValueError("counterexample present iff the probe failed")


# -- univariate helpers -------------------------------------------------------

def _u_trim(f):
    f = list(f)
    while f and not f[-1]:
        f.pop()
    return f


def _u_deriv(f):
    return _u_trim([k * c for k, c in enumerate(f)][1:])


def _u_divmod(f, g):
    f, g = _u_trim(f), _u_trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(f) - len(g) + 1, 1)
    r = list(f)
    lead = g[-1]
    while len(r) >= len(g) and r:
        shift = len(r) - len(g)
        c = r[-1] / lead
        q[shift] = c
        for i, gc in enumerate(g):
            r[shift + i] -= c * gc
        r = _u_trim(r)
    return _u_trim(q), r


def _u_monic(f):
    f = _u_trim(f)
    return [c / f[-1] for c in f] if f else f


def _u_gcd(f, g):
    f, g = _u_trim(f), _u_trim(g)
    while g:
        _, r = _u_divmod(f, g)
        f, g = g, r
    return _u_monic(f)


def squarefree_factors(f):
    """Yun's algorithm over Q: ``[(factor, multiplicity), ...]``.

    ``f`` is a coefficient list (lowest degree first) of Fractions.
    """
    f = _u_trim([as_fraction(c) for c in f])
    if len(f) <= 1:
        return []
    df = _u_deriv(f)
    a = _u_gcd(f, df)
    b, _ = _u_divmod(f, a)
    c, _ = _u_divmod(df, a)
    d = [x - y for x, y in _zip_pad(c, _u_deriv(b))]
    out = []
    i = 1
    while len(_u_trim(b)) > 1:
        a = _u_gcd(b, d)
        if len(a) > 1:
            out.append((a, i))
        b, _ = _u_divmod(b, a)
        c, _ = _u_divmod(d, a)
        d = [x - y for x, y in _zip_pad(c, _u_deriv(b))]
        i += 1
    return out


def _zip_pad(f, g):
    n = max(len(f), len(g))
    f = list(f) + [Fraction(0)] * (n - len(f))
    g = list(g) + [Fraction(0)] * (n - len(g))
    return zip(f, g)


def _horner(coeffs, z):
    v = 0
    dv = 0
    for c in reversed(coeffs):
        dv = dv * z + v
        v = v * z + c
    return v, dv


def polish_root(coeffs, z, steps: int = 3):
    """A few guarded Newton steps on a root estimate."""
    v, _ = _horner(coeffs, z)
    best, best_res = z, abs(v)
    for _ in range(steps):
        v, dv = _horner(coeffs, z)
        if dv == 0:
            break
        z = z - v / dv
        res = abs(_horner(coeffs, z)[0])
        if res < best_res:
            best, best_res = z, res
        else:
            break
    return best


def poly_roots(coeffs) -> np.ndarray:
    """Complex roots of a float polynomial (lowest degree first).

    Companion-matrix eigenvalues (LAPACK balances the matrix) followed by
    Newton polishing.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if len(c) <= 1:
        return np.zeros(0, dtype=complex)
    scale = np.abs(c).max()
    c = c / scale
    zeros_at_origin = 0
    while c[0] == 0:
        c = c[1:]
        zeros_at_origin += 1
    roots = np.roots(c[::-1]) if len(c) > 1 else np.zeros(0, dtype=complex)
    roots = np.array([polish_root(c, complex(z)) for z in roots], dtype=complex)
    if zeros_at_origin:
        roots = np.concatenate([roots, np.zeros(zeros_at_origin, dtype=complex)])
    return roots


def cluster_roots(roots, radius: float = CLUSTER_RADIUS):
    """Group roots closer than ``radius * (1 + |z|)``.

    Returns a list of ``(centroid, members)``.
    """
    remaining = list(roots)
    clusters = []
    while remaining:
        z = remaining.pop(0)
        members = [z]
        changed = True
        while changed:
            changed = False
            for w in list(remaining):
                if any(abs(w - m) <= radius * (1 + abs(m)) for m in members):
                    members.append(w)
                    remaining.remove(w)
                    changed = True
        clusters.append((complex(np.mean(members)), members))
    return clusters


def _is_real(z, tol) -> bool:
    return abs(z.imag) <= tol * (1 + abs(z))


def real_roots_checked(coeffs, tol: float = ROOT_TOL):
    """Roots of a float polynomial with near-multiple roots merged.

    Returns ``(real_roots, bad_root)``: the real parts of all roots counted
    with multiplicity, and the first root that is not real within ``tol``
    (``None`` if every root is real).
    """
    roots = poly_roots(coeffs)
    reals, bad = [], None
    for centroid, members in cluster_roots(roots):
        if all(_is_real(z, tol) for z in members):
            reals.extend(z.real for z in members)
        elif len(members) > 1 and _is_real(centroid, tol):
            # a multiple root split into a small complex cloud
            reals.extend([centroid.real] * len(members))
        elif bad is None:
            bad = max(members, key=lambda z: abs(z.imag))
    return sorted(reals), bad


def _float_coeffs(f):
    f = _u_trim(f)
    if not f:
        return np.zeros(1)
    big = max(abs(c) for c in f)
    return np.array([float(c / big) for c in f])


def _taylor_shift(f, c):
    """Exact coefficients of ``s -> f(c + s)``."""
    out = list(f)
    n = len(out)
    for i in range(n):
        for k in range(n - 2, i - 1, -1):
            out[k] += c * out[k + 1]
    return out


def _refine_cluster(f, centroid: complex, size: int):
    # roots of f near the centroid, from the low-order Taylor expansion there;
    # exact shifting keeps the small coefficients meaningful
    c = as_fraction(centroid.real)
    g = _taylor_shift(f, c)
    head = _float_coeffs(g[:size + 1])
    full = _float_coeffs(g)
    local = poly_roots(head)
    if len(local) != size:
        return None
    return [float(c) + complex(polish_root(full, complex(s))) for s in local]


def exact_real_roots(f, tol: float = ROOT_TOL, radius: float = 1e-3):
    """Real roots (with multiplicity) of a rational univariate polynomial.

    Squarefree factors are found exactly, then each factor's simple roots
    numerically.  Groups of nearby roots are recomputed from the exact
    Taylor expansion at their centroid.  Returns ``(roots, bad_root)`` like
    :func:`real_roots_checked`.
    """
    factors = squarefree_factors(f)
    roots, bad = [], None
    for factor, mult in factors:
        found = []
        for centroid, members in cluster_roots(
                poly_roots(_float_coeffs(factor)), radius):
            if len(members) > 1:
                refined = _refine_cluster(factor, centroid, len(members))
                if refined is not None:
                    members = refined
            found.extend(members)
        for z in found:
            if _is_real(z, tol):
                roots.extend([z.real] * mult)
            elif bad is None:
                bad = z
    return sorted(roots), bad


# -- probes -------------------------------------------------------------------

def _rational_direction(rng, n: int, denominator: int = 1024):
    while True:
        v = rng.standard_normal(n)
        a = [Fraction(int(round(x * denominator)), denominator) for x in v]
        if any(a):
            return a


def real_zero_probe(p: Polynomial, trials: int = 64, tol: float = ROOT_TOL,
                    seed: int = 0, rng=None) -> RZVerdict:
    """Probe real-rootedness of ``t -> p(t a)`` along random directions.

    Passing is evidence, not proof.  Roots are reported for unit directions.
    """
    if p.is_zero():
        raise PreconditionError("the zero polynomial is not a real zero polynomial")
    if p.constant_term == 0:
        return RZVerdict(False, (None, 0j), 0, tol)
    if rng is None:
        rng = np.random.default_rng(seed)
    n = p.n_vars
    for k in range(trials):
        if n == 0:
            break
        a = _rational_direction(rng, n)
        f = restrict_line(p, a).to_univariate()
        _, bad = exact_real_roots(f, tol)
        if bad is not None:
            norm = math.sqrt(sum(float(x) ** 2 for x in a))
            unit = tuple(float(x) / norm for x in a)
            return RZVerdict(False, (unit, complex(bad) * norm), k + 1, tol)
    return RZVerdict(True, None, trials if n else 0, tol)


def decompose_quadratic(p: Polynomial):
    """Write ``p / p(0) = x^T A x + b^T x + 1``; returns exact ``(A, b)``."""
    if p.degree > 2:
        raise PreconditionError("polynomial has degree above 2")
    c0 = p.constant_term
    if not c0:
        raise PreconditionError("p(0) must be nonzero")
    q = p / c0
    n = p.n_vars
    A = np.empty((n, n), dtype=object)
    b = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        b.append(q.coeff(e))
        for j in range(n):
            e2 = [0] * n
            e2[i] += 1
            e2[j] += 1
            c = q.coeff(e2)
            A[i, j] = c if i == j else c / 2
    return A, b


@dataclass(frozen=True)
class QuadraticCertificate:
    matrix: np.ndarray
    verdict: PSDVerdict

    @property
    def passed(self) -> bool:
        return self.verdict != PSDVerdict.NOT_PSD


def quadratic_rz_certificate(p: Polynomial,
                             policy: TolerancePolicy = DEFAULT_POLICY
                             ) -> QuadraticCertificate:
    """``bb^T - 4A`` and its PSD verdict; PSD iff ``p`` is real zero."""
    A, b = decompose_quadratic(p)
    n = p.n_vars
    K = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            K[i, j] = b[i] * b[j] - 4 * A[i, j]
    verdict = is_psd(to_float(K), policy) if n else PSDVerdict.PSD
    return QuadraticCertificate(K, verdict)


def ray_gauge_C(p: Polynomial, direction, tol: float = ROOT_TOL
                ) -> RayGaugeResult:
    """Smallest positive real root of ``t -> p(t a)`` (inf if none).

    The restriction is formed exactly (float directions are converted to
    rationals without rounding) and split into squarefree factors, so the
    numerical root finder only ever sees simple roots.
    """
    a = [as_fraction(x) for x in direction]
    direction = tuple(float(x) for x in a)
    if len(a) != p.n_vars:
        raise DimensionError("direction has the wrong length")
    if p.constant_term == 0:
        raise PreconditionError("p(0) must be nonzero")
    if not any(a):
        return RayGaugeResult(direction, math.inf, GaugeStatus.UNBOUNDED)
    f = restrict_line(p, a).to_univariate()
    reals, _ = exact_real_roots(f, tol)
    positive = [r for r in reals if r > 1e-12]
    if not positive:
        return RayGaugeResult(direction, math.inf, GaugeStatus.UNBOUNDED)
    t = min(positive)
    coeffs = _float_coeffs(f)
    value = abs(_horner(coeffs, t)[0])
    scale = float(np.sum(np.abs(coeffs) * abs(t) ** np.arange(len(coeffs))))
    return RayGaugeResult(direction, float(t), GaugeStatus.EXACT_ROOT,
                          residual=value / scale if scale else 0.0)


def pencil_ray_gauge(base, slope, t_max: float = 1e6,
                     policy: TolerancePolicy = DEFAULT_POLICY,
                     rel_width: float = 1e-9):
    """``sup {t in [0, t_max] : base + t * slope is PSD}`` and its status.

    First reduces ``base`` to the identity on its range (valid when the
    line passes through the relative interior); the gauge is then
    ``1 / lambda_max(-slope')``.  If the reduction is not applicable the
    interval is bisected on the three-way PSD verdict.
    """
    base = to_float(base)
    slope = to_float(slope)
    if is_psd(base, policy) == PSDVerdict.NOT_PSD:
        raise NotPSDError("the base point is not in the spectrahedron")
    try:
        red = monic_normalize([base, slope], policy)
        B = red.coeffs[1]
        lam = float(np.linalg.eigvalsh(-B)[-1]) if red.rank else 0.0
        if lam <= 1.0 / t_max:
            return math.inf, GaugeStatus.UNBOUNDED
        return 1.0 / lam, GaugeStatus.EXACT_ROOT
    except NotInteriorError:
        pass

    def feasible(t):
        return is_psd(base + t * slope, policy) != PSDVerdict.NOT_PSD

    if feasible(t_max):
        return math.inf, GaugeStatus.UNBOUNDED
    lo, hi = 0.0, t_max
    while hi - lo > rel_width * max(hi, 1e-300):
        mid = (lo + hi) / 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo, GaugeStatus.BISECTED


def ray_gauge_S(pencil: Pencil, direction, t_max: float = 1e6,
                policy: TolerancePolicy = DEFAULT_POLICY) -> RayGaugeResult:
    """Gauge of the spectrahedron ``{x : M(x) PSD}`` along ``direction``."""
    direction = [float(x) for x in direction]
    if len(direction) != pencil.n_vars:
        raise DimensionError("direction has the wrong length")
    gauge, status = pencil_ray_gauge(pencil.float_coeffs()[0],
                                     pencil.direction_matrix(direction),
                                     t_max, policy)
    return RayGaugeResult(tuple(direction), gauge, status)


def member_C(p: Polynomial, point, tol: float = 1e-12) -> bool:
    """``point`` lies in the rigidly convex set: no root of ``p(t a)`` in [0, 1)."""
    if p.constant_term == 0:
        raise PreconditionError("p(0) must be nonzero")
    if not any(float(x) for x in point):
        return True
    return ray_gauge_C(p, point).gauge >= 1 - tol


def member_S(pencil: Pencil, point,
             policy: TolerancePolicy = DEFAULT_POLICY) -> PSDVerdict:
    return is_psd(to_float(pencil.evaluate(point)), policy)


def family_ray_gauge(family, direction, t_max: float = 1e6,
                     policy: TolerancePolicy = DEFAULT_POLICY) -> float:
    """Gauge of the intersection of shifted spectrahedra ``S_a + a``.

    ``family`` is the output of :func:`rzrelax.pencil.shifted_pencil_family`.
    """
    best = math.inf
    for anchor, pencil in family:
        base = pencil.evaluate([-float(x) for x in anchor])
        g, _ = pencil_ray_gauge(base, pencil.direction_matrix(direction),
                                t_max, policy)
        best = min(best, g)
    return best


# -- hyperbolic polynomials ---------------------------------------------------

def _line_through(p: Polynomial, base, direction):
    """Exact coefficients of ``t -> p(base + t * direction)``."""
    base = [as_fraction(x) for x in base]
    direction = [as_fraction(x) for x in direction]
    images = [Polynomial({(0,): b, (1,): d}, 1) for b, d in zip(base, direction)]
    return p.substitute(images).to_univariate() if p.n_vars else \
        [p.constant_term]


def hyperbolicity_probe(p: Polynomial, e, trials: int = 64,
                        tol: float = ROOT_TOL, seed: int = 0,
                        rng=None) -> RZVerdict:
    """Probe that every ``t -> p(a - t e)`` has only real roots."""
    if not p.is_homogeneous() or p.is_zero():
        raise PreconditionError("p must be a nonzero homogeneous polynomial")
    e = [as_fraction(x) for x in e]
    if len(e) != p.n_vars:
        raise DimensionError("direction has the wrong length")
    if not any(e):
        raise PreconditionError("direction must be nonzero")
    if p.eval(e) == 0:
        return RZVerdict(False, (tuple(float(x) for x in e), 0j), 0, tol)
    if rng is None:
        rng = np.random.default_rng(seed)
    for k in range(trials):
        a = _rational_direction(rng, p.n_vars)
        f = _line_through(p, a, [-x for x in e])
        _, bad = exact_real_roots(f, tol)
        if bad is not None:
            return RZVerdict(False, (tuple(float(x) for x in a), complex(bad)),
                             k + 1, tol)
    return RZVerdict(True, None, trials, tol)


def eigenvalues_dir(p: Polynomial, e, a, tol: float = ROOT_TOL) -> list[float]:
    """Zeros of ``t -> p(a - t e)`` with multiplicity, ascending."""
    if len(e) != p.n_vars or len(a) != p.n_vars:
        raise DimensionError("vectors have the wrong length")
    e = [as_fraction(x) for x in e]
    if p.eval(e) == 0:
        raise PreconditionError("p(e) must be nonzero")
    f = _line_through(p, a, [-x for x in e])
    roots, bad = exact_real_roots(f, tol)
    if bad is not None:
        raise NotRealZeroError(f"non-real eigenvalue {bad}")
    return roots


def trace_dir(p: Polynomial, e, a, tol: float = ROOT_TOL) -> float:
    return float(sum(eigenvalues_dir(p, e, a, tol)))


def cone_member(p: Polynomial, e, a, rel: float = 1e-9) -> bool:
    """``a`` lies in the closed hyperbolicity cone of ``p`` around ``e``."""
    eig = eigenvalues_dir(p, e, a)
    if not eig:
        return True
    scale = 1.0 + max(abs(x) for x in eig)
    return min(eig) >= -rel * scale


def sample_directions(n_vars: int, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic ray directions: equiangular in the plane, seeded
    Gaussian directions normalized to the unit sphere otherwise."""
    if n_vars == 1:
        return np.array([[1.0 if k % 2 == 0 else -1.0] for k in range(count)])
    if n_vars == 2:
        th = 2 * np.pi * np.arange(count) / count
        dirs = np.column_stack([np.cos(th), np.sin(th)])
        dirs[np.abs(dirs) < 1e-12] = 0.0
        return dirs
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((count, n_vars))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


__all__ = [
    "GaugeStatus", "RayGaugeResult", "RZVerdict", "real_zero_probe",
    "quadratic_rz_certificate", "decompose_quadratic", "ray_gauge_C",
    "ray_gauge_S", "pencil_ray_gauge", "member_C", "member_S",
    "family_ray_gauge", "hyperbolicity_probe", "eigenvalues_dir",
    "trace_dir", "cone_member", "sample_directions", "squarefree_factors",
    "exact_real_roots", "real_roots_checked", "poly_roots",
]
