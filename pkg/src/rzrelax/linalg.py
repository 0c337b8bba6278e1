"""Symmetric and Hermitian matrix utilities.

Eigenvalues come from LAPACK through numpy; exact work (determinants of
rational or Gaussian-rational matrices) uses plain Gaussian elimination.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionError, NotInteriorError, NotPSDError, ParseError
from .poly import as_fraction, format_rational, is_exact


class PSDVerdict(enum.Enum):
    PSD = "PSD"
    NOT_PSD = "NOT_PSD"
    MARGINAL = "MARGINAL"


@dataclass(frozen=True)
class TolerancePolicy:
    """Relative thresholds for PSD decisions.

    A matrix is PSD when ``lambda_min >= -psd_rel * (1 + ||M||_F)`` and
    NOT_PSD when ``lambda_min < -not_psd_rel * (1 + ||M||_F)``.
    """

    psd_rel: float = 1e-8
    not_psd_rel: float = 1e-6

    def __post_init__(self):
        if not 0 < self.psd_rel <= self.not_psd_rel:
            raise ValueError("need 0 < psd_rel <= not_psd_rel")


DEFAULT_POLICY = TolerancePolicy()


def to_float(M) -> np.ndarray:
    arr = np.asarray(M)
    if arr.dtype == object:
        return np.vectorize(float, otypes=[float])(arr) if arr.size else \
            np.zeros(arr.shape)
    return np.asarray(arr, dtype=float)


def to_exact(M) -> np.ndarray:
    """Object array of Fractions (floats converted exactly)."""
    arr = np.asarray(M, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = as_fraction(v)
    return out


def is_exact_matrix(M) -> bool:
    arr = np.asarray(M)
    if arr.dtype == object:
        return all(is_exact(v) for v in arr.flat)
    return np.issubdtype(arr.dtype, np.integer)


def _square_symmetric(M) -> np.ndarray:
    A = to_float(M)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    scale = 1.0 + np.abs(A).max(initial=0.0)
    if np.abs(A - A.T).max(initial=0.0) > 1e-10 * scale:
        raise DimensionError("matrix is not symmetric")
    return (A + A.T) / 2


def eig_sym(M):
    """Eigen-decomposition of a real symmetric matrix.

    Returns
    -------
    values : ndarray
        Ascending eigenvalues.
    vectors : ndarray
        Orthonormal eigenvectors as columns.
    """
    A = _square_symmetric(M)
    if A.size == 0:
        return np.zeros(0), np.zeros((0, 0))
    return np.linalg.eigh(A)


def eigvals_sym(M) -> np.ndarray:
    A = _square_symmetric(M)
    if A.size == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(A)


def is_psd(M, policy: TolerancePolicy = DEFAULT_POLICY) -> PSDVerdict:
    """Three-way PSD verdict based on the smallest eigenvalue."""
    A = _square_symmetric(M)
    if A.size == 0:
        return PSDVerdict.PSD
    lam = np.linalg.eigvalsh(A)[0]
    scale = 1.0 + np.linalg.norm(A)
    if lam >= -policy.psd_rel * scale:
        return PSDVerdict.PSD
    if lam < -policy.not_psd_rel * scale:
        return PSDVerdict.NOT_PSD
    return PSDVerdict.MARGINAL


@dataclass(frozen=True)
class HermitianMatrix:
    """Hermitian matrix stored as real part (symmetric) and imaginary part
    (antisymmetric).  Entries may be floats or Fractions."""

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        re = np.asarray(self.re)
        im = np.asarray(self.im) if self.im is not None else np.zeros_like(re)
        if re.shape != im.shape or re.ndim != 2 or re.shape[0] != re.shape[1]:
            raise DimensionError("real and imaginary parts must be square "
                                 "and of equal shape")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)
        exact = is_exact_matrix(re) and is_exact_matrix(im)
        if exact:
            ok = all(re[i, j] == re[j, i] and im[i, j] == -im[j, i]
                     for i in range(re.shape[0]) for j in range(re.shape[0]))
        else:
            R, Im = to_float(re), to_float(im)
            scale = 1.0 + np.abs(R).max(initial=0) + np.abs(Im).max(initial=0)
            ok = (np.abs(R - R.T).max(initial=0) <= 1e-10 * scale
                  and np.abs(Im + Im.T).max(initial=0) <= 1e-10 * scale)
        if not ok:
            raise DimensionError("matrix is not Hermitian")

    @classmethod
    def real(cls, M) -> "HermitianMatrix":
        M = np.asarray(M)
        zero = np.zeros(M.shape, dtype=M.dtype)
        if M.dtype == object:
            zero = np.full(M.shape, Fraction(0), dtype=object)
        return cls(M, zero)

    @classmethod
    def from_complex(cls, H) -> "HermitianMatrix":
        H = np.asarray(H, dtype=complex)
        return cls(H.real.copy(), H.imag.copy())

    @property
    def size(self) -> int:
        return self.re.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact_matrix(self.re) and is_exact_matrix(self.im)

    def is_real(self) -> bool:
        return not np.any(to_float(self.im))

    def to_complex(self) -> np.ndarray:
        return to_float(self.re) + 1j * to_float(self.im)


def real_embed(H) -> np.ndarray:
    """``[[A, -B], [B, A]]`` for ``H = A + iB``.

    The result is real symmetric, has every eigenvalue of ``H`` twice and
    is PSD exactly when ``H`` is.
    """
    if not isinstance(H, HermitianMatrix):
        H = HermitianMatrix.from_complex(H)
    A, B = np.asarray(H.re), np.asarray(H.im)
    return np.block([[A, -B], [B, A]])


# -- exact arithmetic ---------------------------------------------------------

class GaussianRational:
    """Element of Q(i); just enough field arithmetic for elimination."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = as_fraction(re)
        self.im = as_fraction(im)

    @staticmethod
    def lift(v) -> "GaussianRational":
        if isinstance(v, GaussianRational):
            return v
        return GaussianRational(v, 0)

    def __add__(self, o):
        o = GaussianRational.lift(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = GaussianRational.lift(o)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GaussianRational.lift(o) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, o):
        o = GaussianRational.lift(o)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = GaussianRational.lift(o)
        den = o.re * o.re + o.im * o.im
        if not den:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational((self.re * o.re + self.im * o.im) / den,
                                (self.im * o.re - self.re * o.im) / den)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        try:
            o = GaussianRational.lift(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


def det_exact(rows):
    """Determinant by fraction-exact Gaussian elimination.

    Works for any field elements supporting ``+ - * /`` and truthiness
    (Fractions or :class:`GaussianRational`).
    """
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return Fraction(1)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det = det * p
        for r in range(col + 1, n):
            if not a[r][col]:
                continue
            f = a[r][col] / p
            row_r, row_c = a[r], a[col]
            for k in range(col + 1, n):
                if row_c[k]:
                    row_r[k] = row_r[k] - f * row_c[k]
    return det


def inverse_exact(M) -> np.ndarray:
    """Inverse of a rational matrix by Gauss-Jordan elimination."""
    A = [[as_fraction(v) for v in row] for row in np.asarray(M, dtype=object)]
    n = len(A)
    aug = [row + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(A)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            raise ZeroDivisionError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = aug[i][n + j]
    return out


# -- monic normalization ------------------------------------------------------

@dataclass(frozen=True)
class MonicReduction:
    """Congruence ``Q`` and reduced pencil with identity constant block.

    ``coeffs[0]`` is the identity of size ``rank``; the PSD set of the reduced
    pencil equals that of the original one.
    """

    Q: np.ndarray
    rank: int
    coeffs: tuple
    residual: float


def monic_normalize(coeffs, policy: TolerancePolicy = DEFAULT_POLICY,
                    rank_tol: float = 1e-9,
                    residual_tol: float = 1e-8) -> MonicReduction:
    """Reduce ``A_0 + sum x_i A_i`` to ``I_e + sum x_i B_i``.

    ``A_0`` must be PSD.  Writing ``A_0 = P diag(lambda) P^T`` the congruence
    is ``Q = P diag(1/sqrt(lambda_+), 1)``; for a pencil whose PSD set has
    the origin in its interior the transformed coefficients vanish outside
    the leading ``e x e`` block, which is checked.
    """
    mats = [to_float(A) for A in coeffs]
    A0 = _square_symmetric(mats[0])
    if is_psd(A0, policy) == PSDVerdict.NOT_PSD:
        raise NotPSDError("constant coefficient is not positive semidefinite")
    vals, vecs = np.linalg.eigh(A0) if A0.size else (np.zeros(0), A0)
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    cut = rank_tol * max(1.0, float(np.abs(vals).max(initial=0.0)))
    rank = int(np.sum(vals > cut))
    scale = np.ones(len(vals))
    scale[:rank] = 1.0 / np.sqrt(vals[:rank])
    Q = vecs * scale
    reduced = [np.eye(rank)]
    residual = 0.0
    for A in mats[1:]:
        B = Q.T @ A @ Q
        B = (B + B.T) / 2
        off = B.copy()
        off[:rank, :rank] = 0
        rel = np.linalg.norm(off) / (1.0 + np.linalg.norm(A))
        residual = max(residual, float(rel))
        reduced.append(B[:rank, :rank])
    if residual > residual_tol:
        raise NotInteriorError(
            f"origin is not interior: off-block residual {residual:.3e}")
    return MonicReduction(Q=Q, rank=rank, coeffs=tuple(reduced),
                          residual=residual)


# -- serialization ------------------------------------------------------------

def _entry_to_json(v):
    if is_exact(v):
        return format_rational(as_fraction(v))
    return float(v)


def _entry_from_json(v):
    if isinstance(v, str):
        return as_fraction(v)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"bad matrix entry {v!r}")
    return Fraction(v) if isinstance(v, int) else float(v)


def matrix_to_json(M) -> dict:
    if isinstance(M, HermitianMatrix):
        return {"size": M.size, "re": matrix_to_json(M.re),
                "im": matrix_to_json(M.im)}
    arr = np.asarray(M)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError("only square matrices are serialized")
    return {"size": int(arr.shape[0]),
            "rows": [[_entry_to_json(v) for v in row] for row in arr]}


def matrix_from_json(obj):
    if not isinstance(obj, dict) or "size" not in obj:
        raise ParseError("matrix JSON needs a 'size' field")
    if "re" in obj:
        re = matrix_from_json(obj["re"])
        im = matrix_from_json(obj["im"])
        return HermitianMatrix(re, im)
    d = obj["size"]
    rows = obj.get("rows")
    if not isinstance(rows, list) or len(rows) != d or \
            any(not isinstance(r, list) or len(r) != d for r in rows):
        raise ParseError(f"matrix JSON rows do not match size {d}")
    entries = [[_entry_from_json(v) for v in r] for r in rows]
    if all(isinstance(v, Fraction) for r in entries for v in r):
        out = np.empty((d, d), dtype=object)
        for i in range(d):
            for j in range(d):
                out[i, j] = entries[i][j]
        return out
    return np.array([[float(v) for v in r] for r in entries])
