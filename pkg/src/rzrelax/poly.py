"""Exact multivariate polynomials over the rationals.

Coefficients are stored as :class:`fractions.Fraction` in a sparse mapping
from exponent tuples to nonzero values.  Monomials are ordered graded
lexicographically with ``x1 > x2 > ... > xn``; the printed form lists terms
by increasing total degree, so ``1 - x1^2 - x2^2`` round-trips through
:func:`parse_polynomial`.

Truncated power series share the representation and carry a cutoff degree.
"""

from __future__ import annotations

import numbers
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial

import numpy as np

from .errors import (
    CapacityError,
    DimensionError,
    NonOrthogonalError,
    ParseError,
    PreconditionError,
)

MAX_VARS = 16
MAX_CUTOFF = 12

# exponent vectors are packed into ints in the series kernels; 6 bits per
# variable is plenty because every exponent there is bounded by MAX_CUTOFF
_BITS = 6
_MASK = (1 << _BITS) - 1


class _NegativeInfinity:
    """Degree of the zero polynomial.  Compares below every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("-inf-degree")

    def __repr__(self):
        return "-inf"


NEG_INF = _NegativeInfinity()


def as_fraction(value) -> Fraction:
    """Convert ``value`` to a Fraction without rounding.

    Floats are converted exactly (their binary expansion), strings go through
    the Fraction parser so ``"0.1"`` becomes ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        return Fraction(int(value))
    if isinstance(value, (numbers.Integral, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational number: {value!r}") from exc
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ParseError(f"non-finite coefficient: {value!r}")
        return Fraction(float(value))
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot convert {type(value).__name__} to Fraction")


def is_exact(value) -> bool:
    return isinstance(value, (Fraction, numbers.Integral, np.integer))


def grlex_key(alpha):
    """Sort key: total degree first, then larger exponent of x1 first."""
    return (sum(alpha), tuple(-e for e in alpha))


def monomials_of_degree(n_vars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent vectors of a given total degree, in graded-lex order."""
    if n_vars == 0:
        return [()] if degree == 0 else []
    out = []
    for combo in combinations_with_replacement(range(n_vars), degree):
        alpha = [0] * n_vars
        for i in combo:
            alpha[i] += 1
        out.append(tuple(alpha))
    return out


def monomials_up_to(n_vars: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors with total degree <= ``degree``, graded-lex order."""
    out = []
    for k in range(degree + 1):
        out.extend(monomials_of_degree(n_vars, k))
    return out


def multinomial(alpha) -> int:
    out = factorial(sum(alpha))
    for a in alpha:
        out //= factorial(a)
    return out


def format_monomial(alpha, names=None) -> str:
    parts = []
    for i, e in enumerate(alpha):
        if e == 0:
            continue
        name = names[i] if names else f"x{i + 1}"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def format_rational(value: Fraction) -> str:
    value = as_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class Polynomial:
    """Sparse polynomial with exact rational coefficients.

    Parameters
    ----------
    terms : mapping or iterable of (exponent tuple, coefficient)
        Coefficients may be ints, Fractions, floats (converted exactly) or
        rational strings.  Zero coefficients are dropped.
    n_vars : int, optional
        Number of variables.  Inferred from the exponent tuples when omitted;
        required for the zero polynomial in more than zero variables.
    """

    __slots__ = ("n_vars", "_terms")

    def __init__(self, terms=(), n_vars: int | None = None):
        items = terms.items() if hasattr(terms, "items") else terms
        clean: dict[tuple[int, ...], Fraction] = {}
        for alpha, coeff in items:
            alpha = tuple(int(e) for e in alpha)
            if n_vars is None:
                n_vars = len(alpha)
            if len(alpha) != n_vars:
                raise DimensionError(
                    f"exponent {alpha} does not have {n_vars} entries")
            if any(e < 0 for e in alpha):
                raise DimensionError(f"negative exponent in {alpha}")
            c = as_fraction(coeff)
            if c:
                c = clean.get(alpha, 0) + c
                if c:
                    clean[alpha] = c
                else:
                    clean.pop(alpha, None)
        self.n_vars = 0 if n_vars is None else int(n_vars)
        self._terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, value, n_vars: int) -> "Polynomial":
        return cls({(0,) * n_vars: value}, n_vars)

    @classmethod
    def variable(cls, index: int, n_vars: int) -> "Polynomial":
        """The coordinate ``x_{index+1}`` (``index`` is zero based)."""
        alpha = [0] * n_vars
        alpha[index] = 1
        return cls({tuple(alpha): 1}, n_vars)

    @classmethod
    def _raw(cls, terms: dict, n_vars: int) -> "Polynomial":
        obj = cls.__new__(cls)
        obj.n_vars = n_vars
        obj._terms = terms
        return obj

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, alpha) -> Fraction:
        return self._terms.get(tuple(alpha), Fraction(0))

    @property
    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.n_vars, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self):
        if not self._terms:
            return NEG_INF
        return max(sum(a) for a in self._terms)

    def is_homogeneous(self) -> bool:
        return len({sum(a) for a in self._terms}) <= 1

    def homogeneous_part(self, k: int) -> "Polynomial":
        return Polynomial._raw(
            {a: c for a, c in self._terms.items() if sum(a) == k}, self.n_vars)

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]))

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.n_vars != self.n_vars:
                raise DimensionError(
                    f"variable count mismatch: {self.n_vars} vs {other.n_vars}")
            return other
        return Polynomial.constant(as_fraction(other), self.n_vars)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for a, c in other._terms.items():
            v = out.get(a, 0) + c
            if v:
                out[a] = v
            else:
                out.pop(a, None)
        return Polynomial._raw(out, self.n_vars)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({a: -c for a, c in self._terms.items()},
                               self.n_vars)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = as_fraction(other)
            if not c:
                return Polynomial({}, self.n_vars)
            return Polynomial._raw(
                {a: v * c for a, v in self._terms.items()}, self.n_vars)
        other = self._coerce(other)
        out: dict = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, 0) + ca * cb
        return Polynomial._raw({k: v for k, v in out.items() if v},
                               self.n_vars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial divided by zero")
        return self * (1 / c)

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = Polynomial.constant(1, self.n_vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.n_vars == other.n_vars and self._terms == other._terms
        try:
            c = as_fraction(other)
        except TypeError:
            return NotImplemented
        if not c:
            return not self._terms
        return self._terms == {(0,) * self.n_vars: c}

    def __hash__(self):
        return hash((self.n_vars, frozenset(self._terms.items())))

    def __bool__(self):
        return bool(self._terms)

    # -- evaluation ---------------------------------------------------
    def eval(self, point):
        """Evaluate at ``point``.

        Exact (a Fraction) when every coordinate is an int or Fraction,
        otherwise a float.
        """
        point = list(point)
        if len(point) != self.n_vars:
            raise DimensionError(
                f"point has {len(point)} coordinates, expected {self.n_vars}")
        if all(is_exact(v) for v in point):
            pt = [as_fraction(v) for v in point]
            total = Fraction(0)
            for alpha, c in self._terms.items():
                term = c
                for v, e in zip(pt, alpha):
                    if e:
                        term *= v ** e
                total += term
            return total
        pt = [float(v) for v in point]
        total = 0.0
        for alpha, c in self._terms.items():
            term = float(c)
            for v, e in zip(pt, alpha):
                if e:
                    term *= v ** e
            total += term
        return total

    __call__ = eval

    def diff(self, index: int, order: int = 1) -> "Polynomial":
        out = {}
        for alpha, c in self._terms.items():
            e = alpha[index]
            if e < order:
                continue
            factor = 1
            for j in range(order):
                factor *= e - j
            beta = list(alpha)
            beta[index] = e - order
            out[tuple(beta)] = c * factor
        return Polynomial._raw(out, self.n_vars)

    def substitute(self, images) -> "Polynomial":
        """Compose: replace ``x_i`` by ``images[i]`` (all in the same ring)."""
        images = list(images)
        if len(images) != self.n_vars:
            raise DimensionError("need one image per variable")
        if not images:
            return Polynomial._raw(dict(self._terms), 0)
        m = images[0].n_vars
        powers = [[Polynomial.constant(1, m)] for _ in images]
        result = Polynomial({}, m)
        for alpha, c in self._terms.items():
            term = Polynomial.constant(c, m)
            for i, e in enumerate(alpha):
                if not e:
                    continue
                cache = powers[i]
                while len(cache) <= e:
                    cache.append(cache[-1] * images[i])
                term = term * cache[e]
            result = result + term
        return result

    def embed(self, n_vars: int, positions) -> "Polynomial":
        """Rename variable ``i`` to ``positions[i]`` inside ``n_vars`` vars."""
        positions = list(positions)
        if len(positions) != self.n_vars:
            raise DimensionError("need one position per variable")
        out = {}
        for alpha, c in self._terms.items():
            beta = [0] * n_vars
            for i, e in zip(positions, alpha):
                beta[i] += e
            out[tuple(beta)] = c
        return Polynomial._raw(out, n_vars)

    def to_univariate(self) -> list[Fraction]:
        """Coefficient list, lowest degree first (single variable only)."""
        if self.n_vars != 1:
            raise DimensionError("polynomial is not univariate")
        if not self._terms:
            return []
        coeffs = [Fraction(0)] * (self.degree + 1)
        for (e,), c in self._terms.items():
            coeffs[e] = c
        return coeffs

    def float_coeffs(self) -> dict:
        return {a: float(c) for a, c in self._terms.items()}

    # -- printing -----------------------------------------------------
    def to_string(self, names=None) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for alpha, c in self.sorted_terms():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            mono = format_monomial(alpha, names)
            if mono == "1":
                body = format_rational(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_rational(mag)}*{mono}"
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"Polynomial({self.to_string()!r}, n_vars={self.n_vars})"


def poly(text: str, n_vars: int | None = None) -> Polynomial:
    """Shorthand for :func:`parse_polynomial`."""
    return parse_polynomial(text, n_vars)


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"""
    \s*(?:
      (?P<num>\d+/\d+|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    | x(?P<var>\d+)
    | (?P<op>[-+*^()])
    )""", re.VERBOSE)


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at position {pos}: "
                             f"{text[pos:pos + 10]!r}")
        if m.group("num") is not None:
            tokens.append(("num", Fraction(m.group("num"))))
        elif m.group("var") is not None:
            tokens.append(("var", int(m.group("var"))))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    return tokens


class _Parser:
    # grammar: expr := ['+'|'-'] term (('+'|'-') term)*
    #          term := power ('*' power)*
    #          power := atom ['^' int]
    #          atom := number | x<i> | '(' expr ')'

    def __init__(self, tokens, n_vars):
        self.tokens = tokens
        self.i = 0
        self.n = n_vars

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self):
        sign = 1
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        result = self.term() * sign
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                result = result + t if val == "+" else result - t
            else:
                return result

    def term(self):
        result = self.power()
        while self.peek() == ("op", "*"):
            self.take()
            result = result * self.power()
        return result

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num" or val.denominator != 1 or val < 0:
                raise ParseError("exponent must be a non-negative integer")
            return base ** int(val)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return Polynomial.constant(val, self.n)
        if kind == "var":
            if val < 1 or val > self.n:
                raise ParseError(f"variable x{val} outside x1..x{self.n}")
            return Polynomial.variable(val - 1, self.n)
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError("unbalanced parenthesis")
            return inner
        if kind == "op" and val == "-":
            return -self.power()
        raise ParseError(f"unexpected token {val!r}")


def parse_polynomial(text: str, n_vars: int | None = None) -> Polynomial:
    """Parse text such as ``"1 - 3/4*x1^2 + 0.5*x1*x2"``.

    Decimals are converted exactly.  Products of parenthesised factors are
    accepted as input; output always uses the expanded canonical form.
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty polynomial text")
    tokens = _tokenize(text)
    seen = [val for kind, val in tokens if kind == "var"]
    if any(v == 0 for v in seen):
        raise ParseError("variables are numbered from x1")
    inferred = max(seen, default=0)
    if n_vars is None:
        n_vars = inferred
    elif n_vars < inferred:
        raise ParseError(f"x{inferred} used but only {n_vars} variables")
    if n_vars > MAX_VARS:
        raise CapacityError(f"at most {MAX_VARS} variables are supported")
    parser = _Parser(tokens, n_vars)
    result = parser.expr()
    if parser.i != len(tokens):
        raise ParseError(f"trailing input after token {parser.i}")
    return result


# -- truncated series ---------------------------------------------------------

def truncate(p: Polynomial, degree: int) -> Polynomial:
    """Drop all terms of total degree above ``degree``."""
    return Polynomial._raw(
        {a: c for a, c in p.items() if sum(a) <= degree}, p.n_vars)


@dataclass(frozen=True)
class TruncatedSeries:
    """A power series known up to (and including) total degree ``cutoff``."""

    poly: Polynomial
    cutoff: int

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        if self.poly.degree > self.cutoff:
            object.__setattr__(self, "poly", truncate(self.poly, self.cutoff))

    @property
    def n_vars(self):
        return self.poly.n_vars

    def coeff(self, alpha):
        return self.poly.coeff(alpha)

    def _other(self, other):
        if isinstance(other, TruncatedSeries):
            return other.poly, min(self.cutoff, other.cutoff)
        if isinstance(other, Polynomial):
            return other, self.cutoff
        return Polynomial.constant(as_fraction(other), self.n_vars), self.cutoff

    def __add__(self, other):
        q, d = self._other(other)
        return TruncatedSeries(truncate(self.poly, d) + truncate(q, d), d)

    __radd__ = __add__

    def __sub__(self, other):
        q, d = self._other(other)
        return TruncatedSeries(truncate(self.poly, d) - truncate(q, d), d)

    def __neg__(self):
        return TruncatedSeries(-self.poly, self.cutoff)

    def __mul__(self, other):
        q, d = self._other(other)
        parts_a = _packed_parts(self.poly, d)
        parts_b = _packed_parts(q, d)
        out = [dict() for _ in range(d + 1)]
        for i, pa in enumerate(parts_a):
            if not pa:
                continue
            for j in range(d + 1 - i):
                if parts_b[j]:
                    _accumulate_product(out[i + j], pa, parts_b[j], 1)
        return TruncatedSeries(_unpack_parts(out, self.n_vars), d)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.cutoff == other.cutoff and self.poly == other.poly

    def __hash__(self):
        return hash((self.poly, self.cutoff))

    def __str__(self):
        return f"{self.poly} + O(deg {self.cutoff + 1})"


def _pack(alpha) -> int:
    key = 0
    for e in alpha:
        key = (key << _BITS) | e
    return key


def _unpack(key: int, n_vars: int) -> tuple[int, ...]:
    out = [0] * n_vars
    for i in range(n_vars - 1, -1, -1):
        out[i] = key & _MASK
        key >>= _BITS
    return tuple(out)


def _packed_parts(p: Polynomial, cutoff: int) -> list[dict]:
    parts = [dict() for _ in range(cutoff + 1)]
    for alpha, c in p.items():
        k = sum(alpha)
        if k <= cutoff:
            # integers keep the kernels in fast int arithmetic when possible
            parts[k][_pack(alpha)] = c.numerator if c.denominator == 1 else c
    return parts


def _accumulate_product(out: dict, a: dict, b: dict, scale) -> None:
    # exponents never overflow a field because every entry is <= cutoff
    get = out.get
    for ka, va in a.items():
        if scale != 1:
            va = va * scale
        for kb, vb in b.items():
            k = ka + kb
            out[k] = get(k, 0) + va * vb


def _unpack_parts(parts, n_vars: int, divide_by_degree=False) -> Polynomial:
    out = {}
    for k, part in enumerate(parts):
        for key, v in part.items():
            if v:
                if divide_by_degree and k:
                    v = Fraction(v, k) if isinstance(v, int) else v / k
                out[_unpack(key, n_vars)] = as_fraction(v)
    return Polynomial._raw(out, n_vars)


def _check_caps(n_vars: int, cutoff: int) -> None:
    if n_vars > MAX_VARS:
        raise CapacityError(f"at most {MAX_VARS} variables are supported")
    if cutoff > MAX_CUTOFF:
        raise CapacityError(f"series cutoff is capped at {MAX_CUTOFF}")
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")


def log_euler_parts(p: Polynomial, cutoff: int) -> list[dict]:
    """Homogeneous parts of ``E(log p)`` where ``E`` is the Euler operator.

    Requires ``p(0) == 1``.  Entry ``k`` maps packed exponents of degree
    ``k`` to ``k`` times the coefficient of ``log p``.  The recurrence
    ``k p_k = sum_{m<=k} F_m p_{k-m}`` stays in integer arithmetic whenever
    ``p`` has integer coefficients.
    """
    _check_caps(p.n_vars, cutoff)
    if p.constant_term != 1:
        raise PreconditionError("log_series needs constant term exactly 1")
    parts = _packed_parts(p, cutoff)
    euler = [dict() for _ in range(cutoff + 1)]
    for k in range(1, cutoff + 1):
        acc = {key: k * v for key, v in parts[k].items()}
        for m in range(1, k):
            if euler[m] and parts[k - m]:
                _accumulate_product(acc, euler[m], parts[k - m], -1)
        euler[k] = {key: v for key, v in acc.items() if v}
    return euler


def log_series(p, cutoff: int) -> TruncatedSeries:
    """Logarithm of ``p`` truncated at total degree ``cutoff``.

    ``p`` must have constant term exactly 1.
    """
    if isinstance(p, TruncatedSeries):
        cutoff = min(cutoff, p.cutoff)
        p = p.poly
    euler = log_euler_parts(p, cutoff)
    return TruncatedSeries(_unpack_parts(euler, p.n_vars, divide_by_degree=True),
                           cutoff)


def exp_series(f, cutoff: int) -> TruncatedSeries:
    """Exponential of a series with zero constant term, truncated."""
    if isinstance(f, TruncatedSeries):
        cutoff = min(cutoff, f.cutoff)
        f = f.poly
    _check_caps(f.n_vars, cutoff)
    if f.constant_term != 0:
        raise PreconditionError("exp_series needs a zero constant term")
    parts = _packed_parts(f, cutoff)
    euler = [{key: m * v for key, v in part.items()}
             for m, part in enumerate(parts)]
    g = [dict() for _ in range(cutoff + 1)]
    g[0] = {0: Fraction(1)}
    for k in range(1, cutoff + 1):
        acc: dict = {}
        for m in range(1, k + 1):
            if euler[m] and g[k - m]:
                _accumulate_product(acc, euler[m], g[k - m], 1)
        g[k] = {key: as_fraction(v) / k for key, v in acc.items() if v}
    return TruncatedSeries(_unpack_parts(g, f.n_vars), cutoff)


# -- transformations ----------------------------------------------------------

def homogenize(p: Polynomial, degree: int | None = None) -> Polynomial:
    """Degree-``degree`` homogenization with the new variable placed first."""
    if degree is None:
        degree = 0 if p.is_zero() else p.degree
    if not p.is_zero() and degree < p.degree:
        raise PreconditionError(
            f"homogenization degree {degree} below polynomial degree {p.degree}")
    out = {(degree - sum(a),) + a: c for a, c in p.items()}
    return Polynomial._raw(out, p.n_vars + 1)


def dehomogenize(p: Polynomial) -> Polynomial:
    """Set the first variable to 1."""
    out: dict = {}
    for a, c in p.items():
        key = a[1:]
        v = out.get(key, 0) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return Polynomial._raw(out, p.n_vars - 1)


def linear_form(coeffs, constant=1) -> Polynomial:
    """``constant + sum_i coeffs[i] * x_i``."""
    n = len(coeffs)
    terms = {(0,) * n: constant}
    for i, c in enumerate(coeffs):
        alpha = [0] * n
        alpha[i] = 1
        terms[tuple(alpha)] = c
    return Polynomial(terms, n)


def product(factors, n_vars: int | None = None) -> Polynomial:
    factors = list(factors)
    if not factors:
        return Polynomial.constant(1, n_vars or 0)
    out = factors[0]
    for f in factors[1:]:
        out = out * f
    return out


def _vector(a, n: int, what: str):
    a = list(a)
    if len(a) != n:
        raise DimensionError(f"{what} has {len(a)} entries, expected {n}")
    return [as_fraction(v) for v in a]


def shift(p: Polynomial, a) -> Polynomial:
    """``x -> p(x + a)``."""
    a = _vector(a, p.n_vars, "shift vector")
    images = [Polynomial.variable(i, p.n_vars) + a[i] for i in range(p.n_vars)]
    return p.substitute(images)


def rotate(p: Polynomial, U, tol: float = 1e-10) -> Polynomial:
    """``x -> p(U x)`` for an orthogonal matrix ``U``.

    Rational matrices are checked and applied exactly; float matrices must
    satisfy ``||U^T U - I||_F <= tol`` and are converted exactly to rationals.
    """
    n = p.n_vars
    rows = [list(r) for r in np.asarray(U, dtype=object)] if n else []
    if len(rows) != n or any(len(r) != n for r in rows):
        raise DimensionError(f"rotation must be {n}x{n}")
    if all(is_exact(v) for r in rows for v in r):
        Q = [[as_fraction(v) for v in r] for r in rows]
        for i in range(n):
            for j in range(n):
                s = sum(Q[k][i] * Q[k][j] for k in range(n))
                if s != (1 if i == j else 0):
                    raise NonOrthogonalError("rational matrix is not orthogonal")
    else:
        Uf = np.array([[float(v) for v in r] for r in rows])
        err = np.linalg.norm(Uf.T @ Uf - np.eye(n))
        if err > tol:
            raise NonOrthogonalError(
                f"||U^T U - I||_F = {err:.3e} exceeds {tol:.1e}")
        Q = [[as_fraction(v) for v in r] for r in rows]
    images = [linear_form(Q[i], 0) for i in range(n)]
    return p.substitute(images)


def linear_substitute(p: Polynomial, M) -> Polynomial:
    """``x -> p(M x)`` for an arbitrary (possibly rectangular) matrix."""
    rows = [list(r) for r in np.asarray(M, dtype=object)]
    if len(rows) != p.n_vars:
        raise DimensionError("matrix row count must equal the variable count")
    images = [linear_form([as_fraction(v) for v in r], 0) for r in rows]
    return p.substitute(images)


def restrict_vars(p: Polynomial, keep) -> Polynomial:
    """Set every variable not listed in ``keep`` to zero.

    The result lives in ``len(keep)`` variables, in the order given.
    """
    keep = list(keep)
    if any(i < 0 or i >= p.n_vars for i in keep) or len(set(keep)) != len(keep):
        raise DimensionError("invalid variable selection")
    dropped = [i for i in range(p.n_vars) if i not in keep]
    out = {}
    for a, c in p.items():
        if any(a[i] for i in dropped):
            continue
        out[tuple(a[i] for i in keep)] = c
    return Polynomial._raw(out, len(keep))


def restrict_line(p: Polynomial, a) -> Polynomial:
    """Univariate ``t -> p(t a)``."""
    a = _vector(a, p.n_vars, "direction")
    out: dict = {}
    for alpha, c in p.items():
        v = c
        for x, e in zip(a, alpha):
            if e:
                v *= x ** e
        k = (sum(alpha),)
        out[k] = out.get(k, 0) + v
    return Polynomial._raw({k: v for k, v in out.items() if v}, 1)


def restrict_line_float(p: Polynomial, a) -> np.ndarray:
    """Float coefficients (lowest degree first) of ``t -> p(t a)``."""
    a = np.asarray(a, dtype=float)
    if a.shape != (p.n_vars,):
        raise DimensionError("direction has the wrong length")
    if p.is_zero():
        return np.zeros(1)
    coeffs = np.zeros(p.degree + 1)
    for alpha, c in p.items():
        coeffs[sum(alpha)] += float(c) * float(np.prod(a ** np.array(alpha)))
    return coeffs


def a_transform(p: Polynomial, a) -> Polynomial:
    """``p^*(1 + a^T x, x)`` with ``p^*`` the homogenization of degree deg p."""
    if p.is_zero():
        return p
    a = _vector(a, p.n_vars, "transform vector")
    hom = homogenize(p, p.degree)
    images = [linear_form(a, 1)] + [Polynomial.variable(i, p.n_vars)
                                    for i in range(p.n_vars)]
    return hom.substitute(images)


def normalize_constant(p: Polynomial) -> Polynomial:
    """Scale so the constant term is 1; requires p(0) != 0."""
    c = p.constant_term
    if not c:
        raise PreconditionError("polynomial vanishes at the origin")
    return p / c
