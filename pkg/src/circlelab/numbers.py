"""Exact scalars used throughout the package.

Rationals are plain ``fractions.Fraction``. Quadratic irrationals a + b*sqrt(n)
are ``Quad``; arithmetic between two ``Quad`` values needs a common radicand
(up to a rational square factor), otherwise ``MixedRadicals`` is raised.
Roots of quadratics whose discriminant has no square root in the coefficient
field are kept as ``AlgebraicRoot`` isolating intervals.

The transcendental chart helpers at the bottom use mpmath at high precision and
pad every result outward by many orders of magnitude more than the working
precision error, which keeps the returned rational enclosures sound.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import Indeterminate, MixedRadicals, ParseError


class _Infinity:
    """The point at infinity of the projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def _isqrt_exact(n: int):
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


_SMALL_PRIMES = None


def _small_primes(limit=2000):
    global _SMALL_PRIMES
    if _SMALL_PRIMES is None:
        sieve = bytearray([1]) * (limit + 1)
        sieve[0:2] = b"\x00\x00"
        for i in range(2, int(limit**0.5) + 1):
            if sieve[i]:
                sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
        _SMALL_PRIMES = [i for i in range(limit + 1) if sieve[i]]
    return _SMALL_PRIMES


def split_square(n: int):
    """Return (s, m) with n = s*s*m, removing square factors found cheaply.

    Square factors with a prime above the trial-division bound survive in m
    unless m itself is a perfect square.
    """
    s = 1
    m = n
    for p in _small_primes():
        pp = p * p
        if pp > m:
            break
        while m % pp == 0:
            m //= pp
            s *= p
    r = _isqrt_exact(m)
    if r is not None:
        return s * r, 1
    return s, m


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected a rational, got {type(x).__name__}")


class Quad:
    """a + b*sqrt(n) with rational a, b != 0 and n > 1 not a perfect square."""

    __slots__ = ("a", "b", "n")

    def __init__(self, a, b, n):
        self.a = a
        self.b = b
        self.n = n

    # construction -----------------------------------------------------

    @staticmethod
    def make(a, b, n):
        a = _frac(a)
        b = _frac(b)
        if b == 0 or n == 0:
            return a
        if n < 0:
            raise ValueError("negative radicand")
        s, m = split_square(n)
        if m == 1:
            return a + b * s
        return Quad(a, b * s, m)

    # coercion -----------------------------------------------------------

    def _lift(self, other):
        """Return (a, b) of ``other`` expressed over sqrt(self.n)."""
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        if isinstance(other, Quad):
            if other.n == self.n:
                return other.a, other.b
            r = _isqrt_exact(self.n * other.n)
            if r is None:
                raise MixedRadicals(f"sqrt({self.n}) and sqrt({other.n}) do not share a field")
            # sqrt(m) = r / n * sqrt(n)
            return other.a, other.b * Fraction(r, self.n)
        return NotImplemented

    def _new(self, a, b):
        if b == 0:
            return a
        return Quad(a, b, self.n)

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        t = self._lift(other)
        if t is NotImplemented:
            return t
        return self._new(self.a + t[0], self.b + t[1])

    __radd__ = __add__

    def __neg__(self):
        return Quad(-self.a, -self.b, self.n)

    def __pos__(self):
        return self

    def __sub__(self, other):
        t = self._lift(other)
        if t is NotImplemented:
            return t
        return self._new(self.a - t[0], self.b - t[1])

    def __rsub__(self, other):
        t = self._lift(other)
        if t is NotImplemented:
            return t
        return self._new(t[0] - self.a, t[1] - self.b)

    def __mul__(self, other):
        t = self._lift(other)
        if t is NotImplemented:
            return t
        c, d = t
        return self._new(self.a * c + self.b * d * self.n, self.a * d + self.b * c)

    __rmul__ = __mul__

    def norm(self):
        return self.a * self.a - self.b * self.b * self.n

    def conjugate(self):
        return Quad(self.a, -self.b, self.n)

    def __truediv__(self, other):
        t = self._lift(other)
        if t is NotImplemented:
            return t
        c, d = t
        if d == 0:
            if c == 0:
                raise ZeroDivisionError
            return self._new(self.a / c, self.b / c)
        nrm = c * c - d * d * self.n
        # (a + b r)(c - d r) / nrm
        return self._new((self.a * c - self.b * d * self.n) / nrm, (self.b * c - self.a * d) / nrm)

    def __rtruediv__(self, other):
        t = self._lift(other)
        if t is NotImplemented:
            return t
        nrm = self.norm()
        c, d = t
        return self._new((c * self.a - d * self.b * self.n) / nrm, (d * self.a - c * self.b) / nrm)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / (self**-k)
        out = Fraction(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # order ----------------------------------------------------------------

    def sign(self):
        return _sign_ab(self.a, self.b, self.n)

    def _cmp(self, other):
        if isinstance(other, (int, Fraction)):
            return _sign_ab(self.a - other, self.b, self.n)
        if isinstance(other, Quad):
            try:
                c, d = self._lift(other)
            except MixedRadicals:
                return _sign_numeric(self, other)
            return _sign_ab(self.a - c, self.b - d, self.n)
        if isinstance(other, AlgebraicRoot):
            return -other._cmp(self)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return False
        if isinstance(other, Quad):
            try:
                c, d = self._lift(other)
            except MixedRadicals:
                return False
            return self.a == c and self.b == d
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.n))

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __floor__(self):
        k = math.floor(float(self))
        while self < k:
            k -= 1
        while self >= k + 1:
            k += 1
        return k

    def __ceil__(self):
        return -math.floor(-self)

    def __float__(self):
        return float(self.to_mpf(30))

    def to_mpf(self, dps=50):
        with mpmath.workdps(dps + 10):
            return mpmath.mpf(self.a.numerator) / self.a.denominator + mpmath.mpf(
                self.b.numerator
            ) / self.b.denominator * mpmath.sqrt(self.n)

    def __repr__(self):
        return f"Quad({self.a}, {self.b}, {self.n})"

    def __str__(self):
        return f"{self.a}+{self.b}*sqrt({self.n})"


def _sign_ab(a, b, n):
    """Exact sign of a + b*sqrt(n)."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    d = a * a - b * b * n
    sd = (d > 0) - (d < 0)
    return sa * sd


def _sign_numeric(x, y):
    # distinct radicands: x == y is impossible unless both are rational, so
    # refinement terminates
    dps = 30
    while dps < 5000:
        with mpmath.workdps(dps):
            d = to_mpf(x, dps) - to_mpf(y, dps)
            if abs(d) > mpmath.mpf(10) ** (-(dps - 10)):
                return 1 if d > 0 else -1
        dps *= 2
    raise Indeterminate("cannot separate algebraic numbers")


def to_mpf(x, dps=50):
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        with mpmath.workdps(dps + 10):
            return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, Quad):
        return x.to_mpf(dps)
    if isinstance(x, AlgebraicRoot):
        return x.to_mpf(dps)
    raise TypeError(type(x))


def is_exact(x):
    return isinstance(x, (int, Fraction, Quad))


def sqrt_exact(x):
    """Square root of x >= 0 inside Q or a quadratic field, or None."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if x < 0:
            return None
        if x == 0:
            return Fraction(0)
        p, q = x.numerator, x.denominator
        rp, rq = _isqrt_exact(p), _isqrt_exact(q)
        if rp is not None and rq is not None:
            return Fraction(rp, rq)
        return Quad.make(0, Fraction(1, q), p * q)
    if isinstance(x, Quad):
        if x.sign() < 0:
            return None
        # (c + d r)^2 = c^2 + n d^2 + 2cd r, so c^2 and n d^2 solve
        # t^2 - a t + n b^2 / 4 = 0
        disc = x.a * x.a - x.n * x.b * x.b
        rd = sqrt_exact(disc)
        if not isinstance(rd, Fraction):
            return None
        for t in ((x.a + rd) / 2, (x.a - rd) / 2):
            c = sqrt_exact(t)
            if isinstance(c, Fraction) and c != 0:
                d = x.b / (2 * c)
                cand = Quad.make(c, d, x.n)
                if isinstance(cand, Quad) and cand.n != x.n:
                    continue
                if cand * cand == x:
                    return cand if cand >= 0 else -cand
        return None
    raise TypeError(type(x))


class AlgebraicRoot:
    """A simple real root of A x^2 + B x + C isolated in [lo, hi].

    Coefficients live in Q or one quadratic field; lo and hi are rationals at
    which the polynomial takes opposite, nonzero signs.
    """

    __slots__ = ("coeffs", "lo", "hi")

    def __init__(self, coeffs, lo, hi):
        self.coeffs = tuple(coeffs)
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        if self.poly_sign(self.lo) * self.poly_sign(self.hi) >= 0:
            raise ValueError("interval does not isolate a simple root")

    def poly_sign(self, x):
        a, b, c = self.coeffs
        v = (a * x + b) * x + c
        return (v > 0) - (v < 0)

    def refine(self, width):
        width = Fraction(width)
        slo = self.poly_sign(self.lo)
        while self.hi - self.lo > width:
            mid = (self.lo + self.hi) / 2
            s = self.poly_sign(mid)
            if s == 0:
                raise ValueError("polynomial vanishes at a rational point")
            if s == slo:
                self.lo = mid
            else:
                self.hi = mid
        return self

    def _cmp(self, other):
        for _ in range(400):
            if other < self.lo:
                return 1
            if other > self.hi:
                return -1
            self.refine((self.hi - self.lo) / 4)
        raise Indeterminate("cannot separate algebraic root from comparand")

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) < 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) > 0

    def __eq__(self, other):
        if isinstance(other, AlgebraicRoot):
            return self is other or (self.coeffs == other.coeffs and not (self.hi < other.lo or other.hi < self.lo))
        return False

    def __hash__(self):
        return hash(self.coeffs)

    def __float__(self):
        return float((self.lo + self.hi) / 2) if self.hi - self.lo < Fraction(1, 10**12) else float(
            self.refine(Fraction(1, 10**15)).lo
        )

    def to_mpf(self, dps=50):
        self.refine(Fraction(1, 10 ** (dps + 5)))
        with mpmath.workdps(dps + 10):
            return mpmath.mpf(self.lo.numerator) / self.lo.denominator

    def __repr__(self):
        return f"AlgebraicRoot({float(self):.12g} in [{self.lo}, {self.hi}])"


def rational_between(a, b):
    """A rational r with a < r < b, for exact numbers or algebraic roots."""
    if isinstance(a, AlgebraicRoot):
        while True:
            if isinstance(b, AlgebraicRoot):
                if a.hi < b.lo:
                    return (a.hi + b.lo) / 2
                a.refine((a.hi - a.lo) / 4)
                b.refine((b.hi - b.lo) / 4)
            else:
                if a.hi < b:
                    return _rat_between(a.hi, b)
                a.refine((a.hi - a.lo) / 4)
    if isinstance(b, AlgebraicRoot):
        while True:
            if a < b.lo:
                return _rat_between(a, b.lo)
            b.refine((b.hi - b.lo) / 4)
    return _rat_between(a, b)


def _rat_between(a, b):
    """Short rational strictly between exact numbers a < b."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return (a + b) / 2
    # dyadic search between exact values
    fa, fb = float(a), float(b)
    gap = fb - fa
    if gap > 0 and math.isfinite(gap):
        k = max(0, 3 - math.floor(math.log2(gap)))
        while True:
            den = 1 << k
            cand = Fraction(math.floor(((fa + fb) / 2) * den), den)
            if a < cand < b:
                return cand
            for c in (cand + Fraction(1, den), cand - Fraction(1, den)):
                if a < c < b:
                    return c
            k += 4
            if k > 4000:
                break
    # high precision fallback
    dps = 60
    while True:
        with mpmath.workdps(dps):
            m = (to_mpf(a, dps) + to_mpf(b, dps)) / 2
            cand = mpf_to_fraction(m)
        if a < cand < b:
            return cand
        dps *= 2


def mpf_to_fraction(v):
    sign, man, exp, _ = mpmath.mpf(v)._mpf_
    man = -int(man) if sign else int(man)
    if exp >= 0:
        return Fraction(int(man) << exp)
    return Fraction(int(man), 1 << -exp)


# rational literals ------------------------------------------------------

_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text, location=None):
    """Parse "p/q" or "p" exactly; decimals are rejected."""
    if isinstance(text, bool):
        raise ParseError(f"not a rational: {text!r}", location)
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise ParseError(f"not a rational literal: {text!r}", location)
    m = _RAT_RE.match(text)
    if not m:
        if re.match(r"^\s*[+-]?\d*\.\d*(e[+-]?\d+)?\s*$", text, re.I):
            raise ParseError(f"decimal literal {text!r} not allowed in an exact context", location)
        raise ParseError(f"malformed rational {text!r}", location)
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}", location)
    return Fraction(num, den)


def parse_number(obj, location=None):
    """Rational string, "inf", or a quadratic {"p","q","n"} object."""
    if isinstance(obj, str) and obj.strip().lower() == "inf":
        return INF
    if isinstance(obj, dict):
        unknown = set(obj) - {"p", "q", "n"}
        if unknown:
            raise ParseError(f"unknown keys {sorted(unknown)} in quadratic literal", location)
        try:
            n = obj["n"]
        except KeyError:
            raise ParseError("quadratic literal needs 'n'", location) from None
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise ParseError(f"radicand must be a nonnegative integer, got {n!r}", location)
        return Quad.make(parse_rational(obj.get("p", "0"), location), parse_rational(obj.get("q", "0"), location), n)
    return parse_rational(obj, location)


def fmt_rational(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fmt_number(x):
    if x is INF:
        return "inf"
    if isinstance(x, Quad):
        return {"p": fmt_rational(x.a), "q": fmt_rational(x.b), "n": x.n}
    if isinstance(x, AlgebraicRoot):
        return {"lo": fmt_rational(x.lo), "hi": fmt_rational(x.hi)}
    return fmt_rational(x)


@dataclass(frozen=True)
class Enclosure:
    """Closed rational interval [lo, hi]."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    def contains(self, x):
        return self.lo <= x <= self.hi

    def intersects(self, other):
        return not (self.hi < other.lo or other.hi < self.lo)

    def __add__(self, other):
        if isinstance(other, Enclosure):
            return Enclosure(self.lo + other.lo, self.hi + other.hi)
        return Enclosure(self.lo + other, self.hi + other)

    def is_point(self):
        return self.lo == self.hi

    def to_json(self):
        return {"lo": fmt_rational(self.lo), "hi": fmt_rational(self.hi)}

    @classmethod
    def from_json(cls, obj):
        return cls(parse_rational(obj["lo"]), parse_rational(obj["hi"]))

    def __float__(self):
        return float(self.mid)


def exact_enclosure(x):
    if isinstance(x, Fraction):
        return Enclosure(x, x)
    if isinstance(x, AlgebraicRoot):
        return Enclosure(x.lo, x.hi)
    v = to_mpf(x, 40)
    return pad_enclosure(v, 35)


def pad_enclosure(v, digits):
    """Rational enclosure of an mpf value computed with >= digits+10 correct digits."""
    pad = Fraction(1, 10**digits)
    c = mpf_to_fraction(v)
    lo = c - pad
    hi = c + pad
    # round outward to a short denominator
    den = 10 ** (digits + 2)
    return Enclosure(Fraction(math.floor(lo * den), den), Fraction(math.ceil(hi * den), den))
