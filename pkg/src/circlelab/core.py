"""Points, arcs and charts on the circle T = R/Z.

Two charts are exposed:

* ``ANGLE``: coordinate theta in [0, 1).
* ``PROJECTIVE``: the real projective line with ``INF``; identified with the
  angle chart by theta -> tan(pi*(theta - 1/2)), theta = 0 -> INF.  This
  identification turns the half-turn theta -> theta + 1/2 into x -> -1/x.

Exact maps in the projective chart are analysed through a second, rational
identification (``to_rational_angle``), a two-piece Moebius homeomorphism that
also conjugates x -> -1/x to the half-turn.  Rotation numbers, fixed-point
counts and orders are conjugacy invariants, so nothing combinatorial depends on
which of the two identifications is used; metric quantities always go through
the tan chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DegenerateTriple, Indeterminate
from .numbers import (
    INF,
    AlgebraicRoot,
    Enclosure,
    Quad,
    fmt_number,
    mpf_to_fraction,
    parse_number,
    to_mpf,
)

ANGLE = "angle"
PROJECTIVE = "projective"
CHARTS = (ANGLE, PROJECTIVE)


@dataclass(frozen=True)
class CirclePoint:
    chart: str
    coord: object

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}")
        c = self.coord
        if c is INF:
            if self.chart != PROJECTIVE:
                raise ValueError("INF only exists in the projective chart")
        elif isinstance(c, int):
            object.__setattr__(self, "coord", Fraction(c))
            c = self.coord
        if self.chart == ANGLE and isinstance(c, (Fraction, Quad)):
            if not 0 <= c < 1:
                object.__setattr__(self, "coord", c - math.floor(c))

    @classmethod
    def angle(cls, x):
        return cls(ANGLE, x)

    @classmethod
    def proj(cls, x):
        return cls(PROJECTIVE, x)

    @property
    def is_exact(self):
        return not isinstance(self.coord, (Enclosure, AlgebraicRoot))

    def to_json(self):
        c = self.coord
        if isinstance(c, Enclosure):
            c = c.to_json()
        else:
            c = fmt_number(c)
        return {"chart": self.chart, "coord": c}

    @classmethod
    def from_json(cls, obj):
        c = obj["coord"]
        if isinstance(c, dict) and "lo" in c:
            c = Enclosure.from_json(c)
        else:
            c = parse_number(c)
        return cls(obj["chart"], c)

    def __str__(self):
        c = self.coord
        if isinstance(c, Enclosure):
            return f"[{c.lo}, {c.hi}]"
        return str(c)


def _key(p: CirclePoint):
    """Position along the circle from the base point (0, resp. INF)."""
    c = p.coord
    if p.chart == PROJECTIVE:
        if c is INF:
            return (0, Fraction(0))
        return (1, c)
    return (0, c)


def _key_lt(a, b):
    if a[0] != b[0]:
        return a[0] < b[0]
    x, y = a[1], b[1]
    if isinstance(x, Enclosure) or isinstance(y, Enclosure):
        xl, xh = (x.lo, x.hi) if isinstance(x, Enclosure) else (x, x)
        yl, yh = (y.lo, y.hi) if isinstance(y, Enclosure) else (y, y)
        if xh < yl:
            return True
        if yh < xl:
            return False
        raise Indeterminate("overlapping enclosures", hint="refine the points")
    return x < y


def _same(a, b):
    if a[0] != b[0]:
        return False
    x, y = a[1], b[1]
    if isinstance(x, Enclosure) or isinstance(y, Enclosure):
        return False
    return x == y


def circular_order(x: CirclePoint, y: CirclePoint, z: CirclePoint) -> bool:
    """True iff (x, y, z) is positively ordered on the circle."""
    chart = x.chart
    if y.chart != chart or z.chart != chart:
        y = chart_convert(y, chart)
        z = chart_convert(z, chart)
    kx, ky, kz = _key(x), _key(y), _key(z)
    if _same(kx, ky) or _same(ky, kz) or _same(kx, kz):
        raise DegenerateTriple("circular order needs three distinct points")
    a = _key_lt(kx, ky)
    b = _key_lt(ky, kz)
    c = _key_lt(kz, kx)
    # exactly two of the three cyclic comparisons hold for a positive triple
    return (a + b + c) == 2


@dataclass(frozen=True)
class CircleInterval:
    """The open arc of points z with (left, z, right) positively ordered."""

    left: CirclePoint
    right: CirclePoint

    @property
    def chart(self):
        return self.left.chart

    @property
    def is_empty(self):
        return self.left == self.right

    def contains(self, z: CirclePoint) -> bool:
        if self.is_empty:
            return False
        if z == self.left or z == self.right:
            return False
        return circular_order(self.left, z, self.right)

    def length(self):
        """Angle-chart length as an exact rational (angle chart only)."""
        if self.chart != ANGLE:
            raise ValueError("length is measured in the angle chart")
        a, b = self.left.coord, self.right.coord
        if a == b:
            return Fraction(0)
        return (b - a) % 1


# --- the fixed tan identification ------------------------------------------


def _digits_for(width):
    width = Fraction(width)
    if width <= 0:
        raise ValueError("precision must be positive")
    return max(40, int(-math.log10(width)) + 25 if width < 1 else 40)


_EXACT_TAN = {
    Fraction(0): INF,
    Fraction(1, 4): Fraction(-1),
    Fraction(1, 2): Fraction(0),
    Fraction(3, 4): Fraction(1),
}
_EXACT_ATAN = {v: k for k, v in _EXACT_TAN.items()}


def _enc(v, digits):
    pad = Fraction(1, 10**digits)
    c = mpf_to_fraction(v)
    den = 10 ** (digits + 3)
    return Enclosure(Fraction(math.floor((c - pad) * den), den), Fraction(math.ceil((c + pad) * den), den))


def angle_to_projective(theta, precision=Fraction(1, 10**12)):
    """Coordinate of an exact angle in the projective chart (exact or Enclosure)."""
    theta = theta - math.floor(theta)
    if isinstance(theta, Fraction) and theta in _EXACT_TAN:
        return _EXACT_TAN[theta]
    digits = _digits_for(precision)
    with mpmath.workdps(digits + 20):
        v = -mpmath.cot(mpmath.pi * to_mpf(theta, digits + 20))
        return _enc(v, digits)


def projective_to_angle(x, precision=Fraction(1, 10**12)):
    """Angle in [0,1) of a projective point (exact or Enclosure)."""
    if x is INF:
        return Fraction(0)
    if isinstance(x, Fraction) and x in _EXACT_ATAN:
        return _EXACT_ATAN[x]
    digits = _digits_for(precision)
    with mpmath.workdps(digits + 20):
        v = mpmath.mpf(1) / 2 + mpmath.atan(to_mpf(x, digits + 20)) / mpmath.pi
        return _enc(v, digits)


def chart_convert(p: CirclePoint, target: str, precision=Fraction(1, 10**12)) -> CirclePoint:
    """Image of p under the fixed tan identification, as exact value or enclosure."""
    if p.chart == target:
        return p
    c = p.coord
    conv = angle_to_projective if target == PROJECTIVE else projective_to_angle
    if isinstance(c, (Enclosure, AlgebraicRoot)):
        lo, hi = (c.lo, c.hi)
        a = conv(lo, precision)
        b = conv(hi, precision)
        if a is INF or b is INF:
            raise Indeterminate("enclosure touches the chart base point")
        alo = a.lo if isinstance(a, Enclosure) else a
        bhi = b.hi if isinstance(b, Enclosure) else b
        if alo > bhi:
            raise Indeterminate("enclosure wraps around the chart base point")
        return CirclePoint(target, Enclosure(alo, bhi))
    return CirclePoint(target, conv(c, precision))


def tan_angle_to_rational_angle(theta, digits=40) -> Enclosure:
    """Enclosure of u = phi(tan(pi(theta - 1/2))) for theta in [0,1) (lift-periodic)."""
    k = math.floor(theta)
    t = theta - k
    if isinstance(t, Fraction) and t in _EXACT_TAN:
        x = _EXACT_TAN[t]
        u = to_rational_angle(x)
        return Enclosure(u + k, u + k)
    with mpmath.workdps(digits + 20):
        c = mpmath.cot(mpmath.pi * to_mpf(t, digits + 20))
        # x = -c
        if c >= 0:
            u = 1 / (2 * (1 + c))
        else:
            x = -c
            u = (1 + 2 * x) / (2 * (1 + x))
        e = _enc(u, digits)
    return Enclosure(e.lo + k, e.hi + k)


def rational_angle_to_tan_angle(u, digits=40) -> Enclosure:
    """Enclosure of the tan-chart angle of the point with rational-chart angle u."""
    k = math.floor(u)
    t = u - k
    x = from_rational_angle(t)
    if x is INF:
        return Enclosure(Fraction(k), Fraction(k))
    if isinstance(x, Fraction) and x in _EXACT_ATAN:
        v = _EXACT_ATAN[x]
        return Enclosure(v + k, v + k)
    with mpmath.workdps(digits + 20):
        e = _enc(mpmath.mpf(1) / 2 + mpmath.atan(to_mpf(x, digits + 20)) / mpmath.pi, digits)
    return Enclosure(e.lo + k, e.hi + k)


# --- rational identification used by the exact engine ----------------------

# x in [0, INF]  ->  u = (2x + 1) / (2x + 2)  in [1/2, 1]
# x in [INF, 0]  ->  u = 1 / (2 - 2x)         in [0, 1/2]
PHI_POS = (Fraction(2), Fraction(1), Fraction(2), Fraction(2))
PHI_NEG = (Fraction(0), Fraction(1), Fraction(-2), Fraction(2))
PHI_POS_INV = (Fraction(2), Fraction(-1), Fraction(-2), Fraction(2))
PHI_NEG_INV = (Fraction(2), Fraction(-1), Fraction(2), Fraction(0))


def to_rational_angle(x):
    """Exact rational-chart angle in [0,1) of a projective point."""
    if x is INF:
        return Fraction(0)
    if isinstance(x, int):
        x = Fraction(x)
    if x >= 0:
        return (2 * x + 1) / (2 * x + 2)
    return 1 / (2 - 2 * x)


def from_rational_angle(u):
    """Inverse of ``to_rational_angle`` for u in [0,1)."""
    if u == 0:
        return INF
    if isinstance(u, int):
        u = Fraction(u)
    if u >= Fraction(1, 2):
        return (2 * u - 1) / (2 - 2 * u)
    return (2 * u - 1) / (2 * u)
