"""Exact PSL(2,R) elements and their k-fold central lifts."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from . import core
from .core import ANGLE, PROJECTIVE, CirclePoint
from .errors import BadBranch, IdentityMap, MixedRadicals, WrongClass
from .lift import LiftMap, canon, frac_part, mat_adj, mat_mul, quadratic_roots
from .numbers import INF, AlgebraicRoot, Quad, fmt_number, parse_number, sqrt_exact
from .reports import FixedPoint, FixedPointReport, Nature


class MoebiusClass(str, enum.Enum):
    IDENTITY = "Identity"
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"


def _num(v):
    return Fraction(v) if isinstance(v, int) else v


class MoebiusMap:
    """x -> (ax+b)/(cx+d) with ad - bc > 0, taken up to scalar multiples.

    Entries are scaled to determinant 1 whenever the determinant has an exact
    square root in the coefficient field, and the sign is fixed so that the
    first nonzero of (c, d) is positive.
    """

    __slots__ = ("entries",)

    def __init__(self, a, b=None, c=None, d=None):
        if b is None:
            a, b, c, d = _flatten(a)
        a, b, c, d = map(_num, (a, b, c, d))
        det = a * d - b * c
        if det <= 0:
            raise ValueError("Moebius maps must have positive determinant")
        s = None
        try:
            s = sqrt_exact(det)
            if s is not None:
                a, b, c, d = a / s, b / s, c / s, d / s
        except MixedRadicals:
            pass
        lead = c if c != 0 else d
        if lead < 0:
            a, b, c, d = -a, -b, -c, -d
        self.entries = (a, b, c, d)

    # basic --------------------------------------------------------------------

    @property
    def a(self):
        return self.entries[0]

    @property
    def b(self):
        return self.entries[1]

    @property
    def c(self):
        return self.entries[2]

    @property
    def d(self):
        return self.entries[3]

    @property
    def det(self):
        a, b, c, d = self.entries
        return a * d - b * c

    @property
    def trace(self):
        return self.a + self.d

    def __call__(self, x):
        a, b, c, d = self.entries
        if x is INF:
            return INF if c == 0 else a / c
        den = c * x + d
        if den == 0:
            return INF
        return (a * x + b) / den

    def __eq__(self, other):
        if not isinstance(other, MoebiusMap):
            return NotImplemented
        return canon(self.entries) == canon(other.entries)

    def __hash__(self):
        return hash(canon(self.entries))

    def __matmul__(self, other):
        return moebius_compose(self, other)

    def inverse(self):
        return MoebiusMap(*mat_adj(self.entries))

    def power(self, n):
        base = self if n >= 0 else self.inverse()
        out = MoebiusMap(1, 0, 0, 1)
        for _ in range(abs(n)):
            out = moebius_compose(base, out)
        return out

    def is_identity(self):
        a, b, c, d = self.entries
        return b == 0 and c == 0 and a == d

    def as_map(self, label=None):
        from .piecewise import moebius_map

        return moebius_map(self.entries, label=label)

    def to_json(self):
        a, b, c, d = self.entries
        return [[fmt_number(a), fmt_number(b)], [fmt_number(c), fmt_number(d)]]

    @classmethod
    def from_json(cls, obj):
        (a, b), (c, d) = obj
        return cls(*(parse_number(v) for v in (a, b, c, d)))

    def __repr__(self):
        a, b, c, d = self.entries
        return f"MoebiusMap([[{a}, {b}], [{c}, {d}]])"


def _flatten(m):
    if len(m) == 2:
        (a, b), (c, d) = m
        return a, b, c, d
    return tuple(m)


def moebius_compose(m1: MoebiusMap, m2: MoebiusMap) -> MoebiusMap:
    """m1 o m2."""
    return MoebiusMap(*mat_mul(m1.entries, m2.entries))


def moebius_classify(m: MoebiusMap) -> MoebiusClass:
    if m.is_identity():
        return MoebiusClass.IDENTITY
    t2 = m.trace * m.trace
    four_det = 4 * m.det
    if t2 < four_det:
        return MoebiusClass.ELLIPTIC
    if t2 == four_det:
        return MoebiusClass.PARABOLIC
    return MoebiusClass.HYPERBOLIC


def moebius_fixed_points(m: MoebiusMap) -> FixedPointReport:
    """Roots of c x^2 + (d-a) x - b on the projective line, with their natures."""
    if m.is_identity():
        raise IdentityMap("the identity fixes every point")
    a, b, c, d = m.entries
    pts = []
    if c == 0:
        pts.append(INF)
        if d != a:
            pts.append(b / (d - a))
    else:
        rs = quadratic_roots(c, d - a, -b)
        pts.extend(rs)
    det = m.det
    out = []
    if len(pts) == 2:
        for x in pts:
            # derivative at x is det / (cx+d)^2; at INF it is d^2 / det
            if x is INF:
                attracting = d * d < det
            elif isinstance(x, AlgebraicRoot):
                attracting = _attracting_numeric(m, x)
            else:
                den = c * x + d
                attracting = den * den > det
            out.append(FixedPoint(CirclePoint(PROJECTIVE, x), Nature.ATTRACTING if attracting else Nature.REPELLING))
    elif len(pts) == 1:
        x = pts[0]
        out.append(FixedPoint(CirclePoint(PROJECTIVE, x), _parabolic_direction(m, x)))
    return FixedPointReport(points=sorted(out, key=lambda fp: _proj_key(fp.point.coord)))


def _parabolic_direction(m, x):
    """Every non-fixed point moves the same way around the circle."""
    F = m.as_map().lift
    u = core.to_rational_angle(x)
    p = 0 if F.roots(Fraction(0))[0] else 1
    probe = frac_part(u + Fraction(1, 2))
    s = F.displacement_sign(probe, p)
    return Nature.PARABOLIC_ABOVE if s > 0 else Nature.PARABOLIC_BELOW


def _proj_key(x):
    return (0, 0.0) if x is INF else (1, float(x))


def _attracting_numeric(m, x):
    import mpmath

    a, b, c, d = m.entries
    with mpmath.workdps(60):
        xv = x.to_mpf(60)
        den = core.to_mpf(c, 60) * xv + core.to_mpf(d, 60)
        return den * den > core.to_mpf(m.det, 60)


# rotations with an exact tangent of half the angle ------------------------------


def _tan_table():
    s2 = Quad.make(0, 1, 2)
    s3 = Quad.make(0, 1, 3)
    return {
        Fraction(1, 4): Fraction(1),
        Fraction(1, 8): s2 - 1,
        Fraction(3, 8): s2 + 1,
        Fraction(1, 6): s3 / 3,
        Fraction(1, 3): s3,
        Fraction(1, 12): 2 - s3,
        Fraction(5, 12): 2 + s3,
    }


def projective_rotation(t):
    """Matrix of the angle rotation by t in the projective chart, when exact.

    The tan chart turns theta -> theta + t into the rotation matrix by angle
    pi*t, that is [[1, tan], [-tan, 1]] up to scale.
    """
    if not isinstance(t, Fraction):
        return None
    t = t - math.floor(t)
    if t == 0:
        return MoebiusMap(1, 0, 0, 1)
    if t == Fraction(1, 2):
        return MoebiusMap(0, 1, -1, 0)
    table = _tan_table()
    if t > Fraction(1, 2):
        inner = projective_rotation(1 - t)
        return None if inner is None else inner.inverse()
    if t not in table:
        return None
    tan = table[t]
    return MoebiusMap(1, tan, -tan, 1)


def elliptic_rotation_number(m: MoebiusMap, tol=Fraction(1, 10**6)):
    from .rotation import rotation_number

    if moebius_classify(m) != MoebiusClass.ELLIPTIC:
        raise WrongClass("rotation numbers are computed here for elliptic elements only")
    # finite order up to 24 is detected exactly by powers
    p = m
    for n in range(1, 25):
        if p.is_identity():
            return rotation_number(m.as_map(), q_cap=n)
        p = moebius_compose(m, p)
    return rotation_number(m.as_map(), q_cap=10**9, width=Fraction(tol))


# k-fold central extension ---------------------------------------------------------


@dataclass(frozen=True)
class PSLkElement:
    base: MoebiusMap
    k: int
    branch: int

    @property
    def lift(self) -> LiftMap:
        F = self.base.as_map().lift
        return F.conj_scale(self.k, self.branch)

    def fixed_points(self) -> FixedPointReport:
        """Fixed points on the covering circle (angle coordinate of the cover)."""
        from .analysis import lift_fixed_points

        return lift_fixed_points(self.lift, ANGLE)

    def commutes_with_deck(self) -> bool:
        """Exact check that the lift commutes with translation by 1/k."""
        t = LiftMap.translation(Fraction(1, self.k))
        F = self.lift
        return F.compose(t) == t.compose(F)


def pslk_make(base: MoebiusMap, k: int, branch: int) -> PSLkElement:
    if k < 1:
        raise BadBranch("degree must be positive")
    if not 0 <= branch < k:
        raise BadBranch(f"branch {branch} outside [0, {k})")
    return PSLkElement(base, k, branch)


def pslk_evaluate(e: PSLkElement, x) -> CirclePoint:
    """Image of a point of the covering circle, in its angle coordinate."""
    if isinstance(x, CirclePoint):
        x = x.coord
    return CirclePoint(ANGLE, frac_part(e.lift(Fraction(x) if isinstance(x, int) else x)))


__all__ = [
    "MoebiusMap",
    "MoebiusClass",
    "moebius_compose",
    "moebius_classify",
    "moebius_fixed_points",
    "elliptic_rotation_number",
    "projective_rotation",
    "PSLkElement",
    "pslk_make",
    "pslk_evaluate",
]
