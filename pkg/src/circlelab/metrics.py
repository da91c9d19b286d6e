"""The uniform distances d_inf, d_C0 and the positivity predicate."""

from __future__ import annotations

import heapq
import math
from fractions import Fraction

from . import core
from . import piecewise as pw
from .core import CircleInterval
from .errors import Indeterminate
from .lift import shift_number
from .numbers import Enclosure, INF, rational_between

HALF = Fraction(1, 2)


def arc_dist(t):
    """Distance from t to the nearest integer (arc distance of a displacement)."""
    r = t - math.floor(t)
    return min(r, 1 - r)


def _range_max_dist(lo, hi):
    if hi - lo >= 1 or math.floor(lo - HALF) != math.floor(hi - HALF):
        return HALF
    return max(arc_dist(lo), arc_dist(hi))


def _range_min_dist(lo, hi):
    if math.floor(lo) != math.floor(hi) or lo == math.floor(lo):
        return Fraction(0)
    return min(arc_dist(lo), arc_dist(hi))


def _affine_distance(F, G):
    xs = sorted(set(F.knots) | set(G.knots) | {Fraction(0)})
    vals = [F(x) - G(x) for x in xs]
    vals.append(vals[0])  # the difference of lifts is 1-periodic
    best = Fraction(0)
    for v0, v1 in zip(vals, vals[1:]):
        best = max(best, _range_max_dist(min(v0, v1), max(v0, v1)))
    return best


def distance_inf(f, g, tol=Fraction(1, 10**6), max_boxes=200000) -> Enclosure:
    """Enclosure of sup_x d(f(x), g(x)) in the angle chart, of width <= tol."""
    tol = Fraction(tol)
    if f.universe == pw.PW_AFFINE and g.universe == pw.PW_AFFINE:
        v = _affine_distance(f.lift, g.lift)
        return Enclosure(v, v)
    if f.is_exact and g.is_exact and f.universe == g.universe and f == g:
        return Enclosure(Fraction(0), Fraction(0))
    F, G = f.to_numeric(), g.to_numeric()
    return _sup_dist(F, G, tol, max_boxes)


def _sup_dist(F, G, tol, max_boxes):
    w = tol / 64
    cache = {}

    def pt(x):
        if x not in cache:
            cache[x] = (F.enclose(x, w), G.enclose(x, w))
        return cache[x]

    def lower(x):
        a, b = pt(x)
        return _range_min_dist(a.lo - b.hi, a.hi - b.lo)

    def upper(a, b):
        fa, ga = pt(a)
        fb, gb = pt(b)
        return _range_max_dist(fa.lo - gb.hi, fb.hi - ga.lo)

    n0 = 32
    grid = [Fraction(i, n0) for i in range(n0 + 1)]
    lb = max(lower(x) for x in grid)
    heap = []
    for a, b in zip(grid, grid[1:]):
        heapq.heappush(heap, (-upper(a, b), a, b))
    boxes = 0
    while heap:
        u, a, b = heap[0]
        ub = -u
        if ub - lb <= tol or boxes >= max_boxes:
            return Enclosure(min(lb, ub), max(lb, ub))
        heapq.heappop(heap)
        m = (a + b) / 2
        lb = max(lb, lower(m))
        for lo, hi in ((a, m), (m, b)):
            v = upper(lo, hi)
            if v > lb:
                heapq.heappush(heap, (-v, lo, hi))
        boxes += 1
    return Enclosure(lb, lb)


def distance_c0(f, g, tol=Fraction(1, 10**6)) -> Enclosure:
    """d_C0(f, g) = d_inf(f, g) + d_inf(f^-1, g^-1)."""
    return distance_inf(f, g, tol) + distance_inf(f.inverse(), g.inverse(), tol)


def distance_to_identity(f, tol=Fraction(1, 10**6)) -> Enclosure:
    universe = f.universe if f.is_exact else pw.NUMERIC
    if universe == pw.PW_MOEBIUS:
        universe = pw.NUMERIC
    return distance_inf(f, pw.identity(universe), tol)


# --- positivity -------------------------------------------------------------------


def _arc_to_lift_range(f, on: CircleInterval):
    """Endpoints of an arc in the coordinate of f's lift, as (uL, uR) with uL < uR."""

    def coord(p):
        if p.chart != f.chart:
            raise ValueError("arc must be given in the map's chart")
        c = p.coord
        if f.universe == pw.PW_MOEBIUS:
            return core.to_rational_angle(c)
        return c

    uL, uR = coord(on.left), coord(on.right)
    if uR <= uL:
        uR += 1
    return uL, uR


def _zero_in_range(F, p, uL, uR):
    pts, arcs = F.roots(p)
    for k in (-1, 0, 1, 2):
        for r in pts:
            if uL < shift_number(r, k) < uR:
                return True
        for a0, a1 in arcs:
            if a1 + k > uL and a0 + k < uR:
                return True
    return False


def is_positive(f, on: CircleInterval | None = None, max_boxes=20000) -> bool:
    """f(x) lies strictly between x and its antipode, for every x (of the arc)."""
    if f.is_exact:
        F = f.lift
        if on is None:
            uL, uR = Fraction(0), Fraction(1)
            probe = Fraction(0)
        else:
            if on.is_empty:
                return True
            uL, uR = _arc_to_lift_range(f, on)
            probe = rational_between(uL, uR)
        d = F(probe) - probe
        k = math.floor(d)
        if not (Fraction(0) < d - k < HALF):
            return False
        if on is None:
            return not (_has_zero(F, k) or _has_zero(F, k + HALF))
        return not (_zero_in_range(F, k, uL, uR) or _zero_in_range(F, k + HALF, uL, uR))
    return _numeric_positive(f.to_numeric(), on, max_boxes)


def _has_zero(F, p):
    pts, arcs = F.roots(p)
    return bool(pts or arcs)


def _numeric_positive(F, on, max_boxes):
    if on is None:
        a0, b0 = Fraction(0), Fraction(1)
    else:
        l, r = on.left, on.right
        if l.chart != core.ANGLE:
            l = core.chart_convert(l, core.ANGLE)
            r = core.chart_convert(r, core.ANGLE)
        a0 = l.coord if not isinstance(l.coord, Enclosure) else l.coord.hi
        b0 = r.coord if not isinstance(r.coord, Enclosure) else r.coord.lo
        if b0 <= a0:
            b0 += 1
    w = Fraction(1, 10**15)
    e = F.enclose((a0 + b0) / 2, w)
    d = e.mid - (a0 + b0) / 2
    k = math.floor(d)
    stack = [(a0, b0)]
    boxes = 0
    while stack:
        a, b = stack.pop()
        fa, fb = F.enclose(a, w), F.enclose(b, w)
        lo, hi = fa.lo - b - k, fb.hi - a - k
        if lo > 0 and hi < HALF:
            continue
        m = (a + b) / 2
        em = F.enclose(m, w)
        if em.hi - m - k <= 0 or em.lo - m - k >= HALF:
            return False
        boxes += 1
        if boxes > max_boxes:
            raise Indeterminate("positivity not decided", hint="raise the subdivision budget")
        stack.extend([(a, m), (m, b)])
    return True


__all__ = ["distance_inf", "distance_c0", "distance_to_identity", "is_positive", "arc_dist", "INF"]
