from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from circlelab import piecewise as pw
from circlelab.core import (
    ANGLE,
    PROJECTIVE,
    CircleInterval,
    CirclePoint,
    chart_convert,
    circular_order,
    from_rational_angle,
    to_rational_angle,
)
from circlelab.errors import DegenerateTriple, ParseError
from circlelab.metrics import distance_c0, distance_inf, is_positive
from circlelab.numbers import INF, Enclosure, mpf_to_fraction, parse_rational

from oracles import FloatLift, random_pl

angles = st.fractions(min_value=0, max_value=Fraction(96, 97), max_denominator=97)


def A(x):
    return CirclePoint(ANGLE, Fraction(x))


def test_order_examples():
    assert circular_order(A(0), A(Fraction(1, 4)), A(Fraction(1, 2)))
    assert not circular_order(A(0), A(Fraction(1, 2)), A(Fraction(1, 4)))
    P = lambda x: CirclePoint(PROJECTIVE, x)  # noqa: E731
    assert circular_order(P(Fraction(0)), P(Fraction(1)), P(INF))


def test_order_degenerate():
    with pytest.raises(DegenerateTriple):
        circular_order(A(0), A(0), A(Fraction(1, 2)))


@given(angles, angles, angles)
def test_order_cyclic_and_antisymmetric(x, y, z):
    if len({x, y, z}) < 3:
        return
    a, b, c = A(x), A(y), A(z)
    o = circular_order(a, b, c)
    assert circular_order(b, c, a) == o
    assert circular_order(b, a, c) == (not o)


def test_chart_examples():
    assert chart_convert(A(Fraction(1, 2)), PROJECTIVE).coord == 0
    assert chart_convert(A(0), PROJECTIVE).coord is INF
    e = chart_convert(A(Fraction(1, 3)), PROJECTIVE, Fraction(1, 10**6)).coord
    assert e.width <= Fraction(1, 10**6)
    # oracle: tan(pi (1/3 - 1/2)) = -1/sqrt 3
    with mpmath.workdps(40):
        v = -1 / mpmath.sqrt(3)
        assert e.lo - Fraction(1, 10**30) <= mpf_to_fraction(v) <= e.hi + Fraction(1, 10**30)
    assert chart_convert(A(Fraction(3, 4)), PROJECTIVE).coord == 1


@given(angles)
def test_chart_round_trip(x):
    p = chart_convert(A(x), PROJECTIVE, Fraction(1, 10**9))
    if p.coord is INF:
        assert x == 0
        return
    back = chart_convert(p, ANGLE, Fraction(1, 10**9)).coord
    if isinstance(back, Enclosure):
        assert back.lo <= x <= back.hi
    else:
        assert back == x


@given(st.fractions(min_value=-50, max_value=50, max_denominator=50))
def test_rational_chart_inverse(x):
    u = to_rational_angle(x)
    assert 0 <= u < 1
    assert from_rational_angle(u) == x


def test_interval_membership():
    I = CircleInterval(A(Fraction(3, 4)), A(Fraction(1, 4)))
    assert I.contains(A(0))
    assert not I.contains(A(Fraction(1, 2)))
    assert not CircleInterval(A(0), A(0)).contains(A(Fraction(1, 2)))
    assert I.length() == Fraction(1, 2)


def test_decimal_literals_rejected():
    assert parse_rational("2/3") == Fraction(2, 3)
    with pytest.raises(ParseError):
        parse_rational("0.5")


# --- metrics ---------------------------------------------------------------------


def test_distance_examples():
    r13, r14 = pw.rigid(Fraction(1, 3)), pw.rigid(Fraction(1, 4))
    assert distance_inf(r13, pw.identity()) == Enclosure(Fraction(1, 3), Fraction(1, 3))
    assert distance_inf(r13, r14) == Enclosure(Fraction(1, 12), Fraction(1, 12))
    assert distance_c0(r13, pw.identity()) == Enclosure(Fraction(2, 3), Fraction(2, 3))
    assert distance_c0(r13, r13).hi == 0


def test_distance_projective_against_sampling():
    import numpy as np

    f = pw.moebius_map((2, 0, 0, Fraction(1, 2)))  # x -> 4x
    tol = Fraction(1, 10**4)
    e = distance_inf(f, pw.identity(pw.NUMERIC), tol)
    assert e.width <= tol
    th = np.linspace(0, 1, 10**6, endpoint=False)[1:]
    x = -1 / np.tan(np.pi * th)
    th2 = 0.5 + np.arctan(4 * x) / np.pi
    d = np.abs(th2 - th)
    sampled = float(np.max(np.minimum(d, 1 - d)))
    assert float(e.lo) - 1e-6 <= sampled <= float(e.hi) + 1e-6


def test_distance_random_pl_against_sampling():
    import random

    import numpy as np

    rng = random.Random(3)
    xs = np.linspace(0, 1, 200001)
    for _ in range(5):
        f, g = random_pl(rng), random_pl(rng)
        e = distance_inf(f, g)
        d = FloatLift(f)(xs) - FloatLift(g)(xs)
        d = np.abs(d - np.round(d))
        assert abs(float(np.max(d)) - float(e.mid)) < 1e-4


@given(st.integers(0, 10**6))
def test_distance_symmetric_triangle(seed):
    import random

    rng = random.Random(seed)
    f, g, h = random_pl(rng), random_pl(rng), random_pl(rng)
    assert distance_inf(f, g) == distance_inf(g, f)
    assert distance_inf(f, h).lo <= distance_inf(f, g).hi + distance_inf(g, h).hi


def test_positivity_examples():
    from circlelab.constructions import build_theorem_b

    assert is_positive(pw.rigid(Fraction(1, 3)))
    assert not is_positive(pw.rigid(Fraction(1, 2)))
    assert not is_positive(build_theorem_b().f)


@given(st.integers(0, 10**6))
def test_positive_maps_compose(seed):
    import random

    from circlelab.analysis import fixed_points_report
    from circlelab.rotation import random_positive_pl

    rng = random.Random(seed)
    f = random_positive_pl(Fraction(1, 2), rng)
    g = random_positive_pl(Fraction(1, 2), rng)
    assert is_positive(f) and is_positive(g)
    assert fixed_points_report(f).count == 0
    fg = f.compose(g)
    if distance_inf(fg, pw.identity()).hi < Fraction(1, 2):
        assert is_positive(fg)


@given(angles, angles, angles, st.integers(0, 10**6))
def test_order_preserved_by_maps(x, y, z, seed):
    import random

    if len({x, y, z}) < 3:
        return
    f = random_pl(random.Random(seed))
    img = [CirclePoint(ANGLE, f.lift(v) - math.floor(f.lift(v))) for v in (x, y, z)]
    assert circular_order(*img) == circular_order(A(x), A(y), A(z))
