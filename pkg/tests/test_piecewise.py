from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from circlelab import piecewise as pw
from circlelab.constructions import build_theorem_b
from circlelab.core import ANGLE, CirclePoint
from circlelab.errors import BadWord, UniverseMismatch
from circlelab.numbers import INF

from oracles import FloatLift, random_pl

G = build_theorem_b()


def ev(f, x):
    return pw.pw_evaluate(f, x).coord


def test_theorem_b_generators_on_points():
    assert ev(G.f, 1) == 2
    assert ev(G.g, 1) == Fraction(1, 3)
    assert ev(G.f, -1) == -3
    assert ev(G.f, 0) == 0
    assert ev(G.f, INF) is INF
    assert ev(G.R, 0) is INF


def test_commuting_generators_and_inverse_rotation():
    assert G.f.compose(G.g) == G.g.compose(G.f)
    assert pw.rigid(Fraction(1, 3)).inverse() == pw.rigid(Fraction(2, 3))


def test_redundant_breakpoint_is_invisible():
    plain = pw.pw_moebius([0, INF], [(2, 0, 0, 1), (3, 0, 0, 1)])
    extra = pw.pw_moebius([0, 1, INF], [(2, 0, 0, 1), (2, 0, 0, 1), (3, 0, 0, 1)])
    assert plain == extra
    assert extra.piece_count() == 2


def test_words():
    names = ["f", "g", "R"]
    gens = [G.f, G.g, G.R]
    w = pw.GroupWord.parse("f g f^-1 g^-1", names)
    assert pw.word_to_map(gens, w).is_identity()
    fR = pw.word_to_map(gens, pw.GroupWord.parse("f R f R", names))
    assert fR == G.f.compose(G.g)
    assert pw.GroupWord.parse("f f^-1", names).letters == ()
    with pytest.raises(BadWord):
        pw.GroupWord.parse("h", names)
    with pytest.raises(BadWord):
        pw.GroupWord(((0, 2),))


def test_lift_iterate():
    r = pw.rigid(Fraction(1, 3))
    assert pw.lift_iterate(r, 0, 3) == 1
    assert pw.lift_iterate(r, Fraction(5, 6), 1) == Fraction(7, 6)
    f = random_pl(random.Random(5))
    x = Fraction(2, 7)
    assert pw.lift_iterate(f, x + 1, 10) - pw.lift_iterate(f, x, 10) == 1
    assert pw.lift_iterate(f, pw.lift_iterate(f, x, 4), -4) == x


def test_universe_mismatch():
    with pytest.raises(UniverseMismatch):
        pw.pw_evaluate(G.f, CirclePoint(ANGLE, Fraction(1, 3)))


def test_numeric_rigid_evaluation():
    e = pw.pw_evaluate(pw.rigid(Fraction(1, 3), pw.NUMERIC), Fraction(1, 2)).coord
    assert e.lo <= Fraction(5, 6) <= e.hi


@given(st.integers(0, 10**6))
def test_group_laws(seed):
    rng = random.Random(seed)
    f, g, h = (random_pl(rng) for _ in range(3))
    assert f.compose(g).compose(h) == f.compose(g.compose(h))
    assert f.compose(f.inverse()).is_identity()
    assert f.inverse().compose(f).is_identity()
    assert f.compose(pw.identity()) == f


@given(st.integers(0, 10**6))
def test_composition_matches_float_oracle(seed):
    import numpy as np

    rng = random.Random(seed)
    f, g = random_pl(rng), random_pl(rng)
    xs = np.linspace(0, 1, 257)
    a = FloatLift(f)(FloatLift(g)(xs))
    b = FloatLift(f.compose(g))(xs)
    d = a - b
    assert np.allclose(d, np.round(d[0]), atol=1e-9)


@given(st.integers(0, 10**6))
def test_piece_count_bound(seed):
    rng = random.Random(seed)
    f, g = random_pl(rng), random_pl(rng)
    assert f.compose(g).piece_count() <= f.piece_count() + g.piece_count()
