from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from circlelab import analysis as A
from circlelab import piecewise as pw
from circlelab.constructions import build_theorem_b
from circlelab.core import ANGLE, CircleInterval, CirclePoint
from circlelab.errors import DegenerateCoincidence, NotElementary
from circlelab.moebius import MoebiusClass, MoebiusMap, moebius_classify
from circlelab.numbers import INF
from circlelab.reports import Nature

from oracles import FloatLift, grid_crossings, random_pl, random_sl2

G = build_theorem_b()
FG = G.f.compose(G.g)
NAMES = ["f", "R"]


def coords(rep):
    return {p.point.coord for p in rep.points}


def test_fixed_points_of_generators():
    rep = A.fixed_points_report(G.f)
    assert coords(rep) == {0, INF}
    assert {p.nature for p in rep.points} == {Nature.REPELLING, Nature.ATTRACTING}
    assert coords(A.fixed_points_report(FG)) == {0, INF}


def test_classification():
    assert A.classify_element(G.f) == "HyperbolicLike"
    assert A.classify_element(FG) == "NotMoebiusLike"
    e = G.f.compose(G.g.inverse()).compose(G.R)
    c = A.classify_element(e)
    assert c == "EllipticLike" and c.rot.value == Fraction(1, 2)
    assert A.classify_element(e.compose(e)) == "Trivial"
    assert A.classify_element(pw.rigid(Fraction(2, 7))) == "EllipticLike"


def test_classify_irrational_is_unknown():
    from circlelab.constructions import golden_denjoy

    c = A.classify_element(golden_denjoy().original, q_cap=200)
    assert c == "Unknown" and c.evidence


@given(st.integers(0, 10**6))
def test_classify_agrees_with_matrix_class(seed):
    m = MoebiusMap(*random_sl2(random.Random(seed)))
    expect = {
        MoebiusClass.IDENTITY: "Trivial",
        MoebiusClass.ELLIPTIC: "EllipticLike",
        MoebiusClass.PARABOLIC: "ParabolicLike",
        MoebiusClass.HYPERBOLIC: "HyperbolicLike",
    }[moebius_classify(m)]
    c = A.classify_element(pw.moebius_map(m.entries))
    if expect == "EllipticLike" and c == "Unknown":
        return  # irrational elliptic: rotation stays an enclosure
    assert c == expect


def test_crossing_examples():
    assert A.crossing_report(pw.rigid(Fraction(1, 3)), pw.identity()).count == 0
    assert A.crossing_report(G.f, pw.identity(pw.PW_MOEBIUS)).count == 2
    with pytest.raises(DegenerateCoincidence):
        A.crossing_report(G.f, G.f)


@given(st.integers(0, 10**6))
def test_crossings_against_grid(seed):
    rng = random.Random(seed)
    denom = rng.choice((32, 80))
    f, g = random_pl(rng, denom=denom), random_pl(rng, denom=denom)
    if f == g:
        return
    rep = A.crossing_report(f, g)
    if not rep.degenerate:
        assert rep.count == grid_crossings(f, g)


def test_word_ball_theorem_b():
    rep = A.word_ball_max_fixed(G.gens, 6, names=NAMES)
    assert rep.max_fixed_points == 2 and rep.witness == "f"
    assert set(rep.histogram) <= {0, 2}
    assert rep.words_examined == 1 + sum(4 * 3 ** (k - 1) for k in range(1, 7))
    flagged = A.word_ball_max_fixed(G.gens, 3, N_expected=1, names=NAMES)
    assert flagged.counterexample is not None


def test_word_ball_monotone_in_radius():
    prev = 0
    for L in range(1, 5):
        cur = A.word_ball_max_fixed(G.gens, L).max_fixed_points
        assert cur >= prev
        prev = cur


def test_word_ball_distinct_maps():
    ball = A.word_ball([pw.rigid(Fraction(1, 3))], 5)
    assert len(ball) == 3


def test_finite_orbits():
    c = A.finite_orbit_search(G.gens)
    assert c.kind == "FiniteOrbit" and c.order == 2
    assert {p.coord for p in c.points} == {0, INF}
    c3 = A.finite_orbit_search([pw.rigid(Fraction(1, 3))])
    assert c3.kind == "FiniteOrbit" and c3.order == 3
    assert A.finite_orbit_search([G.f]).kind == "GlobalFixedPoint"


def test_rot_homomorphism():
    ok, witness = A.rot_homomorphism_check([pw.rigid(Fraction(1, 3)), pw.rigid(Fraction(1, 4))], L=2)
    assert ok and witness is None
    ok, _ = A.rot_homomorphism_check(G.gens, L=2)
    assert ok
    with pytest.raises(NotElementary):
        A.rot_homomorphism_check([pw.moebius_map((2, 0, 0, Fraction(1, 2))), pw.rigid(Fraction(1, 3), pw.PW_MOEBIUS)])


def test_amplify():
    f = pw.pw_affine_graph([0, Fraction(1, 8), Fraction(1, 2), Fraction(7, 8)], [0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
    g = pw.pw_affine_graph([0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)], [0, Fraction(1, 4), Fraction(5, 8), Fraction(3, 4)])
    I = CircleInterval(CirclePoint(ANGLE, Fraction(15, 16)), CirclePoint(ANGLE, Fraction(1, 16)))
    eta = Fraction(1, 10)
    m, h = A.amplify_local_closeness(f, g, I, eta)
    assert m >= 1
    xs = np.linspace(0, 1, 100001)
    d = FloatLift(h)(xs) - xs
    assert float(np.max(np.abs(d - np.round(d)))) < float(eta)
    assert A.amplify_local_closeness(f, pw.identity(), I, eta)[0] == 0


def test_calibrate():
    # d(R_{1/100}^m, id) = m/100, first in (1/20, 1/10] at m = 6
    assert A.power_distance_calibrate(pw.rigid(Fraction(1, 100)), Fraction(1, 5)) == 6


@given(st.integers(1, 6), st.integers(1, 6), st.booleans())
def test_theorem_b_words(a, b, with_R):
    w = G.f.power(a).compose(G.g.power(b))
    assert coords(A.fixed_points_report(w)) == {0, INF}
    if with_R:
        wr = w.compose(G.R)
        assert wr.compose(wr) == G.f.power(a + b).compose(G.g.power(a + b))
        assert A.fixed_points_report(wr).count in (0, 2)

