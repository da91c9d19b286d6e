from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from circlelab.errors import BadBranch, IdentityMap, WrongClass
from circlelab.moebius import (
    MoebiusClass,
    MoebiusMap,
    elliptic_rotation_number,
    moebius_classify,
    moebius_compose,
    moebius_fixed_points,
    projective_rotation,
    pslk_evaluate,
    pslk_make,
)
from circlelab.numbers import INF
from circlelab.reports import Nature

from oracles import random_sl2, sample_fixed_count_moebius

HALF_TURN = MoebiusMap(0, 1, -1, 0)
TIMES4 = MoebiusMap(2, 0, 0, Fraction(1, 2))
SHIFT1 = MoebiusMap(1, 1, 0, 1)


def test_classify_examples():
    assert moebius_classify(TIMES4) == MoebiusClass.HYPERBOLIC
    assert moebius_classify(SHIFT1) == MoebiusClass.PARABOLIC
    assert moebius_classify(HALF_TURN) == MoebiusClass.ELLIPTIC
    assert moebius_classify(MoebiusMap(1, 0, 0, 1)) == MoebiusClass.IDENTITY


def test_scalar_multiples_are_equal():
    assert MoebiusMap(2, 0, 0, 2) == MoebiusMap(1, 0, 0, 1)
    assert MoebiusMap(4, 0, 0, 1) == TIMES4
    with pytest.raises(ValueError):
        MoebiusMap(0, 1, 1, 0)


def test_fixed_points_hyperbolic():
    rep = moebius_fixed_points(TIMES4)
    got = {(fp.point.coord if fp.point.coord is INF else fp.point.coord): fp.nature for fp in rep.points}
    assert got == {0: Nature.REPELLING, INF: Nature.ATTRACTING}


def test_fixed_points_parabolic():
    rep = moebius_fixed_points(SHIFT1)
    assert rep.count == 1
    assert rep.points[0].point.coord is INF
    assert rep.points[0].nature in (Nature.PARABOLIC_ABOVE, Nature.PARABOLIC_BELOW)


def test_fixed_points_identity_raises():
    with pytest.raises(IdentityMap):
        moebius_fixed_points(MoebiusMap(1, 0, 0, 1))


def test_half_turn_is_an_involution():
    assert moebius_compose(HALF_TURN, HALF_TURN).is_identity()
    assert HALF_TURN(0) is INF and HALF_TURN(INF) == 0
    r = elliptic_rotation_number(HALF_TURN)
    assert r.is_exact and r.value == Fraction(1, 2)


def test_rotation_number_needs_elliptic():
    with pytest.raises(WrongClass):
        elliptic_rotation_number(TIMES4)


@pytest.mark.parametrize("t", [Fraction(1, 3), Fraction(1, 4), Fraction(1, 6), Fraction(5, 12), Fraction(3, 4)])
def test_projective_rotation_has_the_right_rotation_number(t):
    m = projective_rotation(t)
    assert moebius_classify(m) == MoebiusClass.ELLIPTIC
    r = elliptic_rotation_number(m)
    assert r.is_exact and r.value == t


@given(st.integers(0, 10**6))
def test_classification_is_a_conjugacy_invariant(seed):
    rng = random.Random(seed)
    m, h = MoebiusMap(*random_sl2(rng)), MoebiusMap(*random_sl2(rng))
    c = moebius_compose(moebius_compose(h, m), h.inverse())
    assert moebius_classify(c) == moebius_classify(m)


@given(st.integers(0, 10**6))
def test_fixed_point_count_against_sampling(seed):
    rng = random.Random(seed)
    m = MoebiusMap(*random_sl2(rng))
    if m.is_identity():
        return
    cls = moebius_classify(m)
    n = moebius_fixed_points(m).count
    assert n == {MoebiusClass.ELLIPTIC: 0, MoebiusClass.PARABOLIC: 1, MoebiusClass.HYPERBOLIC: 2}[cls]
    if cls != MoebiusClass.PARABOLIC:
        # parabolic points are touches, not sign changes
        assert sample_fixed_count_moebius(m.entries) == n


def test_trace_two_means_parabolic():
    rng = random.Random(11)
    seen = 0
    for _ in range(4000):
        m = MoebiusMap(*random_sl2(rng, bound=9))
        if abs(m.trace) == 2 and not m.is_identity():
            assert moebius_classify(m) == MoebiusClass.PARABOLIC
            seen += 1
    assert seen > 0


# --- k-fold covers -----------------------------------------------------------------


def test_pslk_hyperbolic_branch_has_2k_fixed_points():
    e = pslk_make(TIMES4, 2, 0)
    assert e.fixed_points().count == 4
    assert e.commutes_with_deck()


def test_pslk_identity_branch_is_a_rotation():
    e = pslk_make(MoebiusMap(1, 0, 0, 1), 3, 1)
    for x in (Fraction(0), Fraction(1, 5), Fraction(2, 3)):
        y = pslk_evaluate(e, x).coord
        assert y == (x + Fraction(1, 3)) % 1


def test_pslk_bad_branch():
    with pytest.raises(BadBranch):
        pslk_make(TIMES4, 2, 2)
    with pytest.raises(BadBranch):
        pslk_make(TIMES4, 0, 0)


@given(st.integers(0, 10**6), st.sampled_from([1, 2, 3]))
def test_pslk_counts_are_multiples_of_k(seed, k):
    m = MoebiusMap(*random_sl2(random.Random(seed)))
    if m.is_identity():
        return
    base = moebius_fixed_points(m).count
    for branch in range(k):
        e = pslk_make(m, k, branch)
        n = e.fixed_points().count
        assert n in (0, k * base)
        assert e.commutes_with_deck()
