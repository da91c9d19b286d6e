from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from circlelab import analysis as A
from circlelab import constructions as C
from circlelab import piecewise as pw
from circlelab import rotation as R
from circlelab.errors import DependentParameters, PrecisionUnreachable, WrongInput
from circlelab.numbers import INF, Quad
from circlelab.reports import Nature


def test_theorem_b_relations():
    G = C.build_theorem_b(2, 3)
    assert all(G.relations.values())
    assert G.R.compose(G.f).compose(G.R) == G.g
    assert G.R.compose(G.R).is_identity()
    assert G.certificate is not None


@pytest.mark.parametrize("lam, mu", [(2, 2), (4, 2), (Fraction(9, 4), Fraction(3, 2))])
def test_dependent_parameters(lam, mu):
    with pytest.raises(DependentParameters):
        C.build_theorem_b(lam, mu)


def test_parameters_must_expand():
    with pytest.raises(WrongInput):
        C.build_theorem_b(1, 3)


@given(st.integers(2, 40), st.integers(2, 40))
def test_independence_certificate(a, b):
    # an oracle: a^i = b^j with i, j > 0 iff a and b are powers of a common base
    def common_base(x, y):
        for i in range(1, 7):
            for j in range(1, 7):
                if x**i == y**j:
                    return True
        return False

    cert = C.independence_certificate(Fraction(a), Fraction(b))
    assert (cert is None) == common_base(a, b)


def test_involution_matrices():
    assert C.involution_action_matrix(C.build_theorem_b()) == [[0, 1], [1, 0]]
    assert C.involution_action_matrix(C.build_theorem_b(5, 7)) == [[0, 1], [1, 0]]
    assert C.involution_action_matrix(C.psl_contrast_group()) == [[-1, 0], [0, -1]]


# --- blow-ups -------------------------------------------------------------------------


def test_finite_blowup_of_rational_rotation():
    b = C.denjoy_blowup(pw.rigid(Fraction(1, 3)))
    assert b.exact
    assert b.blown == pw.rigid(Fraction(1, 3))
    assert b.total_gap == Fraction(3, 4)
    # three equal gaps, each 1/4 out of 1 + 3/4
    assert all(c - a == Fraction(1, 7) for a, c in b.gap_list)
    ok, witness = C.semiconjugacy_check(b)
    assert ok and witness is None
    assert R.rotation_number(b.blown).value == Fraction(1, 3)


def test_zero_length_gaps_change_nothing():
    b = C.denjoy_blowup(pw.rigid(Fraction(1, 3)), spec=C.BlowUpSpec(scale=0))
    assert b.blown == pw.rigid(Fraction(1, 3))
    assert b.total_gap == 0


def test_golden_blowup_semiconjugacy():
    b = C.golden_denjoy()
    ok, witness = C.semiconjugacy_check(b, samples=200)
    assert ok, witness


def test_corrupted_collapse_is_caught():
    b = C.golden_denjoy()
    ok, witness = C.semiconjugacy_check(b, samples=200, collapse=C.corrupted_collapse(b))
    assert not ok and witness is not None


def test_gap_accounting():
    b = C.golden_denjoy()
    assert b.total_gap == Fraction(3, 4)
    lengths = sorted(b.gap_lengths(6).values(), reverse=True)
    assert abs(lengths[0] - Fraction(1, 7)) < Fraction(1, 10**9)
    assert abs(lengths[1] - Fraction(1, 14)) < Fraction(1, 10**9)
    (a, c), = b.largest_gaps(1)
    assert abs((c - a) - Fraction(1, 7)) < Fraction(1, 10**9)


def test_depth_cap():
    b = C.golden_denjoy(C.BlowUpSpec(depth_cap=5))
    with pytest.raises(PrecisionUnreachable):
        C.semiconjugacy_check(b, samples=10)


def test_golden_enclosure():
    e = C.golden_mean_enclosure(30)
    assert e.width < Fraction(1, 10**29)
    assert e.lo * e.lo + e.lo < 1 < e.hi * e.hi + e.hi


# --- the two-parabolic construction -----------------------------------------------------


@pytest.fixture(scope="module")
def prop41():
    return C.build_prop41(L=3)


def test_prop41_group(prop41):
    G = prop41
    assert isinstance(G.t, Quad)
    assert G.words_checked > 0 and G.stabilizer_ok
    assert G.total_gap > 0
    assert G.T_alpha.compose(G.T_beta) == G.T_beta.compose(G.T_alpha)
    assert G.order == 7


def test_prop41_blown_translation(prop41):
    rep = C.prop41_blown_fixed_points(prop41)
    assert rep.count == 2
    assert {p.nature for p in rep.points} <= {Nature.PARABOLIC_ABOVE, Nature.PARABOLIC_BELOW}
    # the unblown translation has a single parabolic point at infinity
    base = A.fixed_points_report(prop41.T_alpha)
    assert base.count == 1 and base.points[0].point.coord is INF


@pytest.mark.parametrize("kw", [dict(t=Fraction(1)), dict(t=Fraction(3, 2)), dict(rho=Fraction(2, 7))])
def test_prop41_bad_input(kw):
    with pytest.raises(WrongInput):
        C.build_prop41(L=2, **kw)


def test_gap_probe():
    rep = A.gap_crossing_probe(C.golden_denjoy(), pw.rigid(Fraction(1, 100)), N=1)
    assert rep.count >= 2
