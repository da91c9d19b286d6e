from __future__ import annotations

import random
from fractions import Fraction
from math import gcd

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from circlelab import constructions as C
from circlelab import piecewise as pw
from circlelab import rotation as R
from circlelab.errors import TraceInvalid, WrongInput

from oracles import birkhoff_interval, continued_fraction_convergents, golden, random_pl


def test_compare_examples():
    r = pw.rigid(Fraction(2, 5))
    assert R.compare_rot(r, 2, 5) == R.EQUAL
    assert R.compare_rot(r, 1, 3) == R.GREATER
    assert R.compare_rot(r, 1, 2) == R.LESS
    assert R.compare_rot(C.build_theorem_b().f, 0, 1) == R.EQUAL


@pytest.mark.parametrize("q", [1, 2, 7, 12, 31, 50])
def test_rigid_rotations_are_exact(q):
    for p in range(q):
        if gcd(p, q) == 1:
            r = R.rotation_number(pw.rigid(Fraction(p, q)))
            assert r.is_exact and r.value == Fraction(p, q)
            assert r.certificate.verify(pw.rigid(Fraction(p, q)))


def test_half_turn_and_theorem_b():
    G = C.build_theorem_b()
    assert R.rotation_number(G.R).value == Fraction(1, 2)
    assert R.rotation_number(G.f).value == 0


def _mod1_contains(r, lo, hi):
    for j in range(int(lo // 1) - 1, int(hi // 1) + 2):
        if r.is_exact and lo <= float(r.value) + j <= hi:
            return True
        if not r.is_exact and float(r.lo) + j < hi and lo < float(r.hi) + j:
            return True
    return False


@given(st.integers(0, 10**6))
def test_rotation_against_birkhoff_sums(seed):
    f = random_pl(random.Random(seed), denom=32)
    r = R.rotation_number(f, q_cap=2000)
    assert _mod1_contains(r, *birkhoff_interval(f))


@given(st.integers(0, 10**6))
def test_conjugacy_invariance(seed):
    rng = random.Random(seed)
    f, h = random_pl(rng, denom=32), random_pl(rng, denom=32)
    r = R.rotation_number(f, q_cap=2000)
    rc = R.rotation_number(h.compose(f).compose(h.inverse()), q_cap=2000)
    assert r.intersects(rc)


def test_golden_rotation_bracketed_by_convergents():
    b = C.golden_denjoy()
    r = R.rotation_number(b.original, q_cap=200)
    assert (r.lo, r.hi) == (Fraction(55, 89), Fraction(89, 144))
    with mpmath.workdps(50):
        conv = continued_fraction_convergents(golden(), 14)
    assert Fraction(55, 89) in conv and Fraction(89, 144) in conv
    assert r.width <= Fraction(1, 10**4)


def test_map_order():
    q, r = R.map_order(pw.rigid(Fraction(3, 7)))
    assert q == 7
    q, r = R.map_order(C.build_theorem_b().f)
    assert q is None and r.value == 0


# --- perturbation lemma -----------------------------------------------------------------


def test_perturbation_examples():
    f = pw.rigid(Fraction(1, 2))
    res = R.perturbation_step(f, pw.rigid(Fraction(1, 100)), Fraction(1, 10))
    assert res.rot_result.value == Fraction(51, 100)
    assert res.in_target and res.dc0_ok
    f3 = pw.rigid(Fraction(1, 3))
    res = R.perturbation_step(f3, pw.rigid(Fraction(1, 54)), Fraction(1, 10))
    assert res.rot_result.value == Fraction(19, 54)
    assert res.in_target
    res = R.perturbation_step(f3, pw.rigid(Fraction(1, 9)), Fraction(1, 10))
    assert not res.in_target


def test_perturbation_needs_finite_order_at_least_two():
    with pytest.raises(WrongInput):
        R.delta_search(pw.identity(), Fraction(1, 10))
    with pytest.raises(WrongInput):
        R.perturbation_step(pw.rigid(Fraction(1, 3)), pw.rigid(Fraction(-1, 100)), Fraction(1, 10))


def test_delta_search():
    d = R.delta_search(pw.rigid(Fraction(1, 3)), Fraction(1, 10))
    assert 0 < d <= Fraction(1, 27)
    d2 = R.delta_search(pw.rigid(Fraction(1, 2)), Fraction(1, 100))
    assert d2 <= Fraction(1, 100)


# --- irrational scheme ---------------------------------------------------------------------


def test_irrational_scheme_first_step():
    trace = R.irrational_scheme(pw.rigid(Fraction(1, 3)), steps=1)
    assert [s.q for s in trace.steps] == [3, 54]
    assert R.dirichlet_nesting_check(trace)


def test_irrational_scheme_conjugated_supply():
    h0 = pw.rigid(Fraction(1, 3))
    supply = R.ConjugatedRotationSupply(R.symmetric_conjugator(3))
    trace = R.irrational_scheme(h0, supply=supply, steps=2)
    qs = [s.q for s in trace.steps]
    assert qs[0] == 3 and qs[1] > 3 and qs[2] > qs[1]
    assert R.dirichlet_nesting_check(trace)


def test_random_supply_loses_finite_order():
    with pytest.raises(TraceInvalid):
        R.irrational_scheme(pw.rigid(Fraction(1, 3)), supply=R.RandomPLSupply(seed=0), steps=2)


def _trace(pairs):
    steps = [R.TraceStep(i, None, p, q, None, R.DirichletInterval(p, q), Fraction(1)) for i, (p, q) in enumerate(pairs)]
    return R.IterationTrace(steps=steps)


def test_nesting_check_rejects_bad_traces():
    assert R.dirichlet_nesting_check(_trace([(1, 3), (19, 54)]))
    assert not R.dirichlet_nesting_check(_trace([(1, 3), (1, 2)]))  # q not growing
    assert not R.dirichlet_nesting_check(_trace([(1, 3), (2, 5)]))  # outside the window
    assert not R.dirichlet_nesting_check(_trace([(1, 3), (1, 4)]))  # below p/q


@given(st.integers(2, 200), st.data())
def test_nesting_inequality(q, data):
    p = data.draw(st.integers(0, q - 1).filter(lambda p: gcd(p, q) == 1))
    q2 = data.draw(st.integers(q + 1, 4 * q**3))
    lo = Fraction(p, q)
    p2 = (lo * q2).__floor__() + 1
    if Fraction(p2, q2) > lo + Fraction(1, q**3):
        return
    assert R.nesting_inequality_holds(p, q, p2, q2)
    assert R.DirichletInterval(p, q).contains_interval(R.DirichletInterval(p2, q2))
