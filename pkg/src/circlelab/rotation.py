"""Rotation numbers: exact comparison with p/q, Stern-Brocot enclosures, and
the perturbation and irrational-limit procedures built on them."""

from __future__ import annotations

import csv
import io
import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import piecewise as pw
from .core import ANGLE, CirclePoint
from .errors import Indeterminate, SupplyError, TraceInvalid, WrongInput
from .lift import LiftMap, shift_number
from .metrics import distance_c0, distance_inf, is_positive
from .numbers import AlgebraicRoot, Enclosure, fmt_number, fmt_rational

LESS, EQUAL, GREATER = "Less", "Equal", "Greater"


# --- certificates and results --------------------------------------------------------


@dataclass
class PeriodicCertificate:
    """A point x of the lift with F^q(x) = x + p.

    For roots that are not in the coefficient field the certificate is a
    rational bracket [lo, hi] on which F^q(x) - x - p changes sign.
    """

    p: int
    q: int
    point: object = None
    bracket: Optional[tuple] = None
    chart_point: Optional[CirclePoint] = None

    def verify(self, f) -> bool:
        F = f.lift
        if self.point is not None:
            x = self.point
            for _ in range(self.q):
                x = F(x)
            return x == self.point + self.p
        lo, hi = self.bracket
        a, b = lo, hi
        for _ in range(self.q):
            a, b = F(a), F(b)
        return (a - lo - self.p) * (b - hi - self.p) < 0

    def to_json(self):
        out = {"p": self.p, "q": self.q}
        if self.point is not None:
            out["x"] = fmt_number(self.point)
        else:
            out["bracket"] = [fmt_rational(self.bracket[0]), fmt_rational(self.bracket[1])]
        if self.chart_point is not None:
            out["point"] = self.chart_point.to_json()
        return out


@dataclass
class Comparison:
    kind: str
    certificate: Optional[PeriodicCertificate] = None

    def __eq__(self, other):
        if isinstance(other, str):
            return self.kind == other
        if isinstance(other, Comparison):
            return self.kind == other.kind
        return NotImplemented


@dataclass
class RotResult:
    kind: str  # "ExactRational" or "Enclosure"
    value: Optional[Fraction] = None
    certificate: Optional[PeriodicCertificate] = None
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    closed: bool = False  # numeric enclosures cannot exclude their endpoints

    @property
    def is_exact(self):
        return self.kind == "ExactRational"

    @property
    def interval(self):
        if self.is_exact:
            return Enclosure(self.value, self.value)
        return Enclosure(self.lo, self.hi)

    @property
    def width(self):
        return Fraction(0) if self.is_exact else self.hi - self.lo

    def contains(self, x) -> bool:
        if self.is_exact:
            return x == self.value
        if self.closed:
            return self.lo <= x <= self.hi
        return self.lo < x < self.hi

    def intersects(self, other: "RotResult") -> bool:
        if self.is_exact and other.is_exact:
            return self.value == other.value
        if self.is_exact:
            return other.contains(self.value)
        if other.is_exact:
            return self.contains(other.value)
        return self.lo < other.hi and other.lo < self.hi or (
            (self.closed or other.closed) and self.interval.intersects(other.interval)
        )

    def to_json(self):
        if self.is_exact:
            return {"kind": self.kind, "value": fmt_rational(self.value), "certificate": self.certificate.to_json()}
        return {"kind": self.kind, "lo": fmt_rational(self.lo), "hi": fmt_rational(self.hi), "closed": self.closed}

    def __str__(self):
        if self.is_exact:
            c = self.certificate
            x = c.chart_point if c.chart_point is not None else c.point
            if x is None:
                return f"{self.value} exact, certificate bracket [{c.bracket[0]}, {c.bracket[1]}]"
            return f"{self.value} exact, certificate x={x}"
        b = "[]" if self.closed else "()"
        return f"{b[0]}{self.lo}, {self.hi}{b[1]}"


def _chart_point(f, u):
    """Circle point of f's chart for a lift coordinate u."""
    k = math.floor(u) if not isinstance(u, AlgebraicRoot) else (1 if u >= 1 else 0)
    u = shift_number(u, -k)
    if f.universe == pw.PW_MOEBIUS and not isinstance(u, AlgebraicRoot):
        from .core import PROJECTIVE, from_rational_angle

        return CirclePoint(PROJECTIVE, from_rational_angle(u))
    if isinstance(u, AlgebraicRoot):
        return CirclePoint(ANGLE, Enclosure(u.lo, u.hi)) if f.universe != pw.PW_MOEBIUS else None
    return CirclePoint(ANGLE, u)


def _pick_root(f, pts, arcs):
    """Prefer exact roots of small chart coordinate (so x = 0 when available)."""
    cands = [a0 for a0, _ in arcs] + [r for r in pts if not isinstance(r, AlgebraicRoot)]
    if cands:

        def size(u):
            cp = _chart_point(f, u)
            c = cp.coord
            from .numbers import INF

            return (1, 0.0) if c is INF else (0, abs(float(c)))

        return min(cands, key=size), None
    r = pts[0]
    return None, (r.lo, r.hi)


def _compare_lift(f, G: LiftMap, p, q):
    pts, arcs = G.roots(Fraction(p))
    if pts or arcs:
        x, bracket = _pick_root(f, pts, arcs)
        cert = PeriodicCertificate(p, q, point=x, bracket=bracket)
        if x is not None:
            cert.chart_point = _chart_point(f, x)
        return Comparison(EQUAL, cert)
    s = G(Fraction(0)) - p
    return Comparison(GREATER if s > 0 else LESS)


def compare_rot(f, p: int, q: int) -> Comparison:
    """Exact trichotomy for rot(f) against p/q (f in an exact universe)."""
    if q <= 0:
        raise WrongInput("q must be positive")
    if f.universe == pw.NUMERIC:
        e = _numeric_orbit(f.numeric, q)[q]
        if e.lo - p > 0:
            return Comparison(GREATER)
        if e.hi - p < 0:
            return Comparison(LESS)
        raise Indeterminate(f"cannot decide rot against {p}/{q}", hint="refine the enclosure width")
    return _compare_lift(f, f.lift.power(q), p, q)


def _numeric_orbit(nm, n, width=Fraction(1, 10**30)):
    out = [Enclosure(Fraction(0), Fraction(0))]
    for _ in range(n):
        e = out[-1]
        out.append(nm.enclose_interval(e.lo, e.hi, width))
    return out


def _exact_result(value, cert):
    return RotResult("ExactRational", value=Fraction(value), certificate=cert)


def rotation_number(f, q_cap: int = 10**4, width=None) -> RotResult:
    """Stern-Brocot walk for rot(f) in [0,1).

    Exact universes give an exact rational with a periodic-point certificate,
    or a Farey interval (a/b, c/d) with b, d <= q_cap (and c/d - a/b <= width
    when a width is requested).
    """
    if f.universe == pw.NUMERIC:
        return _numeric_rotation(f, q_cap, width)
    F = f.lift
    if F.is_translation and isinstance(F.shift, Fraction):
        t = F.shift
        cert = PeriodicCertificate(t.numerator, t.denominator, point=Fraction(0))
        cert.chart_point = _chart_point(f, Fraction(0))
        return _exact_result(t, cert)
    for p in (0, 1):
        c = _compare_lift(f, F, p, 1)
        if c.kind == EQUAL:
            c.certificate.p = 0 if p == 0 else 1
            res = _exact_result(Fraction(0), c.certificate)
            return res
    return _stern_brocot(f, F, q_cap, width)


KNOT_BUDGET = 60
_ORBIT_BITS = 256
BRACKET_SAMPLES = 32
BRACKET_Q_MAX = 2000


class _DyadicOrbit:
    """Outward-rounded enclosures of F^n(0) for an exact lift.

    Values are integers N standing for N / 2^bits; affine lifts with rational
    coefficients are iterated in pure integer arithmetic.
    """

    def __init__(self, F, bits=_ORBIT_BITS):
        self.F = F
        self.S = 2**bits
        self.ints = [(0, 0)]
        self.fast = F.is_affine and bool(F.knots) and all(
            isinstance(v, Fraction) for m in F.mats for v in m
        ) and all(isinstance(x, Fraction) for x in F.knots)
        if self.fast:
            S = self.S
            self.cuts = [-((-x.numerator * S) // x.denominator) for x in F.knots]  # ceil(x S)
            self.coef = []
            for a, b, _, d in F.mats:
                s, t = a / d, b / d
                self.coef.append((s.numerator * t.denominator, t.numerator * s.denominator * S, s.denominator * t.denominator))

    def _step(self, N, up):
        S = self.S
        if self.fast:
            k = (N - self.cuts[0]) // S
            u = N - k * S
            i = bisect_right(self.cuts, u) - 1
            A, B, D = self.coef[i]
            num = A * u + B
            v = -((-num) // D) if up else num // D
            return v + k * S
        y = self.F(Fraction(N, S))
        return math.ceil(y * S) if up else math.floor(y * S)

    def power_sign(self, N, q, p):
        """Certified sign of F^q(N/2^bits) - N/2^bits - p, or 0 if undecided."""
        lo = hi = N
        for _ in range(q):
            lo, hi = self._step(lo, False), self._step(hi, True)
        target = N + p * self.S
        return 1 if lo > target else -1 if hi < target else 0

    def __getitem__(self, n):
        while len(self.ints) <= n:
            lo, hi = self.ints[-1]
            self.ints.append((self._step(lo, False), self._step(hi, True)))
        lo, hi = self.ints[n]
        return Fraction(lo, self.S), Fraction(hi, self.S)


def _stern_brocot(f, F, q_cap, width):
    # invariant: a/b < rot < c/d with PL = F^b and PR = F^d.  Once the powers
    # outgrow the knot budget the walk continues on an orbit enclosure of 0,
    # where a sign only gives a non-strict comparison.
    a, b, PL = 0, 1, F
    c, d, PR = 1, 1, F
    closed = False

    def done():
        if b + d > q_cap:
            return True
        return width is not None and Fraction(c, d) - Fraction(a, b) <= width

    while not done():
        if len(PL.knots) + len(PR.knots) > KNOT_BUDGET:
            closed = True
            break
        G = PL.compose(PR)
        cmp = _compare_lift(f, G, a + c, b + d)
        if cmp.kind == EQUAL:
            return _exact_result(Fraction(a + c, b + d), cmp.certificate)
        if cmp.kind == GREATER:
            k, Gk, res = _run(f, PL, PR, a, b, c, d, q_cap)
            if res is not None:
                return res
            a, b, PL = a + k * c, b + k * d, Gk
        else:
            k, Gk, res = _run(f, PR, PL, c, d, a, b, q_cap, toward_left=True)
            if res is not None:
                return res
            c, d, PR = c + k * a, d + k * b, Gk
    if closed:
        orbit = _DyadicOrbit(F)
        while not done():
            p, q = a + c, b + d
            lo, hi = orbit[q]
            if lo > p:
                a, b = p, q
            elif hi < p:
                c, d = p, q
            else:
                break
        # the orbit only gives non-strict comparisons, so an endpoint may be
        # rot itself; settle it exactly while F^q stays small enough
        for p, q in ((c, d), (a, b), (a + c, b + d)):
            if 1 < q <= BRACKET_Q_MAX:
                cert = _bracket_certificate(f, orbit, p, q)
                if cert is not None:
                    return _exact_result(Fraction(p, q), cert)
    return RotResult("Enclosure", lo=Fraction(a, b), hi=Fraction(c, d), closed=closed)


def _bracket_certificate(f, orbit, p, q, samples=BRACKET_SAMPLES):
    """A rational bracket on which F^q(x) - x - p changes sign, if sampling finds one."""
    S = orbit.S
    prev = None
    for j in range(samples + 1):
        N = j * S // samples
        s = orbit.power_sign(N, q, p)
        if s == 0:
            continue
        if prev is not None and s != prev[1]:
            cert = PeriodicCertificate(p, q, bracket=(Fraction(prev[0], S), Fraction(N, S)))
            if cert.verify(f):
                return cert
        prev = (N, s)
    return None


def _run(f, P_move, P_fixed, a, b, c, d, q_cap, toward_left=False):
    """Largest k with the comparison unchanged along (a + k c)/(b + k d).

    The end (a, b) is the one that moves; (c, d) stays.  Returns k, the power
    F^(b + k d) and an exact result if an Equal was met.
    """
    want = LESS if toward_left else GREATER
    powers = {1: P_fixed}

    def fixed_pow(k):
        # P_fixed^k by binary decomposition with cached doublings
        out = None
        bit = 1
        while bit <= k:
            if bit not in powers:
                powers[bit] = powers[bit // 2].compose(powers[bit // 2])
            if k & bit:
                out = powers[bit] if out is None else out.compose(powers[bit])
            bit <<= 1
        return out

    def test(k):
        G = P_move.compose(fixed_pow(k))
        return G, _compare_lift(f, G, a + k * c, b + k * d)

    good_k, good_G = 1, P_move.compose(P_fixed)
    bad_k = None
    k = 2
    while b + k * d <= q_cap:
        if len(P_move.knots) + k * max(1, len(P_fixed.knots)) > 4 * KNOT_BUDGET:
            bad_k = k
            break
        G, cmp = test(k)
        if cmp.kind == EQUAL:
            return k, G, _exact_result(Fraction(a + k * c, b + k * d), cmp.certificate)
        if cmp.kind == want:
            good_k, good_G = k, G
            k *= 2
        else:
            bad_k = k
            break
    hi = bad_k if bad_k is not None else (q_cap - b) // d + 1
    lo = good_k
    while hi - lo > 1:
        mid = (lo + hi) // 2
        G, cmp = test(mid)
        if cmp.kind == EQUAL:
            return mid, G, _exact_result(Fraction(a + mid * c, b + mid * d), cmp.certificate)
        if cmp.kind == want:
            lo, good_G = mid, G
        else:
            hi = mid
    return lo, good_G, None


def _numeric_rotation(f, q_cap, width):
    nm = f.numeric
    orbit = _numeric_orbit(nm, q_cap)
    a, b, c, d = 0, 1, 1, 1
    e1 = orbit[1]
    if e1.hi < 0 or e1.lo >= 1:
        raise WrongInput("numeric map lift is not normalized")
    while b + d <= q_cap and (width is None or Fraction(c, d) - Fraction(a, b) > width):
        p, q = a + c, b + d
        e = orbit[q]
        if e.lo > p:
            a, b = p, q
        elif e.hi < p:
            c, d = p, q
        else:
            raise Indeterminate(f"orbit enclosure straddles {p}/{q}", hint="use a narrower enclosure")
    return RotResult("Enclosure", lo=Fraction(a, b), hi=Fraction(c, d), closed=True)


# --- Dirichlet intervals and the perturbation lemma -----------------------------------


@dataclass(frozen=True)
class DirichletInterval:
    p: int
    q: int

    @property
    def lo(self):
        return Fraction(self.p, self.q)

    @property
    def hi(self):
        return Fraction(self.p, self.q) + Fraction(1, self.q * self.q)

    @property
    def width(self):
        return Fraction(1, self.q * self.q)

    def contains_interval(self, other: "DirichletInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def to_json(self):
        return [fmt_rational(self.lo), fmt_rational(self.hi)]


def nesting_inequality_holds(p, q, p2, q2) -> bool:
    """For p2/q2 in (p/q, p/q + 1/q^3] with q2 > q: p2/q2 + 1/q2^2 < p/q + 1/q^2."""
    return Fraction(p2, q2) + Fraction(1, q2 * q2) < Fraction(p, q) + Fraction(1, q * q)


def map_order(f, cap=None):
    """Smallest q >= 1 with f^q = id, using rot = p/q when it is known exactly."""
    r = rotation_number(f, q_cap=cap or 10**4)
    if not r.is_exact:
        return None, r
    q = r.value.denominator
    if f.power(q).is_identity():
        return q, r
    return None, r


@dataclass
class PerturbationResult:
    rot_result: RotResult
    dc0_ok: bool
    in_target: bool
    hypothesis_ok: bool
    dc0: Enclosure
    p: int
    q: int

    def to_json(self):
        return {
            "rot": self.rot_result.to_json(),
            "dc0_ok": self.dc0_ok,
            "in_target": self.in_target,
            "hypothesis_ok": self.hypothesis_ok,
            "dc0": self.dc0.to_json(),
            "p": self.p,
            "q": self.q,
        }


def _finite_order(f):
    q, r = map_order(f)
    if q is None:
        raise WrongInput("f must have finite order")
    if q < 2:
        raise WrongInput("f must have order at least 2")
    return r.value.numerator, q


def perturbation_step(f, g, eps, q_cap=None, _pq=None) -> PerturbationResult:
    """rot(gf) against the target (p/q, p/q + 1/q^3] and d_C0(f, gf) < eps."""
    if not f.is_exact or not g.is_exact:
        raise WrongInput("perturbation_step works on exact maps")
    p, q = _pq or _finite_order(f)
    if not is_positive(g):
        raise WrongInput("g must be positive")
    eps = Fraction(eps)
    gf = g.compose(f)
    # the hypothesis: (gf)^q(x) - x - p lies in (0, 1/q^2) everywhere
    G = gf.lift.power(q)
    lower_ok = not _touches(G, p) and G(Fraction(0)) - p > 0
    upper = p + Fraction(1, q * q)
    upper_ok = not _touches(G, upper) and G(Fraction(0)) - upper < 0
    hypothesis_ok = lower_ok and upper_ok
    if hypothesis_ok:
        in_target = True
    else:
        # decide membership directly: rot > p/q and rot <= (p q^2 + 1)/q^3
        above = compare_rot(gf, p, q).kind == GREATER
        q3 = q**3
        in_target = above and compare_rot(gf, p * q * q + 1, q3).kind != GREATER
    rot = rotation_number(gf, q_cap=q_cap or max(4 * q, 20))
    dc0 = distance_c0(f, gf)
    return PerturbationResult(rot, dc0.hi < eps, in_target, hypothesis_ok, dc0, p, q)


def _touches(G, p):
    pts, arcs = G.roots(Fraction(p))
    return bool(pts or arcs)


Battery = Callable[[Fraction], list]


def random_positive_pl(delta, rng: random.Random, knots=4, denom=None, label=None):
    """A random positive piecewise-affine map with 0 < g(x) - x < delta/2."""
    delta = Fraction(delta)
    denom = denom or 64
    top = delta / 2
    xs = sorted({Fraction(rng.randrange(0, denom * 8), denom * 8) for _ in range(knots)})
    while len(xs) < 2:
        xs = sorted(set(xs) | {Fraction(rng.randrange(0, denom * 8), denom * 8)})
    ds = [top * Fraction(rng.randint(1, denom - 1), denom) for _ in xs]
    ys = [x + dx for x, dx in zip(xs, ds)]
    # strict monotonicity: displacement differences stay below the knot gaps
    for i in range(len(xs)):
        y1 = ys[i + 1] if i + 1 < len(ys) else ys[0] + 1
        if not y1 > ys[i]:
            return random_positive_pl(delta, rng, knots, denom, label)
    return pw.pw_affine_graph(xs, ys, label=label or "pl")


def default_battery(seed=0, size=3) -> Battery:
    def battery(delta):
        rng = random.Random(f"{seed}:{delta}")
        return [random_positive_pl(delta, rng) for _ in range(size)]

    return battery


def delta_search(f, eps, battery: Optional[Battery] = None, max_halvings=200):
    """Largest delta of the form min(eps, 1/q^3)/2^j passing every check.

    A map counts as delta-close when d_inf(g, id) < delta; the witness
    R_{delta/2} and every battery map at that delta must satisfy the
    perturbation lemma's conclusion.
    """
    p, q = _finite_order(f)
    eps = Fraction(eps)
    delta = min(eps, Fraction(1, q**3))
    for _ in range(max_halvings):
        tests = [pw.rigid(delta / 2)]
        if battery is not None:
            tests.extend(battery(delta))
        ok = True
        for g in tests:
            r = perturbation_step(f, g, eps, _pq=(p, q))
            if not (r.in_target and r.dc0_ok):
                ok = False
                break
        if ok:
            return delta
        delta /= 2
    raise WrongInput("no delta found")  # unreachable for finite-order f


# --- the irrational limit --------------------------------------------------------------


class Supply:
    """Source of positive maps g with d_inf(g, id) < delta."""

    name = "supply"

    def draw(self, delta, n):
        raise NotImplementedError


class RigidSupply(Supply):
    name = "rigid"

    def draw(self, delta, n):
        return pw.rigid(Fraction(delta) / 2)


class ConjugatedRotationSupply(Supply):
    """k R_t k^-1 for a fixed piecewise-affine k.

    When k commutes with h_0 (see ``symmetric_conjugator``) every h_n is
    conjugate by k to a rotation, so finite order is preserved.
    """

    name = "conjugated-rotation"

    def __init__(self, k):
        self.k = k
        self.kinv = k.inverse()

    def draw(self, delta, n):
        t = Fraction(delta) / 2
        for _ in range(200):
            g = self.k.compose(pw.rigid(t)).compose(self.kinv)
            if distance_inf(g, pw.identity()).hi < delta:
                return g
            t /= 2
        raise SupplyError("no conjugated rotation close enough")


def symmetric_conjugator(q, bend=Fraction(1, 2)):
    """A piecewise-affine k, not a rotation, with k(x + 1/q) = k(x) + 1/q."""
    xs, ys = [], []
    for i in range(q):
        base = Fraction(i, q)
        xs += [base, base + Fraction(1, 2 * q)]
        ys += [base, base + bend / q]
    return pw.pw_affine_graph(xs, ys, label=f"k_{q}")


class RandomPLSupply(Supply):
    name = "random-pl"

    def __init__(self, seed=0, limit=None):
        self.rng = random.Random(seed)
        self.limit = limit
        self.count = 0

    def draw(self, delta, n):
        if self.limit is not None and self.count >= self.limit:
            raise SupplyError("random supply exhausted")
        self.count += 1
        return random_positive_pl(delta, self.rng)


@dataclass
class TraceStep:
    n: int
    h: object
    p: int
    q: int
    delta: Optional[Fraction]
    interval: DirichletInterval
    eps: Fraction
    dc0: Optional[Enclosure] = None
    beyond_N: bool = False

    def to_json(self):
        return {
            "n": self.n,
            "p": str(self.p),
            "q": str(self.q),
            "delta": None if self.delta is None else fmt_rational(self.delta),
            "interval": self.interval.to_json(),
            "eps": fmt_rational(self.eps),
        }


@dataclass
class IterationTrace:
    steps: list = field(default_factory=list)
    q_increasing: bool = True
    nested: bool = True
    budget_ok: bool = True
    positive: bool = True
    finite_order: bool = True
    eps_sum: Fraction = Fraction(0)

    def to_json(self):
        return [s.to_json() for s in self.steps]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "p", "q", "width_exact", "width_approx", "delta"])
        for s in self.steps:
            wd = s.interval.width
            w.writerow([s.n, s.p, s.q, fmt_rational(wd), f"{float(wd):.6e}", "" if s.delta is None else fmt_rational(s.delta)])
        return buf.getvalue()


def default_eps(n):
    """eps_n = 1/4^(n+1); the whole sequence sums to 1/3 < 1/2."""
    return Fraction(1, 4 ** (n + 1))


def irrational_scheme(h0, supply: Supply = None, steps=6, N=0, eps=default_eps, battery=None) -> IterationTrace:
    """h_{n+1} = g_n h_n with g_n close to the identity; rot(h_n) = p_n/q_n.

    Each step checks rot(h_{n+1}) in (p_n/q_n, p_n/q_n + 1/q_n^3],
    q_{n+1} > q_n, nesting of the Dirichlet intervals, the C0 budget and
    positivity of h_{n+1}.  Any failure raises TraceInvalid.
    """
    supply = supply or RigidSupply()
    if not is_positive(h0):
        raise WrongInput("h0 must be positive")
    trace = IterationTrace()
    h = h0
    r = rotation_number(h, q_cap=10**6)
    if not r.is_exact:
        raise WrongInput("h0 must have an exact rational rotation number")
    p, q = r.value.numerator, r.value.denominator
    for n in range(steps + 1):
        if not h.power(q).is_identity():
            trace.finite_order = False
            raise TraceInvalid(f"step {n}: h_n^{q} is not the identity, so rot(h_{{n+1}}) is not controlled")
        e = eps(n)
        step = TraceStep(n, h, p, q, None, DirichletInterval(p, q), e, beyond_N=q > N)
        trace.steps.append(step)
        if n == steps:
            break
        delta = delta_search(h, e, battery)
        step.delta = delta
        try:
            g = supply.draw(delta, n)
        except SupplyError:
            raise
        if distance_inf(g, pw.identity()).hi >= delta or not is_positive(g):
            raise SupplyError("supply returned a map that is not positive and delta-close")
        h2 = g.compose(h)
        res = perturbation_step(h, g, e, _pq=(p, q))
        if not res.in_target:
            raise TraceInvalid(f"step {n}: rot(h_{n+1}) not in (p/q, p/q + 1/q^3]")
        step.dc0 = res.dc0
        trace.eps_sum += e
        if not res.dc0_ok:
            trace.budget_ok = False
            raise TraceInvalid(f"step {n}: d_C0(h_{n+1}, h_n) >= eps_{n}")
        r2 = rotation_number(h2, q_cap=10**6)
        if not r2.is_exact:
            trace.finite_order = False
            raise TraceInvalid(f"step {n}: rot(h_{n+1}) is not certified rational")
        p2, q2 = r2.value.numerator, r2.value.denominator
        if not q2 > q:
            trace.q_increasing = False
            raise TraceInvalid(f"step {n}: q_{n+1} = {q2} <= q_n = {q}")
        if not DirichletInterval(p, q).contains_interval(DirichletInterval(p2, q2)):
            trace.nested = False
            raise TraceInvalid(f"step {n}: I_{n+1} is not inside I_n")
        if not is_positive(h2):
            trace.positive = False
            raise TraceInvalid(f"step {n}: h_{n+1} is not positive")
        h, p, q = h2, p2, q2
    return trace


def dirichlet_nesting_check(trace: IterationTrace) -> bool:
    """Re-verify growth, nesting and the 1/q^3 window from the (p_n, q_n) data."""
    steps = trace.steps
    for s0, s1 in zip(steps, steps[1:]):
        p, q, p2, q2 = s0.p, s0.q, s1.p, s1.q
        if not q2 > q:
            return False
        r = Fraction(p2, q2)
        if not (Fraction(p, q) < r <= Fraction(p, q) + Fraction(1, q**3)):
            return False
        if not DirichletInterval(p, q).contains_interval(DirichletInterval(p2, q2)):
            return False
    return True


__all__ = [
    "LESS",
    "EQUAL",
    "GREATER",
    "PeriodicCertificate",
    "Comparison",
    "RotResult",
    "compare_rot",
    "rotation_number",
    "DirichletInterval",
    "nesting_inequality_holds",
    "perturbation_step",
    "delta_search",
    "Supply",
    "RigidSupply",
    "ConjugatedRotationSupply",
    "RandomPLSupply",
    "random_positive_pl",
    "default_battery",
    "irrational_scheme",
    "dirichlet_nesting_check",
    "IterationTrace",
    "TraceStep",
    "map_order",
]
