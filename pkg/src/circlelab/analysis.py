"""Fixed points, crossings, element classification and group-level checks."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import core
from . import piecewise as pw
from .core import ANGLE, PROJECTIVE, CircleInterval, CirclePoint
from .errors import CannotAmplify, DegenerateCoincidence, Indeterminate, NotElementary, WrongInput
from .lift import LiftMap, frac_part, shift_number, sign
from .metrics import distance_inf
from .numbers import INF, AlgebraicRoot, Enclosure, fmt_rational, rational_between
from .reports import (
    SCHEMA,
    Crossing,
    CrossingReport,
    FixedPoint,
    FixedPointReport,
    Nature,
    nature_from_signs,
)
from .rotation import RotResult, rotation_number

# --- fixed points -----------------------------------------------------------------


def _reduce(u):
    """Lift coordinate -> representative in [0, 1)."""
    if isinstance(u, AlgebraicRoot):
        k = math.floor(u.lo)
        if math.floor(u.hi) != k:
            u.refine(min(u.hi - u.lo, Fraction(1)) / 4)
            while math.floor(u.lo) != math.floor(u.hi):
                u.refine((u.hi - u.lo) / 4)
            k = math.floor(u.lo)
        return shift_number(u, -k)
    return frac_part(u)


def _moebius_root(root: AlgebraicRoot, m):
    """The root transported through x = (alpha u + beta)/(gamma u + delta)."""
    A, B, C = root.coeffs
    al, be, ga, de = m
    a2 = A * de * de - B * de * ga + C * ga * ga
    a1 = -2 * A * de * be + B * (de * al + be * ga) - 2 * C * al * ga
    a0 = A * be * be - B * be * al + C * al * al
    ends = [(al * v + be) / (ga * v + de) for v in (root.lo, root.hi)]
    return AlgebraicRoot((a2, a1, a0), min(ends), max(ends))


def lift_point(u, chart) -> CirclePoint:
    """Circle point of the lift coordinate u (rational chart when projective)."""
    u = _reduce(u)
    if chart == ANGLE:
        return CirclePoint(ANGLE, u)
    if not isinstance(u, AlgebraicRoot):
        return CirclePoint(PROJECTIVE, core.from_rational_angle(u))
    half = Fraction(1, 2)
    while u.lo < half < u.hi:
        u.refine((u.hi - u.lo) / 4)
    if u.lo == 0:
        u.refine((u.hi - u.lo) / 4)
    inv = core.PHI_POS_INV if u.lo >= half else core.PHI_NEG_INV
    return CirclePoint(PROJECTIVE, _moebius_root(u, inv))


def lift_fixed_points(F: LiftMap, chart=ANGLE) -> FixedPointReport:
    """Fixed points of the circle map with normalized lift F."""
    if F.is_translation:
        if F.shift == 0:
            return FixedPointReport(is_identity=True)
        return FixedPointReport()
    # F(0) lies in [0, 1), so the displacement can only meet the integers 0 and 1
    for p in (Fraction(0), Fraction(1)):
        pts, arcs = F.roots(p)
        if pts or arcs:
            return _report_from_roots(F, p, pts, arcs, chart)
    return FixedPointReport()


def _report_from_roots(F, p, pts, arcs, chart):
    # features in lift order over one period, arcs contributing both ends
    feats = [(r, "pt") for r in pts]
    for a0, a1 in arcs:
        feats.append((a0, "start"))
        feats.append((a1, "end"))
    base = min(f[0] for f in feats)
    norm = []
    for x, kind in feats:
        while x >= base + 1:
            x = shift_number(x, -1)
        norm.append((x, kind))
    # an arc end can wrap past the period: keep (start, end) adjacent
    norm.sort(key=_SortKey)
    n = len(norm)
    gap_sign = []
    for i in range(n):
        x0, k0 = norm[i]
        x1 = norm[i + 1][0] if i + 1 < n else shift_number(norm[0][0], 1)
        if k0 == "start":
            gap_sign.append(0)
            continue
        m = rational_between(x0, x1)
        gap_sign.append(sign(F(m) - m - p))
    out = []
    arcs_out = []
    for i, (x, kind) in enumerate(norm):
        left = gap_sign[i - 1]
        right = gap_sign[i]
        if kind == "pt":
            nat = nature_from_signs(left, right)
        elif kind == "start":
            nat = Nature.SEMI_LEFT_IN if left > 0 else Nature.SEMI_LEFT_OUT
        else:
            nat = Nature.SEMI_RIGHT_IN if right < 0 else Nature.SEMI_RIGHT_OUT
        out.append(FixedPoint(lift_point(x, chart), nat))
    for a0, a1 in arcs:
        arcs_out.append(CircleInterval(lift_point(a0, chart), lift_point(a1, chart)))
    out.sort(key=lambda fp: _point_order(fp.point))
    return FixedPointReport(points=out, arcs=arcs_out)


class _SortKey:
    __slots__ = ("v",)

    def __init__(self, item):
        self.v = item[0]

    def __lt__(self, other):
        return self.v < other.v


def _point_order(p: CirclePoint):
    c = p.coord
    if c is INF:
        return (0, 0.0)
    return (1, float(c))


def fixed_points_report(f, samples=4096) -> FixedPointReport:
    """Exact report for exact universes; certified sign-change scan for numeric maps."""
    if f.is_exact:
        return lift_fixed_points(f.lift, f.chart)
    return numeric_fixed_points(f, samples)


def numeric_fixed_points(f, samples=4096, width=Fraction(1, 10**20)) -> FixedPointReport:
    """Brackets of certified sign changes of f(x) - x; flagged approximate.

    Cells where the displacement cannot be separated from 0 are reported as
    enclosures with a parabolic nature guess from the surrounding signs.
    """
    nm = f.to_numeric()
    xs = [Fraction(i, samples) for i in range(samples)]
    d0 = nm.enclose(Fraction(0), width)
    k = math.floor(d0.mid + Fraction(1, 2)) if d0.width < Fraction(1, 2) else 0
    signs = []
    for x in xs:
        e = nm.enclose(x, width)
        lo, hi = e.lo - x - k, e.hi - x - k
        signs.append(1 if lo > 0 else -1 if hi < 0 else 0)
    pts = []
    n = len(xs)
    i = 0
    while i < n:
        if signs[i] == 0:
            j = i
            while j < n and signs[j] == 0:
                j += 1
            left = signs[i - 1]
            right = signs[j % n]
            lo_x, hi_x = xs[i - 1] if i > 0 else xs[-1] - 1, xs[j] if j < n else Fraction(1)
            pts.append(FixedPoint(CirclePoint(ANGLE, Enclosure(lo_x, hi_x)), nature_from_signs(left, right)))
            i = j
            continue
        nxt = signs[(i + 1) % n]
        if nxt != 0 and nxt != signs[i]:
            hi_x = xs[i + 1] if i + 1 < n else Fraction(1)
            pts.append(FixedPoint(CirclePoint(ANGLE, Enclosure(xs[i], hi_x)), nature_from_signs(signs[i], nxt)))
        i += 1
    return FixedPointReport(points=pts, approximate=True)


# --- crossings -------------------------------------------------------------------------


def crossing_report(f, g) -> CrossingReport:
    """Points where f and g agree, via the fixed points of g^-1 f."""
    if f.is_exact and g.is_exact and f == g:
        raise DegenerateCoincidence("f and g coincide everywhere")
    h = g.inverse().compose(f)
    rep = fixed_points_report(h)
    crossings = [Crossing(fp.point, "Hyperbolic" if fp.crossing == "hyperbolic" else "Parabolic") for fp in rep.points]
    degenerate = bool(rep.arcs)
    notes = "agreement on an arc" if degenerate else ""
    count = len(crossings)
    return CrossingReport(count=count, crossings=crossings, degenerate=degenerate, approximate=rep.approximate, notes=notes)


# --- classification ----------------------------------------------------------------


@dataclass
class Classification:
    kind: str  # Trivial, EllipticLike, ParabolicLike, HyperbolicLike, NotMoebiusLike, Unknown
    rot: Optional[RotResult] = None
    points: list = field(default_factory=list)
    reason: str = ""
    evidence: dict = field(default_factory=dict)

    def __eq__(self, other):
        if isinstance(other, str):
            return self.kind == other
        if isinstance(other, Classification):
            return self.kind == other.kind and self.points == other.points
        return NotImplemented

    def to_json(self):
        out = {"schema": SCHEMA, "kind": self.kind}
        if self.rot is not None:
            out["rot"] = self.rot.to_json()
        if self.points:
            out["points"] = [p.to_json() for p in self.points]
        if self.reason:
            out["reason"] = self.reason
        if self.evidence:
            out["evidence"] = self.evidence
        return out


def wandering_probe(f, arc_len=Fraction(1, 1000), steps=200):
    """Lengths of the iterates of a small arc at 0 (angle chart of the lift)."""
    a, b = Fraction(0), arc_len
    lengths = []
    if f.is_exact and f.universe == pw.PW_AFFINE:
        F = f.lift
        for _ in range(steps):
            a, b = F(a), F(b)
            lengths.append(b - a)
        lens = [float(x) for x in lengths]
    else:
        nm = f.to_numeric()
        ea, eb = Enclosure(a, a), Enclosure(b, b)
        lens = []
        for _ in range(steps):
            ea = nm.enclose_interval(ea.lo, ea.hi, Fraction(1, 10**30))
            eb = nm.enclose_interval(eb.lo, eb.hi, Fraction(1, 10**30))
            lens.append(float(eb.mid - ea.mid))
    return {"arc": float(arc_len), "steps": steps, "min_length": min(lens), "max_length": max(lens), "final_length": lens[-1]}


def classify_element(f, q_cap=10**4) -> Classification:
    if f.is_exact and f.is_identity():
        return Classification("Trivial")
    rep = fixed_points_report(f)
    if rep.arcs:
        return Classification("NotMoebiusLike", points=rep.points, reason="an arc of fixed points")
    n = len(rep.points)
    if n == 1:
        return Classification("ParabolicLike", points=rep.points)
    if n == 2:
        nat = {p.nature for p in rep.points}
        if nat == {Nature.ATTRACTING, Nature.REPELLING}:
            return Classification("HyperbolicLike", points=rep.points)
        return Classification("NotMoebiusLike", points=rep.points, reason="two fixed points, not an attracting/repelling pair")
    if n >= 3:
        return Classification("NotMoebiusLike", points=rep.points, reason=f"{n} fixed points")
    r = rotation_number(f, q_cap=q_cap)
    if r.is_exact:
        q = r.value.denominator
        if f.power(q).is_identity():
            return Classification("EllipticLike", rot=r)
        return Classification("NotMoebiusLike", rot=r, reason=f"rotation number {r.value} but f^{q} is not the identity")
    return Classification("Unknown", rot=r, reason="irrational rotation number", evidence=wandering_probe(f))


# --- word balls ---------------------------------------------------------------------


def _letters(n):
    out = []
    for i in range(n):
        out.append((i, 1))
        out.append((i, -1))
    return out


def word_ball(gens, L):
    """Distinct maps in the ball of radius L with a shortest word for each.

    Returns a list of (word, map) in breadth-first order, identity first.
    """
    ident = pw.identity(gens[0].universe)
    seen = {ident: pw.GroupWord(())}
    order = [(pw.GroupWord(()), ident)]
    frontier = [(pw.GroupWord(()), ident)]
    steps = []
    for g, e in _letters(len(gens)):
        steps.append(((g, e), gens[g] if e == 1 else gens[g].inverse()))
    for _ in range(L):
        nxt = []
        for w, m in frontier:
            for letter, s in steps:
                if w.letters and w.letters[-1] == (letter[0], -letter[1]):
                    continue
                m2 = m.compose(s)
                if m2 in seen:
                    continue
                w2 = pw.GroupWord(w.letters + (letter,))
                seen[m2] = w2
                nxt.append((w2, m2))
        order.extend(nxt)
        frontier = nxt
        if not frontier:
            break
    return order


@dataclass
class WordBallReport:
    radius: int
    words_examined: int
    distinct: int
    max_fixed_points: object
    witness: Optional[str]
    histogram: dict
    counterexample: Optional[str] = None

    def to_json(self):
        mf = self.max_fixed_points
        return {
            "schema": SCHEMA,
            "radius": self.radius,
            "words_examined": self.words_examined,
            "distinct_nontrivial": self.distinct,
            "max_fixed_points": "inf" if mf == math.inf else mf,
            "witness": self.witness,
            "histogram": {("inf" if k == math.inf else str(k)): v for k, v in sorted(self.histogram.items(), key=lambda kv: float(kv[0]))},
            "counterexample": self.counterexample,
        }


def word_ball_max_fixed(gens, L, N_expected=None, names=None) -> WordBallReport:
    ball = word_ball(gens, L)
    n = 2 * len(gens)
    examined = 1 + sum(n * (n - 1) ** (k - 1) for k in range(1, L + 1))
    hist = Counter()
    best, witness, counter = -1, None, None
    for w, m in ball:
        if m.is_identity():
            continue
        c = fixed_points_report(m).count
        hist[c] += 1
        if c > best:
            best, witness = c, w.format(names)
        if N_expected is not None and c > N_expected and counter is None:
            counter = w.format(names)
    return WordBallReport(L, examined, len(ball) - 1, max(best, 0), witness, dict(hist), counter)


# --- elementary groups ------------------------------------------------------------


@dataclass
class ElementaryCertificate:
    kind: str  # GlobalFixedPoint, FiniteOrbit, RotationSemiConjugacy, None
    order: int = 0
    points: list = field(default_factory=list)
    checked_depth: int = 0
    evidence: str = ""

    def to_json(self):
        return {
            "schema": SCHEMA,
            "kind": self.kind,
            "order": self.order,
            "points": [p.to_json() for p in self.points],
            "checked_depth": self.checked_depth,
            "evidence": self.evidence,
        }


def _orbit(gens, x, cap):
    orbit = {x}
    stack = [x]
    while stack:
        y = stack.pop()
        for g in gens:
            z = frac_part(g.lift(y))
            if z not in orbit:
                orbit.add(z)
                if len(orbit) > cap:
                    return None
                stack.append(z)
    return orbit


def finite_orbit_search(gens, L=4, period_cap=12) -> ElementaryCertificate:
    if not gens:
        raise WrongInput("need at least one generator")
    depth = min(L, 4)
    seeds = {Fraction(0)}
    for _, m in word_ball(gens, depth):
        if m.is_identity():
            continue
        pts, arcs = [], []
        F = m.lift
        for p in (0, 1):
            a, b = F.roots(Fraction(p))
            pts += a
            arcs += b
        seeds.update(frac_part(x) for x in pts if not isinstance(x, AlgebraicRoot))
        seeds.update(frac_part(a0) for a0, _ in arcs)
        if not pts and not arcs:
            r = rotation_number(m, q_cap=period_cap)
            if r.is_exact and r.certificate.point is not None:
                seeds.add(frac_part(r.certificate.point))
    best = None
    for s in sorted(seeds, key=float):
        orb = _orbit(gens, s, period_cap if best is None else min(period_cap, len(best) - 1))
        if orb is not None and (best is None or len(orb) < len(best)):
            best = orb
    chart = gens[0].chart
    if best is not None:
        pts = sorted((lift_point(x, chart) for x in best), key=_point_order)
        kind = "GlobalFixedPoint" if len(best) == 1 else "FiniteOrbit"
        return ElementaryCertificate(kind, len(best), pts, depth)
    if all(a.compose(b) == b.compose(a) for a in gens for b in gens):
        return ElementaryCertificate(
            "RotationSemiConjugacy", 0, [], depth, "generators commute pairwise; abelian actions preserve a probability measure"
        )
    return ElementaryCertificate("None", 0, [], depth, f"no invariant set of size <= {period_cap}")


def rot_homomorphism_check(gens, L=3, q_cap=10**4, names=None):
    """(ok, witness): rot(w1 w2) = rot(w1) + rot(w2) mod 1 over the ball."""
    cert = finite_orbit_search(gens, L)
    if cert.kind == "None":
        raise NotElementary("no finite orbit or abelian structure found: " + cert.evidence)
    ball = word_ball(gens, L)
    rots = {}

    def rot(m):
        if m not in rots:
            rots[m] = rotation_number(m, q_cap=q_cap)
        return rots[m]

    for w1, m1 in ball:
        r1 = rot(m1)
        for w2, m2 in ball:
            r2 = rot(m2)
            r12 = rot(m1.compose(m2))
            if r1.is_exact and r2.is_exact and r12.is_exact:
                ok = frac_part(r1.value + r2.value) == r12.value
            else:
                ok = False
            if not ok:
                return False, f"rot({w1.format(names)} * {w2.format(names)})"
    return True, None


# --- amplification and calibration ---------------------------------------------------------


def _arc_length_image(f, I: CircleInterval, m):
    """Certified lower bound for the angle length of f^m(I)."""
    a, b = I.left.coord, I.right.coord
    if b <= a:
        b += 1
    if f.is_exact and f.universe == pw.PW_AFFINE:
        F = f.lift
        for _ in range(m):
            a, b = F(a), F(b)
        return b - a
    nm = f.to_numeric()
    ea, eb = Enclosure(a, a), Enclosure(b, b)
    for _ in range(m):
        ea = nm.enclose_interval(ea.lo, ea.hi, Fraction(1, 10**30))
        eb = nm.enclose_interval(eb.lo, eb.hi, Fraction(1, 10**30))
    return eb.lo - ea.hi


def amplify_local_closeness(f, g, I: CircleInterval, eta, cap=40, tol=None):
    """(m, h) with h = f^m g f^-m and certified d_inf(h, id) < eta."""
    eta = Fraction(eta)
    tol = tol or eta / 8
    ident = pw.identity(pw.NUMERIC if not (g.is_exact and g.universe == pw.PW_AFFINE) else pw.PW_AFFINE)
    if g.is_exact and g.is_identity():
        return 0, g
    if distance_inf(g, ident, tol).hi < eta:
        return 0, g
    if I.chart != ANGLE:
        raise WrongInput("the interval must be given in the angle chart")
    finv = f.inverse()
    fm, fmi = pw.identity(f.universe if f.is_exact else pw.NUMERIC), pw.identity(f.universe if f.is_exact else pw.NUMERIC)
    for m in range(1, cap + 1):
        fm = f.compose(fm)
        fmi = fmi.compose(finv)
        if _arc_length_image(f, I, m) <= 1 - eta / 2:
            continue
        h = fm.compose(g).compose(fmi)
        d = distance_inf(h, ident, tol, max_boxes=4000)
        if d.hi < eta:
            return m, h
    raise CannotAmplify(f"no m <= {cap} expands I past 1 - eta/2 with d_inf(h, id) < eta")


def power_distance_calibrate(g, eps, cap=10**4, tol=None):
    """First m with eps/4 < d_inf(g^m, id) <= eps/2."""
    eps = Fraction(eps)
    if g.is_exact and g.is_identity():
        raise WrongInput("g must be nontrivial")
    exact_affine = g.is_exact and g.universe == pw.PW_AFFINE
    ident = pw.identity(pw.PW_AFFINE if exact_affine else pw.NUMERIC)
    tol = tol or eps / 64
    gm = None
    for m in range(1, cap + 1):
        gm = g if gm is None else gm.compose(g)
        d = distance_inf(gm, ident, tol)
        if d.lo > eps / 4 and d.hi <= eps / 2:
            return m
        if d.lo > eps / 2:
            raise WrongInput(f"d_inf(g^{m}, id) jumped past eps/2; the premises fail")
        if d.hi > eps / 4 and d.lo <= eps / 4:
            raise Indeterminate(f"cannot separate d_inf(g^{m}, id) from eps/4", hint="lower tol")
    raise WrongInput(f"no m <= {cap} reaches eps/4")


# --- crossings near blow-up gaps --------------------------------------------------------------


def _convergents(lo, hi, q_max):
    """Convergents p/q shared by every number in [lo, hi], with q <= q_max."""
    out = []
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    a, b = Fraction(lo), Fraction(hi)
    while True:
        ta, tb = math.floor(a), math.floor(b)
        if ta != tb:
            break
        h0, h1 = h1, ta * h1 + h0
        k0, k1 = k1, ta * k1 + k0
        if k1 > q_max:
            break
        out.append((h1, k1))
        if a == ta or b == tb:
            break
        a, b = 1 / (b - tb), 1 / (a - ta)
    return out


def gap_crossing_probe(b, g, N=1, grid=8, q_max=10**4, width=Fraction(1, 10**25)) -> CrossingReport:
    """Certified sign changes of f^q - g near the N largest gaps of a blow-up.

    For each gap [a, c] pick a convergent p/q below alpha with q*alpha - p small
    against the gap, evaluate D = F^q - p - G on a window around the gap and
    count certified sign changes.
    """
    alpha = b.base_rotation
    conv = [(p, q) for p, q in _convergents(alpha.lo, alpha.hi, q_max) if Fraction(p, q) < alpha.lo and q > 1]
    if not conv:
        raise Indeterminate("no usable convergent below alpha", hint="narrow the rotation enclosure")
    fnum = b.blown.to_numeric()
    gnum = g.to_numeric()
    g0 = gnum.enclose(Fraction(0), width)
    kg = math.floor(g0.lo)
    crossings = []
    total = 0
    gaps = b.largest_gaps(N)
    for a, c in gaps:
        ln = c - a
        delta = Fraction(0)
        for t in (a, c):
            e = gnum.enclose(t, width)
            delta = max(delta, e.hi - t - kg)
        # convergent with (q alpha - p) small next to the gap length
        p, q = conv[-1]
        for pp, qq in conv:
            if (qq * alpha.hi - pp) * (1 + b.total_gap) < ln / 16:
                p, q = pp, qq
                break
        lo_w, hi_w = a - 2 * delta, c + 2 * delta
        xs = sorted({lo_w, a, c, hi_w} | {lo_w + (hi_w - lo_w) * Fraction(i, grid) for i in range(grid + 1)})
        signs = []
        for x in xs:
            e = Enclosure(x, x)
            for _ in range(q):
                e = fnum.enclose_interval(e.lo, e.hi, width)
            ge = gnum.enclose(x, width)
            dlo = e.lo - p - (ge.hi - kg)
            dhi = e.hi - p - (ge.lo - kg)
            s = 1 if dlo > 0 else -1 if dhi < 0 else 0
            signs.append((x, s))
        cert = [(x, s) for x, s in signs if s != 0]
        for (x0, s0), (x1, s1) in zip(cert, cert[1:]):
            if s0 != s1:
                total += 1
                crossings.append(Crossing(CirclePoint(ANGLE, Enclosure(x0, x1)), "Hyperbolic"))
    notes = f"N={N}, gaps={[(fmt_rational(a), fmt_rational(c)) for a, c in gaps]}"
    return CrossingReport(count=total, crossings=crossings, approximate=False, notes=notes)


__all__ = [
    "lift_fixed_points",
    "lift_point",
    "fixed_points_report",
    "numeric_fixed_points",
    "crossing_report",
    "Classification",
    "classify_element",
    "wandering_probe",
    "word_ball",
    "WordBallReport",
    "word_ball_max_fixed",
    "ElementaryCertificate",
    "finite_orbit_search",
    "rot_homomorphism_check",
    "amplify_local_closeness",
    "power_distance_calibrate",
    "gap_crossing_probe",
]
