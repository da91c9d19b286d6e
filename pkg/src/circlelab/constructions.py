"""Builders for the example groups and the Denjoy-style blow-up."""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import mpmath

from . import piecewise as pw
from .core import ANGLE, CirclePoint
from .errors import BadRho, BasisFailure, DependentParameters, Indeterminate, PrecisionUnreachable, WrongInput
from .lift import LiftMap, frac_part
from .moebius import MoebiusMap
from .numbers import INF, Enclosure, Quad, fmt_rational, mpf_to_fraction
from .reports import FixedPoint, FixedPointReport

HALF = Fraction(1, 2)

# --- commuting pair swapped by an involution ------------------------------------------


def _factor(n: int) -> dict:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out



def exponent_vector(x: Fraction) -> dict:
    """Prime exponents of a positive rational."""
    x = Fraction(x)
    v = dict(_factor(x.numerator))
    for p, e in _factor(x.denominator).items():
        v[p] = v.get(p, 0) - e
    return v


def independence_certificate(lam, mu):
    """Exponent vectors of lam and mu; they are independent iff some 2x2 minor is nonzero."""
    a, b = exponent_vector(lam), exponent_vector(mu)
    primes = sorted(set(a) | set(b))
    for i, p in enumerate(primes):
        for q in primes[i + 1 :]:
            minor = a.get(p, 0) * b.get(q, 0) - a.get(q, 0) * b.get(p, 0)
            if minor != 0:
                return {"lambda": a, "mu": b, "minor": (p, q, minor)}
    return None


@dataclass
class TheoremBGroup:
    lam: Fraction
    mu: Fraction
    f: pw.PiecewiseMap
    g: pw.PiecewiseMap
    R: pw.PiecewiseMap
    certificate: dict
    relations: dict = field(default_factory=dict)

    @property
    def gens(self):
        return [self.f, self.R]

    @property
    def names(self):
        return ["f", "R"]

    @property
    def basis(self):
        return [self.f, self.g]

    @property
    def involution(self):
        return self.R

    def f_power_g_power(self, a, b):
        return self.f.power(a).compose(self.g.power(b))

    def to_json(self):
        return {
            "lambda": fmt_rational(self.lam),
            "mu": fmt_rational(self.mu),
            "relations": self.relations,
            "independence": {
                "lambda": {str(k): v for k, v in self.certificate["lambda"].items()},
                "mu": {str(k): v for k, v in self.certificate["mu"].items()},
            },
            "f": _pieces_json(self.f),
            "g": _pieces_json(self.g),
        }


def _pieces_json(m):
    bs = m.breakpoints()
    out = []
    for b, mat in zip(bs or [None], m.pieces()):
        mm = MoebiusMap(*mat)
        out.append({"from": None if b is None else ("inf" if b is INF else fmt_rational(b)), "matrix": mm.to_json()})
    return out


def build_theorem_b(lam=2, mu=3) -> TheoremBGroup:
    """f = lam x on [0, inf], mu x on [inf, 0]; R = -1/x; g = R f R."""
    lam, mu = Fraction(lam), Fraction(mu)
    if lam <= 1 or mu <= 1:
        raise WrongInput("lambda and mu must exceed 1")
    cert = independence_certificate(lam, mu)
    if cert is None:
        raise DependentParameters(f"lambda^a = mu^b has a nontrivial solution for ({lam}, {mu})")
    one, zero = Fraction(1), Fraction(0)
    f = pw.pw_moebius([zero, INF], [(lam, zero, zero, one), (mu, zero, zero, one)], label="f")
    R = pw.half_turn()
    g = pw.pw_moebius([zero, INF], [(one / mu, zero, zero, one), (one / lam, zero, zero, one)], label="g")
    rel = {
        "RfR=g": R.compose(f).compose(R) == g,
        "fg=gf": f.compose(g) == g.compose(f),
        "R^2=id": R.compose(R).is_identity(),
    }
    return TheoremBGroup(lam, mu, f, g, R, cert, rel)


@dataclass
class InvolutionGroup:
    """A free abelian basis together with an involution normalizing it."""

    basis: list
    involution: pw.PiecewiseMap
    names: list = field(default_factory=list)


def psl_contrast_group() -> InvolutionGroup:
    """Diagonal elements diag(2, 1/2), diag(3, 1/3) with the half-turn."""
    four = MoebiusMap(2, 0, 0, Fraction(1, 2)).as_map(label="a")
    nine = MoebiusMap(3, 0, 0, Fraction(1, 3)).as_map(label="b")
    return InvolutionGroup([four, nine], pw.half_turn(), ["a", "b"])


def involution_action_matrix(G, bound=4):
    """Integer matrix of w -> R w R on the basis; column j holds R b_j R."""
    basis = list(G.basis)
    R = G.involution
    n = len(basis)
    import itertools

    cols = []
    for b in basis:
        target = R.compose(b).compose(R)
        found = None
        for exps in itertools.product(range(-bound, bound + 1), repeat=n):
            m = pw.identity(target.universe)
            for bj, e in zip(basis, exps):
                if e:
                    m = m.compose(bj.power(e))
            if m == target:
                found = list(exps)
                break
        if found is None:
            raise BasisFailure(f"conjugate not in the span of the basis with exponents <= {bound}")
        cols.append(found)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


# --- blow-up machinery ---------------------------------------------------------------


@dataclass
class BlowUpSpec:
    """Gap lengths scale * ratio^|w| over orbit labels; interior action per generator."""

    ratio: Fraction = Fraction(1, 2)
    scale: Fraction = Fraction(1, 4)
    interior: str = "affine"  # or "translation"
    depth_cap: int = 400

    def to_json(self):
        return {"ratio": fmt_rational(self.ratio), "scale": fmt_rational(self.scale), "interior": self.interior}


@dataclass
class _Table:
    labels: list
    xlo: list
    xhi: list
    lengths: list
    prefix: list
    tail: Fraction
    index: dict


class OrbitGaps:
    """Positions and lengths of the inserted gaps, tracked to a chosen depth.

    ``enumerate_fn(depth)`` yields (label, position enclosure in [0, 1), length)
    for the labels kept at that depth; ``total`` is the exact sum of all lengths.
    """

    def __init__(self, enumerate_fn, total: Fraction, depth_for: Callable, depth_cap: int):
        self.enumerate_fn = enumerate_fn
        self.total = Fraction(total)
        self.depth_for = depth_for
        self.depth_cap = depth_cap
        self._tables = {}

    def table(self, depth) -> _Table:
        depth = min(depth, self.depth_cap)
        if depth not in self._tables:
            rows = sorted(self.enumerate_fn(depth), key=lambda r: r[1].lo)
            for a, b in zip(rows, rows[1:]):
                if not a[1].hi < b[1].lo:
                    raise Indeterminate("orbit points are not separated", hint="raise the working precision")
            pre = [Fraction(0)]
            for r in rows:
                pre.append(pre[-1] + r[2])
            self._tables[depth] = _Table(
                [r[0] for r in rows],
                [r[1].lo for r in rows],
                [r[1].hi for r in rows],
                [r[2] for r in rows],
                pre,
                self.total - pre[-1],
                {r[0]: i for i, r in enumerate(rows)},
            )
        return self._tables[depth]

    def table_for_width(self, width):
        return self.table(self.depth_for(Fraction(width)))


class BlowUpNumeric(pw.NumericMap):
    """Enclosures of one blown-up generator on the new circle."""

    def __init__(self, blow: "BlowUp", gen: int, name="blown"):
        self.blow = blow
        self.gen = gen
        self.name = name

    def enclose(self, z, width=Fraction(1, 10**20)):
        return self.blow.apply(self.gen, Fraction(z), Fraction(width))


class BlowUp:
    """Blow-up of generators along a tracked orbit.

    ``base[i]`` is the i-th generator as a NumericMap in the angle chart.
    ``act(i, label)`` returns (image label, interior map) where the interior
    map sends an Enclosure of [0, 1] to an Enclosure of [0, 1].

    With S = 1 + total gap length, the collapse is
    c(z) = zS - sum_w min(l_w, max(0, (z - Lend_w) S)),
    which is monotone in every Lend_w, so enclosures of the left ends give
    rigorous bounds; untracked gaps contribute at most the tail.
    """

    def __init__(self, base, gaps: OrbitGaps, act):
        self.base = base
        self.gaps = gaps
        self.act = act
        self.S = 1 + gaps.total

    def gap_ends(self, T: _Table, i):
        left = Enclosure((T.xlo[i] + T.prefix[i]) / self.S, (T.xhi[i] + T.prefix[i] + T.tail) / self.S)
        ln = T.lengths[i] / self.S
        return left, Enclosure(left.lo + ln, left.hi + ln)

    def phi_bounds(self, T: _Table, lo, hi):
        """Enclosure of the (multi-valued) inclusion Phi over [lo, hi]."""
        k = math.floor(lo)
        y = lo - k
        a = k + (y + T.prefix[bisect_left(T.xhi, y)]) / self.S
        k = math.floor(hi)
        y = hi - k
        b = k + (y + T.prefix[bisect_right(T.xlo, y)] + T.tail) / self.S
        return Enclosure(a, b)

    def _collapse0(self, T: _Table, z0):
        """Enclosure of c(z0) for z0 in [0, 1)."""
        S = self.S
        lo = hi = z0 * S
        for i in range(len(T.labels)):
            ln = T.lengths[i]
            a = T.xlo[i] + T.prefix[i]  # S * Lend.lo
            b = T.xhi[i] + T.prefix[i] + T.tail  # S * Lend.hi
            zs = z0 * S
            hi -= min(ln, max(Fraction(0), zs - b))
            lo -= min(ln, max(Fraction(0), zs - a))
        return Enclosure(lo - T.tail, hi)

    def collapse_enclosure(self, z, width=Fraction(1, 10**20)):
        z = Fraction(z)
        T = self.gaps.table_for_width(width)
        k = math.floor(z)
        e = self._collapse0(T, z - k)
        return Enclosure(e.lo + k, e.hi + k)

    def collapse(self, z, width=Fraction(1, 10**20)):
        return self.collapse_enclosure(z, width)

    def _gap_param(self, T, i, z0):
        """Enclosure of the position of z0 inside gap i, clipped to [0, 1]."""
        left, _ = self.gap_ends(T, i)
        ln = T.lengths[i] / self.S
        clip = lambda v: min(Fraction(1), max(Fraction(0), v))  # noqa: E731
        return Enclosure(clip((z0 - left.hi) / ln), clip((z0 - left.lo) / ln))

    def apply(self, gen, z, width):
        T = self.gaps.table_for_width(width)
        k = math.floor(z)
        z0 = z - k
        f = self.base[gen]
        inner = width / 8
        # generic bound through the collapse
        c = self._collapse0(T, z0)
        fc = f.enclose_interval(c.lo, c.hi, inner)
        out = self.phi_bounds(T, fc.lo, fc.hi)
        lo, hi = out.lo, out.hi
        # sharpen near tracked gaps using monotonicity and the interior action
        i = bisect_right(T.xlo, c.hi) - 1
        for j in (i - 1, i, i + 1):
            if not 0 <= j < len(T.labels):
                continue
            left, right = self.gap_ends(T, j)
            if z0 < left.lo or z0 > right.hi:
                continue
            t = self._gap_param(T, j, z0)
            img = self._gap_image(T, gen, j, t, inner)
            if left.hi < z0 < right.lo:
                lo, hi = img.lo, img.hi
                break
            if z0 < right.lo:
                hi = min(hi, img.hi)
            if z0 > left.hi:
                lo = max(lo, img.lo)
        return Enclosure(lo + k, hi + k)

    def _gap_image(self, T, gen, i, t: Enclosure, width):
        x = Enclosure(T.xlo[i], T.xhi[i])
        fx = self.base[gen].enclose_interval(x.lo, x.hi, width)
        res = self.act(gen, T.labels[i])
        if res is not None:
            lab2, interior = res
            j = T.index.get(lab2)
            if j is not None:
                # lift offset between f(x_i) and x_j
                m = round((fx.lo + fx.hi) / 2 - (T.xlo[j] + T.xhi[j]) / 2)
                t2 = interior(t)
                left, _ = self.gap_ends(T, j)
                ln = T.lengths[j] / self.S
                return Enclosure(left.lo + t2.lo * ln + m, left.hi + t2.hi * ln + m)
        return self.phi_bounds(T, fx.lo, fx.hi)

def _affine_interior(t):
    return t


@dataclass
class BlowUpMap:
    """A blown-up map together with its collapse onto the original circle."""

    spec: BlowUpSpec
    original: pw.PiecewiseMap
    blown: pw.PiecewiseMap
    collapse: Callable  # z, width -> Enclosure (or exact value)
    exact: bool = False
    engine: Optional[BlowUp] = None
    total_gap: Fraction = Fraction(0)
    base_rotation: Optional[Enclosure] = None
    gap_list: list = field(default_factory=list)

    def largest_gaps(self, N):
        """The N longest inserted gaps as (left, right) rational endpoints."""
        if self.engine is None:
            return sorted(self.gap_list, key=lambda g: g[0] - g[1])[:N]
        T = self.engine.gaps.table(self.engine.gaps.depth_for(Fraction(1, 10**20)))
        order = sorted(range(len(T.labels)), key=lambda i: (-T.lengths[i], T.xlo[i]))[:N]
        out = []
        for i in order:
            left, right = self.engine.gap_ends(T, i)
            out.append((left.mid, left.mid + T.lengths[i] / self.engine.S))
        return out

    def gap_lengths(self, depth):
        T = self.engine.gaps.table(depth)
        return {lab: ln / self.engine.S for lab, ln in zip(T.labels, T.lengths)}


def _geometric_total(scale, ratio):
    return scale * (1 + 2 * ratio / (1 - ratio))


def _rigid_alpha(f):
    nm = f.to_numeric()
    if isinstance(nm, pw.RigidNumeric):
        return nm.alpha
    if f.is_exact and f.lift.is_translation:
        return Enclosure(f.lift.shift, f.lift.shift)
    return None


def denjoy_blowup(f, p=Fraction(0), spec: Optional[BlowUpSpec] = None) -> BlowUpMap:
    """Blow up the orbit of p under f, inserting gaps of length scale*ratio^|n|."""
    spec = spec or BlowUpSpec()
    if isinstance(p, CirclePoint):
        p = p.coord
    p = Fraction(p)
    if spec.scale == 0:
        ident = lambda z, width=None: Enclosure(Fraction(z), Fraction(z))  # noqa: E731
        return BlowUpMap(spec, f, f, ident, exact=f.is_exact, base_rotation=_rigid_alpha(f))
    if f.is_exact and f.universe == pw.PW_AFFINE:
        orbit = [p]
        x = p
        for _ in range(10**4):
            x = frac_part(f.lift(x))
            if x == p:
                return _finite_blowup(f, orbit, spec)
            orbit.append(x)
    return _infinite_blowup(f, p, spec)


def _finite_blowup(f, orbit, spec):
    """Exact blow-up of a periodic orbit: the result is piecewise affine."""
    n = len(orbit)
    ln = spec.scale  # equal lengths on a finite orbit
    L = ln * n
    S = 1 + L
    pts = sorted(orbit)
    F = f.lift

    def below(y):
        return sum(ln for x in pts if x < y)

    def phi_lift(y, side):
        k = math.floor(y)
        y0 = y - k
        s = below(y0) + (ln if side == "+" and y0 in pts else 0)
        return (y0 + s) / S + k

    # knots of the blown map: images of f's knots and the gap ends
    ys = sorted(set(frac_part(x) for x in F.knots) | set(pts))
    xs, vals = [], []
    for y in ys:
        if y in pts:
            for side in ("-", "+"):
                xs.append(phi_lift(y, side))
                vals.append(phi_lift(F(y), side))
        else:
            xs.append(phi_lift(y, "-"))
            vals.append(phi_lift(F(y), "-"))
    blown = pw.PiecewiseMap.from_lift(pw.PW_AFFINE, LiftMap.from_graph(xs, vals), label="blown")

    def collapse(z, width=None):
        z = Fraction(z)
        k = math.floor(z)
        z0 = z - k
        acc = Fraction(0)
        for x in pts:
            a = (x + acc) / S
            if z0 < a:
                break
            if z0 <= a + ln / S:
                return x + k
            acc += ln
        return z0 * S - acc + k

    gaps = []
    acc = Fraction(0)
    for x in pts:
        a = (x + acc) / S
        gaps.append((a, a + ln / S))
        acc += ln
    return BlowUpMap(spec, f, blown, collapse, exact=True, total_gap=L, base_rotation=_rigid_alpha(f), gap_list=gaps)


def _infinite_blowup(f, p, spec):
    r, c = Fraction(spec.ratio), Fraction(spec.scale)
    if not 0 < r < 1:
        raise WrongInput("ratio must lie in (0, 1)")
    total = _geometric_total(c, r)
    fnum = f.to_numeric()
    finv = pw.InverseNumeric(fnum)
    cache = {0: Enclosure(p, p)}
    work = Fraction(1, 10**60)

    def pos(n):
        if n not in cache:
            prev = pos(n - 1) if n > 0 else pos(n + 1)
            step = fnum if n > 0 else finv
            cache[n] = step.enclose_interval(prev.lo, prev.hi, work)
        return cache[n]

    def enumerate_fn(M):
        for n in range(-M, M + 1):
            e = pos(n)
            k = math.floor(e.lo)
            if math.floor(e.hi) != k:
                raise Indeterminate("orbit point straddles the base point", hint="narrow the enclosure")
            yield n, Enclosure(e.lo - k, e.hi - k), c * r ** abs(n)

    def depth_for(width):
        # tail of the geometric sums beyond |n| = M is 2 c r^(M+1) / (1 - r)
        M = 0
        while 2 * c * r ** (M + 1) / (1 - r) > width / 8:
            M += 1
            if M > spec.depth_cap:
                raise PrecisionUnreachable(f"tail above {float(width)} at depth cap {spec.depth_cap}")
        return M

    gaps = OrbitGaps(enumerate_fn, total, depth_for, spec.depth_cap)

    def act(gen, label):
        return label + 1, _affine_interior

    engine = BlowUp([fnum], gaps, act)
    blown = pw.PiecewiseMap(pw.NUMERIC, numeric=BlowUpNumeric(engine, 0, "blown"), label="blown")
    return BlowUpMap(
        spec,
        f,
        blown,
        engine.collapse,
        engine=engine,
        total_gap=total,
        base_rotation=_rigid_alpha(f),
    )


def golden_mean_enclosure(digits=60) -> Enclosure:
    """Rational enclosure of (sqrt 5 - 1)/2 of width about 10^-digits."""
    N = 10**digits
    r = math.isqrt(5 * N * N)
    return Enclosure(Fraction(r - N, 2 * N), Fraction(r + 1 - N, 2 * N))


def golden_denjoy(spec: Optional[BlowUpSpec] = None) -> BlowUpMap:
    """Blow-up of the golden rotation along the orbit of 0."""
    return denjoy_blowup(pw.rigid(golden_mean_enclosure()), Fraction(0), spec)


def semiconjugacy_check(b: BlowUpMap, samples=1000, eps=Fraction(1, 10**6), collapse=None):
    """(ok, witness): collapse o blown = original o collapse at sample points.

    Also checks that the collapse is monotone along the samples.
    """
    eps = Fraction(eps)
    col = collapse or b.collapse
    # irrational-looking offsets keep samples away from exact gap ends
    zs = [Fraction(i, samples) + Fraction(1, 7 * samples) for i in range(samples)]
    width = eps / 64
    if b.exact and collapse is None:
        F = b.original.lift
        B = b.blown.lift
        prev = None
        for z in zs:
            cz = col(z)
            lhs = col(B(z))
            rhs = F(cz)
            if lhs != rhs:
                return False, z
            if prev is not None and cz < prev:
                return False, z
            prev = cz
        return True, None
    onum = b.original.to_numeric()
    bnum = b.blown.to_numeric()
    prev = None
    for z in zs:
        cz = _enc(col(z, width))
        bz = bnum.enclose(z, width)
        lhs = Enclosure(_enc(col(bz.lo, width)).lo, _enc(col(bz.hi, width)).hi)
        rhs = onum.enclose_interval(cz.lo, cz.hi, width)
        resid = max(lhs.hi - rhs.lo, rhs.hi - lhs.lo)
        if resid >= eps:
            return False, z
        if prev is not None and cz.hi < prev.lo:
            return False, z
        prev = cz
    return True, None


def _enc(v):
    if isinstance(v, Enclosure):
        return v
    v = Fraction(v)
    return Enclosure(v, v)


def corrupted_collapse(b: BlowUpMap):
    """Collapse that forgets the largest gap: an injected fault for testing."""
    (a, c), = b.largest_gaps(1)
    shift = (c - a)

    def col(z, width=Fraction(1, 10**20)):
        z = Fraction(z)
        zz = z - shift if frac_part(z) > c else z
        return b.collapse(zz, width)

    return col


# --- parabolic translations with an elliptic element ----------------------------------


@dataclass(frozen=True)
class Syllable:
    kind: str  # "T" or "R"
    m: int = 0
    n: int = 0

    def weight_exp(self):
        return abs(self.m) + abs(self.n) if self.kind == "T" else 1

    def __str__(self):
        if self.kind == "R":
            return f"R^{self.m}"
        return f"T^({self.m},{self.n})"


def _t_syllables(bound):
    return [Syllable("T", m, n) for m in range(-bound, bound + 1) for n in range(-bound, bound + 1) if (m, n) != (0, 0)]


@dataclass
class Prop41Group:
    t: object
    rho: Fraction
    order: int
    L: int
    words_checked: int
    stabilizer_ok: bool
    stabilizer_words: int
    blowup: BlowUp
    T_alpha: pw.PiecewiseMap
    T_beta: pw.PiecewiseMap
    R: pw.PiecewiseMap
    blown_T_alpha: pw.PiecewiseMap
    sigma: Fraction
    scale: Fraction
    total_gap: Fraction

    def to_json(self):
        return {
            "t": str(self.t),
            "rho": fmt_rational(self.rho),
            "L": self.L,
            "words_checked": self.words_checked,
            "relation_found": False,
            "stabilizer_in_T": self.stabilizer_ok,
            "stabilizer_words": self.stabilizer_words,
            "sigma": fmt_rational(self.sigma),
            "total_gap": fmt_rational(self.total_gap),
        }


class _IvMat:
    """2x2 matrix with mpmath interval entries."""

    def __init__(self, a, b, c, d):
        self.e = (a, b, c, d)

    def __mul__(self, o):
        a, b, c, d = self.e
        p, q, r, s = o.e
        return _IvMat(a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)


def _iv(x):
    iv = mpmath.iv
    if isinstance(x, Quad):
        return iv.mpf(x.a.numerator) / x.a.denominator + iv.mpf(x.b.numerator) / x.b.denominator * iv.sqrt(iv.mpf(x.n))
    x = Fraction(x)
    return iv.mpf(x.numerator) / x.denominator


def _rot_iv(j, order):
    iv = mpmath.iv
    ang = iv.pi * j / order
    return _IvMat(iv.cos(ang), iv.sin(ang), -iv.sin(ang), iv.cos(ang))


def _contains_zero(v):
    return v.a <= 0 <= v.b


def _word_matrix(word, t, order):
    m = _IvMat(_iv(1), _iv(0), _iv(0), _iv(1))
    for s in word:
        if s.kind == "T":
            m = m * _IvMat(_iv(1), _iv(s.m) + _iv(s.n) * _iv(t), _iv(0), _iv(1))
        else:
            m = m * _rot_iv(s.m, order)
    return m


def _normal_forms(L, t_bound, order):
    ts = _t_syllables(t_bound)
    rs = [Syllable("R", j) for j in range(1, order)]
    out = []
    frontier = [()]
    for _ in range(L):
        nxt = []
        for w in frontier:
            if not w:
                choices = ts + rs
            else:
                choices = rs if w[-1].kind == "T" else ts
            for s in choices:
                nxt.append(w + (s,))
        out.extend(nxt)
        frontier = nxt
    return out


def _s(t):
    """The line-to-interval bijection t -> (1 + t/(1+|t|))/2."""
    return (1 + t / (1 + abs(t))) / 2


def _s_inv(u):
    v = 2 * u - 1
    return v / (1 - abs(v))


def _translation_interior(tau):
    """Translation by tau on the line, carried into [0, 1] by s."""

    def fn(t: Enclosure):
        def one(u):
            if u <= 0:
                return Fraction(0), Fraction(0)
            if u >= 1:
                return Fraction(1), Fraction(1)
            v = _s(_s_inv(u) + tau)
            if isinstance(v, Quad):
                with mpmath.workdps(60):
                    m = v.to_mpf(60)
                    pad = mpmath.mpf(10) ** -50
                    return mpf_to_fraction(m - pad), mpf_to_fraction(m + pad)
            return v, v

        lo, _ = one(t.lo)
        _, hi = one(t.hi)
        return Enclosure(max(Fraction(0), lo), min(Fraction(1), hi))

    return fn


def _angle_of_word(word, t, order, dps=60):
    """Angle-chart position of w(inf) as a padded enclosure."""
    with mpmath.workdps(dps):
        m = [mpmath.mpf(1), mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(1)]
        for s in word:
            if s.kind == "T":
                tv = t.to_mpf(dps) if isinstance(t, Quad) else mpmath.mpf(Fraction(t).numerator) / Fraction(t).denominator
                q = [mpmath.mpf(1), s.m + s.n * tv, mpmath.mpf(0), mpmath.mpf(1)]
            else:
                ang = mpmath.pi * s.m / order
                q = [mpmath.cos(ang), mpmath.sin(ang), -mpmath.sin(ang), mpmath.cos(ang)]
            a, b, c, d = m
            m = [a * q[0] + b * q[2], a * q[1] + b * q[3], c * q[0] + d * q[2], c * q[1] + d * q[3]]
        a, _, c, _ = m
        # the point (a : c) sits at angle theta with (a, c) ~ (-cos pi theta, sin pi theta)
        if c < 0:
            a, c = -a, -c
        theta = (mpmath.atan2(c, -a) / mpmath.pi) % 1
        pad = mpmath.mpf(10) ** -(dps - 12)
        lo, hi = mpf_to_fraction(theta - pad), mpf_to_fraction(theta + pad)
    return Enclosure(lo, hi)


def build_prop41(t=None, rho=Fraction(1, 7), L=4, sigma=Fraction(1, 64), scale=Fraction(1, 4), depth=4) -> Prop41Group:
    """Parabolic T_alpha, T_beta fixing inf and a rotation R_rho, blown up at the orbit of inf."""
    if t is None:
        t = Quad.make(0, 1, 2)
    rho = Fraction(rho)
    if t == 1:
        raise WrongInput("t = 1 makes T_beta = T_alpha; the stabilizer has rank 1")
    if not isinstance(t, Quad):
        raise WrongInput("t must be a quadratic irrational")
    order = rho.denominator
    if rho.numerator != 1:
        raise WrongInput("rho must be 1/n of a turn")
    iv = mpmath.iv
    iv.dps = 40
    words = _normal_forms(L, 1, order)
    stab_words = 0
    for w in words:
        M = _word_matrix(w, t, order)
        a, b, c, d = M.e
        # a word is the identity in PSL iff M = +-I
        plus = _contains_zero(a - 1) and _contains_zero(b) and _contains_zero(c) and _contains_zero(d - 1)
        minus = _contains_zero(a + 1) and _contains_zero(b) and _contains_zero(c) and _contains_zero(d + 1)
        if plus or minus:
            raise BadRho(f"possible relation {' '.join(map(str, w))}")
        if _contains_zero(c):
            if not (len(w) == 1 and w[0].kind == "T"):
                raise BadRho(f"word {' '.join(map(str, w))} may fix inf outside <T_alpha, T_beta>")
            stab_words += 1
    stab_ok = True

    # the blow-up over coset representatives (normal forms ending in R, or empty)
    A = ((1 + sigma) / (1 - sigma)) ** 2 - 1
    B = (order - 1) * sigma
    if A * B >= 1:
        raise WrongInput("sigma too large for a summable gap assignment")
    total = scale * (1 + (1 + A) * B / (1 - A * B))

    def reps(D):
        out = [()]
        frontier = [((), 0)]
        while frontier:
            nxt = []
            for w, e in frontier:
                if w and w[0].kind == "R":
                    choices = [Syllable("T", m, n) for m in range(-D, D + 1) for n in range(-D, D + 1) if (m, n) != (0, 0)]
                elif w:
                    choices = [Syllable("R", j) for j in range(1, order)]
                else:
                    choices = [Syllable("R", j) for j in range(1, order)]
                for s in choices:
                    e2 = e + s.weight_exp()
                    if e2 <= D:
                        w2 = (s,) + w
                        out.append(w2)
                        nxt.append((w2, e2))
            frontier = nxt
        return out

    def length(w):
        return scale * sigma ** sum(s.weight_exp() for s in w)

    pos_cache = {}

    def enumerate_fn(D):
        for w in reps(D):
            if w not in pos_cache:
                pos_cache[w] = Enclosure(Fraction(0), Fraction(0)) if not w else _angle_of_word(w, t, order)
            yield w, pos_cache[w], length(w)

    def depth_for(width):
        return depth

    gaps = OrbitGaps(enumerate_fn, total, depth_for, depth)

    def act(gen, label):
        # gen 0: T_alpha, 1: T_beta, 2: R
        if gen in (0, 1):
            a, b = (1, 0) if gen == 0 else (0, 1)
            if not label:
                tau = a + b * t
                return (), _translation_interior(tau)
            head = label[0]
            if head.kind == "T":
                m, n = head.m + a, head.n + b
                rest = label[1:]
                return ((Syllable("T", m, n),) + rest if (m, n) != (0, 0) else rest), _affine_interior
            return (Syllable("T", a, b),) + label, _affine_interior
        if not label:
            return (Syllable("R", 1),), _affine_interior
        head = label[0]
        if head.kind == "R":
            j = (head.m + 1) % order
            rest = label[1:]
            return ((Syllable("R", j),) + rest if j else rest), _affine_interior
        return (Syllable("R", 1),) + label, _affine_interior

    Ta = MoebiusMap(1, 1, 0, 1).as_map(label="T_alpha")
    Tb = MoebiusMap(1, t, 0, 1).as_map(label="T_beta")
    Rr = pw.rigid(Enclosure(rho, rho))
    engine = BlowUp([Ta.to_numeric(), Tb.to_numeric(), Rr.to_numeric()], gaps, act)
    blown_Ta = pw.PiecewiseMap(pw.NUMERIC, numeric=BlowUpNumeric(engine, 0, "blown T_alpha"), label="blown T_alpha")
    return Prop41Group(t, rho, order, L, len(words), stab_ok, stab_words, engine, Ta, Tb, Rr, blown_Ta, sigma, scale, total)


def prop41_blown_fixed_points(G: Prop41Group, eta=Fraction(1, 100)) -> FixedPointReport:
    """Fixed points of the blown-up T_alpha.

    The collapse intertwines the blown map with T_alpha, whose only fixed point
    is inf, so fixed points lie in the gap inserted at inf; inside it the map
    is a translation carried by s, fixing exactly the two endpoints.  The
    displacement sign is certified just outside and just inside each end.
    """
    eng = G.blowup
    T = eng.gaps.table(eng.gaps.depth_for(Fraction(1, 10**20)))
    i = T.index[()]
    left, right = eng.gap_ends(T, i)
    width = Fraction(1, 10**30)
    ln = T.lengths[i] / eng.S
    probes = {
        "left_out": left.lo - eta + 1,
        "left_in": left.hi + ln * eta,
        "right_in": right.lo - ln * eta,
        "right_out": right.hi + eta,
    }
    signs = {}
    B = G.blown_T_alpha.to_numeric()
    for k, z in probes.items():
        e = B.enclose(z, width)
        lo, hi = e.lo - z, e.hi - z
        lo -= math.floor(lo + HALF)  # displacement modulo 1 near 0
        hi = lo + (e.hi - e.lo)
        signs[k] = 1 if lo > 0 else -1 if hi < 0 else 0
    from .reports import nature_from_signs

    if 0 in signs.values():
        raise Indeterminate("displacement sign not certified near the inserted interval", hint="lower eta")
    pts = [
        FixedPoint(CirclePoint(ANGLE, left), nature_from_signs(signs["left_out"], signs["left_in"])),
        FixedPoint(CirclePoint(ANGLE, right), nature_from_signs(signs["right_in"], signs["right_out"])),
    ]
    return FixedPointReport(points=pts, approximate=False)


__all__ = [
    "TheoremBGroup",
    "build_theorem_b",
    "independence_certificate",
    "InvolutionGroup",
    "psl_contrast_group",
    "involution_action_matrix",
    "BlowUpSpec",
    "BlowUpMap",
    "BlowUp",
    "denjoy_blowup",
    "golden_mean_enclosure",
    "golden_denjoy",
    "semiconjugacy_check",
    "corrupted_collapse",
    "Prop41Group",
    "build_prop41",
    "prop41_blown_fixed_points",
]
