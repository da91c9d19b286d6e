"""Circle homeomorphisms in three universes.

* ``PwAffine``: exact piecewise-affine maps in the angle chart.
* ``PwMoebius``: exact piecewise-Moebius maps of the projective line.
* ``Numeric``: monotone maps known through rational enclosures of their lift.

Both exact universes share the ``LiftMap`` engine.  A projective map is stored
through the rational chart of ``core.to_rational_angle``, where every
Moebius piece stays a Moebius piece with entries in the same field.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from . import core
from .core import ANGLE, PROJECTIVE, CirclePoint
from .errors import BadWord, Indeterminate, Undecidable, UniverseMismatch, WrongInput
from .lift import (
    LiftMap,
    canon,
    frac_part,
    mat_adj,
    mat_mul,
    translation_mat,
)
from .numbers import INF, AlgebraicRoot, Enclosure, Quad

PW_MOEBIUS = "PwMoebius"
PW_AFFINE = "PwAffine"
NUMERIC = "Numeric"
UNIVERSES = (PW_MOEBIUS, PW_AFFINE, NUMERIC)

HALF = Fraction(1, 2)


# --- projective helpers --------------------------------------------------------


def proj_apply(m, x):
    """Moebius action on the projective line, INF included."""
    a, b, c, d = m
    if x is INF:
        return INF if c == 0 else a / c
    den = c * x + d
    if den == 0:
        return INF
    return (a * x + b) / den


def _branch_in(u):
    # rational chart -> projective, as a matrix acting on u
    return core.PHI_POS_INV if u >= HALF else core.PHI_NEG_INV


def _branch_out(y):
    # projective -> rational chart
    return core.PHI_POS if (y is not INF and y > 0) else core.PHI_NEG


def moebius_pieces_to_lift(breaks, mats) -> LiftMap:
    """Lift of a piecewise-Moebius map given by cyclic breakpoints and pieces."""
    if len(breaks) != len(mats) and not (not breaks and len(mats) == 1):
        raise ValueError("need one piece per gap between breakpoints")
    ub = [core.to_rational_angle(b) for b in breaks]
    if ub:
        r = min(range(len(ub)), key=lambda i: ub[i])
        ub = ub[r:] + ub[:r]
        mats = list(mats[r:]) + list(mats[:r])
        if any(ub[i] >= ub[i + 1] for i in range(len(ub) - 1)):
            raise ValueError("breakpoints are not cyclically ordered")
    cuts = set(ub) | {Fraction(0), HALF}
    for m in mats:
        inv = mat_adj(m)
        for target in (Fraction(0), INF):
            cuts.add(core.to_rational_angle(proj_apply(inv, target)))
    cuts = sorted(cuts)
    n = len(cuts)
    pieces = []
    for j in range(n):
        c1 = cuts[j + 1] if j + 1 < n else Fraction(1)
        mid = (cuts[j] + c1) / 2
        i = (bisect_right(ub, mid) - 1) % len(mats) if ub else 0
        m = mats[i]
        x = core.from_rational_angle(mid)
        y = proj_apply(m, x)
        pieces.append(mat_mul(mat_mul(_branch_out(y), m), _branch_in(mid)))
    return LiftMap.from_circle_pieces(cuts, pieces).normalized()


def lift_to_moebius_pieces(F: LiftMap):
    """Breakpoints and projective matrices of a rational-chart lift (normal form)."""
    cuts = {Fraction(0), HALF}
    cuts.update(frac_part(k) for k in F.knots)
    cuts.add(frac_part(F.inv(Fraction(0))))
    cuts.add(frac_part(F.inv(HALF)))
    cuts = sorted(cuts)
    n = len(cuts)
    out = []
    for j in range(n):
        c1 = cuts[j + 1] if j + 1 < n else Fraction(1)
        mid = (cuts[j] + c1) / 2
        v = F(mid)
        k = math.floor(v)
        y = v - k
        local = mat_mul(translation_mat(Fraction(-k)), F.local(mid))
        p_out = core.PHI_POS_INV if y >= HALF else core.PHI_NEG_INV
        p_in = core.PHI_POS if mid >= HALF else core.PHI_NEG
        out.append(canon(mat_mul(mat_mul(p_out, local), p_in)))
    # merge equal neighbours, cyclically
    breaks = [core.from_rational_angle(c) for c in cuts]
    keep_b, keep_m = [], []
    for b, m in zip(breaks, out):
        if keep_m and keep_m[-1] == m:
            continue
        keep_b.append(b)
        keep_m.append(m)
    if len(keep_m) > 1 and keep_m[0] == keep_m[-1]:
        keep_b.pop(0)
        keep_m.pop(0)
    if len(keep_m) == 1:
        return [], keep_m
    return keep_b, keep_m


# --- numeric maps ----------------------------------------------------------------


def _digits(width):
    width = Fraction(width)
    if width >= 1:
        return 30
    return max(30, int(-math.log10(width)) + 12)


class NumericMap:
    """A circle homeomorphism known through enclosures of its lift F (F(0) in [0,1))."""

    name = "numeric"

    def enclose(self, x, width=Fraction(1, 10**20)) -> Enclosure:
        raise NotImplementedError

    def enclose_interval(self, lo, hi, width=Fraction(1, 10**20)) -> Enclosure:
        a = self.enclose(lo, width)
        b = a if hi == lo else self.enclose(hi, width)
        return Enclosure(a.lo, b.hi)


class ExactNumeric(NumericMap):
    """Angle-chart view of an exact map (through the tan chart for projective maps)."""

    def __init__(self, pm: "PiecewiseMap"):
        self.pm = pm
        self.name = f"embed({pm.universe})"

    def enclose(self, x, width=Fraction(1, 10**20)):
        F = self.pm.lift
        x = Fraction(x)
        if self.pm.universe == PW_AFFINE:
            v = F(x)
            return Enclosure(v, v)
        digits = _digits(width)
        u = core.tan_angle_to_rational_angle(x, digits)
        lo = core.rational_angle_to_tan_angle(F(u.lo), digits).lo
        hi = core.rational_angle_to_tan_angle(F(u.hi), digits).hi
        return Enclosure(lo, hi)


class RigidNumeric(NumericMap):
    """Rotation by an angle known through an enclosure."""

    def __init__(self, alpha: Enclosure, name="rigid"):
        self.alpha = alpha
        self.name = name

    def enclose(self, x, width=None):
        return Enclosure(x + self.alpha.lo, x + self.alpha.hi)


class FunctionNumeric(NumericMap):
    def __init__(self, fn, name="function"):
        self.fn = fn
        self.name = name

    def enclose(self, x, width=Fraction(1, 10**20)):
        return self.fn(Fraction(x), Fraction(width))


class ComposedNumeric(NumericMap):
    def __init__(self, outer: NumericMap, inner: NumericMap):
        self.outer = outer
        self.inner = inner
        self.name = f"({outer.name})o({inner.name})"

    def enclose(self, x, width=Fraction(1, 10**20)):
        e = self.inner.enclose(x, width / 4)
        return self.outer.enclose_interval(e.lo, e.hi, width / 4)


class InverseNumeric(NumericMap):
    def __init__(self, base: NumericMap, max_steps=400):
        self.base = base
        self.max_steps = max_steps
        self.name = f"({base.name})^-1"

    def enclose(self, y, width=Fraction(1, 10**20)):
        y = Fraction(y)
        inner = Fraction(width) / 8
        e0 = self.base.enclose(Fraction(0), inner)
        lo = y - e0.hi - 1
        hi = y - e0.lo + 1
        for _ in range(self.max_steps):
            if hi - lo <= width:
                break
            a = lo + (hi - lo) / 3
            b = lo + 2 * (hi - lo) / 3
            ea = self.base.enclose(a, inner)
            eb = self.base.enclose(b, inner)
            moved = False
            if ea.hi < y:
                lo = a
                moved = True
            elif ea.lo > y:
                hi = a
                moved = True
            if eb.lo > y:
                hi = min(hi, b)
                moved = True
            elif eb.hi < y:
                lo = max(lo, b)
                moved = True
            if not moved:
                inner /= 16
                if inner < Fraction(1, 10**200):
                    raise Indeterminate("inverse bisection stalled", hint="increase working precision")
        return Enclosure(lo, hi)


# --- the facade ------------------------------------------------------------------


class PiecewiseMap:
    """An orientation-preserving circle homeomorphism.

    Exact universes keep a normalized lift (F(0) in [0,1)); the numeric
    universe keeps a ``NumericMap``.
    """

    __slots__ = ("universe", "lift", "numeric", "label")

    def __init__(self, universe, lift=None, numeric=None, label=None):
        if universe not in UNIVERSES:
            raise ValueError(f"unknown universe {universe!r}")
        self.universe = universe
        self.lift = lift
        self.numeric = numeric
        self.label = label

    # --- construction ------------------------------------------------------

    @classmethod
    def from_lift(cls, universe, F: LiftMap, label=None):
        return cls(universe, lift=F.normalized(), label=label)

    @property
    def chart(self):
        return PROJECTIVE if self.universe == PW_MOEBIUS else ANGLE

    @property
    def is_exact(self):
        return self.universe != NUMERIC

    # --- display data -------------------------------------------------------

    def breakpoints(self):
        if self.universe == PW_AFFINE:
            return list(self.lift.knots)
        if self.universe == PW_MOEBIUS:
            return lift_to_moebius_pieces(self.lift)[0]
        raise Undecidable("numeric maps carry no breakpoint list")

    def pieces(self):
        """Affine (slope, offset) pairs, or projective matrices (a, b, c, d)."""
        if self.universe == PW_AFFINE:
            return [(m[0], m[1]) for m in self.lift.mats]
        if self.universe == PW_MOEBIUS:
            return lift_to_moebius_pieces(self.lift)[1]
        raise Undecidable("numeric maps carry no piece list")

    def piece_count(self):
        return max(1, len(self.breakpoints()))

    # --- algebra --------------------------------------------------------------

    def compose(self, other: "PiecewiseMap") -> "PiecewiseMap":
        """self o other."""
        if self.is_exact and other.is_exact:
            if self.universe != other.universe:
                raise UniverseMismatch(f"cannot compose {self.universe} with {other.universe}; embed explicitly")
            return PiecewiseMap.from_lift(self.universe, self.lift.compose(other.lift))
        return PiecewiseMap(NUMERIC, numeric=ComposedNumeric(self.to_numeric(), other.to_numeric()))

    def __matmul__(self, other):
        return self.compose(other)

    def inverse(self) -> "PiecewiseMap":
        if self.is_exact:
            return PiecewiseMap.from_lift(self.universe, self.lift.inverse())
        return PiecewiseMap(NUMERIC, numeric=InverseNumeric(self.numeric))

    def power(self, n: int) -> "PiecewiseMap":
        if self.is_exact:
            return PiecewiseMap.from_lift(self.universe, self.lift.power(n))
        base = self if n >= 0 else self.inverse()
        out = identity(NUMERIC)
        for _ in range(abs(n)):
            out = base.compose(out)
        return out

    def to_numeric(self) -> NumericMap:
        if self.universe == NUMERIC:
            return self.numeric
        return ExactNumeric(self)

    def embed(self) -> "PiecewiseMap":
        """Explicit bridge into the numeric universe (angle chart)."""
        return PiecewiseMap(NUMERIC, numeric=self.to_numeric(), label=self.label)

    def is_identity(self):
        if not self.is_exact:
            raise Undecidable("identity test is undecidable for numeric maps")
        return self.lift.is_translation and self.lift.shift == 0

    # --- equality --------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PiecewiseMap):
            return NotImplemented
        if not (self.is_exact and other.is_exact):
            raise Undecidable("equality of numeric maps is undecidable; use approx_equal")
        return self.universe == other.universe and self.lift == other.lift

    def __hash__(self):
        if not self.is_exact:
            return id(self)
        return hash((self.universe, self.lift))

    def approx_equal(self, other, eps=Fraction(1, 10**6), samples=64):
        from .metrics import distance_inf

        return distance_inf(self, other, eps / 4).hi < eps

    # --- evaluation -------------------------------------------------------------

    def lift_value(self, x):
        """F(x) for the normalized lift: exact in exact universes, else an enclosure."""
        if self.is_exact:
            return self.lift(x)
        return self.numeric.enclose(Fraction(x))

    def __call__(self, x):
        return pw_evaluate(self, x)

    def __repr__(self):
        if self.label:
            return f"<{self.universe} {self.label}>"
        if self.is_exact:
            return f"<{self.universe} {len(self.lift.knots)} knots>"
        return f"<Numeric {self.numeric.name}>"


def pw_evaluate(f: PiecewiseMap, x, width=Fraction(1, 10**12)):
    """Image of a point; exact in, exact out for exact universes."""
    if not isinstance(x, CirclePoint):
        x = CirclePoint(f.chart, x if x is INF else Fraction(x) if isinstance(x, int) else x)
    if f.universe == NUMERIC:
        if x.chart != ANGLE:
            x = core.chart_convert(x, ANGLE, width)
        c = x.coord
        if isinstance(c, (Enclosure, AlgebraicRoot)):
            e = f.numeric.enclose_interval(c.lo, c.hi, width)
        else:
            e = f.numeric.enclose(Fraction(c), width)
        k = math.floor(e.lo)
        return CirclePoint(ANGLE, Enclosure(e.lo - k, e.hi - k))
    if x.chart != f.chart:
        raise UniverseMismatch(f"{f.universe} maps act on the {f.chart} chart")
    c = x.coord
    if isinstance(c, (Enclosure, AlgebraicRoot)):
        if f.universe == PW_MOEBIUS:
            raise WrongInput("enclosure input for projective maps: embed the map first")
        lo, hi = f.lift(c.lo), f.lift(c.hi)
        k = math.floor(lo)
        return CirclePoint(ANGLE, Enclosure(lo - k, hi - k))
    if f.universe == PW_AFFINE:
        return CirclePoint(ANGLE, frac_part(f.lift(c)))
    u = core.to_rational_angle(c)
    return CirclePoint(PROJECTIVE, core.from_rational_angle(frac_part(f.lift(u))))


def pw_compose(f, g):
    return f.compose(g)


def pw_inverse(f):
    return f.inverse()


def pw_equal(f, g):
    return f == g


# --- constructors -------------------------------------------------------------------


def identity(universe=PW_AFFINE):
    if universe == NUMERIC:
        return PiecewiseMap(NUMERIC, numeric=RigidNumeric(Enclosure(Fraction(0), Fraction(0)), "id"), label="id")
    return PiecewiseMap(universe, lift=LiftMap.identity(), label="id")


def rigid(t, universe=PW_AFFINE):
    """Rotation by t turns.  In the projective universe only angles with an
    exact quadratic tangent are available."""
    if isinstance(t, Enclosure):
        return PiecewiseMap(NUMERIC, numeric=RigidNumeric(t, f"R[{t.lo},{t.hi}]"))
    t = Fraction(t) if isinstance(t, int) else t
    if universe == PW_AFFINE:
        return PiecewiseMap(PW_AFFINE, lift=LiftMap.translation(frac_part(t)), label=f"R_{t}")
    if universe == PW_MOEBIUS:
        from .moebius import projective_rotation

        m = projective_rotation(t)
        if m is None:
            raise WrongInput(f"rotation by {t} has no exact projective matrix")
        return moebius_map(m.entries, label=f"R_{t}")
    return rigid(Enclosure(Fraction(t), Fraction(t)))


def half_turn(universe=PW_MOEBIUS):
    """x -> -1/x projectively, R_{1/2} in the angle chart."""
    if universe == PW_MOEBIUS:
        return moebius_map((Fraction(0), Fraction(-1), Fraction(1), Fraction(0)), label="R")
    return rigid(HALF, universe)


def pw_affine(breakpoints, pieces, label=None):
    """Piecewise-affine map; piece i is x -> s*x + t on [b_i, b_{i+1}] (mod 1)."""
    bs = [Fraction(b) if isinstance(b, int) else b for b in breakpoints]
    if not bs:
        (s, t), = pieces
        if s != 1:
            raise ValueError("a map without breakpoints must be a rotation")
        return rigid(t)
    mats = []
    for s, t in pieces:
        if s <= 0:
            raise ValueError("slopes must be positive")
        mats.append((s, t, Fraction(0), Fraction(1)))
    order = sorted(range(len(bs)), key=lambda i: bs[i])
    bs = [bs[i] for i in order]
    mats = [mats[i] for i in order]
    if any(not (0 <= b < 1) for b in bs) or len(set(bs)) != len(bs):
        raise ValueError("breakpoints must be distinct and lie in [0,1)")
    return PiecewiseMap.from_lift(PW_AFFINE, LiftMap.from_circle_pieces(bs, mats), label=label)


def pw_affine_graph(xs, ys, label=None):
    """Piecewise-affine map through the lift points (x_i, y_i)."""
    return PiecewiseMap.from_lift(PW_AFFINE, LiftMap.from_graph(list(xs), list(ys)), label=label)


def pw_moebius(breakpoints, matrices, label=None):
    """Piecewise-Moebius map; matrix i acts on the arc [b_i, b_{i+1}]."""
    mats = [tuple(_entries(m)) for m in matrices]
    for m in mats:
        if m[0] * m[3] - m[1] * m[2] <= 0:
            raise ValueError("pieces must have positive determinant")
    return PiecewiseMap.from_lift(PW_MOEBIUS, moebius_pieces_to_lift(list(breakpoints), mats), label=label)


def moebius_map(m, label=None):
    return pw_moebius([], [m], label=label)


def _entries(m):
    if hasattr(m, "entries"):
        return m.entries
    if len(m) == 2:
        (a, b), (c, d) = m
        return tuple(Fraction(v) if isinstance(v, int) else v for v in (a, b, c, d))
    return tuple(Fraction(v) if isinstance(v, int) else v for v in m)


def numeric_map(fn, name="function"):
    """Numeric map from a callable (x, width) -> Enclosure of the lift."""
    return PiecewiseMap(NUMERIC, numeric=FunctionNumeric(fn, name), label=name)


# --- words -------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupWord:
    letters: tuple = ()

    def __post_init__(self):
        out = []
        for g, e in self.letters:
            if e not in (1, -1):
                raise BadWord(f"exponent must be +1 or -1, got {e}")
            if out and out[-1] == (g, -e):
                out.pop()
            else:
                out.append((g, e))
        object.__setattr__(self, "letters", tuple(out))

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other):
        return GroupWord(self.letters + other.letters)

    def inverse(self):
        return GroupWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def format(self, names=None):
        if not self.letters:
            return "id"
        parts = []
        for g, e in self.letters:
            n = names[g] if names else f"g{g}"
            parts.append(n if e == 1 else f"{n}^-1")
        return " ".join(parts)

    @classmethod
    def parse(cls, text, names):
        letters = []
        for tok in text.split():
            base, _, exp = tok.partition("^")
            if base not in names:
                raise BadWord(f"unknown generator {base!r}")
            e = int(exp) if exp else 1
            step = 1 if e > 0 else -1
            letters.extend([(names.index(base), step)] * abs(e))
        return cls(tuple(letters))


def word_to_map(gens, w: GroupWord) -> PiecewiseMap:
    """The product s_1 s_2 ... s_k, acting as s_1 o s_2 o ... o s_k."""
    if not gens:
        raise BadWord("empty generator list")
    universe = gens[0].universe
    out = identity(universe)
    invs = {}
    for g, e in w.letters:
        if not 0 <= g < len(gens):
            raise BadWord(f"generator index {g} out of range")
        if e == 1:
            s = gens[g]
        else:
            if g not in invs:
                invs[g] = gens[g].inverse()
            s = invs[g]
        out = out.compose(s)
    return out


def lift_iterate(f: PiecewiseMap, x, n: int):
    """F^n(x) for the normalized lift; exact for PwAffine, an enclosure otherwise."""
    x = Fraction(x)
    if f.universe == PW_AFFINE:
        F = f.lift if n >= 0 else f.lift.inverse()
        for _ in range(abs(n)):
            x = F(x)
        return x
    nm = f.to_numeric() if n >= 0 else f.inverse().to_numeric()
    e = Enclosure(x, x)
    for _ in range(abs(n)):
        e = nm.enclose_interval(e.lo, e.hi)
    return e


__all__ = [
    "PW_MOEBIUS",
    "PW_AFFINE",
    "NUMERIC",
    "PiecewiseMap",
    "NumericMap",
    "ExactNumeric",
    "RigidNumeric",
    "FunctionNumeric",
    "ComposedNumeric",
    "InverseNumeric",
    "GroupWord",
    "pw_evaluate",
    "pw_compose",
    "pw_inverse",
    "pw_equal",
    "word_to_map",
    "lift_iterate",
    "identity",
    "rigid",
    "half_turn",
    "pw_affine",
    "pw_affine_graph",
    "pw_moebius",
    "moebius_map",
    "numeric_map",
    "proj_apply",
    "Quad",
]
