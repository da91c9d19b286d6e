"""Exact lifts of piecewise-Moebius circle maps.

A ``LiftMap`` is a homeomorphism F of the real line with F(x + 1) = F(x) + 1,
described by knots x_0 < ... < x_{n-1} in [0, 1) and one 2x2 matrix per
segment [x_i, x_{i+1}] (the last segment is [x_{n-1}, x_0 + 1]).  On a segment
F(x) = (a x + b) / (c x + d).  Outside [x_0, x_0 + 1) the matrices are
conjugated by integer translations.  A map with no knots is a translation.

Piecewise-affine maps are the special case c = 0.  Matrices are stored in a
canonical projective form (c = 1, or c = 0 and d = 1), so equality of normal
forms is equality of maps.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction

import mpmath

from .errors import MixedRadicals
from .numbers import AlgebraicRoot, Quad, mpf_to_fraction, sqrt_exact, to_mpf

ONE = Fraction(1)
ZERO = Fraction(0)
IDENTITY = (ONE, ZERO, ZERO, ONE)


# --- 2x2 matrices ------------------------------------------------------------


def mat_mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def mat_adj(m):
    a, b, c, d = m
    return (d, -b, -c, a)


def mat_det(m):
    a, b, c, d = m
    return a * d - b * c


def mat_apply(m, x):
    a, b, c, d = m
    if c == 0:
        return (a * x + b) / d
    return (a * x + b) / (c * x + d)


def canon(m):
    a, b, c, d = m
    s = c if c != 0 else d
    if s == 1:
        return m
    return (a / s, b / s, c / s, d / s)


def translation_mat(t):
    return (ONE, t, ZERO, ONE)


def shift_conj(m, k):
    """T_k m T_{-k}; keeps the canonical form."""
    if k == 0:
        return m
    a, b, c, d = m
    a2 = a + k * c
    return (a2, b + k * d - k * a2, c, d - k * c)


def frac_part(x):
    return x - math.floor(x)


def shift_number(x, k):
    """x + k for exact numbers and isolated roots."""
    if k == 0:
        return x
    if isinstance(x, AlgebraicRoot):
        a, b, c = x.coeffs
        return AlgebraicRoot((a, b - 2 * a * k, a * k * k - b * k + c), x.lo + k, x.hi + k)
    return x + k


def sign(v):
    return (v > 0) - (v < 0)


# --- quadratic roots -----------------------------------------------------------


def _isolate(coeffs, approx, lo_bound, hi_bound):
    """AlgebraicRoot for the simple root of coeffs near the float ``approx``."""
    a, b, c = coeffs

    def s(x):
        return sign((a * x + b) * x + c)

    eps = mpmath.mpf(10) ** -30 * (1 + abs(approx))
    for _ in range(12):
        lo = mpf_to_fraction(approx - eps)
        hi = mpf_to_fraction(approx + eps)
        sl, sh = s(lo), s(hi)
        if sl * sh < 0:
            return AlgebraicRoot(coeffs, lo, hi)
        eps *= 1000
    raise ValueError("could not isolate a quadratic root")


def quadratic_roots(A, B, C):
    """Real roots of A x^2 + B x + C, sorted; exact when possible.

    Returns None when the polynomial vanishes identically.
    """
    if A == 0:
        if B == 0:
            return None if C == 0 else []
        return [-C / B]
    D = B * B - 4 * A * C
    if D < 0:
        return []
    if D == 0:
        return [-B / (2 * A)]
    try:
        s = sqrt_exact(D)
        if s is not None:
            r1 = (-B - s) / (2 * A)
            r2 = (-B + s) / (2 * A)
            return sorted([r1, r2])
    except MixedRadicals:
        pass
    with mpmath.workdps(80):
        Am, Bm, Dm = to_mpf(A, 80), to_mpf(B, 80), to_mpf(D, 80)
        sq = mpmath.sqrt(Dm)
        approx = sorted([(-Bm - sq) / (2 * Am), (-Bm + sq) / (2 * Am)])
        return [_isolate((A, B, C), x, None, None) for x in approx]


# --- the lift --------------------------------------------------------------------


class LiftMap:
    __slots__ = ("knots", "mats", "_images", "_hash")

    def __init__(self, knots, mats):
        self.knots = tuple(knots)
        self.mats = tuple(mats)
        self._images = None
        self._hash = None

    # constructors ------------------------------------------------------------

    @classmethod
    def translation(cls, t):
        return cls((), (translation_mat(t),))

    @classmethod
    def identity(cls):
        return cls.translation(ZERO)

    @classmethod
    def from_segments(cls, knots, mats):
        """Normal form from knots in [0,1) and continuous lift matrices."""
        pairs = sorted(zip(knots, mats), key=lambda p: p[0])
        return _normalize([k for k, _ in pairs], [canon(m) for _, m in pairs])

    @classmethod
    def from_circle_pieces(cls, knots, mats):
        """Build a lift from pieces known only up to integer translation.

        ``knots`` must be sorted in [0, 1).  Each piece is shifted by an integer
        so the lift is continuous; the result is checked to be an increasing
        degree-one map.
        """
        if not knots:
            raise ValueError("need at least one knot")
        n = len(knots)
        out = []
        for i, m in enumerate(mats):
            x0 = knots[i]
            x1 = knots[i + 1] if i + 1 < n else knots[0] + 1
            _check_increasing(m, x0, x1)
            if i == 0:
                v = mat_apply(m, x0)
                k = -math.floor(v)
            else:
                prev = mat_apply(out[-1], x0)
                cur = mat_apply(m, x0)
                k = prev - cur
                if not (isinstance(k, (int, Fraction)) and Fraction(k).denominator == 1):
                    raise ValueError(f"pieces do not match at breakpoint {x0}")
                k = int(k)
            out.append(mat_mul(translation_mat(Fraction(k)), m))
        end = mat_apply(out[-1], knots[0] + 1)
        start = mat_apply(out[0], knots[0])
        if end != start + 1:
            raise ValueError("pieces do not close up into a degree-one circle homeomorphism")
        return _normalize(list(knots), [canon(m) for m in out])

    @classmethod
    def from_graph(cls, xs, ys):
        """Piecewise-affine lift through the points (x_i, y_i), with x_i in [0,1).

        The y values are lift values up to a common integer; they must increase
        and the last segment runs from (x_{n-1}, y_{n-1}) to (x_0 + 1, y_0 + 1).
        """
        n = len(xs)
        mats = []
        for i in range(n):
            x0, y0 = xs[i], ys[i]
            x1, y1 = (xs[i + 1], ys[i + 1]) if i + 1 < n else (xs[0] + 1, ys[0] + 1)
            if not (x1 > x0 and y1 > y0):
                raise ValueError("graph is not increasing")
            s = (y1 - y0) / (x1 - x0)
            mats.append((s, y0 - s * x0, ZERO, ONE))
        return _normalize(list(xs), mats)

    # basic data ----------------------------------------------------------------

    @property
    def is_translation(self):
        return not self.knots

    @property
    def shift(self):
        """The translation amount of a knot-free map."""
        return self.mats[0][1]

    def segments(self):
        n = len(self.knots)
        for i in range(n):
            x1 = self.knots[i + 1] if i + 1 < n else self.knots[0] + 1
            yield self.knots[i], x1, self.mats[i]

    @property
    def images(self):
        if self._images is None:
            self._images = tuple(mat_apply(m, x) for x, m in zip(self.knots, self.mats))
        return self._images

    @property
    def is_affine(self):
        return all(m[2] == 0 for m in self.mats)

    def key(self):
        return (self.knots, self.mats)

    def __eq__(self, other):
        if not isinstance(other, LiftMap):
            return NotImplemented
        return self.knots == other.knots and self.mats == other.mats

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        if self.is_translation:
            return f"LiftMap(translation {self.shift})"
        return f"LiftMap({len(self.knots)} knots)"

    # evaluation ------------------------------------------------------------------

    def _locate(self, x):
        x0 = self.knots[0]
        k = math.floor(x - x0)
        u = x - k
        i = bisect_right(self.knots, u) - 1
        return i, k

    def local(self, x):
        """Matrix of the piece containing x (right-continuous choice)."""
        if not self.knots:
            return self.mats[0]
        i, k = self._locate(x)
        return shift_conj(self.mats[i], k)

    def __call__(self, x):
        if not self.knots:
            return x + self.shift
        i, k = self._locate(x)
        return mat_apply(self.mats[i], x - k) + k

    def inv(self, y):
        if not self.knots:
            return y - self.shift
        imgs = self.images
        k = math.floor(y - imgs[0])
        v = y - k
        i = bisect_right(imgs, v) - 1
        return mat_apply(mat_adj(self.mats[i]), v) + k

    def inv_local(self, y):
        if not self.knots:
            return translation_mat(-self.shift)
        imgs = self.images
        k = math.floor(y - imgs[0])
        v = y - k
        i = bisect_right(imgs, v) - 1
        return shift_conj(canon(mat_adj(self.mats[i])), k)

    # algebra ---------------------------------------------------------------------

    def compose(self, other: "LiftMap") -> "LiftMap":
        """self o other."""
        if not self.knots and not other.knots:
            return LiftMap.translation(self.shift + other.shift)
        cuts = set(other.knots)
        for x in self.knots:
            cuts.add(frac_part(other.inv(x)))
        cuts = sorted(cuts)
        n = len(cuts)
        mats = []
        for j in range(n):
            c1 = cuts[j + 1] if j + 1 < n else cuts[0] + 1
            m = (cuts[j] + c1) / 2
            mats.append(canon(mat_mul(self.local(other(m)), other.local(m))))
        return _normalize(cuts, mats)

    __matmul__ = compose

    def inverse(self) -> "LiftMap":
        if not self.knots:
            return LiftMap.translation(-self.shift)
        cuts = sorted(frac_part(y) for y in self.images)
        n = len(cuts)
        mats = []
        for j in range(n):
            c1 = cuts[j + 1] if j + 1 < n else cuts[0] + 1
            m = (cuts[j] + c1) / 2
            mats.append(self.inv_local(m))
        return _normalize(cuts, mats)

    def power(self, n: int) -> "LiftMap":
        if n < 0:
            return self.inverse().power(-n)
        result = LiftMap.identity()
        base = self
        while n:
            if n & 1:
                result = base.compose(result)
            n >>= 1
            if n:
                base = base.compose(base)
        return result

    def shifted(self, k) -> "LiftMap":
        """x -> F(x) + k."""
        if k == 0:
            return self
        if not self.knots:
            return LiftMap.translation(self.shift + k)
        t = translation_mat(Fraction(k))
        return LiftMap(self.knots, [canon(mat_mul(t, m)) for m in self.mats])

    def normalized(self) -> "LiftMap":
        """The lift with F(0) in [0, 1)."""
        return self.shifted(-math.floor(self(ZERO)))

    def conj_scale(self, k: int, j: int) -> "LiftMap":
        """u -> (F(k u) + j) / k, the lift to the k-fold cover."""
        if not self.knots:
            return LiftMap.translation((self.shift + j) / k)
        s_in = (Fraction(k), ZERO, ZERO, ONE)
        s_out = (ONE, Fraction(j), ZERO, Fraction(k))
        knots = []
        mats = []
        for r in range(k):
            for x, m in zip(self.knots, self.mats):
                knots.append((x + r) / k)
                mats.append(canon(mat_mul(mat_mul(s_out, shift_conj(m, r)), s_in)))
        return LiftMap.from_segments([frac_part(x) for x in knots], mats)

    # roots of F(x) - x - p -----------------------------------------------------

    def displacement_sign(self, x, p=ZERO):
        return sign(self(x) - x - p)

    def roots(self, p=ZERO):
        """Zeros of F(x) - x - p over one period [x_0, x_0 + 1).

        Returns (points, arcs): sorted isolated zeros and maximal closed arcs
        of zeros given as (start, end) pairs.
        """
        if not self.knots:
            if self.shift == p:
                return [], [(ZERO, ONE)]
            return [], []
        pts = []
        arcs = []
        for x0, x1, m in self.segments():
            a, b, c, d = m
            A = -c
            B = a - d - p * c
            C = b - p * d
            rs = quadratic_roots(A, B, C)
            if rs is None:
                if arcs and arcs[-1][1] == x0:
                    arcs[-1] = (arcs[-1][0], x1)
                else:
                    arcs.append((x0, x1))
                continue
            for r in rs:
                if _in_half_open(r, x0, x1):
                    pts.append(r)
        if len(arcs) >= 2 and arcs[-1][1] == arcs[0][0] + 1:
            first = arcs.pop(0)
            arcs[-1] = (arcs[-1][0], first[1] + 1)
        if arcs:
            pts = [r for r in pts if not any(_in_closed_arc(r, a0, a1) for a0, a1 in arcs)]
        return pts, arcs


def _in_half_open(r, x0, x1):
    if isinstance(r, AlgebraicRoot):
        # roots of nonsquare discriminants never coincide with field elements
        return r > x0 and r < x1
    return x0 <= r < x1


def _in_closed_arc(r, a0, a1):
    for k in (0, 1, -1):
        rr = shift_number(r, k)
        if not isinstance(rr, AlgebraicRoot) and a0 <= rr <= a1:
            return True
    return False


def _check_increasing(m, x0, x1):
    a, b, c, d = m
    if mat_det(m) <= 0:
        raise ValueError("piece is not orientation preserving")
    if c != 0:
        pole = -d / c
        if x0 <= pole <= x1:
            raise ValueError("piece has a pole inside its segment")


def _normalize(knots, mats):
    knots = list(knots)
    mats = list(mats)
    while True:
        n = len(knots)
        if n == 0:
            break
        nk, nm = [], []
        for i in range(n):
            if nm and mats[i] == nm[-1]:
                continue
            nk.append(knots[i])
            nm.append(mats[i])
        if shift_conj(nm[0], 1) == nm[-1]:
            if len(nk) == 1:
                m = nm[0]
                # a single piece commuting with T_1 is a translation
                return LiftMap.translation(m[1] / m[3])
            nk = nk[1:]
            nm = nm[1:]
        if len(nk) == n:
            break
        knots, mats = nk, nm
    return LiftMap(knots, mats)


__all__ = [
    "LiftMap",
    "IDENTITY",
    "mat_mul",
    "mat_adj",
    "mat_det",
    "mat_apply",
    "canon",
    "translation_mat",
    "shift_conj",
    "frac_part",
    "shift_number",
    "quadratic_roots",
    "Quad",
]
