"""Planar predicates and angle identity, exact or in extended precision.

Two point types live here. ``RationalPoint2`` holds ``Fraction`` coordinates
and every predicate on it is exact. ``RealPoint2`` holds mpmath numbers bound
to a private context of fixed precision, so nothing here touches the global
``mpmath.mp`` state.

Degeneracy margins are scale-free: a triple is measured by
``|cross| / D**2`` and a quadruple by ``|incircle| / D**4`` where ``D`` is the
largest pairwise distance of the tuple. Both are invariant under translation,
rotation, uniform scaling and permutation of the points, and for rational
input they are rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import chain, combinations
from typing import Sequence

import mpmath
import numpy as np

from .errors import DegenerateAngle, InvalidInput, InvalidParameter

DEFAULT_PRECISION = 128
DEFAULT_MARGIN = 1e-12
MIN_PRECISION = 64


@lru_cache(maxsize=None)
def context(precision_bits: int) -> mpmath.ctx_mp.MPContext:
    """Return a dedicated mpmath context working at ``precision_bits``."""
    if precision_bits < MIN_PRECISION:
        raise InvalidParameter(f"precision_bits must be >= {MIN_PRECISION}, got {precision_bits}")
    ctx = mpmath.MPContext()
    ctx.prec = precision_bits
    return ctx


def angle_tolerance(precision_bits: int) -> float:
    """Accuracy promised for a single computed angle: 2**-(bits - 8)."""
    return 2.0 ** -(precision_bits - 8)


def decimal_digits(precision_bits: int) -> int:
    """Decimal digits that round-trip a binary number of this precision."""
    return math.ceil(precision_bits * math.log10(2)) + 2


def to_mpf(value, precision_bits: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """Convert numbers, decimal strings and Fractions at the given precision."""
    ctx = context(precision_bits)
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    return ctx.mpf(value)


def to_decimal(value, precision_bits: int) -> str:
    """Format an mpf (or anything mpmath accepts) as a plain decimal string."""
    ctx = context(precision_bits)
    return mpmath.libmp.to_str(ctx.mpf(value)._mpf_, decimal_digits(precision_bits))


# ---------------------------------------------------------------------------
# point types


@dataclass(frozen=True)
class RationalPoint2:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    def __sub__(self, other: "RationalPoint2") -> tuple[Fraction, Fraction]:
        return self.x - other.x, self.y - other.y


@dataclass(frozen=True)
class RealPoint2:
    x: mpmath.mpf
    y: mpmath.mpf
    precision_bits: int = DEFAULT_PRECISION

    def __post_init__(self):
        ctx = context(self.precision_bits)
        x, y = to_mpf(self.x, self.precision_bits), to_mpf(self.y, self.precision_bits)
        if not (ctx.isfinite(x) and ctx.isfinite(y)):
            raise InvalidParameter(f"non-finite coordinates ({x}, {y})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_rational(cls, p: RationalPoint2, precision_bits: int = DEFAULT_PRECISION) -> "RealPoint2":
        return cls(p.x, p.y, precision_bits)


Point2 = RationalPoint2 | RealPoint2


@dataclass(frozen=True, order=True)
class AngleKey:
    """Exact identity of an undirected angle: sign of cos and reduced cos**2."""

    dot_sign: int
    cos_sq_num: int
    cos_sq_den: int

    def __post_init__(self):
        if self.dot_sign not in (-1, 0, 1):
            raise InvalidParameter(f"dot_sign must be -1, 0 or 1, got {self.dot_sign}")
        if self.cos_sq_den <= 0 or not 0 <= self.cos_sq_num <= self.cos_sq_den:
            raise InvalidParameter("cos^2 must be a fraction in [0, 1] with positive denominator")
        if math.gcd(self.cos_sq_num, self.cos_sq_den) != 1:
            raise InvalidParameter("cos^2 fraction must be reduced")
        if (self.dot_sign == 0) != (self.cos_sq_num == 0):
            raise InvalidParameter("dot_sign is zero exactly for a right angle")

    @property
    def cos_squared(self) -> Fraction:
        return Fraction(self.cos_sq_num, self.cos_sq_den)

    def radians(self, precision_bits: int = DEFAULT_PRECISION) -> mpmath.mpf:
        ctx = context(precision_bits)
        c2 = ctx.mpf(self.cos_sq_num) / self.cos_sq_den
        s2 = ctx.mpf(self.cos_sq_den - self.cos_sq_num) / self.cos_sq_den
        # atan2 keeps full relative accuracy near 0 and pi, unlike acos
        return ctx.atan2(ctx.sqrt(s2), self.dot_sign * ctx.sqrt(c2))

    def __str__(self) -> str:
        return f"{self.dot_sign:+d}:{self.cos_sq_num}/{self.cos_sq_den}"


@dataclass(frozen=True)
class AngleValue:
    radians: mpmath.mpf
    precision_bits: int = DEFAULT_PRECISION

    def __post_init__(self):
        ctx = context(self.precision_bits)
        value = ctx.mpf(self.radians)
        if not 0 < value < ctx.pi:
            raise DegenerateAngle(f"angle {value} outside (0, pi)")
        object.__setattr__(self, "radians", value)

    def __float__(self) -> float:
        return float(self.radians)


# ---------------------------------------------------------------------------
# exact predicates


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _cross(ux, uy, vx, vy):
    return ux * vy - uy * vx


def _incircle(ax, ay, bx, by, cx, cy, dx, dy):
    """In-circle determinant of four points, translated to the fourth.

    Equal up to sign to the 4x4 determinant with rows (x, y, x^2+y^2, 1).
    """
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    return ((adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
            + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
            + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady))


def orientation(p: RationalPoint2, q: RationalPoint2, r: RationalPoint2) -> int:
    """Sign of det(q - p, r - p): +1 counterclockwise, -1 clockwise, 0 collinear."""
    return _sign(_cross(q.x - p.x, q.y - p.y, r.x - p.x, r.y - p.y))


def incircle(p: RationalPoint2, q: RationalPoint2, r: RationalPoint2, s: RationalPoint2) -> Fraction:
    return _incircle(p.x, p.y, q.x, q.y, r.x, r.y, s.x, s.y)


def concyclic(p: RationalPoint2, q: RationalPoint2, r: RationalPoint2, s: RationalPoint2) -> bool:
    """True iff the four points lie on one circle (or one line)."""
    return incircle(p, q, r, s) == 0


def _check_rational(*points) -> None:
    for p in points:
        if not isinstance(p, RationalPoint2):
            raise InvalidInput(f"exact predicates need RationalPoint2, got {type(p).__name__}")


def _key_from_vectors(ux: int, uy: int, vx: int, vy: int) -> AngleKey:
    """AngleKey for rays u, v with integer (or Fraction) components."""
    if _cross(ux, uy, vx, vy) == 0:
        raise DegenerateAngle("rays are parallel or null")
    dot = ux * vx + uy * vy
    c2 = Fraction(dot * dot) / ((ux * ux + uy * uy) * (vx * vx + vy * vy))
    return AngleKey(_sign(dot), c2.numerator, c2.denominator)


def angle_key_exact(vertex: RationalPoint2, a: RationalPoint2, b: RationalPoint2) -> AngleKey:
    _check_rational(vertex, a, b)
    return _key_from_vectors(a.x - vertex.x, a.y - vertex.y, b.x - vertex.x, b.y - vertex.y)


# ---------------------------------------------------------------------------
# numeric angles


def _precision_of(*points: RealPoint2) -> int:
    return min(p.precision_bits for p in points)


def _as_real(p: Point2, precision_bits: int) -> RealPoint2:
    if isinstance(p, RationalPoint2):
        return RealPoint2.from_rational(p, precision_bits)
    return p


def angle_value(vertex: Point2, a: Point2, b: Point2, precision_bits: int | None = None,
                degenerate_margin: float = DEFAULT_MARGIN) -> AngleValue:
    """Undirected angle at ``vertex`` between rays to ``a`` and ``b``.

    Evaluated as ``atan2(|u x v|, u . v)``, which equals the arccos of the
    normalized dot product but keeps full accuracy near 0 and pi.
    """
    if precision_bits is None:
        reals = [p for p in (vertex, a, b) if isinstance(p, RealPoint2)]
        precision_bits = _precision_of(*reals) if reals else DEFAULT_PRECISION
    ctx = context(precision_bits)
    vertex, a, b = (_as_real(p, precision_bits) for p in (vertex, a, b))
    ux, uy = ctx.mpf(a.x) - vertex.x, ctx.mpf(a.y) - vertex.y
    vx, vy = ctx.mpf(b.x) - vertex.x, ctx.mpf(b.y) - vertex.y
    if (ux == 0 and uy == 0) or (vx == 0 and vy == 0):
        raise DegenerateAngle("ray endpoint coincides with the vertex")
    theta = ctx.atan2(abs(_cross(ux, uy, vx, vy)), ux * vx + uy * vy)
    if theta <= degenerate_margin or theta >= ctx.pi - degenerate_margin:
        raise DegenerateAngle(f"angle {ctx.nstr(theta, 8)} within {degenerate_margin} of 0 or pi")
    return AngleValue(theta, precision_bits)


def angles_of_triple(p: Point2, q: Point2, r: Point2, precision_bits: int | None = None):
    """Vertex angles at p, q and r, in that order.

    Rational triples give ``AngleKey`` objects, anything else ``AngleValue``.
    """
    if all(isinstance(v, RationalPoint2) for v in (p, q, r)):
        return angle_key_exact(p, q, r), angle_key_exact(q, p, r), angle_key_exact(r, p, q)
    return (angle_value(p, q, r, precision_bits),
            angle_value(q, p, r, precision_bits),
            angle_value(r, p, q, precision_bits))


# ---------------------------------------------------------------------------
# general position


def _max_sq_dist(xs, ys):
    return max((xs[i] - xs[j]) ** 2 + (ys[i] - ys[j]) ** 2
               for i, j in combinations(range(len(xs)), 2))


def _orientation_measure(xs, ys):
    d2 = _max_sq_dist(xs, ys)
    if d2 == 0:
        return d2
    return abs(_cross(xs[1] - xs[0], ys[1] - ys[0], xs[2] - xs[0], ys[2] - ys[0])) / d2


def _incircle_measure(xs, ys):
    d2 = _max_sq_dist(xs, ys)
    if d2 == 0:
        return d2
    return abs(_incircle(xs[0], ys[0], xs[1], ys[1], xs[2], ys[2], xs[3], ys[3])) / (d2 * d2)


def combination_array(n: int, k: int) -> np.ndarray:
    """All k-subsets of range(n) as rows of an int array, lexicographic."""
    count = math.comb(n, k)
    flat = np.fromiter(chain.from_iterable(combinations(range(n), k)), dtype=np.int64, count=count * k)
    return flat.reshape(count, k)


def _float_orientation_measures(x: np.ndarray, y: np.ndarray, idx: np.ndarray) -> np.ndarray:
    px, py = x[idx], y[idx]
    ux, uy = px[:, 1] - px[:, 0], py[:, 1] - py[:, 0]
    vx, vy = px[:, 2] - px[:, 0], py[:, 2] - py[:, 0]
    d2 = np.zeros(len(idx))
    for i, j in combinations(range(3), 2):
        d2 = np.maximum(d2, (px[:, i] - px[:, j]) ** 2 + (py[:, i] - py[:, j]) ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(ux * vy - uy * vx) / d2
    return np.nan_to_num(out, nan=0.0)


def _float_incircle_measures(x: np.ndarray, y: np.ndarray, idx: np.ndarray) -> np.ndarray:
    px, py = x[idx], y[idx]
    det = _incircle(px[:, 0], py[:, 0], px[:, 1], py[:, 1], px[:, 2], py[:, 2], px[:, 3], py[:, 3])
    d2 = np.zeros(len(idx))
    for i, j in combinations(range(4), 2):
        d2 = np.maximum(d2, (px[:, i] - px[:, j]) ** 2 + (py[:, i] - py[:, j]) ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(det) / (d2 * d2)
    return np.nan_to_num(out, nan=0.0)


@dataclass
class GeneralPositionReport:
    ok: bool
    mode: str
    margin: float | None
    n_points: int
    min_collinearity_margin: object = None
    min_concyclicity_margin: object = None
    collinear_witness: tuple[int, ...] | None = None
    concyclic_witness: tuple[int, ...] | None = None
    collinear_count: int = 0
    concyclic_count: int = 0
    precision_bits: int | None = None

    @property
    def ok_collinearity(self) -> bool:
        return self.collinear_count == 0

    @property
    def ok_concyclicity(self) -> bool:
        return self.concyclic_count == 0

    def to_dict(self) -> dict:
        def fmt(v):
            if v is None:
                return None
            if isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}"
            return to_decimal(v, self.precision_bits or DEFAULT_PRECISION)

        return {
            "ok": self.ok,
            "mode": self.mode,
            "margin": self.margin,
            "n_points": self.n_points,
            "ok_collinearity": self.ok_collinearity,
            "ok_concyclicity": self.ok_concyclicity,
            "collinear_count": self.collinear_count,
            "concyclic_count": self.concyclic_count,
            "min_collinearity_margin": fmt(self.min_collinearity_margin),
            "min_concyclicity_margin": fmt(self.min_concyclicity_margin),
            "collinear_witness": list(self.collinear_witness) if self.collinear_witness else None,
            "concyclic_witness": list(self.concyclic_witness) if self.concyclic_witness else None,
        }


def _integer_coordinates(points: Sequence[RationalPoint2]) -> tuple[list[int], list[int]]:
    # the measures are scale-free, so clearing denominators changes nothing
    den = 1
    for p in points:
        den = math.lcm(den, p.x.denominator, p.y.denominator)
    return [int(p.x * den) for p in points], [int(p.y * den) for p in points]


def _exact_report(points: Sequence[RationalPoint2]) -> GeneralPositionReport:
    xs, ys = _integer_coordinates(points)
    n = len(points)
    rep = GeneralPositionReport(ok=True, mode="exact", margin=None, n_points=n)

    best = None
    for tri in combinations(range(n), 3):
        a, b, c = tri
        cross = _cross(xs[b] - xs[a], ys[b] - ys[a], xs[c] - xs[a], ys[c] - ys[a])
        if cross == 0:
            rep.collinear_count += 1
        m = Fraction(abs(cross), max(_max_sq_dist([xs[i] for i in tri], [ys[i] for i in tri]), 1))
        if best is None or m < best:
            best, rep.collinear_witness = m, tri
    rep.min_collinearity_margin = best

    best = None
    for quad in combinations(range(n), 4):
        qx, qy = [xs[i] for i in quad], [ys[i] for i in quad]
        det = _incircle(*chain.from_iterable(zip(qx, qy)))
        if det == 0:
            rep.concyclic_count += 1
        d2 = max(_max_sq_dist(qx, qy), 1)
        m = Fraction(abs(det), d2 * d2)
        if best is None or m < best:
            best, rep.concyclic_witness = m, quad
    rep.min_concyclicity_margin = best
    rep.ok = rep.collinear_count == 0 and rep.concyclic_count == 0
    return rep


def _refine(measures: np.ndarray, idx: np.ndarray, screen: float, keep: int, exact_measure,
            xs, ys, margin: float):
    """Recompute, at working precision, every tuple the float screen cannot clear.

    Float measures are accurate to ~1e-13 absolute, so anything above
    ``screen`` is certainly above ``margin``. The ``keep`` smallest tuples are
    always recomputed so the reported minimum is at full precision.
    """
    chosen = set(np.flatnonzero(measures < screen).tolist())
    if len(measures):
        k = min(keep, len(measures))
        chosen.update(np.argpartition(measures, k - 1)[:k].tolist())
    best, witness, bad = None, None, 0
    for row in sorted(chosen):
        tup = tuple(int(i) for i in idx[row])
        m = exact_measure([xs[i] for i in tup], [ys[i] for i in tup])
        if m <= margin:
            bad += 1
        if best is None or m < best:
            best, witness = m, tup
    return best, witness, bad


def _numeric_report(points: Sequence[RealPoint2], margin: float, precision_bits: int,
                    chunk: int = 1 << 20) -> GeneralPositionReport:
    ctx = context(precision_bits)
    xs = [ctx.mpf(p.x) for p in points]
    ys = [ctx.mpf(p.y) for p in points]
    fx = np.array([float(v) for v in xs])
    fy = np.array([float(v) for v in ys])
    n = len(points)
    rep = GeneralPositionReport(ok=True, mode="numeric", margin=margin, n_points=n,
                                precision_bits=precision_bits)
    screen = 10 * margin + 1e-10

    for k, float_measure, hp_measure, attr in (
        (3, _float_orientation_measures, _orientation_measure, "collinear"),
        (4, _float_incircle_measures, _incircle_measure, "concyclic"),
    ):
        if n < k:
            continue
        idx = combination_array(n, k)
        best, witness, bad = None, None, 0
        for start in range(0, len(idx), chunk):
            part = idx[start:start + chunk]
            b, w, c = _refine(float_measure(fx, fy, part), part, screen, 4, hp_measure, xs, ys, margin)
            bad += c
            if b is not None and (best is None or b < best):
                best, witness = b, w
        setattr(rep, f"{attr}_count", bad)
        setattr(rep, f"{attr}_witness", witness)
        if attr == "collinear":
            rep.min_collinearity_margin = best
        else:
            rep.min_concyclicity_margin = best
    rep.ok = rep.collinear_count == 0 and rep.concyclic_count == 0
    return rep


def general_position_report(points: Sequence[Point2], mode: str = "numeric",
                            margin: float = DEFAULT_MARGIN,
                            precision_bits: int | None = None) -> GeneralPositionReport:
    """Check that no three points are collinear and no four concyclic.

    ``exact`` mode needs rational points and flags exact zeros. ``numeric``
    mode flags any normalized determinant at or below ``margin``; it certifies
    a margin, it does not prove general position.
    """
    points = list(points)
    if len(points) < 3:
        raise InvalidInput("general position needs at least 3 points")
    if mode == "exact":
        _check_rational(*points)
        return _exact_report(points)
    if mode != "numeric":
        raise InvalidParameter(f"mode must be 'exact' or 'numeric', got {mode!r}")
    if precision_bits is None:
        reals = [p for p in points if isinstance(p, RealPoint2)]
        precision_bits = _precision_of(*reals) if reals else DEFAULT_PRECISION
    points = [_as_real(p, precision_bits) for p in points]
    return _numeric_report(points, margin, precision_bits)
