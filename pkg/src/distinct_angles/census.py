"""Distinct-angle census, lattice triple reduction and projection checks."""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .configurations import ProjectionFrame, SpiralConfig, rng
from .errors import DegenerateTriple, DimensionMismatch, InvalidInput, NoQuadruplesFound, TooLarge
from .geometry import (DEFAULT_MARGIN, DEFAULT_PRECISION, AngleKey, RationalPoint2, RealPoint2,
                       _integer_coordinates, _key_from_vectors, context, to_decimal)

DEFAULT_TOLERANCE = 1e-9
TRIPLE_CAP = 5 * 10**7


@dataclass
class AngleClass:
    representative: object  # mpf radians (smallest member) or exact AngleKey
    multiplicity: int
    key: AngleKey | None = None
    example: tuple[int, int, int] | None = None  # (vertex, a, b) of one occurrence


@dataclass
class CensusReport:
    n_points: int
    mode: str
    tolerance: float | None
    distinct_count: int
    multiplicity_histogram: dict[int, int]
    max_multiplicity: int
    triples_enumerated: int
    degenerate_triples: int = 0
    min_interclass_gap: object = None
    precision_bits: int = DEFAULT_PRECISION
    classes: list[AngleClass] = field(default_factory=list, repr=False)
    pinned: bool = False

    def to_dict(self) -> dict:
        gap = self.min_interclass_gap
        return {
            "mode": self.mode,
            "tolerance": self.tolerance,
            "n_points": self.n_points,
            "pinned": self.pinned,
            "triple_convention": "unordered triples of distinct points, three vertex angles each",
            "distinct_count": self.distinct_count,
            "histogram": [[m, c] for m, c in sorted(self.multiplicity_histogram.items())],
            "max_multiplicity": self.max_multiplicity,
            "triples_enumerated": self.triples_enumerated,
            "degenerate_triples": self.degenerate_triples,
            "min_interclass_gap": None if gap is None else to_decimal(gap, self.precision_bits),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["class", "representative_radians", "multiplicity", "exact_key"])
        for i, cls in enumerate(self.classes):
            if cls.key is not None:
                value = cls.key.radians(self.precision_bits)
            else:
                value = cls.representative
            w.writerow([i, to_decimal(value, self.precision_bits), cls.multiplicity,
                        "" if cls.key is None else str(cls.key)])
        return buf.getvalue()


def _histogram(classes: Sequence[AngleClass]) -> dict[int, int]:
    return dict(sorted(Counter(c.multiplicity for c in classes).items()))


def _finish(classes, n, mode, tolerance, enumerated, degenerate, gap, bits, pinned) -> CensusReport:
    hist = _histogram(classes)
    return CensusReport(
        n_points=n, mode=mode, tolerance=tolerance, distinct_count=len(classes),
        multiplicity_histogram=hist, max_multiplicity=max(hist, default=0),
        triples_enumerated=enumerated, degenerate_triples=degenerate, min_interclass_gap=gap,
        precision_bits=bits, classes=classes, pinned=pinned)


# ---------------------------------------------------------------------------
# numeric kernel


def _numeric_angles(raw_x, raw_y, bits, triples, margin, strict):
    """Angles of the given triples; coordinates arrive as raw mpf tuples."""
    ctx = context(bits)
    xs = [ctx.make_mpf(v) for v in raw_x]
    ys = [ctx.make_mpf(v) for v in raw_y]
    n = len(xs)
    dx = [[xs[j] - xs[i] for j in range(n)] for i in range(n)]
    dy = [[ys[j] - ys[i] for j in range(n)] for i in range(n)]
    lo, hi = ctx.mpf(margin), ctx.pi - margin
    atan2 = ctx.atan2
    out, degenerate = [], []
    for t in triples:
        angles = []
        for v, a, b in ((t[0], t[1], t[2]), (t[1], t[0], t[2]), (t[2], t[0], t[1])):
            ux, uy, wx, wy = dx[v][a], dy[v][a], dx[v][b], dy[v][b]
            angles.append((atan2(abs(ux * wy - uy * wx), ux * wx + uy * wy), (v, a, b)))
        if any(th <= lo or th >= hi for th, _ in angles):
            if strict:
                raise DegenerateTriple(t)
            degenerate.append(tuple(t))
            continue
        out.extend((th._mpf_, ex) for th, ex in angles)
    return out, degenerate


def _split(triples: list, parts: int) -> list[list]:
    size = math.ceil(len(triples) / parts)
    return [triples[i:i + size] for i in range(0, len(triples), size)]


def _cluster(values: list, tolerance: float):
    """Sorted single linkage: neighbours closer than ``tolerance`` share a class."""
    values.sort(key=lambda e: e[0])
    classes, gap = [], None
    for v, ex in values:
        if classes and v - last < tolerance:
            classes[-1].multiplicity += 1
        else:
            if classes:
                g = v - last
                gap = g if gap is None or g < gap else gap
            classes.append(AngleClass(v, 1, example=ex))
        last = v
    return classes, gap


def _numeric_census(points, triples, tolerance, strict, bits, margin, workers, pinned):
    ctx = context(bits)
    raw_x = [ctx.mpf(p.x)._mpf_ for p in points]
    raw_y = [ctx.mpf(p.y)._mpf_ for p in points]
    if workers > 1 and len(triples) > 2000:
        chunks = _split(triples, workers * 4)
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_numeric_angles, raw_x, raw_y, bits, c, margin, strict) for c in chunks]
            results = [f.result() for f in futures]
    else:
        results = [_numeric_angles(raw_x, raw_y, bits, triples, margin, strict)]
    values, degenerate = [], 0
    for vals, deg in results:
        values.extend((ctx.make_mpf(v), ex) for v, ex in vals)
        degenerate += len(deg)
    classes, gap = _cluster(values, tolerance)
    return _finish(classes, len(points), "numeric", tolerance, len(triples), degenerate, gap, bits, pinned)


# ---------------------------------------------------------------------------
# exact kernel


def _exact_census(points, triples, strict, bits, pinned):
    xs, ys = _integer_coordinates(points)
    counts: Counter = Counter()
    examples: dict = {}
    degenerate = 0
    for t in triples:
        i, j, k = t
        if (xs[j] - xs[i]) * (ys[k] - ys[i]) == (ys[j] - ys[i]) * (xs[k] - xs[i]):
            if strict:
                raise DegenerateTriple(t)
            degenerate += 1
            continue
        for v, a, b in ((i, j, k), (j, i, k), (k, i, j)):
            key = _key_from_vectors(xs[a] - xs[v], ys[a] - ys[v], xs[b] - xs[v], ys[b] - ys[v])
            counts[key] += 1
            examples.setdefault(key, (v, a, b))
    # increasing angle = decreasing signed cos^2
    order = sorted(counts, key=lambda k: Fraction(-k.dot_sign * k.cos_sq_num, k.cos_sq_den))
    classes = [AngleClass(key, counts[key], key=key, example=examples[key]) for key in order]
    gap = None
    if len(classes) > 1:
        rads = [k.radians(bits) for k in order]
        gap = min(b - a for a, b in zip(rads, rads[1:]))
    return _finish(classes, len(points), "exact", None, len(triples), degenerate, gap, bits, pinned)


def _resolve_mode(points, mode):
    rational = all(isinstance(p, RationalPoint2) for p in points)
    if mode is None:
        return "exact" if rational else "numeric"
    if mode == "exact" and not rational:
        raise InvalidInput("exact census needs rational points")
    if mode not in ("exact", "numeric"):
        raise InvalidInput(f"mode must be 'exact' or 'numeric', got {mode!r}")
    return mode


def census_bruteforce(points: Sequence, mode: str | None = None, tolerance: float = DEFAULT_TOLERANCE,
                      strict: bool = True, precision_bits: int | None = None,
                      triples: Iterable[tuple[int, int, int]] | None = None,
                      triple_cap: int = TRIPLE_CAP, degenerate_margin: float = DEFAULT_MARGIN,
                      workers: int = 1) -> CensusReport:
    """Count distinct angles over all unordered triples of distinct points.

    Exact mode (rational input) groups by ``AngleKey``; numeric mode sorts all
    angle values and merges neighbours closer than ``tolerance``. Collinear
    triples raise in strict mode and are skipped and counted otherwise.
    Passing ``triples`` restricts the census to those index triples.
    """
    points = list(points)
    n = len(points)
    if n < 3:
        raise InvalidInput("a census needs at least 3 points")
    mode = _resolve_mode(points, mode)
    if triples is None:
        if math.comb(n, 3) > triple_cap:
            raise TooLarge(f"C({n},3) = {math.comb(n, 3)} triples exceed the cap {triple_cap}")
        triples = list(combinations(range(n), 3))
        pinned = False
    else:
        triples = [tuple(t) for t in triples]
        pinned = True
        if len(triples) > triple_cap:
            raise TooLarge(f"{len(triples)} triples exceed the cap {triple_cap}")
    if precision_bits is None:
        reals = [p.precision_bits for p in points if isinstance(p, RealPoint2)]
        precision_bits = min(reals) if reals else DEFAULT_PRECISION
    if mode == "exact":
        return _exact_census(points, triples, strict, precision_bits, pinned)
    points = [p if isinstance(p, RealPoint2) else RealPoint2.from_rational(p, precision_bits)
              for p in points]
    return _numeric_census(points, triples, tolerance, strict, precision_bits, degenerate_margin,
                           workers, pinned)


def pinned_bound(n: int) -> int:
    """At most three angles for each of the C(n-1, 2) triples through the anchor."""
    return 3 * math.comb(n - 1, 2)


def census_pinned_spiral(config: SpiralConfig, tolerance: float = DEFAULT_TOLERANCE,
                         strict: bool = True, workers: int = 1) -> CensusReport:
    """Census restricted to triples containing the first spiral point.

    Every triple of the spiral can be shifted down until its smallest index is
    1 without changing its angles, so this sees every angle class.
    """
    if config.n < 3:
        raise InvalidInput("spiral census needs n >= 3")
    triples = [(0, j, k) for j, k in combinations(range(1, config.n), 2)]
    rep = census_bruteforce(config.points, "numeric", tolerance, strict, config.precision_bits,
                            triples=triples, workers=workers)
    assert rep.distinct_count <= pinned_bound(config.n)
    return rep


# ---------------------------------------------------------------------------
# lattice triples


@dataclass(frozen=True)
class ReducedTriple:
    """Canonical translate of an ordered lattice triple: coordinatewise min is 0."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]


def reduce_triple(a: Sequence[int], b: Sequence[int], c: Sequence[int]) -> ReducedTriple:
    if not len(a) == len(b) == len(c):
        raise DimensionMismatch(f"dimensions {len(a)}, {len(b)}, {len(c)} differ")
    m = [min(t) for t in zip(a, b, c)]
    return ReducedTriple(tuple(x - s for x, s in zip(a, m)),
                         tuple(x - s for x, s in zip(b, m)),
                         tuple(x - s for x, s in zip(c, m)))


def count_translation_classes(config, triple_cap: int = TRIPLE_CAP) -> int:
    """Distinct reductions over all ordered triples (repetition allowed) of the points."""
    points = [tuple(p) for p in getattr(config, "points", config)]
    if len(points) ** 3 > triple_cap:
        raise TooLarge(f"{len(points)}^3 ordered triples exceed the cap {triple_cap}")
    return len({reduce_triple(a, b, c) for a in points for b in points for c in points})


@dataclass(frozen=True)
class TranslationClassCounts:
    """Translation classes of triples under the two natural conventions.

    ordered: ordered triples, repeated points allowed (the N_{r,d} count).
    ordered_distinct: ordered triples of three distinct points.
    vertex_angles: ordered_distinct with (a, b, c) ~ (c, b, a), i.e. one class per
        angle at vertex b. Each class holds one or two ordered classes, so
        ordered_distinct / 2 <= vertex_angles <= ordered_distinct.
    """

    ordered: int
    ordered_distinct: int
    vertex_angles: int


def translation_class_conventions(config, triple_cap: int = TRIPLE_CAP) -> TranslationClassCounts:
    points = [tuple(p) for p in getattr(config, "points", config)]
    if len(points) ** 3 > triple_cap:
        raise TooLarge(f"{len(points)}^3 ordered triples exceed the cap {triple_cap}")
    ordered, distinct, angles = set(), set(), set()
    for a in points:
        for b in points:
            for c in points:
                red = reduce_triple(a, b, c)
                ordered.add(red)
                if a != b and b != c and a != c:
                    distinct.add(red)
                    angles.add(min(red, reduce_triple(c, b, a), key=astuple))
    return TranslationClassCounts(len(ordered), len(distinct), len(angles))


def n_r_d(r: int, d: int) -> int:
    """Number of reduced triples over {0..r}^d: ((r+1)^3 - r^3)^d."""
    if r < 0 or d < 1:
        raise InvalidInput(f"need r >= 0 and d >= 1, got r={r}, d={d}")
    return ((r + 1) ** 3 - r ** 3) ** d


# ---------------------------------------------------------------------------
# projection property


@dataclass
class ProjectionCheck:
    trials: int
    max_relative_error: object
    worst: tuple | None = None
    attempts: int = 0


def verify_projection_property(points: Sequence[Sequence[int]], frame: ProjectionFrame,
                               trials: int = 1000, seed: int = 0,
                               max_attempts: int | None = None) -> ProjectionCheck:
    """Sample p1 - p2 = p3 - p4 inside the point set and compare projected distances."""
    points = [tuple(p) for p in points]
    if any(len(p) != frame.d for p in points):
        raise DimensionMismatch("frame dimension does not match the points")
    index = {p: i for i, p in enumerate(points)}
    ctx = context(frame.precision_bits)
    cache: dict[int, RealPoint2] = {}

    def image(i):
        if i not in cache:
            cache[i] = frame.project(points[i])
        return cache[i]

    def dist(i, j):
        p, q = image(i), image(j)
        return ctx.hypot(p.x - q.x, p.y - q.y)

    gen = rng(seed, 0x51)
    max_attempts = max_attempts or 200 * trials
    found, worst_err, worst, attempts = 0, ctx.mpf(0), None, 0
    n = len(points)
    while found < trials and attempts < max_attempts:
        attempts += 1
        i1, i2, i3 = (int(v) for v in gen.integers(0, n, size=3))
        if i1 == i2 or i3 == i1:
            continue  # zero difference, or the quadruple is the pair itself
        p4 = tuple(c3 - (c1 - c2) for c1, c2, c3 in zip(points[i1], points[i2], points[i3]))
        i4 = index.get(p4)
        if i4 is None:
            continue
        d12, d34 = dist(i1, i2), dist(i3, i4)
        err = abs(d12 - d34) / max(d12, d34)
        if err >= worst_err:
            worst_err, worst = err, (i1, i2, i3, i4)
        found += 1
    if found == 0:
        raise NoQuadruplesFound(f"no difference-equal quadruple in {attempts} draws")
    return ProjectionCheck(found, worst_err, worst, attempts)
