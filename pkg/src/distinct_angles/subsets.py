"""Equivalent index triples, repeated-angle witnesses and distinct-angle subsets.

Index triples s = (x1, x2, x3) and t = (y1, y2, y3) are equivalent when
x_i - y_i is one common shift. On the spiral the self-map with alpha =
shift * beta carries one point triple onto the other, so equivalent triples
always determine the same three angles.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .census import DEFAULT_TOLERANCE, CensusReport, _numeric_angles, _resolve_mode, census_bruteforce
from .configurations import SpiralConfig
from .errors import InvalidInput, WitnessDiscrepancyTooLarge
from .geometry import DEFAULT_MARGIN, angles_of_triple, context, to_decimal


@dataclass(frozen=True)
class IndexTriplePair:
    s: tuple[int, int, int]
    t: tuple[int, int, int]
    shift: int

    def __post_init__(self):
        for tri in (self.s, self.t):
            if not tri[0] < tri[1] < tri[2]:
                raise InvalidInput(f"triple {tri} is not strictly increasing")
        if self.shift == 0 or any(x - y != self.shift for x, y in zip(self.s, self.t)):
            raise InvalidInput(f"{self.s} and {self.t} are not related by shift {self.shift}")


@dataclass
class RepeatedAngleWitness:
    pair: IndexTriplePair
    angle_s: object
    angle_t: object
    discrepancy: object
    vertex_discrepancies: tuple = ()
    precision_bits: int = 128

    def to_dict(self) -> dict:
        fmt = lambda v: to_decimal(v, self.precision_bits)
        return {
            "s": list(self.pair.s),
            "t": list(self.pair.t),
            "shift": self.pair.shift,
            "angle_s": fmt(self.angle_s),
            "angle_t": fmt(self.angle_t),
            "discrepancy": fmt(self.discrepancy),
        }


def difference_buckets(q: Iterable[int]) -> dict[int, list[tuple[int, int]]]:
    """Pairs (x, y) with x > y grouped by x - y; each bucket sorted by x."""
    buckets: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for y, x in combinations(sorted(set(q)), 2):
        buckets[x - y].append((x, y))
    for pairs in buckets.values():
        pairs.sort()
    return dict(buckets)


def find_equivalent_triples(q: Iterable[int], n: int) -> IndexTriplePair | None:
    """Two distinct equivalent triples inside ``q`` (a subset of [1, n]), or None.

    Three pairs sharing a difference give the triples: their larger ends form
    s, their smaller ends form t. Pairs with one difference never share an
    end, so both triples have distinct entries. Guaranteed to succeed once
    C(|q|, 2) >= 2n - 1, since only n - 1 differences exist.
    """
    q = set(q)
    bad = [v for v in q if not 1 <= v <= n]
    if bad:
        raise InvalidInput(f"elements {sorted(bad)} outside [1, {n}]")
    if len(q) < 3:
        raise InvalidInput("need at least 3 indices")
    buckets = difference_buckets(q)
    for diff in sorted(buckets):
        pairs = buckets[diff]
        if len(pairs) >= 3:
            chosen = pairs[:3]
            s = tuple(sorted(x for x, _ in chosen))
            t = tuple(sorted(y for _, y in chosen))
            return IndexTriplePair(s, t, diff)
    return None


def rgen_threshold(n: int) -> int:
    """Smallest m with C(m, 2) >= 2n - 1.

    Any m indices from [n] then contain an equivalent triple pair. Checked
    against the closed form: m never exceeds ceil(2 sqrt(n) + 1/2).
    """
    if n < 1:
        raise InvalidInput(f"n must be >= 1, got {n}")
    target = 2 * n - 1
    m = max(2, (1 + math.isqrt(8 * target)) // 2)
    while math.comb(m, 2) < target:
        m += 1
    while m > 2 and math.comb(m - 1, 2) >= target:
        m -= 1
    assert (2 * m - 3) ** 2 < 16 * n, "threshold exceeds ceil(2 sqrt(n) + 1/2)"
    return m


def closed_form_threshold(n: int) -> int:
    """ceil(2 sqrt(n) + 1/2) in integer arithmetic: least k with (2k - 1)^2 >= 16 n."""
    k = (math.isqrt(16 * n) + 1) // 2
    while (2 * k - 1) ** 2 < 16 * n:
        k += 1
    while k > 1 and (2 * k - 3) ** 2 >= 16 * n:
        k -= 1
    return k


def repeated_angle_witness(config: SpiralConfig, subset: Iterable[int],
                           tolerance: float = DEFAULT_TOLERANCE) -> RepeatedAngleWitness | None:
    """Repeated angle among the spiral points indexed by ``subset`` (1-based), or None.

    Angles are paired vertex by vertex (position i of s with position i of t);
    all three must agree within ``tolerance``. The reported angle pair is the
    best-matching vertex.
    """
    pair = find_equivalent_triples(subset, config.n)
    if pair is None:
        return None
    bits = config.precision_bits
    a_s = angles_of_triple(*(config.point(j) for j in pair.s), precision_bits=bits)
    a_t = angles_of_triple(*(config.point(j) for j in pair.t), precision_bits=bits)
    diffs = tuple(abs(u.radians - v.radians) for u, v in zip(a_s, a_t))
    if max(diffs) >= tolerance:
        raise WitnessDiscrepancyTooLarge(
            f"triples {pair.s} and {pair.t} differ by {float(max(diffs)):.3e} rad "
            f"at {bits} bits (tolerance {tolerance})")
    best = min(range(3), key=lambda i: diffs[i])
    return RepeatedAngleWitness(pair, a_s[best].radians, a_t[best].radians, diffs[best], diffs, bits)


# ---------------------------------------------------------------------------
# distinct-angle subsets


@dataclass
class SubsetSearchResult:
    subset: tuple[int, ...]  # 0-based indices into the input points
    certificate: CensusReport | None
    strategy: str
    complete: bool = True  # False when the budget ran out first
    nodes: int = 0

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "subset": list(self.subset),
            "size": len(self.subset),
            "complete": self.complete,
            "nodes": self.nodes,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


def _angle_classes(points, tolerance):
    """Global angle class id for every (triple, vertex) of the full point set.

    A subset has all distinct angles iff its angles hit pairwise distinct ids.
    Merging on the full set can only join more angles than merging on a
    subset would, so this errs toward rejecting.
    """
    triples = list(combinations(range(len(points)), 3))
    if _resolve_mode(points, None) == "exact":
        table = {t: angles_of_triple(*(points[i] for i in t)) for t in triples}
        ids = {key: i for i, key in enumerate(sorted({k for v in table.values() for k in v}))}
        return {t: tuple(ids[k] for k in keys) for t, keys in table.items()}
    bits = min(p.precision_bits for p in points)
    ctx = context(bits)
    raw_x = [p.x._mpf_ for p in points]
    raw_y = [p.y._mpf_ for p in points]
    vals, _ = _numeric_angles(raw_x, raw_y, bits, triples, DEFAULT_MARGIN, True)
    vals = sorted(((ctx.make_mpf(v), ex) for v, ex in vals), key=lambda e: e[0])
    table: dict[tuple[int, int, int], list[int]] = {t: [0, 0, 0] for t in triples}
    cid, last = -1, None
    for v, (vert, a, b) in vals:
        if last is None or v - last >= tolerance:
            cid += 1
        last = v
        t = tuple(sorted((vert, a, b)))
        table[t][t.index(vert)] = cid
    return {t: tuple(v) for t, v in table.items()}


def _distinct_extension(table, chosen: Sequence[int], new: int, used: set[int]) -> set[int] | None:
    """Class ids added by ``new``, or None if any of them repeats."""
    added = set()
    for a, b in combinations(chosen, 2):
        for cid in table[tuple(sorted((a, b, new)))]:
            if cid in used or cid in added:
                return None
            added.add(cid)
    return added


def search_distinct_angle_subset(points: Sequence, strategy: str = "greedy",
                                 budget: int = 10**6,
                                 tolerance: float = DEFAULT_TOLERANCE) -> SubsetSearchResult:
    """Large subset whose angles are pairwise distinct.

    ``greedy`` scans points in input order and keeps each one that adds no
    repeat. ``exhaustive`` (n <= 15) is a depth-first search in lexicographic
    order that prunes at the first repeat; it returns the lexicographically
    smallest maximum subset. ``budget`` caps the search nodes visited.
    """
    points = list(points)
    n = len(points)
    if strategy not in ("greedy", "exhaustive"):
        raise InvalidInput(f"unknown strategy {strategy!r}")
    if strategy == "exhaustive" and n > 15:
        raise InvalidInput(f"exhaustive search is limited to n <= 15, got {n}")
    table = _angle_classes(points, tolerance) if n >= 3 else {}

    if strategy == "greedy":
        chosen: list[int] = []
        used: set[int] = set()
        nodes = 0
        for i in range(n):
            nodes += 1
            if nodes > budget:
                break
            added = _distinct_extension(table, chosen, i, used)
            if added is not None:
                chosen.append(i)
                used |= added
        best, complete = tuple(chosen), nodes <= budget
    else:
        best, complete, nodes = (), True, 0
        stack: list[tuple[tuple[int, ...], frozenset, int]] = [((), frozenset(), 0)]
        # explicit DFS; children pushed in reverse so the smallest index pops first
        while stack:
            chosen_t, used_f, start = stack.pop()
            nodes += 1
            if nodes > budget:
                complete = False
                break
            if len(chosen_t) > len(best):
                best = chosen_t
            if len(chosen_t) + (n - start) <= len(best):
                continue
            children = []
            for i in range(start, n):
                added = _distinct_extension(table, chosen_t, i, set(used_f))
                if added is not None:
                    children.append((chosen_t + (i,), used_f | added, i + 1))
            stack.extend(reversed(children))

    certificate = None
    if len(best) >= 3:
        certificate = census_bruteforce([points[i] for i in best], tolerance=tolerance)
        assert certificate.max_multiplicity == 1
    return SubsetSearchResult(best, certificate, strategy, complete, nodes)
