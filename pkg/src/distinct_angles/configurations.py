"""Point configurations: log spiral, lattice grid and sphere shells, projections, n-gons.

Every generator is a deterministic function of its parameters (and seed).
Configurations serialize to a JSON document that the CLI passes between
subcommands; see ``config_to_dict`` / ``config_from_dict``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

import mpmath
import numpy as np

from .errors import (DimensionMismatch, IndexOutOfRange, InvalidInput, InvalidParameter,
                     RetriesExhausted, TooLarge)
from .geometry import (DEFAULT_MARGIN, DEFAULT_PRECISION, GeneralPositionReport, RationalPoint2,
                       RealPoint2, context, general_position_report, to_decimal, to_mpf)

ENUMERATION_CAP = 10**6

LatticePoint = tuple[int, ...]


def parse_real(value, precision_bits: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """Read a real parameter; ``"1/20"`` style strings are taken as exact ratios."""
    if isinstance(value, str) and "/" in value:
        value = Fraction(value)
    return to_mpf(value, precision_bits)


# ---------------------------------------------------------------------------
# logarithmic spiral


@dataclass(frozen=True)
class SpiralConfig:
    """Points j = 1..n at polar radius exp(j*beta) and polar angle j*beta."""

    n: int
    beta: mpmath.mpf
    precision_bits: int
    points: tuple[RealPoint2, ...]

    kind = "spiral"

    def point(self, j: int) -> RealPoint2:
        """1-based access, matching the index set [n]."""
        if not 1 <= j <= self.n:
            raise IndexOutOfRange(f"spiral index {j} outside [1, {self.n}]")
        return self.points[j - 1]

    def polar(self, j: int) -> tuple[mpmath.mpf, mpmath.mpf]:
        ctx = context(self.precision_bits)
        theta = j * self.beta
        return ctx.exp(theta), theta

    @property
    def parameters(self) -> dict:
        return {"n": self.n, "beta": to_decimal(self.beta, self.precision_bits)}


def spiral_config(n: int, beta=None, precision_bits: int = DEFAULT_PRECISION) -> SpiralConfig:
    """n points of the spiral r = exp(theta) at equal parameter steps ``beta``.

    ``beta`` defaults to 1/n. General position is not checked here.
    """
    if n < 3:
        raise InvalidParameter(f"n must be >= 3, got {n}")
    ctx = context(precision_bits)
    beta = ctx.mpf(1) / n if beta is None else parse_real(beta, precision_bits)
    if not beta > 0:
        raise InvalidParameter(f"beta must be positive, got {beta}")
    pts = []
    for j in range(1, n + 1):
        theta = j * beta
        rho = ctx.exp(theta)
        pts.append(RealPoint2(rho * ctx.cos(theta), rho * ctx.sin(theta), precision_bits))
    return SpiralConfig(n, beta, precision_bits, tuple(pts))


def f_alpha(point: RealPoint2, alpha) -> RealPoint2:
    """Rotate by ``alpha`` and dilate by exp(alpha); maps the spiral onto itself."""
    ctx = context(point.precision_bits)
    alpha = ctx.mpf(alpha)
    s = ctx.exp(alpha)
    c, sn = ctx.cos(alpha), ctx.sin(alpha)
    return RealPoint2(s * (c * point.x - sn * point.y), s * (sn * point.x + c * point.y),
                      point.precision_bits)


def f_alpha_index_shift(config: SpiralConfig, triple: Sequence[int], k: int) -> tuple[RealPoint2, ...]:
    """Image of the index triple under the spiral self-map with alpha = k*beta.

    On configuration points that map is just j -> j + k.
    """
    shifted = [j + k for j in triple]
    for j in shifted:
        if not 1 <= j <= config.n:
            raise IndexOutOfRange(f"shifted index {j} outside [1, {config.n}]")
    return tuple(config.point(j) for j in shifted)


# ---------------------------------------------------------------------------
# lattice grid and sphere shells


@dataclass(frozen=True)
class LatticeConfig:
    r: int
    d: int
    points: tuple[LatticePoint, ...]

    kind = "grid"

    @property
    def parameters(self) -> dict:
        return {"r": self.r, "d": self.d}


@dataclass(frozen=True)
class ShellConfig:
    r: int
    d: int
    level: int
    points: tuple[LatticePoint, ...]
    mean_bound: Fraction
    shell_sizes: tuple[int, ...] = ()

    kind = "shell"

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def parameters(self) -> dict:
        return {"r": self.r, "d": self.d, "l": self.level}


def _check_cap(r: int, d: int, cap: int) -> None:
    if r < 0 or d < 1:
        raise InvalidParameter(f"need r >= 0 and d >= 1, got r={r}, d={d}")
    if (r + 1) ** d > cap:
        raise TooLarge(f"(r+1)^d = {(r + 1) ** d} exceeds the enumeration cap {cap}")


def grid(r: int, d: int, cap: int = ENUMERATION_CAP) -> LatticeConfig:
    """All of {0..r}^d in lexicographic order."""
    _check_cap(r, d, cap)
    return LatticeConfig(r, d, tuple(product(range(r + 1), repeat=d)))


def shell_mean_bound(r: int, d: int) -> Fraction:
    """Average shell size (r+1)^d / (d r^2 + 1) over the levels 0..d r^2."""
    return Fraction((r + 1) ** d, d * r * r + 1)


def best_shell(r: int, d: int, cap: int = ENUMERATION_CAP) -> ShellConfig:
    """Largest level set of f(a) = sum a_i^2 on the grid; ties go to the smaller level."""
    g = grid(r, d, cap)
    sizes = [0] * (d * r * r + 1)
    for a in g.points:
        sizes[sum(c * c for c in a)] += 1
    level = max(range(len(sizes)), key=lambda l: (sizes[l], -l))
    pts = tuple(a for a in g.points if sum(c * c for c in a) == level)
    return ShellConfig(r, d, level, pts, shell_mean_bound(r, d), tuple(sizes))


def collinear_nd(a: Sequence[int], b: Sequence[int], c: Sequence[int]) -> bool:
    """Exact collinearity in any dimension via |u|^2 |v|^2 - (u.v)^2 = 0."""
    if not len(a) == len(b) == len(c):
        raise DimensionMismatch("points differ in dimension")
    u = [bi - ai for ai, bi in zip(a, b)]
    v = [ci - ai for ai, ci in zip(a, c)]
    uu = sum(t * t for t in u)
    vv = sum(t * t for t in v)
    uv = sum(s * t for s, t in zip(u, v))
    return uu * vv == uv * uv


def _rank(rows: list[list[Fraction]]) -> int:
    rows = [list(r) for r in rows]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(rank + 1, len(rows)):
            f = Fraction(rows[i][col], rows[rank][col])
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def concyclic_nd(*points: Sequence[int]) -> bool:
    """True iff four points of R^d lie on a common circle or line.

    Uses rank [1, p, |p|^2] <= 3; in the plane this is the in-circle determinant.
    """
    if len(points) != 4:
        raise InvalidInput("concyclic_nd takes exactly four points")
    if len({len(p) for p in points}) != 1:
        raise DimensionMismatch("points differ in dimension")
    rows = [[Fraction(1), *map(Fraction, p), Fraction(sum(c * c for c in p))] for p in points]
    return _rank(rows) <= 3


def lattice_collinear_any(points: Sequence[Sequence[int]], chunk: int = 1 << 18) -> tuple[int, ...] | None:
    """First collinear index triple (lexicographic), or None. Vectorized exact int test."""
    n = len(points)
    if n < 3:
        return None
    arr = np.array(points, dtype=np.int64)
    for i in range(n - 2):
        rest = np.array(list(combinations(range(i + 1, n), 2)), dtype=np.int64)
        for s in range(0, len(rest), chunk):
            part = rest[s:s + chunk]
            u = arr[part[:, 0]] - arr[i]
            v = arr[part[:, 1]] - arr[i]
            uu, vv, uv = (u * u).sum(1), (v * v).sum(1), (u * v).sum(1)
            hit = np.flatnonzero(uu * vv == uv * uv)
            if len(hit):
                j, k = part[hit[0]]
                return (i, int(j), int(k))
    return None


def lattice_general_position_report(points: Sequence[Sequence[int]]) -> GeneralPositionReport:
    """Exact report for integer points of any dimension.

    Counts every collinear triple and every concyclic quadruple. For d = 2 the
    planar exact report (with rational margins) is returned instead.
    """
    points = [tuple(int(c) for c in p) for p in points]
    if len(points) < 3:
        raise InvalidInput("general position needs at least 3 points")
    if len(points[0]) == 2:
        return general_position_report([RationalPoint2(*p) for p in points], mode="exact")
    rep = GeneralPositionReport(ok=True, mode="exact", margin=None, n_points=len(points))
    for tri in combinations(range(len(points)), 3):
        if collinear_nd(*(points[i] for i in tri)):
            rep.collinear_count += 1
            rep.collinear_witness = rep.collinear_witness or tri
    for quad in combinations(range(len(points)), 4):
        if concyclic_nd(*(points[i] for i in quad)):
            rep.concyclic_count += 1
            rep.concyclic_witness = rep.concyclic_witness or quad
    rep.ok = rep.collinear_count == 0 and rep.concyclic_count == 0
    return rep


# ---------------------------------------------------------------------------
# generic projection


@dataclass(frozen=True)
class ProjectionFrame:
    """Orthonormal pair (e1, e2) in R^d; T(p) = (p.e1, p.e2)."""

    d: int
    basis: tuple[tuple[mpmath.mpf, ...], tuple[mpmath.mpf, ...]]
    seed: int
    attempt: int = 0
    precision_bits: int = DEFAULT_PRECISION

    def project(self, p: Sequence) -> RealPoint2:
        if len(p) != self.d:
            raise DimensionMismatch(f"point of dimension {len(p)} for a frame in R^{self.d}")
        ctx = context(self.precision_bits)
        e1, e2 = self.basis
        return RealPoint2(ctx.fdot([ctx.mpf(c) for c in p], e1),
                          ctx.fdot([ctx.mpf(c) for c in p], e2), self.precision_bits)

    def orthonormality_error(self) -> mpmath.mpf:
        ctx = context(self.precision_bits)
        e1, e2 = self.basis
        return max(abs(ctx.fdot(e1, e1) - 1), abs(ctx.fdot(e2, e2) - 1), abs(ctx.fdot(e1, e2)))

    def to_dict(self) -> dict:
        return {"d": self.d, "seed": self.seed, "attempt": self.attempt,
                "precision_bits": self.precision_bits,
                "basis": [[to_decimal(c, self.precision_bits) for c in e] for e in self.basis]}

    @classmethod
    def from_dict(cls, data: dict) -> "ProjectionFrame":
        bits = int(data["precision_bits"])
        ctx = context(bits)
        basis = tuple(tuple(ctx.mpf(c) for c in e) for e in data["basis"])
        return cls(int(data["d"]), basis, int(data["seed"]), int(data.get("attempt", 0)), bits)


def rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator (Philox) keyed by the seed and a stream path."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed & (2**64 - 1), *stream])))


def random_frame(d: int, seed: int, attempt: int = 0,
                 precision_bits: int = DEFAULT_PRECISION) -> ProjectionFrame:
    """Gaussian d-vectors orthonormalized by two Gram-Schmidt steps at working precision."""
    if d < 2:
        raise InvalidParameter(f"a planar frame needs d >= 2, got {d}")
    ctx = context(precision_bits)
    g = rng(seed, attempt).standard_normal((2, d))
    g1 = [ctx.mpf(float(v)) for v in g[0]]
    g2 = [ctx.mpf(float(v)) for v in g[1]]
    n1 = ctx.sqrt(ctx.fdot(g1, g1))
    e1 = [v / n1 for v in g1]
    w = ctx.fdot(g2, e1)
    g2 = [b - w * a for a, b in zip(e1, g2)]
    n2 = ctx.sqrt(ctx.fdot(g2, g2))
    e2 = [v / n2 for v in g2]
    return ProjectionFrame(d, (tuple(e1), tuple(e2)), seed, attempt, precision_bits)


def _injectivity_witness(img: Sequence[RealPoint2], margin: float):
    """Closest pair relative to the diameter, if it is within ``margin``."""
    x = np.array([float(p.x) for p in img])
    y = np.array([float(p.y) for p in img])
    dx = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    dist = np.hypot(dx, dy)
    diam = dist.max()
    np.fill_diagonal(dist, np.inf)
    i, j = np.unravel_index(np.argmin(dist), dist.shape)
    if diam == 0 or dist[i, j] / diam <= max(margin, 1e-13):
        ctx = context(img[0].precision_bits)
        exact = ctx.hypot(img[i].x - img[j].x, img[i].y - img[j].y)
        if exact == 0 or exact / diam <= margin:
            return (int(min(i, j)), int(max(i, j)))
    return None


def generic_projection(points: Sequence[Sequence], seed: int, max_retries: int = 16,
                       precision_bits: int = DEFAULT_PRECISION, margin: float = DEFAULT_MARGIN,
                       source_collinear_free: bool | None = None,
                       ) -> tuple[list[RealPoint2], ProjectionFrame]:
    """Project d-dimensional points onto a random plane, retrying until admissible.

    An image is admissible when it is injective and, if the source has no
    three collinear points, it also passes the numeric general-position
    report. ``source_collinear_free`` is computed exactly for integer input
    when not given.
    """
    points = [tuple(p) for p in points]
    if not points:
        raise InvalidInput("nothing to project")
    d = len(points[0])
    if d < 3:
        raise InvalidParameter(f"projection source must have d >= 3, got {d}")
    if any(len(p) != d for p in points):
        raise DimensionMismatch("source points differ in dimension")
    if len(set(points)) != len(points):
        raise InvalidInput("source points must be pairwise distinct")
    if source_collinear_free is None:
        if all(isinstance(c, (int, np.integer)) for p in points for c in p):
            source_collinear_free = lattice_collinear_any(points) is None
        else:
            source_collinear_free = False

    witness = None
    for attempt in range(max_retries):
        frame = random_frame(d, seed, attempt, precision_bits)
        img = [frame.project(p) for p in points]
        pair = _injectivity_witness(img, margin) if len(img) > 1 else None
        if pair is not None:
            witness = {"attempt": attempt, "coincident_pair": list(pair)}
            continue
        if source_collinear_free and len(img) >= 3:
            rep = general_position_report(img, "numeric", margin, precision_bits)
            if not rep.ok:
                witness = {"attempt": attempt, "report": rep.to_dict()}
                continue
        return img, frame
    raise RetriesExhausted(max_retries, witness)


# ---------------------------------------------------------------------------
# regular polygon


def regular_ngon(n: int, precision_bits: int = DEFAULT_PRECISION) -> list[RealPoint2]:
    """Unit-circumradius regular n-gon, vertex k at polar angle 2 pi k / n."""
    if n < 3:
        raise InvalidParameter(f"n must be >= 3, got {n}")
    ctx = context(precision_bits)
    return [RealPoint2(ctx.cospi(ctx.mpf(2 * k) / n), ctx.sinpi(ctx.mpf(2 * k) / n), precision_bits)
            for k in range(n)]


# ---------------------------------------------------------------------------
# interchange format


@dataclass(frozen=True)
class PointSet:
    """A planar configuration with no further structure (n-gon, projection, file input)."""

    kind: str
    points: tuple
    parameters: dict = field(default_factory=dict)
    precision_bits: int = DEFAULT_PRECISION
    frame: ProjectionFrame | None = None
    metadata: dict = field(default_factory=dict)


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _encode_points(points, precision_bits: int) -> tuple[str, list]:
    first = points[0]
    if isinstance(first, RealPoint2):
        return "real", [[to_decimal(p.x, precision_bits), to_decimal(p.y, precision_bits)] for p in points]
    if isinstance(first, RationalPoint2):
        return "rational", [[_fmt_rational(p.x), _fmt_rational(p.y)] for p in points]
    return "integer", [[str(int(c)) for c in p] for p in points]


def config_to_dict(config) -> dict:
    """JSON-ready document for any configuration type of this module."""
    bits = getattr(config, "precision_bits", DEFAULT_PRECISION)
    number_type, pts = _encode_points(config.points, bits)
    doc = {
        "kind": config.kind,
        "parameters": dict(config.parameters),
        "precision_bits": bits,
        "number_type": number_type,
        "dimension": len(pts[0]),
        "points": pts,
    }
    if isinstance(config, ShellConfig):
        doc["metadata"] = {
            "level": config.level,
            "size": config.size,
            "mean_bound": _fmt_rational(config.mean_bound),
            "shell_sizes": list(config.shell_sizes),
        }
    if isinstance(config, PointSet):
        if config.metadata:
            doc["metadata"] = dict(config.metadata)
        if config.frame is not None:
            doc["frame"] = config.frame.to_dict()
    return doc


def config_from_dict(doc: dict):
    """Inverse of ``config_to_dict``. Raises InvalidInput on malformed documents."""
    try:
        kind = doc["kind"]
        params = doc.get("parameters", {})
        bits = int(doc.get("precision_bits", DEFAULT_PRECISION))
        number_type = doc.get("number_type", "real")
        raw = doc["points"]
        if not isinstance(raw, list) or not raw:
            raise InvalidInput("points must be a non-empty list")
        if number_type == "real":
            ctx = context(bits)
            pts = tuple(RealPoint2(ctx.mpf(x), ctx.mpf(y), bits) for x, y in raw)
        elif number_type == "rational":
            pts = tuple(RationalPoint2(Fraction(x), Fraction(y)) for x, y in raw)
        elif number_type == "integer":
            pts = tuple(tuple(int(c) for c in p) for p in raw)
        else:
            raise InvalidInput(f"unknown number_type {number_type!r}")

        if kind == "spiral":
            n = int(params["n"])
            if n != len(pts):
                raise InvalidInput(f"spiral declares n={n} but has {len(pts)} points")
            return SpiralConfig(n, parse_real(params["beta"], bits), bits, pts)
        if kind == "grid":
            return LatticeConfig(int(params["r"]), int(params["d"]), pts)
        if kind == "shell":
            meta = doc.get("metadata", {})
            r, d = int(params["r"]), int(params["d"])
            return ShellConfig(r, d, int(params["l"]), pts, shell_mean_bound(r, d),
                               tuple(meta.get("shell_sizes", ())))
        frame = ProjectionFrame.from_dict(doc["frame"]) if "frame" in doc else None
        return PointSet(kind, pts, dict(params), bits, frame, dict(doc.get("metadata", {})))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"malformed configuration document: {exc}") from exc
