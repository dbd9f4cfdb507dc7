"""Random geometric graph instances on the unit square.

n points are drawn uniformly at random from [0, 1]^2 and two of them are
adjacent iff their l_p distance is at most r (inclusive). The sharp threshold
radius for Hamiltonicity is

    r(n) = sqrt(log n / (area_p * n))

with natural log and area_p the unit l_p disk area. Radii can be given
explicitly, as a multiple of the threshold, or through an eps margin on the
disk-area constant.

Sampling is deterministic: numpy's PCG64 generator seeded with a 64-bit seed,
drawing an (n, 2) float64 array in one call, which fixes the draw order as
x then y per vertex, vertices in index order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .geometry import lp_distance, lp_norms, unit_disk_area, validate_p


# --------------------------------------------------------------------------
# radius specification and resolution
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExplicitRadius:
    radius: float


@dataclass(frozen=True)
class EpsilonAbove:
    """r = sqrt(log n / ((area_p - eps) n)), supercritical for 0 < eps < area_p."""

    eps: float


@dataclass(frozen=True)
class EpsilonBelow:
    """r = sqrt(log n / ((area_p + eps) n)), subcritical for eps > 0."""

    eps: float


@dataclass(frozen=True)
class ThresholdMultiple:
    """r = factor * threshold_radius(n, p)."""

    factor: float


RadiusSpec = Union[ExplicitRadius, EpsilonAbove, EpsilonBelow, ThresholdMultiple]


def threshold_radius(n: int, p: float) -> float:
    """Sharp Hamiltonicity (and connectivity) threshold radius, natural log."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    return math.sqrt(math.log(n) / (unit_disk_area(p) * n))


def max_radius(p: float) -> float:
    """Upper validation bound on usable radii."""
    return math.sqrt(2.0) * 2.0 ** (1.0 / p) if p != math.inf else math.sqrt(2.0)


def resolve_radius(n: int, p: float, spec: RadiusSpec) -> float:
    """Turn a radius specification into a concrete radius, validating range."""
    p = validate_p(p)
    area = unit_disk_area(p)
    if isinstance(spec, ExplicitRadius):
        r = float(spec.radius)
    elif isinstance(spec, EpsilonAbove):
        if not 0.0 < spec.eps < area:
            raise ValueError(f"eps-above must lie in (0, {area}), got {spec.eps}")
        r = math.sqrt(math.log(n) / ((area - spec.eps) * n))
    elif isinstance(spec, EpsilonBelow):
        if spec.eps <= 0.0:
            raise ValueError(f"eps-below must be positive, got {spec.eps}")
        r = math.sqrt(math.log(n) / ((area + spec.eps) * n))
    elif isinstance(spec, ThresholdMultiple):
        if spec.factor <= 0.0:
            raise ValueError(f"threshold multiple must be positive, got {spec.factor}")
        r = spec.factor * threshold_radius(n, p)
    else:
        raise TypeError(f"unknown radius spec {spec!r}")
    if not (0.0 < r <= max_radius(p)):
        raise ValueError(f"resolved radius {r} outside (0, {max_radius(p)}]")
    return r


@dataclass(frozen=True)
class InstanceConfig:
    n: int
    p: float
    radius: RadiusSpec
    seed: int

    def __post_init__(self):
        if int(self.n) < 3:
            raise ValueError(f"need n >= 3, got {self.n}")
        validate_p(self.p)

    def resolved_radius(self) -> float:
        return resolve_radius(self.n, self.p, self.radius)


# --------------------------------------------------------------------------
# vertex sets
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexSet:
    """Immutable ordered point set; points is an (n, 2) float64 array."""

    points: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"points must have shape (n, 2), got {pts.shape}")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("x,y\n")
            for x, y in self.points:
                fh.write(f"{x:.17g},{y:.17g}\n")

    @classmethod
    def from_csv(cls, path) -> "VertexSet":
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline().strip()
            if header != "x,y":
                raise ValueError(f"expected header 'x,y', got {header!r}")
            rows = []
            for lineno, line in enumerate(fh, start=2):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 2:
                    raise ValueError(f"line {lineno}: expected 'x,y', got {line!r}")
                try:
                    x, y = float(parts[0]), float(parts[1])
                except ValueError:
                    raise ValueError(f"line {lineno}: not a number: {line!r}")
                if not (math.isfinite(x) and math.isfinite(y)):
                    raise ValueError(f"line {lineno}: non-finite coordinate")
                if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                    raise ValueError(f"line {lineno}: point outside [0,1]^2")
                rows.append((x, y))
        return cls(points=np.array(rows, dtype=np.float64).reshape(-1, 2))


def sample_points(cfg: InstanceConfig) -> VertexSet:
    """Draw cfg.n uniform points; bit-reproducible for a given seed."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    return VertexSet(points=rng.random((cfg.n, 2)), seed=cfg.seed)


# --------------------------------------------------------------------------
# spatial index and connectivity
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SpatialIndex:
    """Uniform bucket grid of width >= r over [0, 1]^2.

    Vertices at l_p distance <= r always lie in the same or edge/corner
    adjacent buckets, so neighbour enumeration only ever inspects a 3x3
    bucket patch. Membership is stored CSR style: `order` lists vertex
    indices grouped by bucket, `starts[b]:starts[b+1]` slices bucket b.
    """

    points: np.ndarray
    r: float
    p: float
    side: int
    bucket_col: np.ndarray
    bucket_row: np.ndarray
    order: np.ndarray
    starts: np.ndarray


def build_spatial_index(vs: VertexSet, r: float, p: float) -> SpatialIndex:
    if r <= 0.0:
        raise ValueError(f"radius must be positive, got {r}")
    p = validate_p(p)
    side = max(1, math.floor(1.0 / r))
    pts = vs.points
    col = np.minimum((pts[:, 0] * side).astype(np.int64), side - 1)
    row = np.minimum((pts[:, 1] * side).astype(np.int64), side - 1)
    flat = row * side + col
    counts = np.bincount(flat, minlength=side * side)
    starts = np.zeros(side * side + 1, dtype=np.int64)
    np.cumsum(counts, out=starts[1:])
    order = np.argsort(flat, kind="stable").astype(np.int64)
    return SpatialIndex(points=pts, r=r, p=p, side=side,
                        bucket_col=col, bucket_row=row,
                        order=order, starts=starts)


def adjacent(idx: SpatialIndex, u: int, v: int) -> bool:
    """Edge test: l_p distance at most r, the boundary inclusive."""
    pu = idx.points[u]
    pv = idx.points[v]
    return lp_distance(idx.p, (pu[0], pu[1]), (pv[0], pv[1])) <= idx.r


_BUCKET_OFFSETS = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1)]


def _gather_members(idx: SpatialIndex, buckets: np.ndarray,
                    sources: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR gather: members of each bucket, with the querying source repeated."""
    first = idx.starts[buckets]
    cnt = idx.starts[buckets + 1] - first
    keep = cnt > 0
    if not keep.any():
        return np.empty(0, np.int64), np.empty(0, np.int64)
    first, cnt, sources = first[keep], cnt[keep], sources[keep]
    total = int(cnt.sum())
    base = np.repeat(first, cnt)
    shift = np.repeat(np.cumsum(cnt) - cnt, cnt)
    members = idx.order[base + (np.arange(total) - shift)]
    return np.repeat(sources, cnt), members


# ceiling on (source, candidate) pairs materialized at once; keeps the BFS
# within memory even when a huge radius folds the whole square into one bucket
_PAIR_CHUNK = 1 << 21


def is_connected(idx: SpatialIndex) -> bool:
    """BFS over the bucket grid, one vectorized layer at a time.

    Each layer gathers the 3x3 bucket neighbourhood of the frontier in
    bounded slabs, filters by distance, and claims the newly reached
    vertices. No global edge list is ever materialized; total work is
    O(n * expected bucket occupancy).
    """
    n = idx.points.shape[0]
    if n <= 1:
        return True
    visited = np.zeros(n, dtype=bool)
    visited[0] = True
    frontier = np.array([0], dtype=np.int64)
    side = idx.side
    while frontier.size:
        fcol = idx.bucket_col[frontier]
        frow = idx.bucket_row[frontier]
        claimed = []
        for di, dj in _BUCKET_OFFSETS:
            nc = fcol + di
            nr = frow + dj
            ok = (nc >= 0) & (nc < side) & (nr >= 0) & (nr < side)
            if not ok.any():
                continue
            buckets = nr[ok] * side + nc[ok]
            sources = frontier[ok]
            bounds = np.cumsum(idx.starts[buckets + 1] - idx.starts[buckets])
            lo = 0
            while lo < len(buckets):
                base = int(bounds[lo - 1]) if lo else 0
                hi = int(np.searchsorted(bounds, base + _PAIR_CHUNK, side="right"))
                hi = max(hi, lo + 1)
                src, mem = _gather_members(idx, buckets[lo:hi], sources[lo:hi])
                lo = hi
                fresh = ~visited[mem] if mem.size else mem.astype(bool)
                src, mem = src[fresh], mem[fresh]
                if mem.size == 0:
                    continue
                delta = idx.points[src] - idx.points[mem]
                close = lp_norms(idx.p, delta[:, 0], delta[:, 1]) <= idx.r
                new = np.unique(mem[close])
                if new.size:
                    # claim eagerly so later slabs skip these vertices
                    visited[new] = True
                    claimed.append(new)
        if not claimed:
            break
        frontier = np.concatenate(claimed)
    return bool(visited.all())
