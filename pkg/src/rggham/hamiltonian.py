"""Hamiltonian cycle construction over the tessellated instance.

The cycle follows the euler order of a spanning tree of the augmented graph.
Each move between old vertices withdraws one vertex from each side of the
edge's witness cell pair; a visit to a group node walks all vertices of the
group's sparse cells between two hook withdrawals. When a square is visited
for the last time, all its remaining vertices are stitched in with a
serpentine sweep of its cells before leaving.

Budget argument, and why the per-cell withdrawal cap equals the density
threshold: counted withdrawals from a cell happen only on edge steps
adjacent to the cell's square, at most one per step; a tree vertex of degree
d has 2d adjacent steps and d <= 24, so at most 48 vertices leave any single
cell before the final sweep. Witness and hook cells are dense, hence hold at
least 48 vertices, and the ledger never runs dry on the intended path. The
cap stays enforced anyway; a breach marks a logic error, reported as
LedgerExhausted rather than a corrupt cycle.

Every constructed cycle is self-verified (zero tolerance) before being
returned, so callers get either a valid cycle or a typed failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .auxgraphs import (AugmentedGraph, GroupKey, Node, attach_sparse_groups,
                        build_density_graph, euler_traversal, spanning_tree)
from .failures import ConstructionError, FailureReason
from .geometry import _lp_from_abs, lp_norms, unit_disk_area, validate_p
from .instance import VertexSet
from .tessellation import (DENSE_THRESHOLD, CellClassification, CellId,
                           Tessellation, build_tessellation,
                           choose_cells_per_side, classify_cells)


class UsageLedger:
    """Tracks vertex withdrawals per cell.

    take() is a counted withdrawal, capped at the density threshold; going
    past the cap (or taking from an empty cell) raises LedgerExhausted.
    drain() hands over whatever is left, uncounted; it backs the final
    sweeps, which may empty any cell. Vertices leave in ascending index
    order either way.
    """

    def __init__(self, cls: CellClassification):
        self._cls = cls
        self._cursor = np.zeros(len(cls.counts), dtype=np.int64)
        self._taken = np.zeros(len(cls.counts), dtype=np.int64)

    def remaining(self, flat_cell: int) -> int:
        return int(self._cls.counts[flat_cell] - self._cursor[flat_cell])

    def take(self, flat_cell: int) -> int:
        cls = self._cls
        if (self._cursor[flat_cell] >= cls.counts[flat_cell]
                or self._taken[flat_cell] >= DENSE_THRESHOLD):
            raise ConstructionError(
                FailureReason.LEDGER_EXHAUSTED,
                {"cell": int(flat_cell),
                 "occupancy": int(cls.counts[flat_cell]),
                 "withdrawn": int(self._taken[flat_cell])})
        v = cls.order[cls.starts[flat_cell] + self._cursor[flat_cell]]
        self._cursor[flat_cell] += 1
        self._taken[flat_cell] += 1
        return int(v)

    def drain(self, flat_cell: int) -> np.ndarray:
        cls = self._cls
        lo = cls.starts[flat_cell] + self._cursor[flat_cell]
        hi = cls.starts[flat_cell + 1]
        self._cursor[flat_cell] = cls.counts[flat_cell]
        return cls.order[lo:hi]

    def withdrawals(self) -> dict[int, int]:
        idx = np.nonzero(self._taken)[0]
        return {int(i): int(self._taken[i]) for i in idx}


# --------------------------------------------------------------------------
# serpentine sweeps
# --------------------------------------------------------------------------

def _serpentine_orders(k: int) -> list[list[tuple[int, int]]]:
    """Eight boustrophedon orders of the k x k local cell grid.

    Variants are rows-first/cols-first crossed with both start corners per
    axis. With even k each full sweep starts and ends in side-adjacent
    corners, which keeps the entry and exit hops short.
    """
    out = []
    for transpose in (False, True):
        for flip_major in (False, True):
            for flip_minor in (False, True):
                order = []
                for a in range(k):
                    major = k - 1 - a if flip_major else a
                    minor_fwd = (a % 2 == 0) != flip_minor
                    minors = range(k) if minor_fwd else range(k - 1, -1, -1)
                    for b in minors:
                        order.append((b, major) if not transpose else (major, b))
                out.append(order)
    return out


def _cell_sup_distance(t: Tessellation, a: CellId, b: CellId) -> float:
    s = t.cell_side
    return _lp_from_abs(t.p, (abs(a.col - b.col) + 1) * s,
                        (abs(a.row - b.row) + 1) * s)


def _sweep_square(t: Tessellation, ledger: UsageLedger, flat_sq: int,
                  start_near: Optional[CellId], end_near: Optional[CellId]) -> list[int]:
    """Drain every remaining vertex of the square, serpentine cell order.

    Picks the variant whose last occupied cell lands nearest end_near (and
    whose first lands nearest start_near as a tie break), so the hops into
    and out of the sweep stay short.
    """
    m = t.squares_per_side
    k = t.cells_per_side
    g = t.grid
    srow, scol = divmod(flat_sq, m)

    def flat_of(lc: int, lr: int) -> int:
        return (srow * k + lr) * g + (scol * k + lc)

    occupied = {(lc, lr) for lr in range(k) for lc in range(k)
                if ledger.remaining(flat_of(lc, lr)) > 0}
    if not occupied:
        return []

    best = None
    best_order = None
    for v, order in enumerate(_serpentine_orders(k)):
        occ = [c for c in order if c in occupied]
        first = CellId(scol * k + occ[0][0], srow * k + occ[0][1])
        last = CellId(scol * k + occ[-1][0], srow * k + occ[-1][1])
        score = (
            _cell_sup_distance(t, last, end_near) if end_near is not None else 0.0,
            _cell_sup_distance(t, first, start_near) if start_near is not None else 0.0,
            v,
        )
        if best is None or score < best:
            best = score
            best_order = occ
    path: list[int] = []
    for lc, lr in best_order:
        path.extend(int(x) for x in ledger.drain(flat_of(lc, lr)))
    return path


def within_clique_path(t: Tessellation, points: np.ndarray,
                       vertices, entry: Optional[int] = None
                       ) -> tuple[list[int], tuple[int, int]]:
    """Deterministic path through co-located vertices, with its endpoints.

    Orders by cell in row-major cell order, then by vertex index within a
    cell; a given entry vertex is moved to the front. Callers guarantee the
    vertices are mutually adjacent (one cell, or one square in a regime
    where the square is a clique); this function only fixes the order. A
    single vertex yields a path whose endpoints coincide.
    """
    g = t.grid
    verts = [int(v) for v in vertices]
    if not verts:
        raise ValueError("path needs at least one vertex")
    col = np.minimum((points[verts, 0] * g).astype(np.int64), g - 1)
    row = np.minimum((points[verts, 1] * g).astype(np.int64), g - 1)
    flat = {v: int(row[i] * g + col[i]) for i, v in enumerate(verts)}
    order = sorted(verts, key=lambda v: (flat[v], v))
    if entry is not None:
        entry = int(entry)
        if entry not in flat:
            raise ValueError(f"entry vertex {entry} is not in the path set")
        order.remove(entry)
        order.insert(0, entry)
    return order, (order[0], order[-1])


# --------------------------------------------------------------------------
# cycle construction
# --------------------------------------------------------------------------

def _cell_of(t: Tessellation, flat_cell: int) -> CellId:
    return CellId(flat_cell % t.grid, flat_cell // t.grid)


def construct_cycle(points: np.ndarray, t: Tessellation,
                    cls: CellClassification, ag: AugmentedGraph,
                    order: list[Node]) -> np.ndarray:
    """Build the Hamiltonian cycle along an euler traversal of the tree.

    Returns the cycle as a vertex permutation. Raises ConstructionError
    (EdgeTooLong) when the self check finds an overlong edge; structural
    breakage surfaces as LedgerExhausted or an assertion.
    """
    ledger = UsageLedger(cls)
    last_pos: dict[Node, int] = {node: i for i, node in enumerate(order)}
    path: list[int] = []
    # cell of the most recent path vertex, for sweep scoring
    prev_cell: Optional[CellId] = None

    def push(v: int, cell: int) -> None:
        nonlocal prev_cell
        path.append(v)
        prev_cell = _cell_of(t, cell)

    if len(order) == 1:
        root = order[0]
        assert isinstance(root, int)
        path = _sweep_square(t, ledger, root, None, None)
    else:
        i = 0
        while i < len(order) - 1:
            u, v = order[i], order[i + 1]
            assert isinstance(u, int), "traversal must move between old vertices"
            if isinstance(v, GroupKey):
                # leaf roundtrip: hook in, walk the sparse cells, hook out
                assert order[i + 2] == u
                cells = ag.groups[v]
                hook_in = ag.hooks[cells[0]]
                hook_out = ag.hooks[cells[-1]]
                push(ledger.take(hook_in), hook_in)
                for c in cells:
                    for x in ledger.drain(c):
                        push(int(x), c)
                push(ledger.take(hook_out), hook_out)
                i += 2
                continue
            cu, cv = ag.density.witness_cells(u, v)
            if i == last_pos[u]:
                # final departure: empty the square before leaving
                exit_v = ledger.take(cu)
                path.extend(_sweep_square(t, ledger, u, prev_cell, _cell_of(t, cu)))
                push(exit_v, cu)
            else:
                push(ledger.take(cu), cu)
            push(ledger.take(cv), cv)
            i += 1
        root = order[-1]
        assert isinstance(root, int)
        first_cell = t.locate(points[path[0], 0], points[path[0], 1])
        path.extend(_sweep_square(t, ledger, root, prev_cell, first_cell))

    cycle = np.asarray(path, dtype=np.int64)
    report = verify_cycle(points, t.radius, t.p, cycle)
    if not report.valid:
        violation = report.violation
        assert violation.kind == "EdgeTooLong", \
            f"constructed cycle is not a permutation: {violation}"
        raise ConstructionError(
            FailureReason.EDGE_TOO_LONG,
            {"position": violation.position,
             "distance": violation.distance,
             "radius": t.radius})
    return cycle


# --------------------------------------------------------------------------
# verification
# --------------------------------------------------------------------------

class Violation(NamedTuple):
    position: int
    kind: str  # NotPermutation | EdgeTooLong
    distance: Optional[float]


@dataclass(frozen=True)
class VerificationReport:
    valid: bool
    n: int
    violation: Optional[Violation]

    def to_json(self) -> dict:
        out: dict = {"valid": self.valid, "n": self.n}
        if self.violation is not None:
            out["violation"] = {"position": self.violation.position,
                                "kind": self.violation.kind}
            if self.violation.distance is not None:
                out["violation"]["distance"] = self.violation.distance
        return out


def verify_cycle(points: np.ndarray, r: float, p: float,
                 cycle: np.ndarray, tolerance: float = 0.0) -> VerificationReport:
    """Check that cycle is a vertex permutation with all hops <= r + tolerance.

    Reports the first violation: NotPermutation for a malformed sequence
    (wrong length, out-of-range or repeated vertex), EdgeTooLong for the
    first overlong hop, including the wraparound edge.
    """
    n = len(points)
    arr = np.asarray(cycle)
    if arr.ndim != 1 or len(arr) != n or not np.issubdtype(arr.dtype, np.integer):
        return VerificationReport(False, n, Violation(0, "NotPermutation", None))
    bad = (arr < 0) | (arr >= n)
    seen = np.zeros(n, dtype=bool)
    first_bad = int(np.argmax(bad)) if bad.any() else n
    seen[arr[~bad]] = True
    if bad.any() or not seen.all():
        # locate the first repeat to report a position
        if not bad.any():
            srt = np.argsort(arr, kind="stable")
            dup = srt[1:][arr[srt[1:]] == arr[srt[:-1]]]
            first_bad = int(dup.min()) if dup.size else n
        return VerificationReport(False, n, Violation(first_bad, "NotPermutation", None))
    nxt = np.roll(arr, -1)
    d = lp_norms(p, points[nxt, 0] - points[arr, 0], points[nxt, 1] - points[arr, 1])
    over = d > r + tolerance
    if over.any():
        pos = int(np.argmax(over))
        return VerificationReport(False, n, Violation(pos, "EdgeTooLong", float(d[pos])))
    return VerificationReport(True, n, None)


# --------------------------------------------------------------------------
# degenerate radius fallback and the full pipeline
# --------------------------------------------------------------------------

def _angular_cycle(points: np.ndarray, r: float, p: float) -> np.ndarray:
    """Order vertices by angle around the centroid; only usable when r is
    so large the tessellation degenerates (r > 1)."""
    centroid = points.mean(axis=0)
    ang = np.arctan2(points[:, 1] - centroid[1], points[:, 0] - centroid[0])
    cycle = np.lexsort((np.arange(len(points)), ang)).astype(np.int64)
    report = verify_cycle(points, r, p, cycle)
    if not report.valid:
        raise ConstructionError(
            FailureReason.RADIUS_DEGENERATE,
            {"detail": "angular order has an overlong hop at this radius",
             "position": report.violation.position,
             "distance": report.violation.distance})
    return cycle


class ConstructionOutcome(NamedTuple):
    cycle: np.ndarray
    cells_per_side: Optional[int]  # None for the degenerate-radius path


def full_construction(points: np.ndarray, p: float, r: float,
                      cells_per_square: Optional[int] = None) -> ConstructionOutcome:
    """Tessellate, classify, build the graphs, and construct the cycle.

    cells_per_square overrides the subdivision; otherwise it is chosen from
    the slack between r and the connectivity threshold (falling back to the
    minimum when r sits at or below threshold).
    """
    p = validate_p(p)
    n = len(points)
    if n < 3:
        raise ValueError(f"a cycle needs at least 3 vertices, got {n}")
    if not r > 0.0:
        raise ValueError(f"radius must be positive, got {r}")
    if r > 1.0:
        return ConstructionOutcome(_angular_cycle(points, r, p), None)
    if cells_per_square is None:
        eps = unit_disk_area(p) - math.log(n) / (r * r * n)
        if eps > 0.0:
            cells_per_square, _ = choose_cells_per_side(p, eps)
        else:
            cells_per_square = 4
    t = build_tessellation(p, r, cells_per_square)
    cls = classify_cells(t, VertexSet(points))
    dg = build_density_graph(t, cls)
    ag = attach_sparse_groups(t, cls, dg)
    tree = spanning_tree(ag)
    order = euler_traversal(tree)
    cycle = construct_cycle(points, t, cls, ag, order)
    return ConstructionOutcome(cycle, cells_per_square)
