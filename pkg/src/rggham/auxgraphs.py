"""Auxiliary graphs over tessellation squares and the traversal order.

Two graphs drive the cycle construction:

  * the density graph has one vertex per dense square and an edge between
    friend squares that own a close pair of dense cells (the witness pair,
    one cell in each square);
  * the augmented graph adds one leaf node per (sparse square S, label
    square R) where R is a dense square holding hook cells for some of S's
    vertices. Every vertex of S is hooked to its lexicographically smallest
    close dense cell, and the hook's square is provably a friend of S.

A square contributes at most one edge per friend to an old vertex (a friend
is either dense, giving a density edge, or sparse, giving at most one group
node labelled by that vertex), so degrees stay at most 24. A spanning tree
of the augmented graph, walked in euler order (each tree edge twice), is the
skeleton the cycle follows.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .failures import ConstructionError, FailureReason
from .tessellation import (MAX_FRIENDS, CellClassification, CellId, SquareId,
                           Tessellation, cells_close, close_offsets, friends)


class GroupKey(NamedTuple):
    """Identity of a sparse-square group node: (sparse square, label square)."""
    sparse_square: int
    label_square: int


Node = Union[int, GroupKey]  # old vertices are flat square ids


def node_sort_key(node: Node) -> tuple:
    if isinstance(node, GroupKey):
        return (1, node.sparse_square, node.label_square)
    return (0, node, 0)


# --------------------------------------------------------------------------
# density graph
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityGraph:
    """Dense squares, friendship edges with dense witness pairs.

    witness maps a canonical edge (lower flat id first) to the flat cell ids
    of its close dense pair, aligned with the edge orientation.
    """

    tessellation: Tessellation
    square_ids: np.ndarray
    adjacency: dict
    witness: dict

    def witness_cells(self, a: int, b: int) -> tuple[int, int]:
        """Witness pair oriented (cell in a, cell in b)."""
        if a < b:
            return self.witness[(a, b)]
        cb, ca = self.witness[(b, a)]
        return ca, cb


def _close_cell_pairs(t: Tessellation, dsc: int, dsr: int) -> list[tuple[int, int, int, int]]:
    """Cell pairs (lcR, lrR, lcS, lrS) close across square offset (dsc, dsr).

    Scan order is row-major over R's cells, then row-major over S's cells,
    so taking the first dense hit is deterministic. Closeness depends on the
    index offset only, hence the table is shared by all square pairs at the
    same offset.
    """
    k = t.cells_per_side
    out = []
    for lr_r in range(k):
        for lc_r in range(k):
            a = CellId(lc_r, lr_r)
            for lr_s in range(k):
                for lc_s in range(k):
                    b = CellId(dsc * k + lc_s, dsr * k + lr_s)
                    if cells_close(t, a, b):
                        out.append((lc_r, lr_r, lc_s, lr_s))
    return out


def build_density_graph(t: Tessellation, cls: CellClassification) -> DensityGraph:
    m = t.squares_per_side
    k = t.cells_per_side
    g = t.grid
    dense_squares = np.nonzero(cls.square_dense_count > 0)[0]
    dense_set = set(int(s) for s in dense_squares)
    pair_tables: dict[tuple[int, int], list] = {}
    adjacency: dict[int, list[int]] = {int(s): [] for s in dense_squares}
    witness: dict[tuple[int, int], tuple[int, int]] = {}

    for r_flat in dense_squares:
        r_flat = int(r_flat)
        r_row, r_col = divmod(r_flat, m)
        for sq in friends(t, SquareId(r_col, r_row)):
            s_flat = sq.row * m + sq.col
            if s_flat <= r_flat or s_flat not in dense_set:
                continue
            off = (sq.col - r_col, sq.row - r_row)
            table = pair_tables.get(off)
            if table is None:
                table = pair_tables[off] = _close_cell_pairs(t, off[0], off[1])
            for lc_r, lr_r, lc_s, lr_s in table:
                ca = (r_row * k + lr_r) * g + (r_col * k + lc_r)
                cb = (sq.row * k + lr_s) * g + (sq.col * k + lc_s)
                if cls.dense_mask[ca] and cls.dense_mask[cb]:
                    witness[(r_flat, s_flat)] = (ca, cb)
                    adjacency[r_flat].append(s_flat)
                    adjacency[s_flat].append(r_flat)
                    break

    for s, nbrs in adjacency.items():
        nbrs.sort()
        assert len(nbrs) <= MAX_FRIENDS
    return DensityGraph(tessellation=t, square_ids=dense_squares,
                        adjacency=adjacency, witness=witness)


# --------------------------------------------------------------------------
# hooks and the augmented graph
# --------------------------------------------------------------------------

def find_hook_cell(t: Tessellation, cls: CellClassification, cell: CellId) -> int:
    """Flat id of the lexicographically smallest dense cell close to cell.

    Raises ConstructionError(HOOK_MISSING) when no close dense cell exists;
    in the intended density regime every sparse cell has one.
    """
    g = t.grid
    for dc, dr in close_offsets(t):
        col = cell.col + dc
        row = cell.row + dr
        if 0 <= col < g and 0 <= row < g:
            flat = row * g + col
            if cls.dense_mask[flat]:
                return flat
    sq = t.square_of(cell)
    raise ConstructionError(
        FailureReason.HOOK_MISSING,
        {"detail": "no dense cell close to an occupied cell",
         "cell": [cell.col, cell.row],
         "square": [sq.col, sq.row],
         "occupancy": int(cls.counts[cell.row * g + cell.col])})


@dataclass(frozen=True)
class AugmentedGraph:
    """Density graph plus one leaf node per (sparse square, label square).

    groups maps each GroupKey to the flat ids of the sparse square's cells
    hooked into the label square, in row-major order; hooks maps each such
    cell to its hook cell. Group nodes attach only to their label vertex.
    """

    tessellation: Tessellation
    density: DensityGraph
    old_vertices: np.ndarray
    adjacency: dict
    groups: dict
    hooks: dict

    def nodes(self) -> list[Node]:
        out: list[Node] = [int(s) for s in self.old_vertices]
        out.extend(self.groups.keys())
        return out


def attach_sparse_groups(t: Tessellation, cls: CellClassification,
                         dg: DensityGraph) -> AugmentedGraph:
    m = t.squares_per_side
    g = t.grid
    k = t.cells_per_side
    adjacency: dict[Node, list[Node]] = {s: list(nbrs)
                                         for s, nbrs in dg.adjacency.items()}
    groups: dict[GroupKey, list[int]] = {}
    hooks: dict[int, int] = {}

    sparse_squares = np.nonzero((cls.square_vertex_count > 0)
                                & (cls.square_dense_count == 0))[0]
    for s_flat in sparse_squares:
        s_flat = int(s_flat)
        s_row, s_col = divmod(s_flat, m)
        labels_seen = set()
        for lr in range(k):
            base = (s_row * k + lr) * g + s_col * k
            for lc in range(k):
                flat_cell = base + lc
                if cls.counts[flat_cell] == 0:
                    continue
                cell = CellId(s_col * k + lc, s_row * k + lr)
                hook = find_hook_cell(t, cls, cell)
                hook_sq = (hook // g) // k * m + (hook % g) // k
                assert max(abs(hook_sq % m - s_col), abs(hook_sq // m - s_row)) <= 2, \
                    "hook square must be a friend of the sparse square"
                hooks[flat_cell] = hook
                key = GroupKey(s_flat, hook_sq)
                if key not in groups:
                    groups[key] = []
                    adjacency.setdefault(hook_sq, []).append(key)
                    adjacency[key] = [hook_sq]
                    labels_seen.add(hook_sq)
                groups[key].append(flat_cell)
        assert len(labels_seen) <= MAX_FRIENDS

    for node, nbrs in adjacency.items():
        nbrs.sort(key=node_sort_key)
        assert len(nbrs) <= MAX_FRIENDS
    return AugmentedGraph(tessellation=t, density=dg,
                          old_vertices=dg.square_ids,
                          adjacency=adjacency, groups=groups, hooks=hooks)


def is_augmented_connected(ag: AugmentedGraph) -> bool:
    nodes = ag.nodes()
    if not nodes:
        return False
    seen = {nodes[0]}
    queue = deque([nodes[0]])
    while queue:
        u = queue.popleft()
        for v in ag.adjacency.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(nodes)


# --------------------------------------------------------------------------
# spanning tree and euler order
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SpanningTree:
    root: Node
    parent: dict
    children: dict

    def size(self) -> int:
        return len(self.parent) + 1


def spanning_tree(ag: AugmentedGraph) -> SpanningTree:
    """BFS tree rooted at the smallest old vertex.

    Raises ConstructionError(DISCONNECTED) when the augmented graph does not
    reach every node (or has no old vertex at all).
    """
    total = len(ag.old_vertices) + len(ag.groups)
    if len(ag.old_vertices) == 0:
        raise ConstructionError(FailureReason.DISCONNECTED,
                                {"detail": "no dense square exists",
                                 "old_vertices": 0,
                                 "group_nodes": len(ag.groups)})
    root: Node = int(ag.old_vertices.min())
    parent: dict[Node, Node] = {}
    children: dict[Node, list[Node]] = {root: []}
    queue = deque([root])
    seen = {root}
    while queue:
        u = queue.popleft()
        for v in ag.adjacency.get(u, ()):
            if v not in seen:
                seen.add(v)
                parent[v] = u
                children[u].append(v)
                children[v] = []
                queue.append(v)
    if len(seen) != total:
        raise ConstructionError(
            FailureReason.DISCONNECTED,
            {"detail": "augmented graph splits",
             "reached": len(seen), "total": total})
    return SpanningTree(root=root, parent=parent, children=children)


def euler_traversal(tree: SpanningTree) -> list[Node]:
    """Nodes in depth-first euler order: each tree edge walked both ways.

    A node of degree d appears d times, the root d+1 times; the sequence has
    2(V-1)+1 entries and consecutive entries are tree neighbours.
    """
    seq: list[Node] = [tree.root]
    stack: list[tuple[Node, int]] = [(tree.root, 0)]
    while stack:
        node, idx = stack.pop()
        kids = tree.children[node]
        if idx < len(kids):
            stack.append((node, idx + 1))
            seq.append(kids[idx])
            stack.append((kids[idx], 0))
        elif stack:
            seq.append(stack[-1][0])
    assert len(seq) == 2 * (tree.size() - 1) + 1
    return seq


def write_edge_list(ag: AugmentedGraph, path: str) -> None:
    """Debug dump, one undirected edge per line in canonical node order."""
    m = ag.tessellation.squares_per_side

    def fmt(node: Node) -> str:
        if isinstance(node, GroupKey):
            sr, sc = divmod(node.sparse_square, m)
            lr, lc = divmod(node.label_square, m)
            return f"N:{sc},{sr}:{lc},{lr}"
        row, col = divmod(node, m)
        return f"S:{col},{row}"

    lines = []
    for u in sorted(ag.adjacency, key=node_sort_key):
        for v in ag.adjacency[u]:
            if node_sort_key(u) < node_sort_key(v):
                lines.append(f"{fmt(u)} {fmt(v)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))
