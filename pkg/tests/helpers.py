"""Crafted-instance builders shared across test modules."""

import numpy as np


def cell_points(t, col, row, count):
    """count points strictly inside cell (col, row), on a small lattice."""
    side = int(np.ceil(np.sqrt(count)))
    i = np.arange(count)
    xs = (col + (i % side + 0.5) / side) * t.cell_side
    ys = (row + (i // side + 0.5) / side) * t.cell_side
    return np.column_stack([xs, ys])


def filled_grid(t, per_cell, skip=frozenset()):
    """Every cell of the grid holds per_cell points, except the skipped ones.

    skip is a set of global (col, row) cell ids left empty.
    """
    blocks = [cell_points(t, c, r, per_cell)
              for r in range(t.grid) for c in range(t.grid)
              if (c, r) not in skip]
    return np.vstack(blocks)


def square_cells(t, scol, srow):
    """All global (col, row) cell ids of one square."""
    k = t.cells_per_side
    return {(scol * k + lc, srow * k + lr)
            for lr in range(k) for lc in range(k)}
