"""Minimum-cost one-to-one assignment on rectangular integer matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass(frozen=True)
class Assignment:
    pairs: tuple[tuple[int, int], ...]
    total_cost: int

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)


def solve_assignment(costs) -> Assignment:
    """Optimal injective pairing of size ``min(n, m)``.

    Among equally cheap assignments the lexicographically smallest
    row-sorted pair list is returned, so results are reproducible.
    Costs must be non-negative integers.
    """
    matrix = np.asarray(costs)
    if matrix.ndim != 2:
        if matrix.size == 0:
            matrix = matrix.reshape(0, 0)
        else:
            raise ValueError("cost matrix must be 2-D")
    if matrix.size and not np.issubdtype(matrix.dtype, np.integer):
        if not np.all(np.equal(np.mod(matrix, 1), 0)):
            raise ValueError("cost matrix must hold integers")
    matrix = matrix.astype(np.int64)
    if matrix.size and matrix.min() < 0:
        raise ValueError("negative costs are not supported")
    rows, cols = kernels.lsa_lexmin(matrix)
    pairs = tuple((int(r), int(c)) for r, c in zip(rows, cols))
    return Assignment(pairs=pairs, total_cost=int(sum(matrix[r, c] for r, c in pairs)))
