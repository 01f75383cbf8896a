"""Pure-Python kernels. Same algorithms and results as the compiled ``_kernels``."""

from __future__ import annotations

import numpy as np


def _hungarian(a: list[list[int]], k: int):
    """Shortest-augmenting-path Hungarian on a square integer matrix.

    Returns ``(u, v, p)`` with 1-based potentials and ``p[j]`` = row of column j.
    """
    inf = float("inf")
    u = [0] * (k + 1)
    v = [0] * (k + 1)
    p = [0] * (k + 1)
    way = [0] * (k + 1)
    for i in range(1, k + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (k + 1)
        used = [False] * (k + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = a[i0 - 1]
            ui0 = u[i0]
            delta = inf
            j1 = 0
            for j in range(1, k + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(k + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    return u, v, p


def _lexmin(a, k, u, v, p):
    """Move to the lexicographically smallest optimum inside the tight-edge graph."""
    tight = [[a[i][j] - u[i + 1] - v[j + 1] == 0 for j in range(k)] for i in range(k)]
    row_of_col = [p[j + 1] - 1 for j in range(k)]
    col_of_row = [0] * k
    for j, r in enumerate(row_of_col):
        col_of_row[r] = j
    fixed = [False] * k
    for i in range(k):
        freed = col_of_row[i]
        for j in range(k):
            if not tight[i][j]:
                continue
            if j == freed:
                break
            r = row_of_col[j]
            if fixed[r]:
                continue
            # alternating path from r back to the column i gives up
            via = [-1] * k
            queue = [r]
            head = 0
            found = False
            while head < len(queue) and not found:
                x = queue[head]
                head += 1
                tx = tight[x]
                for c in range(k):
                    if not tx[c] or c == j or via[c] != -1:
                        continue
                    if c == freed:
                        via[c] = x
                        found = True
                        break
                    owner = row_of_col[c]
                    if fixed[owner]:
                        continue
                    via[c] = x
                    queue.append(owner)
            if not found:
                continue
            c = freed
            while True:
                x = via[c]
                old = col_of_row[x]
                col_of_row[x] = c
                row_of_col[c] = x
                if x == r:
                    break
                c = old
            col_of_row[i] = j
            row_of_col[j] = i
            break
        fixed[i] = True
    return col_of_row


def lsa_lexmin(costs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Optimal rectangular assignment with lexicographic tie-break.

    Returns row and column index arrays of length ``min(n, m)``, sorted by row.
    """
    costs = np.asarray(costs, dtype=np.int64)
    n, m = costs.shape
    if n == 0 or m == 0:
        empty = np.zeros(0, dtype=np.intp)
        return empty, empty.copy()
    k = max(n, m)
    a = [[0] * k for _ in range(k)]
    for i in range(n):
        a[i][:m] = [int(x) for x in costs[i]]
    u, v, p = _hungarian(a, k)
    col_of_row = _lexmin(a, k, u, v, p)
    rows = [i for i in range(n) if col_of_row[i] < m]
    cols = [col_of_row[i] for i in rows]
    return np.asarray(rows, dtype=np.intp), np.asarray(cols, dtype=np.intp)


def hysteresis(scores: np.ndarray, onset: float, offset: float) -> np.ndarray:
    """Per-frame on/off state: switch on at ``>= onset``, off at ``< offset``."""
    out = np.zeros(len(scores), dtype=np.uint8)
    active = False
    for t, s in enumerate(scores.tolist()):
        if active:
            if s < offset:
                active = False
        elif s >= onset:
            active = True
        if active:
            out[t] = 1
    return out
