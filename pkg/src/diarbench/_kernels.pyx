# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: integer Hungarian assignment and hysteresis thresholding.

Mirrors ``_kernels_py`` exactly; the test suite checks both backends agree.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t

cnp.import_array()

cdef int64_t INF = 1 << 62


cdef void _hungarian(int64_t[:, ::1] a, Py_ssize_t k, int64_t[::1] u,
                     int64_t[::1] v, Py_ssize_t[::1] p) noexcept:
    cdef Py_ssize_t i, j, j0, j1, i0
    cdef int64_t delta, cur
    cdef Py_ssize_t[::1] way = np.zeros(k + 1, dtype=np.intp)
    cdef int64_t[::1] minv = np.empty(k + 1, dtype=np.int64)
    cdef uint8_t[::1] used = np.empty(k + 1, dtype=np.uint8)
    for i in range(1, k + 1):
        p[0] = i
        j0 = 0
        minv[:] = INF
        used[:] = 0
        while True:
            used[j0] = 1
            i0 = p[j0]
            delta = INF
            j1 = 0
            for j in range(1, k + 1):
                if not used[j]:
                    cur = a[i0 - 1, j - 1] - u[i0] - v[j]
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


cdef void _lexmin(int64_t[:, ::1] a, Py_ssize_t k, int64_t[::1] u, int64_t[::1] v,
                  Py_ssize_t[::1] p, Py_ssize_t[::1] col_of_row) noexcept:
    cdef Py_ssize_t i, j, r, x, c, owner, head, tail, old, freed
    cdef bint found
    cdef uint8_t[:, ::1] tight = np.empty((k, k), dtype=np.uint8)
    cdef Py_ssize_t[::1] row_of_col = np.empty(k, dtype=np.intp)
    cdef Py_ssize_t[::1] via = np.empty(k, dtype=np.intp)
    cdef Py_ssize_t[::1] queue = np.empty(k, dtype=np.intp)
    cdef uint8_t[::1] fixed = np.zeros(k, dtype=np.uint8)
    for i in range(k):
        for j in range(k):
            tight[i, j] = (a[i, j] - u[i + 1] - v[j + 1]) == 0
    for j in range(k):
        row_of_col[j] = p[j + 1] - 1
        col_of_row[p[j + 1] - 1] = j
    for i in range(k):
        freed = col_of_row[i]
        for j in range(k):
            if not tight[i, j]:
                continue
            if j == freed:
                break
            r = row_of_col[j]
            if fixed[r]:
                continue
            via[:] = -1
            queue[0] = r
            head = 0
            tail = 1
            found = False
            while head < tail and not found:
                x = queue[head]
                head += 1
                for c in range(k):
                    if not tight[x, c] or c == j or via[c] != -1:
                        continue
                    if c == freed:
                        via[c] = x
                        found = True
                        break
                    owner = row_of_col[c]
                    if fixed[owner]:
                        continue
                    via[c] = x
                    queue[tail] = owner
                    tail += 1
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
        fixed[i] = 1


def lsa_lexmin(costs):
    """Optimal rectangular assignment with lexicographic tie-break."""
    cdef cnp.ndarray[int64_t, ndim=2] src = np.ascontiguousarray(costs, dtype=np.int64)
    cdef Py_ssize_t n = src.shape[0]
    cdef Py_ssize_t m = src.shape[1]
    cdef Py_ssize_t k, i
    if n == 0 or m == 0:
        empty = np.zeros(0, dtype=np.intp)
        return empty, empty.copy()
    k = max(n, m)
    padded = np.zeros((k, k), dtype=np.int64)
    padded[:n, :m] = src
    cdef int64_t[:, ::1] a = padded
    cdef int64_t[::1] u = np.zeros(k + 1, dtype=np.int64)
    cdef int64_t[::1] v = np.zeros(k + 1, dtype=np.int64)
    cdef Py_ssize_t[::1] p = np.zeros(k + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] col_of_row = np.empty(k, dtype=np.intp)
    _hungarian(a, k, u, v, p)
    _lexmin(a, k, u, v, p, col_of_row)
    rows = [i for i in range(n) if col_of_row[i] < m]
    cols = [col_of_row[i] for i in rows]
    return np.asarray(rows, dtype=np.intp), np.asarray(cols, dtype=np.intp)


def hysteresis(scores, double onset, double offset):
    """Per-frame on/off state: switch on at ``>= onset``, off at ``< offset``."""
    cdef double[::1] s = np.ascontiguousarray(scores, dtype=np.float64)
    cdef Py_ssize_t t, n = s.shape[0]
    out = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    cdef bint active = False
    for t in range(n):
        if active:
            if s[t] < offset:
                active = False
        elif s[t] >= onset:
            active = True
        if active:
            o[t] = 1
    return out
