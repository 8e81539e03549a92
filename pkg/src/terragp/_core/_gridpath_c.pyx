# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Dijkstra over the grid dual graph.

Hot kernel behind terragp.planner.plan. Kept in lockstep with the
pure-Python twin ``_gridpath_py``: same neighbor iteration order, same
heap ordering (distance then cell index), same floating-point
expressions, so both produce bit-identical results.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

cnp.import_array()


cdef inline void _heap_push(double* hd, int* hn, int* size, double d, int node) noexcept:
    cdef int i = size[0]
    cdef int parent
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        # lexicographic (dist, node) min-heap
        if hd[parent] < d or (hd[parent] == d and hn[parent] <= node):
            break
        hd[i] = hd[parent]
        hn[i] = hn[parent]
        i = parent
    hd[i] = d
    hn[i] = node


cdef inline void _heap_pop(double* hd, int* hn, int* size, double* out_d, int* out_n) noexcept:
    cdef double d
    cdef int node, i, child
    out_d[0] = hd[0]
    out_n[0] = hn[0]
    size[0] -= 1
    cdef int n = size[0]
    if n == 0:
        return
    d = hd[n]
    node = hn[n]
    i = 0
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and (hd[child + 1] < hd[child] or (hd[child + 1] == hd[child] and hn[child + 1] < hn[child])):
            child += 1
        if hd[child] < d or (hd[child] == d and hn[child] <= node):
            hd[i] = hd[child]
            hn[i] = hn[child]
            i = child
        else:
            break
    hd[i] = d
    hn[i] = node


def dijkstra_grid(double[::1] cost, int width, int height, double cell_size,
                  int connectivity, int start, int goal,
                  double[::1] grav, double cost_floor):
    """Shortest energy paths from ``start``; stops once ``goal`` is settled.

    Same contract as the pure twin: edge weight is mean endpoint cost
    times center distance plus the destination gravity term, clamped
    below at cost_floor * distance. Returns (dist, pred); ties on the
    frontier break toward the lower cell index.
    """
    cdef int n = width * height
    cdef double d_axis = cell_size
    cdef double d_diag = cell_size * sqrt(2.0)
    cdef double floor_axis = cost_floor * d_axis
    cdef double floor_diag = cost_floor * d_diag

    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist_arr = np.full(n, np.inf, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] pred_arr = np.full(n, -1, dtype=np.int32)
    cdef double[::1] dist = dist_arr
    cdef int[::1] pred = pred_arr

    # capacity: each improving relaxation pushes once, at most one per edge
    cdef int cap = 8 * n + 16
    cdef cnp.ndarray[cnp.float64_t, ndim=1] heap_d_arr = np.empty(cap, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] heap_n_arr = np.empty(cap, dtype=np.int32)
    cdef double* hd = <double*> heap_d_arr.data
    cdef int* hn = <int*> heap_n_arr.data
    cdef int heap_size = 0

    cdef int n_off
    cdef int off_r[8]
    cdef int off_c[8]
    cdef int off_diag[8]
    cdef int k
    if connectivity == 4:
        n_off = 4
        off_r[0] = -1; off_c[0] = 0; off_diag[0] = 0
        off_r[1] = 0; off_c[1] = -1; off_diag[1] = 0
        off_r[2] = 0; off_c[2] = 1; off_diag[2] = 0
        off_r[3] = 1; off_c[3] = 0; off_diag[3] = 0
    else:
        n_off = 8
        off_r[0] = -1; off_c[0] = -1; off_diag[0] = 1
        off_r[1] = -1; off_c[1] = 0; off_diag[1] = 0
        off_r[2] = -1; off_c[2] = 1; off_diag[2] = 1
        off_r[3] = 0; off_c[3] = -1; off_diag[3] = 0
        off_r[4] = 0; off_c[4] = 1; off_diag[4] = 0
        off_r[5] = 1; off_c[5] = -1; off_diag[5] = 1
        off_r[6] = 1; off_c[6] = 0; off_diag[6] = 0
        off_r[7] = 1; off_c[7] = 1; off_diag[7] = 1

    cdef double du, cu, d, floor_w, w, nd
    cdef int u, ur, uc, r, c, v

    dist[start] = 0.0
    _heap_push(hd, hn, &heap_size, 0.0, start)
    while heap_size > 0:
        _heap_pop(hd, hn, &heap_size, &du, &u)
        if du > dist[u]:
            continue
        if u == goal:
            break
        ur = u / width
        uc = u - ur * width
        cu = cost[u]
        for k in range(n_off):
            r = ur + off_r[k]
            c = uc + off_c[k]
            if r < 0 or r >= height or c < 0 or c >= width:
                continue
            v = r * width + c
            if off_diag[k]:
                d = d_diag
                floor_w = floor_diag
            else:
                d = d_axis
                floor_w = floor_axis
            w = 0.5 * (cu + cost[v]) * d + grav[v] * d
            if w < floor_w:
                w = floor_w
            nd = du + w
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                _heap_push(hd, hn, &heap_size, nd, v)
    return dist_arr, pred_arr
