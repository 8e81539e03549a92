"""Pure-Python Dijkstra over the grid dual graph.

Fallback twin of ``_gridpath_c.pyx``. The two are kept in lockstep: same
neighbor iteration order, same heap ordering (distance then cell index),
same floating-point expressions, so distances, predecessors, and therefore
extracted paths are bit-identical between implementations.
"""

import heapq
import math

import numpy as np

_SQRT2 = math.sqrt(2.0)

# (drow, dcol, diagonal) in ascending neighbor-index order
_OFF_4 = ((-1, 0, 0), (0, -1, 0), (0, 1, 0), (1, 0, 0))
_OFF_8 = (
    (-1, -1, 1),
    (-1, 0, 0),
    (-1, 1, 1),
    (0, -1, 0),
    (0, 1, 0),
    (1, -1, 1),
    (1, 0, 0),
    (1, 1, 1),
)


def dijkstra_grid(cost, width, height, cell_size, connectivity, start, goal, grav, cost_floor):
    """Shortest energy paths from ``start``; stops once ``goal`` is settled.

    cost: per-cell unit-distance energy (J/m), flat row-major float64.
    grav: per-cell gravity term (J/m) added on edges entering the cell.
    Edge weight is mean endpoint cost times center distance plus the
    destination gravity term, clamped below at cost_floor * distance.

    Returns (dist, pred) arrays; pred is -1 where unset. Ties on the
    frontier break toward the lower cell index.
    """
    n = width * height
    offsets = _OFF_4 if connectivity == 4 else _OFF_8
    d_axis = cell_size
    d_diag = cell_size * _SQRT2
    floor_axis = cost_floor * d_axis
    floor_diag = cost_floor * d_diag

    dist = np.full(n, np.inf, dtype=np.float64)
    pred = np.full(n, -1, dtype=np.int32)
    dist[start] = 0.0
    heap = [(0.0, start)]
    while heap:
        du, u = heapq.heappop(heap)
        if du > dist[u]:
            continue
        if u == goal:
            break
        ur, uc = divmod(u, width)
        cu = cost[u]
        for dr, dc, diag in offsets:
            r = ur + dr
            c = uc + dc
            if r < 0 or r >= height or c < 0 or c >= width:
                continue
            v = r * width + c
            if diag:
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
                heapq.heappush(heap, (nd, v))
    return dist, pred
