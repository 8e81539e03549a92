"""Energy cost maps over the grid dual graph and minimum-energy paths.

The dual graph has a vertex per cell and edges between adjacent cells; an
edge costs the mean of the endpoint unit-distance energies times the
center distance, plus the destination cell's gravity term when the map
carries slope information. Planning is Dijkstra with deterministic
tie-breaking (lower cell index wins among equal-cost frontier entries),
dispatched to the compiled kernel when available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._core import dijkstra_grid
from .errors import UnreachableGoalError
from .terrain import SQRT2, CellId, TerrainGrid, offsets_for

DEFAULT_COST_FLOOR = 1e-3


@dataclass(frozen=True)
class CostMap:
    """Per-cell estimated unit-distance energy used as planner input.

    Values are clamped below at ``cost_floor`` on construction: posterior
    means can dip to zero or below, which would break shortest-path
    semantics. ``grav`` optionally holds the per-cell mg*sin(theta) term
    (J/m) charged on edges entering each cell.
    """

    values: np.ndarray
    width: int
    height: int
    cell_size: float
    connectivity: int = 8
    cost_floor: float = DEFAULT_COST_FLOOR
    grav: np.ndarray | None = None

    def __post_init__(self):
        if self.cost_floor <= 0:
            raise ValueError("cost_floor must be > 0")
        offsets_for(self.connectivity)
        vals = np.maximum(np.asarray(self.values, dtype=np.float64), self.cost_floor)
        if vals.shape != (self.width * self.height,):
            raise ValueError("values must have width*height entries")
        object.__setattr__(self, "values", vals)
        if self.grav is not None:
            g = np.ascontiguousarray(self.grav, dtype=np.float64)
            if g.shape != vals.shape:
                raise ValueError("grav must have width*height entries")
            object.__setattr__(self, "grav", g)

    @classmethod
    def from_grid(cls, grid: TerrainGrid, values: np.ndarray, connectivity: int = 8,
                  cost_floor: float = DEFAULT_COST_FLOOR, robot_weight: float = 0.0) -> "CostMap":
        return cls(
            values=values,
            width=grid.width,
            height=grid.height,
            cell_size=grid.cell_size,
            connectivity=connectivity,
            cost_floor=cost_floor,
            grav=grid.grav_per_meter(robot_weight),
        )

    @classmethod
    def ground_truth(cls, grid: TerrainGrid, connectivity: int = 8, robot_weight: float = 0.0) -> "CostMap":
        """The true-cost map; floor chosen so clamping never alters truth."""
        floor = min(DEFAULT_COST_FLOOR, float(grid.energy_true.min()))
        return cls.from_grid(grid, grid.energy_true, connectivity, floor, robot_weight)

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    def _grav_or_zeros(self) -> np.ndarray:
        if self.grav is not None:
            return self.grav
        return np.zeros(self.n_cells, dtype=np.float64)

    def edge_weight(self, u: CellId, v: CellId) -> float:
        """Cost of the directed edge u -> v; raises if not adjacent."""
        dr = abs(u.row - v.row)
        dc = abs(u.col - v.col)
        diag = dr == 1 and dc == 1
        if not (diag and self.connectivity == 8) and not (dr + dc == 1):
            raise ValueError(f"cells {u.index} and {v.index} are not adjacent under connectivity {self.connectivity}")
        d = self.cell_size * SQRT2 if diag else self.cell_size
        g = float(self.grav[v.index]) if self.grav is not None else 0.0
        w = 0.5 * (float(self.values[u.index]) + float(self.values[v.index])) * d + g * d
        floor_w = self.cost_floor * d
        return w if w >= floor_w else floor_w


@dataclass(frozen=True)
class Path:
    """Ordered cells from start to goal with the planning cost."""

    cells: list[CellId]
    total_cost: float


def edge_cost(e1: float, e2: float, distance: float) -> float:
    """Energy for one edge: arithmetic-mean cost times center distance."""
    if e1 <= 0 or e2 <= 0:
        raise ValueError("unit-distance energies must be > 0")
    if distance <= 0:
        raise ValueError("distance must be > 0")
    return 0.5 * (e1 + e2) * distance


def plan(costmap: CostMap, start: CellId, goal: CellId) -> Path:
    """Minimum-total-cost path under the cost map.

    Deterministic across platforms and across the compiled/pure kernels.
    start == goal yields the single-cell path with cost 0.
    """
    n = costmap.n_cells
    for cell in (start, goal):
        if not 0 <= cell.index < n:
            raise ValueError(f"cell {cell} out of bounds")
    if start.index == goal.index:
        return Path([start], 0.0)
    dist, pred = dijkstra_grid(
        costmap.values,
        costmap.width,
        costmap.height,
        costmap.cell_size,
        costmap.connectivity,
        start.index,
        goal.index,
        costmap._grav_or_zeros(),
        costmap.cost_floor,
    )
    if not math.isfinite(dist[goal.index]):
        raise UnreachableGoalError(f"no path from cell {start.index} to cell {goal.index}")
    cells = []
    i = goal.index
    w = costmap.width
    while i != -1:
        cells.append(CellId(i, i // w, i % w))
        i = int(pred[i])
    cells.reverse()
    return Path(cells, float(dist[goal.index]))


def path_cost_on(costmap: CostMap, path: Path | list[CellId]) -> float:
    """Price a path's edges on the given map, in traversal order.

    Used to charge an executed trajectory against ground truth rather
    than the estimate it was planned with.
    """
    cells = path.cells if isinstance(path, Path) else path
    total = 0.0
    for u, v in zip(cells, cells[1:]):
        total += costmap.edge_weight(u, v)
    return total
