"""Gridded environment model: terrain classes, ground-truth energy, slope.

A :class:`TerrainGrid` is immutable after construction (arrays are frozen
via the writeable flag) and is safe to share across threads. All per-cell
arrays are flat, row-major, origin at the top-left; that ordering is the
canonical one for serialization and for every deterministic tie-break in
the package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import EnvironmentFormatError

SQRT2 = math.sqrt(2.0)

# (drow, dcol, diagonal) in ascending neighbor-index order on a row-major grid
OFFSETS_4 = ((-1, 0, False), (0, -1, False), (0, 1, False), (1, 0, False))
OFFSETS_8 = (
    (-1, -1, True),
    (-1, 0, False),
    (-1, 1, True),
    (0, -1, False),
    (0, 1, False),
    (1, -1, True),
    (1, 0, False),
    (1, 1, True),
)


def offsets_for(connectivity: int):
    if connectivity == 4:
        return OFFSETS_4
    if connectivity == 8:
        return OFFSETS_8
    raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")


class CellId(NamedTuple):
    """A grid cell: flat row-major index plus its (row, col) coordinates."""

    index: int
    row: int
    col: int


@dataclass(frozen=True)
class TerrainClassParams:
    """Per-class prior mean and squared-exponential kernel hyperparameters."""

    class_id: int
    name: str
    prior_mean: float  # J/m
    signal_std: float  # J/m
    length_scale: float  # m

    def __post_init__(self):
        if self.prior_mean <= 0:
            raise ValueError(f"class {self.class_id}: prior_mean must be > 0")
        if self.signal_std < 0:
            raise ValueError(f"class {self.class_id}: signal_std must be >= 0")
        if self.length_scale <= 0:
            raise ValueError(f"class {self.class_id}: length_scale must be > 0")


@dataclass(frozen=True)
class TerrainGrid:
    """Rectangular cell grid with terrain classes and ground-truth energy.

    ``class_of`` holds ids in ``0..class_count-1``; ``energy_true`` is the
    surface-only unit-distance cost (J/m); ``slope`` is an optional per-cell
    inclination angle in radians (absent means flat ground).
    """

    width: int
    height: int
    cell_size: float
    class_count: int
    class_of: np.ndarray
    energy_true: np.ndarray
    slope: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "class_of", np.ascontiguousarray(self.class_of, dtype=np.int32))
        object.__setattr__(self, "energy_true", np.ascontiguousarray(self.energy_true, dtype=np.float64))
        if self.slope is not None:
            object.__setattr__(self, "slope", np.ascontiguousarray(self.slope, dtype=np.float64))
        self.validate()
        self.class_of.flags.writeable = False
        self.energy_true.flags.writeable = False
        if self.slope is not None:
            self.slope.flags.writeable = False

    # -- construction / validation -------------------------------------

    def validate(self):
        if self.width < 1 or self.height < 1:
            raise EnvironmentFormatError("grid dimensions must be positive")
        if self.cell_size <= 0:
            raise EnvironmentFormatError("cell_size must be > 0")
        if self.class_count < 1:
            raise EnvironmentFormatError("class_count must be >= 1")
        n = self.width * self.height
        for name, arr in (("class_grid", self.class_of), ("energy_grid", self.energy_true)):
            if arr.shape != (n,):
                raise EnvironmentFormatError(f"{name} must have {n} entries, got {arr.shape[0]}")
        if self.slope is not None and self.slope.shape != (n,):
            raise EnvironmentFormatError(f"slope_grid must have {n} entries, got {self.slope.shape[0]}")
        bad = np.nonzero((self.class_of < 0) | (self.class_of >= self.class_count))[0]
        if bad.size:
            i = int(bad[0])
            raise EnvironmentFormatError(
                f"cell {i}: class id {int(self.class_of[i])} out of range for {self.class_count} classes"
            )
        bad = np.nonzero(~(np.isfinite(self.energy_true) & (self.energy_true > 0)))[0]
        if bad.size:
            i = int(bad[0])
            raise EnvironmentFormatError(f"cell {i}: energy {self.energy_true[i]!r} is not strictly positive and finite")
        if self.slope is not None and not np.all(np.isfinite(self.slope)):
            i = int(np.nonzero(~np.isfinite(self.slope))[0][0])
            raise EnvironmentFormatError(f"cell {i}: slope {self.slope[i]!r} is not finite")

    # -- cell addressing -------------------------------------------------

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width

    def cell(self, row: int, col: int) -> CellId:
        if not self.in_bounds(row, col):
            raise ValueError(f"cell ({row}, {col}) out of bounds for {self.height}x{self.width} grid")
        return CellId(row * self.width + col, row, col)

    def cell_at(self, index: int) -> CellId:
        if not 0 <= index < self.n_cells:
            raise ValueError(f"cell index {index} out of bounds for {self.height}x{self.width} grid")
        return CellId(index, index // self.width, index % self.width)

    def center(self, cell: CellId) -> tuple[float, float]:
        """Center of a cell in meters, x along columns and y along rows."""
        return ((cell.col + 0.5) * self.cell_size, (cell.row + 0.5) * self.cell_size)

    def centers(self, indices: np.ndarray) -> np.ndarray:
        """(n, 2) array of cell-center coordinates for flat indices."""
        idx = np.asarray(indices, dtype=np.int64)
        out = np.empty((idx.shape[0], 2), dtype=np.float64)
        out[:, 0] = (idx % self.width + 0.5) * self.cell_size
        out[:, 1] = (idx // self.width + 0.5) * self.cell_size
        return out

    # -- topology ----------------------------------------------------------

    def neighbors(self, cell: CellId, connectivity: int = 8) -> list[tuple[CellId, float]]:
        """In-bounds adjacent cells with center distances, ascending by index."""
        if not self.in_bounds(cell.row, cell.col):
            raise ValueError(f"cell {cell} out of bounds")
        out = []
        for dr, dc, diag in offsets_for(connectivity):
            r, c = cell.row + dr, cell.col + dc
            if self.in_bounds(r, c):
                dist = self.cell_size * SQRT2 if diag else self.cell_size
                out.append((CellId(r * self.width + c, r, c), dist))
        return out

    # -- derived views ------------------------------------------------------

    def with_classes(self, class_of: np.ndarray, class_count: int) -> "TerrainGrid":
        """Same geometry and ground truth under a different class labeling."""
        return TerrainGrid(
            width=self.width,
            height=self.height,
            cell_size=self.cell_size,
            class_count=class_count,
            class_of=np.asarray(class_of, dtype=np.int32).copy(),
            energy_true=self.energy_true,
            slope=self.slope,
        )

    def grav_per_meter(self, robot_weight: float) -> np.ndarray | None:
        """Per-cell gravity term mg*sin(theta) in J/m, or None when flat."""
        if self.slope is None:
            return None
        return robot_weight * np.sin(self.slope)


def gravity_correction(robot_weight: float, slope_angle: float, distance: float) -> float:
    """Extra energy mg*sin(theta)*l to climb a slope over a distance.

    Negative for downhill angles.
    """
    if distance < 0:
        raise ValueError("distance must be >= 0")
    return robot_weight * math.sin(slope_angle) * distance


# -- environment file I/O ------------------------------------------------


def save_environment(path: str | Path, grid: TerrainGrid, classes: list[TerrainClassParams]) -> None:
    """Write the environment JSON with full round-trip float precision."""
    doc = {
        "width": grid.width,
        "height": grid.height,
        "cell_size": grid.cell_size,
        "classes": [
            {
                "id": p.class_id,
                "name": p.name,
                "prior_mean": p.prior_mean,
                "sigma_f": p.signal_std,
                "sigma_d": p.length_scale,
            }
            for p in sorted(classes, key=lambda p: p.class_id)
        ],
        "class_grid": [int(v) for v in grid.class_of],
        "energy_grid": [float(v) for v in grid.energy_true],
    }
    if grid.slope is not None:
        doc["slope_grid"] = [float(v) for v in grid.slope]
    Path(path).write_text(json.dumps(doc) + "\n", encoding="utf-8")


def load_environment(path: str | Path) -> tuple[TerrainGrid, list[TerrainClassParams]]:
    """Load and validate an environment file; errors name the offending cell."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise EnvironmentFormatError(f"cannot read environment file {path}: {exc}") from exc
    for key in ("width", "height", "cell_size", "classes", "class_grid", "energy_grid"):
        if key not in doc:
            raise EnvironmentFormatError(f"environment file missing required key {key!r}")
    try:
        classes = [
            TerrainClassParams(
                class_id=int(c["id"]),
                name=str(c.get("name", f"class-{c['id']}")),
                prior_mean=float(c["prior_mean"]),
                signal_std=float(c["sigma_f"]),
                length_scale=float(c["sigma_d"]),
            )
            for c in doc["classes"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise EnvironmentFormatError(f"bad class table: {exc}") from exc
    classes.sort(key=lambda p: p.class_id)
    ids = [p.class_id for p in classes]
    if ids != list(range(len(classes))):
        raise EnvironmentFormatError(f"class ids must be exactly 0..K-1, got {ids}")
    try:
        grid = TerrainGrid(
            width=int(doc["width"]),
            height=int(doc["height"]),
            cell_size=float(doc["cell_size"]),
            class_count=len(classes),
            class_of=np.asarray(doc["class_grid"], dtype=np.int32),
            energy_true=np.asarray(doc["energy_grid"], dtype=np.float64),
            slope=np.asarray(doc["slope_grid"], dtype=np.float64) if "slope_grid" in doc else None,
        )
    except (TypeError, ValueError) as exc:
        raise EnvironmentFormatError(f"bad grid arrays: {exc}") from exc
    return grid, classes
