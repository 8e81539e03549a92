"""Online navigation loop: plan, execute m new cells, measure, update, replan.

Each episode plans on the current per-cell estimate (posterior mean for
cells whose class has measurements, the initialization value otherwise),
follows the path until ``m`` previously unmeasured cells have been
measured or the goal is reached, folds the new batch into the GP, and
replans. Unmeasured classes keep their initialization value so that an
admissible (never-overestimating) initialization induces exploration
exactly when it looks profitable.

Episodes are deterministic given (environment, config): measurement noise
comes from a Philox counter-based generator seeded from the config, and
every tie-break downstream is index-based.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Literal

import numpy as np

from .errors import ReplanBudgetError, TerragpError
from .gp import GpEnergyModel, Measurement
from .planner import DEFAULT_COST_FLOOR, CostMap, plan
from .terrain import CellId, TerrainClassParams, TerrainGrid


@dataclass(frozen=True)
class NavConfig:
    """Knobs for one navigation episode."""

    m: int = 10
    init_mode: Literal["admissible", "fixed"] = "admissible"
    admissible_floor: float = 40.0
    init_value: float | None = None  # required for init_mode="fixed"
    measurement_noise_std: float = 0.0
    connectivity: int = 8
    max_replans: int | None = None  # default 4 * n_cells / m
    cost_floor: float = DEFAULT_COST_FLOOR
    robot_weight: float = 98.0  # N; only matters on sloped grids
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.init_mode not in ("admissible", "fixed"):
            raise ValueError(f"unknown init_mode {self.init_mode!r}")
        if self.init_mode == "fixed" and (self.init_value is None or self.init_value <= 0):
            raise ValueError("fixed init_mode requires a positive init_value")
        if self.admissible_floor <= 0:
            raise ValueError("admissible_floor must be > 0")
        if self.measurement_noise_std < 0:
            raise ValueError("measurement_noise_std must be >= 0")
        if self.max_replans is not None and self.max_replans < 1:
            raise ValueError("max_replans must be >= 1")
        if self.cost_floor <= 0:
            raise ValueError("cost_floor must be > 0")
        # the floor must never overestimate: keep it under the initialization
        if self.cost_floor > self.initial_value():
            raise ValueError("cost_floor must not exceed the initialization value")

    def initial_value(self) -> float:
        return self.admissible_floor if self.init_mode == "admissible" else float(self.init_value)

    def replan_budget(self, n_cells: int) -> int:
        if self.max_replans is not None:
            return self.max_replans
        return max(1, 4 * n_cells // self.m)


@dataclass
class NavRun:
    """Record of one episode: what was driven, measured, and spent."""

    config: NavConfig
    start: CellId
    goal: CellId
    trajectory: list[CellId]
    measurements: list[Measurement]
    executed_energy: float
    replan_count: int
    reached: bool
    kind: str = "proposed"
    # measurement count visible to the planner at each plan k = 0..replan_count
    replan_offsets: list[int] = field(default_factory=lambda: [0])
    grid: TerrainGrid | None = None
    class_table: list[TerrainClassParams] | None = None
    gp_grid: TerrainGrid | None = None
    gp_class_table: list[TerrainClassParams] | None = None

    def summary(self) -> dict:
        return {
            "planner": self.kind,
            "executed_energy": self.executed_energy,
            "reached": self.reached,
            "replans": self.replan_count,
            "measurements": len(self.measurements),
            "trajectory_cells": len(self.trajectory),
            "seed": self.config.seed,
        }


def initialize_costmap(grid: TerrainGrid, class_table: list[TerrainClassParams], config: NavConfig) -> CostMap:
    """Uniform initial cost map: the admissible floor or the fixed value."""
    values = np.full(grid.n_cells, config.initial_value(), dtype=np.float64)
    return CostMap.from_grid(grid, values, config.connectivity, config.cost_floor, config.robot_weight)


def _build_estimate(
    model: GpEnergyModel,
    gp_grid: TerrainGrid,
    init_value: float,
    cost_floor: float,
    with_variance: bool = False,
):
    """Planner belief: posterior mean where the class is measured, init elsewhere."""
    values = np.full(gp_grid.n_cells, init_value, dtype=np.float64)
    variance = None
    if with_variance:
        variance = np.empty(gp_grid.n_cells, dtype=np.float64)
        for p in model.class_table:
            variance[gp_grid.class_of == p.class_id] = p.signal_std**2
    measured = model.measured_classes()
    if measured:
        mask = np.isin(gp_grid.class_of, sorted(measured))
        qidx = np.nonzero(mask)[0].astype(np.int64)
        mean, var, _ = model._posterior_blocks(qidx, gp_grid)
        values[qidx] = mean
        if with_variance:
            variance[qidx] = var
    np.maximum(values, cost_floor, out=values)
    return values, variance


def navigate(
    grid: TerrainGrid,
    class_table: list[TerrainClassParams],
    config: NavConfig,
    start: CellId,
    goal: CellId,
) -> NavRun:
    """Run the online class-aware episode from start to goal."""
    return _navigate(grid, class_table, config, start, goal, grid, class_table, "proposed")


def _navigate(
    grid: TerrainGrid,
    class_table: list[TerrainClassParams],
    config: NavConfig,
    start: CellId,
    goal: CellId,
    gp_grid: TerrainGrid,
    gp_class_table: list[TerrainClassParams],
    kind: str,
) -> NavRun:
    """Shared episode loop; gp_grid/gp_class_table define the model's class view."""
    for cell in (start, goal):
        if not grid.in_bounds(cell.row, cell.col):
            raise ValueError(f"cell {cell} out of bounds")
    truth = CostMap.ground_truth(grid, config.connectivity, config.robot_weight)
    grav = grid.grav_per_meter(config.robot_weight)
    model = GpEnergyModel(gp_class_table, noise_std=config.measurement_noise_std)
    rng = np.random.Generator(np.random.Philox(config.seed))

    run = NavRun(
        config=config,
        start=start,
        goal=goal,
        trajectory=[start],
        measurements=[],
        executed_energy=0.0,
        replan_count=0,
        reached=start.index == goal.index,
        kind=kind,
        replan_offsets=[],
        grid=grid,
        class_table=list(class_table),
        gp_grid=gp_grid,
        gp_class_table=list(gp_class_table),
    )
    if run.reached:
        run.replan_offsets = [0]
        return run

    measured_cells: set[int] = set()
    budget = config.replan_budget(grid.n_cells)
    cur = start
    plans = 0
    while True:
        if plans >= budget:
            run.replan_count = plans - 1
            raise ReplanBudgetError(
                f"goal not reached within {budget} replans (m={config.m})", run=run
            )
        run.replan_offsets.append(len(run.measurements))
        values, _ = _build_estimate(model, gp_grid, config.initial_value(), config.cost_floor)
        costmap = CostMap.from_grid(grid, values, config.connectivity, config.cost_floor, config.robot_weight)
        path = plan(costmap, cur, goal)
        plans += 1

        batch = []
        for nxt in path.cells[1:]:
            run.executed_energy += truth.edge_weight(cur, nxt)
            run.trajectory.append(nxt)
            cur = nxt
            if nxt.index not in measured_cells:
                # the raw onboard reading includes the slope term; store the
                # surface-only cost and let planning re-add gravity per edge
                g = float(grav[nxt.index]) if grav is not None else 0.0
                raw = float(grid.energy_true[nxt.index]) + g + config.measurement_noise_std * float(rng.standard_normal())
                batch.append(
                    Measurement(
                        cell=nxt,
                        position=grid.center(nxt),
                        energy=raw - g,
                        class_id=int(gp_grid.class_of[nxt.index]),
                    )
                )
                measured_cells.add(nxt.index)
            if cur.index == goal.index:
                break
            if len(batch) == config.m:
                break
        if batch:
            model.add_measurements(batch)
            run.measurements.extend(batch)
        if cur.index == goal.index:
            run.reached = True
            run.replan_count = plans - 1
            return run
        if not batch:
            # cannot happen: every planned path ends at the goal, so a
            # segment without new measurements walks all the way there
            raise TerragpError("planner made no progress")


def estimate_snapshot(run: NavRun, k: int) -> tuple[CostMap, np.ndarray]:
    """Rebuild the exact cost map (and variance) the planner saw at replan k."""
    if run.gp_grid is None or run.gp_class_table is None or run.grid is None:
        raise ValueError("run does not carry its environment; cannot rebuild snapshots")
    if not 0 <= k < len(run.replan_offsets):
        raise ValueError(f"replan index {k} out of range 0..{len(run.replan_offsets) - 1}")
    model = GpEnergyModel(run.gp_class_table, noise_std=run.config.measurement_noise_std)
    prefix = run.measurements[: run.replan_offsets[k]]
    if prefix:
        model.add_measurements(prefix)
    values, variance = _build_estimate(
        model, run.gp_grid, run.config.initial_value(), run.config.cost_floor, with_variance=True
    )
    costmap = CostMap.from_grid(
        run.grid, values, run.config.connectivity, run.config.cost_floor, run.config.robot_weight
    )
    return costmap, variance


TRAJECTORY_FIELDS = ("step", "cell_index", "row", "col", "class_id", "measured_e", "cumulative_energy")


def write_trajectory_csv(run: NavRun, path: str | FsPath) -> None:
    """One row per traversed cell; measured_e is set on the measuring step."""
    if run.grid is None:
        raise ValueError("run does not carry its grid; cannot export classes")
    truth = CostMap.ground_truth(run.grid, run.config.connectivity, run.config.robot_weight)
    # measurements were appended at first entry, so they align with the
    # first traversal step of their cell
    measured_at: dict[int, tuple[int, float]] = {}
    order = iter(run.measurements)
    pending = next(order, None)
    for step, cell in enumerate(run.trajectory):
        if pending is not None and cell.index == pending.cell.index and cell.index not in measured_at:
            measured_at[cell.index] = (step, pending.energy)
            pending = next(order, None)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(TRAJECTORY_FIELDS))
        cumulative = 0.0
        prev = None
        for step, cell in enumerate(run.trajectory):
            if prev is not None:
                cumulative += truth.edge_weight(prev, cell)
            prev = cell
            hit = measured_at.get(cell.index)
            measured = repr(hit[1]) if hit is not None and hit[0] == step else ""
            writer.writerow(
                [step, cell.index, cell.row, cell.col, int(run.grid.class_of[cell.index]), measured, repr(cumulative)]
            )


def read_trajectory_cells(path: str | FsPath, grid: TerrainGrid) -> list[CellId]:
    """Parse a trajectory CSV back into cells, validated against a grid."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(TRAJECTORY_FIELDS):
            raise TerragpError(f"{path}: not a trajectory file (unexpected header)")
        cells = []
        for line in reader:
            try:
                index, row, col = int(line[1]), int(line[2]), int(line[3])
            except (ValueError, IndexError) as exc:
                raise TerragpError(f"{path}: malformed trajectory row {line!r}") from exc
            if not grid.in_bounds(row, col) or index != row * grid.width + col:
                raise TerragpError(
                    f"{path}: cell ({row},{col}) does not fit a "
                    f"{grid.height}x{grid.width} environment"
                )
            cells.append(grid.cell(row, col))
    return cells
