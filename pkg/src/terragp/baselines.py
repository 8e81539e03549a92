"""Comparison planners sharing the navigator's execution and accounting.

Four kinds: the proposed class-aware online planner, a shortest-Euclidean-
distance planner with no energy information, a distance-only local GP
planner (same online loop, class mask removed from the kernel), and the
clairvoyant optimal planner on ground truth.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .navigator import NavConfig, NavRun, _navigate, navigate
from .planner import CostMap, path_cost_on, plan
from .terrain import CellId, TerrainClassParams, TerrainGrid


class PlannerKind(Enum):
    PROPOSED = "proposed"
    SHORTEST_DISTANCE = "shortest"
    LOCAL_GP = "local"
    OPTIMAL = "optimal"


def run_proposed(
    grid: TerrainGrid,
    class_table: list[TerrainClassParams],
    config: NavConfig,
    start: CellId,
    goal: CellId,
) -> NavRun:
    return navigate(grid, class_table, config, start, goal)


def _single_plan_run(grid: TerrainGrid, costmap: CostMap, start: CellId, goal: CellId,
                     config: NavConfig, kind: str) -> NavRun:
    path = plan(costmap, start, goal)
    truth = CostMap.ground_truth(grid, config.connectivity, config.robot_weight)
    return NavRun(
        config=config,
        start=start,
        goal=goal,
        trajectory=list(path.cells),
        measurements=[],
        executed_energy=path_cost_on(truth, path),
        replan_count=0,
        reached=True,
        kind=kind,
        replan_offsets=[0],
        grid=grid,
        class_table=None,
        gp_grid=None,
        gp_class_table=None,
    )


def run_shortest_distance(
    grid: TerrainGrid,
    start: CellId,
    goal: CellId,
    config: NavConfig | None = None,
) -> NavRun:
    """Plan once on a unit-cost map (pure distance) and execute it.

    This planner has no energy information, so nothing it could observe
    would ever change its plan; it never replans.
    """
    config = config or NavConfig()
    unit = CostMap.from_grid(
        grid, np.ones(grid.n_cells), config.connectivity, config.cost_floor, config.robot_weight
    )
    return _single_plan_run(grid, unit, start, goal, config, PlannerKind.SHORTEST_DISTANCE.value)


def run_optimal(
    grid: TerrainGrid,
    start: CellId,
    goal: CellId,
    config: NavConfig | None = None,
) -> NavRun:
    """Single plan on the ground-truth map; executed energy is the plan cost."""
    config = config or NavConfig()
    truth = CostMap.ground_truth(grid, config.connectivity, config.robot_weight)
    return _single_plan_run(grid, truth, start, goal, config, PlannerKind.OPTIMAL.value)


def make_local_params(class_table: list[TerrainClassParams], prior_mean: float) -> TerrainClassParams:
    """Global distance-only hyperparameters: per-class means, given prior."""
    sf = float(np.mean([p.signal_std for p in class_table]))
    sd = float(np.mean([p.length_scale for p in class_table]))
    return TerrainClassParams(class_id=0, name="all-terrain", prior_mean=prior_mean, signal_std=sf, length_scale=sd)


def run_local_gp(
    grid: TerrainGrid,
    local_params: TerrainClassParams,
    config: NavConfig,
    start: CellId,
    goal: CellId,
) -> NavRun:
    """Same online loop with the class mask removed from the kernel.

    Every pair of locations gets the squared-exponential covariance, so
    the model is the navigate loop run over a single-class view of the
    grid.
    """
    if local_params.class_id != 0:
        raise ValueError("local planner expects a single class with id 0")
    flat_view = grid.with_classes(np.zeros(grid.n_cells, dtype=np.int32), class_count=1)
    return _navigate(
        grid,
        [local_params],
        config,
        start,
        goal,
        gp_grid=flat_view,
        gp_class_table=[local_params],
        kind=PlannerKind.LOCAL_GP.value,
    )


def run_planner(
    kind: PlannerKind,
    grid: TerrainGrid,
    class_table: list[TerrainClassParams],
    config: NavConfig,
    start: CellId,
    goal: CellId,
) -> NavRun:
    """Dispatch one planner kind with fair shared configuration."""
    if kind is PlannerKind.PROPOSED:
        return run_proposed(grid, class_table, config, start, goal)
    if kind is PlannerKind.SHORTEST_DISTANCE:
        return run_shortest_distance(grid, start, goal, config)
    if kind is PlannerKind.LOCAL_GP:
        local = make_local_params(class_table, prior_mean=config.initial_value())
        return run_local_gp(grid, local, config, start, goal)
    if kind is PlannerKind.OPTIMAL:
        return run_optimal(grid, start, goal, config)
    raise ValueError(f"unknown planner kind {kind!r}")
