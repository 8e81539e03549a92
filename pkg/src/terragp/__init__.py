"""terragp: terrain-class-aware energy mapping and online path planning.

A grid world is labelled with terrain classes; traversal cost per meter is
an unknown smooth field within each class. A Gaussian process with a
class-masked squared-exponential kernel turns sparse on-board measurements
into a cost map; a Dijkstra planner (compiled core with a pure-Python
fallback) plans on it; an online loop alternates short traversals,
measurement batches, and replans. Baseline planners and a tournament
harness quantify how close each strategy comes to the clairvoyant optimum.
"""

from ._core import HAVE_COMPILED, IMPLEMENTATION
from .baselines import (
    PlannerKind,
    make_local_params,
    run_local_gp,
    run_optimal,
    run_planner,
    run_proposed,
    run_shortest_distance,
)
from .compare import (
    ComparisonReport,
    ComparisonRow,
    compare_on_specs,
    report_csv,
    report_table,
    rows_for_grid,
)
from .envgen import (
    ENERGY_MIN,
    FIG2_ADMISSIBLE_FLOOR,
    FIG2_BANDS,
    FIG2_FAMILY_SEEDS,
    FIG2_HIGH_INIT,
    FIG2_MIDDLE_CLASS,
    FIG2_PRIORS,
    ClassSpec,
    GenSpec,
    benchmark_family_spec,
    default_class_specs,
    fig2_analog,
    fig2_family_spec,
    fig2_start_goal,
    generate,
)
from .errors import (
    EnvironmentFormatError,
    GpSolveError,
    ReplanBudgetError,
    TerragpError,
    UnreachableGoalError,
)
from .gp import GpEnergyModel, Measurement, Posterior
from .navigator import (
    NavConfig,
    NavRun,
    estimate_snapshot,
    initialize_costmap,
    navigate,
    read_trajectory_cells,
    write_trajectory_csv,
)
from .planner import CostMap, Path, edge_cost, path_cost_on, plan
from .plotting import render_field_svg, save_field_svg
from .terrain import (
    CellId,
    TerrainClassParams,
    TerrainGrid,
    gravity_correction,
    load_environment,
    save_environment,
)

__version__ = "0.1.0"

__all__ = [
    "ENERGY_MIN",
    "FIG2_ADMISSIBLE_FLOOR",
    "FIG2_BANDS",
    "FIG2_FAMILY_SEEDS",
    "FIG2_HIGH_INIT",
    "FIG2_MIDDLE_CLASS",
    "FIG2_PRIORS",
    "CellId",
    "ClassSpec",
    "ComparisonReport",
    "ComparisonRow",
    "CostMap",
    "EnvironmentFormatError",
    "GenSpec",
    "GpEnergyModel",
    "GpSolveError",
    "HAVE_COMPILED",
    "IMPLEMENTATION",
    "Measurement",
    "NavConfig",
    "NavRun",
    "Path",
    "PlannerKind",
    "Posterior",
    "ReplanBudgetError",
    "TerragpError",
    "TerrainClassParams",
    "TerrainGrid",
    "UnreachableGoalError",
    "benchmark_family_spec",
    "compare_on_specs",
    "default_class_specs",
    "edge_cost",
    "estimate_snapshot",
    "fig2_analog",
    "fig2_family_spec",
    "fig2_start_goal",
    "generate",
    "gravity_correction",
    "initialize_costmap",
    "load_environment",
    "make_local_params",
    "navigate",
    "path_cost_on",
    "plan",
    "read_trajectory_cells",
    "render_field_svg",
    "report_csv",
    "report_table",
    "rows_for_grid",
    "run_local_gp",
    "run_optimal",
    "run_planner",
    "run_proposed",
    "run_shortest_distance",
    "save_environment",
    "save_field_svg",
    "write_trajectory_csv",
]
