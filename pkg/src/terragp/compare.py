"""Planner tournaments over families of generated environments.

Each seed produces one environment; every requested planner runs on it and
is scored as executed energy relative to the clairvoyant optimum. Failures
(unreachable goals, exhausted replan budgets) mark the row and the batch
continues. Rows come back sorted by (seed, planner) regardless of how many
workers ran, so reports are deterministic under TERRAGP_THREADS.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from statistics import mean, median

from .baselines import PlannerKind, run_planner
from .envgen import GenSpec, generate
from .errors import TerragpError
from .navigator import NavConfig, NavRun
from .terrain import CellId, TerrainGrid

DEFAULT_KINDS = (
    PlannerKind.PROPOSED,
    PlannerKind.SHORTEST_DISTANCE,
    PlannerKind.LOCAL_GP,
    PlannerKind.OPTIMAL,
)


@dataclass(frozen=True)
class ComparisonRow:
    seed: int
    planner: str
    start: str  # "row,col"
    goal: str
    executed_energy: float
    optimal_energy: float
    ratio_pct: float  # 100 * executed / optimal
    replans: int
    measurements: int
    reached: bool
    error: str = ""
    wall_time_s: float | None = None  # populated only when timings are requested

    def as_dict(self) -> dict:
        def num(x: float):
            return None if math.isnan(x) else x

        return {
            "seed": self.seed,
            "planner": self.planner,
            "start": self.start,
            "goal": self.goal,
            "executed_energy": num(self.executed_energy),
            "optimal_energy": num(self.optimal_energy),
            "ratio_pct": num(self.ratio_pct),
            "replans": self.replans,
            "measurements": self.measurements,
            "reached": self.reached,
            "error": self.error,
            "wall_time_s": self.wall_time_s,
        }


@dataclass
class ComparisonReport:
    rows: list[ComparisonRow] = field(default_factory=list)

    def aggregate(self) -> dict[str, dict[str, float]]:
        """Per-planner mean and median ratio over rows that finished."""
        by_planner: dict[str, list[float]] = {}
        for row in self.rows:
            if row.reached and not row.error and not math.isnan(row.ratio_pct):
                by_planner.setdefault(row.planner, []).append(row.ratio_pct)
        return {
            planner: {
                "mean_ratio_pct": mean(vals),
                "median_ratio_pct": median(vals),
                "count": float(len(vals)),
            }
            for planner, vals in sorted(by_planner.items())
        }


def thread_count() -> int:
    """Worker cap from TERRAGP_THREADS; defaults to the available cores."""
    raw = os.environ.get("TERRAGP_THREADS", "").strip()
    if not raw:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise TerragpError(f"TERRAGP_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


def _failure_rows(
    seed: int,
    start: CellId,
    goal: CellId,
    kinds: tuple[PlannerKind, ...],
    message: str,
) -> list[ComparisonRow]:
    nan = float("nan")
    s, g = f"{start.row},{start.col}", f"{goal.row},{goal.col}"
    return [
        ComparisonRow(seed, k.value, s, g, nan, nan, nan, 0, 0, False, message)
        for k in kinds
    ]


def rows_for_grid(
    grid: TerrainGrid,
    class_table,
    config: NavConfig,
    start: CellId,
    goal: CellId,
    kinds: tuple[PlannerKind, ...] = DEFAULT_KINDS,
    timings: bool = False,
) -> list[ComparisonRow]:
    """All requested planners on one environment, scored against Optimal."""
    seed = config.seed
    s, g = f"{start.row},{start.col}", f"{goal.row},{goal.col}"

    def timed(kind: PlannerKind):
        t0 = time.perf_counter()
        run = run_planner(kind, grid, class_table, config, start, goal)
        dt = time.perf_counter() - t0
        return run, (dt if timings else None)

    try:
        optimal_run, opt_wall = timed(PlannerKind.OPTIMAL)
    except TerragpError as exc:
        # without a reference optimum no ratio is defined; mark every row
        return _failure_rows(seed, start, goal, kinds, f"optimal failed: {exc}")
    opt = optimal_run.executed_energy

    rows = []
    for kind in kinds:
        if kind is PlannerKind.OPTIMAL:
            run, wall, err = optimal_run, opt_wall, ""
        else:
            try:
                run, wall = timed(kind)
                err = ""
            except TerragpError as exc:
                run, wall, err = getattr(exc, "run", None), None, str(exc)
        if run is None:
            rows.append(
                ComparisonRow(
                    seed, kind.value, s, g, float("nan"), opt, float("nan"),
                    0, 0, False, err,
                )
            )
            continue
        ratio = 100.0 * run.executed_energy / opt if opt > 0 else float("nan")
        rows.append(
            ComparisonRow(
                seed=seed,
                planner=kind.value,
                start=s,
                goal=g,
                executed_energy=run.executed_energy,
                optimal_energy=opt,
                ratio_pct=ratio,
                replans=run.replan_count,
                measurements=len(run.measurements),
                reached=run.reached,
                error=err,
                wall_time_s=wall,
            )
        )
    return rows


def default_start_goal(grid: TerrainGrid) -> tuple[CellId, CellId]:
    """Opposite corners, inset by 3 cells when the grid allows it."""
    inset = 3 if grid.width > 6 and grid.height > 6 else 0
    return grid.cell(inset, inset), grid.cell(grid.height - 1 - inset, grid.width - 1 - inset)


def compare_on_specs(
    specs: list[GenSpec],
    config: NavConfig,
    start_goal=None,
    kinds: tuple[PlannerKind, ...] = DEFAULT_KINDS,
    timings: bool = False,
) -> ComparisonReport:
    """Run the tournament on each spec's environment.

    start_goal: callable (grid -> (start, goal)); defaults to opposite
    corners inset by 3 cells. Each seed's NavConfig reuses the spec seed
    so measurement noise is reproducible per environment.
    """
    pick = start_goal or default_start_goal

    def one(spec: GenSpec) -> list[ComparisonRow]:
        grid, class_table = generate(spec)
        start, goal = pick(grid)
        cfg = replace(config, seed=spec.seed)
        try:
            return rows_for_grid(grid, class_table, cfg, start, goal, kinds, timings)
        except TerragpError as exc:
            return _failure_rows(spec.seed, start, goal, kinds, str(exc))

    workers = thread_count()
    if workers == 1 or len(specs) <= 1:
        chunks = [one(s) for s in specs]
    else:
        with ThreadPoolExecutor(max_workers=min(workers, len(specs))) as pool:
            chunks = list(pool.map(one, specs))
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r.seed, r.planner))
    return ComparisonReport(rows=rows)


def report_csv(report: ComparisonReport) -> str:
    header = (
        "seed,planner,start,goal,executed_energy,optimal_energy,"
        "ratio_pct,replans,measurements,reached,error"
    )
    lines = [header]
    for r in report.rows:
        lines.append(
            f'{r.seed},{r.planner},"{r.start}","{r.goal}",{repr(r.executed_energy)},'
            f"{repr(r.optimal_energy)},{repr(r.ratio_pct)},{r.replans},"
            f"{r.measurements},{str(r.reached).lower()},{r.error}"
        )
    return "\n".join(lines) + "\n"


def report_table(report: ComparisonReport) -> str:
    """Aligned text table: one line per seed, one column per planner."""
    planners: list[str] = []
    for row in report.rows:
        if row.planner not in planners:
            planners.append(row.planner)
    seeds = sorted({row.seed for row in report.rows})
    by_key = {(r.seed, r.planner): r for r in report.rows}

    def fmt(row: ComparisonRow | None) -> str:
        if row is None:
            return "-"
        if row.error or math.isnan(row.executed_energy):
            return "failed"
        mark = "" if row.reached else " [not reached]"
        return f"{row.executed_energy:.0f} ({row.ratio_pct:.1f}%){mark}"

    cells = [["seed"] + planners]
    for seed in seeds:
        cells.append([str(seed)] + [fmt(by_key.get((seed, p))) for p in planners])
    agg = report.aggregate()
    med = ["median"] + [
        f"{agg[p]['median_ratio_pct']:.1f}%" if p in agg else "-" for p in planners
    ]
    cells.append(med)
    widths = [max(len(r[i]) for r in cells) for i in range(len(cells[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
