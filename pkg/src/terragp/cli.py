"""Command-line interface.

Subcommands: `gen` (write an environment file), `run` (one navigation
episode -> trajectory CSV + summary JSON), `compare` (planner tournament ->
report JSON/CSV + text table), `plot` (SVG rendering of truth or of an
estimate snapshot, with optional trajectory overlays).

Every command is deterministic for fixed flags: randomness is seeded, rows
are sorted, floats are repr()-formatted, and wall-clock timings are only
emitted behind --timings. Exit codes: 0 success, 1 usage error, 2 runtime
failure. TERRAGP_THREADS caps compare's worker threads.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path as FsPath

import click

from .baselines import PlannerKind, run_planner
from .compare import (
    DEFAULT_KINDS,
    ComparisonReport,
    compare_on_specs,
    report_csv,
    report_table,
    rows_for_grid,
)
from .envgen import GenSpec, default_class_specs, generate
from .errors import TerragpError
from .navigator import (
    TRAJECTORY_FIELDS,
    NavConfig,
    estimate_snapshot,
    read_trajectory_cells,
    write_trajectory_csv,
)
from .terrain import TerrainClassParams, TerrainGrid, load_environment, save_environment
from .plotting import render_field_svg

_PLANNER_NAMES = tuple(k.value for k in DEFAULT_KINDS)


class RowColType(click.ParamType):
    name = "row,col"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            row_s, col_s = str(value).split(",")
            return int(row_s), int(col_s)
        except ValueError:
            self.fail(f"{value!r} is not of the form row,col", param, ctx)


ROWCOL = RowColType()


def _dump_json(path: str | FsPath, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _cell(grid: TerrainGrid, rowcol: tuple[int, int], label: str):
    try:
        return grid.cell(*rowcol)
    except ValueError as exc:
        raise click.UsageError(f"{label}: {exc}") from exc


def _auto_floor(classes: list[TerrainClassParams]) -> float:
    # half the cheapest class prior keeps the initial estimate optimistic
    # for any plausible within-class variation
    return 0.5 * min(c.prior_mean for c in classes)


def _nav_config(
    classes,
    m: int,
    init: str,
    floor: float | None,
    init_value: float | None,
    noise_std: float,
    connectivity: int,
    seed: int,
    robot_weight: float,
    max_replans: int | None,
) -> NavConfig:
    if init == "fixed" and init_value is None:
        raise click.UsageError("--init fixed requires --init-value")
    resolved_floor = floor if floor is not None else _auto_floor(list(classes))
    try:
        return NavConfig(
            m=m,
            init_mode=init,
            admissible_floor=resolved_floor,
            init_value=init_value,
            measurement_noise_std=noise_std,
            connectivity=connectivity,
            max_replans=max_replans,
            robot_weight=robot_weight,
            seed=seed,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _nav_options(fn):
    opts = [
        click.option("--m", type=click.IntRange(min=1), default=10, show_default=True,
                     help="new cells to measure between replans."),
        click.option("--init", type=click.Choice(["admissible", "fixed"]),
                     default="admissible", show_default=True,
                     help="initialization of unmeasured terrain."),
        click.option("--floor", type=click.FloatRange(min=0, min_open=True), default=None,
                     help="admissible initialization value [default: half the "
                          "cheapest class prior]."),
        click.option("--init-value", type=float, default=None,
                     help="fixed initialization value (with --init fixed)."),
        click.option("--noise-std", type=click.FloatRange(min=0), default=0.0,
                     show_default=True, help="measurement noise std (J/m)."),
        click.option("--connectivity", type=click.Choice(["4", "8"]), default="8",
                     show_default=True, help="grid connectivity."),
        click.option("--seed", "nav_seed", type=int, default=0, show_default=True,
                     help="seed for measurement noise."),
        click.option("--robot-weight", type=click.FloatRange(min=0), default=98.0,
                     show_default=True, help="robot weight (N) for slope work."),
        click.option("--max-replans", type=click.IntRange(min=1), default=None,
                     help="replan budget [default: scaled to grid size]."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(package_name="terragp", prog_name="terragp")
def cli():
    """Terrain-aware energy mapping and path planning on synthetic grids."""


@cli.command("gen")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--layout", type=click.Choice(["bands", "bands-fixed", "voronoi", "noise"]),
              default="bands", show_default=True)
@click.option("--classes", type=click.IntRange(min=1), default=3, show_default=True,
              help="number of terrain classes (stock parameters).")
@click.option("--width", type=click.IntRange(min=1), default=60, show_default=True)
@click.option("--height", type=click.IntRange(min=1), default=60, show_default=True)
@click.option("--cell-size", type=click.FloatRange(min=0, min_open=True), default=1.0,
              show_default=True, help="cell edge length in meters.")
@click.option("--sites", type=click.IntRange(min=1), default=None,
              help="Voronoi site count [default: 3 per class].")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), required=True)
def cmd_gen(seed, layout, classes, width, height, cell_size, sites, out):
    """Generate a synthetic environment and write it as JSON."""
    try:
        spec = GenSpec(
            seed=seed,
            width=width,
            height=height,
            cell_size=cell_size,
            class_specs=default_class_specs(classes),
            layout=layout,
            voronoi_sites=sites,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    grid, class_table = generate(spec)
    save_environment(out, grid, class_table)
    click.echo(f"wrote {out} ({width}x{height}, {classes} classes, layout={layout})")
    return 0


@cli.command("run")
@click.option("--env", "env_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="environment JSON from `gen`.")
@click.option("--planner", type=click.Choice(list(_PLANNER_NAMES)), default="proposed",
              show_default=True)
@click.option("--start", type=ROWCOL, required=True)
@click.option("--goal", type=ROWCOL, required=True)
@_nav_options
@click.option("--out-csv", type=click.Path(dir_okay=False, writable=True),
              default="trajectory.csv", show_default=True)
@click.option("--out-json", type=click.Path(dir_okay=False, writable=True),
              default="summary.json", show_default=True)
@click.option("--timings", is_flag=True, help="include wall-clock time in the summary.")
def cmd_run(env_path, planner, start, goal, m, init, floor, init_value, noise_std,
            connectivity, nav_seed, robot_weight, max_replans, out_csv, out_json,
            timings):
    """Run one navigation episode; write trajectory CSV and summary JSON."""
    grid, class_table = load_environment(env_path)
    start_cell = _cell(grid, start, "--start")
    goal_cell = _cell(grid, goal, "--goal")
    config = _nav_config(class_table, m, init, floor, init_value, noise_std,
                         int(connectivity), nav_seed, robot_weight, max_replans)
    kind = PlannerKind(planner)
    t0 = time.perf_counter()
    try:
        run = run_planner(kind, grid, class_table, config, start_cell, goal_cell)
    except TerragpError as exc:
        wall = time.perf_counter() - t0
        partial = getattr(exc, "run", None)
        if partial is not None:
            write_trajectory_csv(partial, out_csv)
            summary = partial.summary()
        else:
            with open(out_csv, "w", encoding="utf-8") as fh:
                fh.write(",".join(TRAJECTORY_FIELDS) + "\n")
            summary = {
                "planner": kind.value,
                "executed_energy": None,
                "reached": False,
                "replans": 0,
                "measurements": 0,
                "trajectory_cells": 0,
                "seed": config.seed,
            }
        summary["error"] = str(exc)
        if timings:
            summary["wall_time_s"] = wall
        _dump_json(out_json, summary)
        click.echo(f"error: {exc}", err=True)
        click.echo(f"wrote {out_csv} and {out_json} (reached=false)", err=True)
        return 2
    wall = time.perf_counter() - t0
    write_trajectory_csv(run, out_csv)
    summary = run.summary()
    if timings:
        summary["wall_time_s"] = wall
    _dump_json(out_json, summary)
    click.echo(
        f"{kind.value}: executed_energy={run.executed_energy!r} J, "
        f"replans={run.replan_count}, wrote {out_csv} and {out_json}"
    )
    return 0


@cli.command("compare")
@click.option("--env", "env_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="environment JSON; or use --seeds for a batch.")
@click.option("--start", type=ROWCOL, default=None, help="required with --env.")
@click.option("--goal", type=ROWCOL, default=None, help="required with --env.")
@click.option("--seeds", type=click.IntRange(min=1), default=None,
              help="generate this many environments instead of using --env.")
@click.option("--base-seed", type=int, default=100, show_default=True,
              help="first seed of the generated batch.")
@click.option("--layout", type=click.Choice(["bands", "bands-fixed", "voronoi", "noise"]),
              default="bands", show_default=True)
@click.option("--classes", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--width", type=click.IntRange(min=1), default=60, show_default=True)
@click.option("--height", type=click.IntRange(min=1), default=60, show_default=True)
@click.option("--planners", type=click.Choice(list(_PLANNER_NAMES)), multiple=True,
              help="subset of planners [default: all four].")
@_nav_options
@click.option("--out-json", type=click.Path(dir_okay=False, writable=True),
              default="report.json", show_default=True)
@click.option("--out-csv", type=click.Path(dir_okay=False, writable=True), default=None,
              help="also write per-row CSV.")
@click.option("--table/--no-table", default=True, show_default=True,
              help="print the aligned text table.")
@click.option("--timings", is_flag=True, help="include per-run wall-clock times.")
def cmd_compare(env_path, start, goal, seeds, base_seed, layout, classes, width,
                height, planners, m, init, floor, init_value, noise_std, connectivity,
                nav_seed, robot_weight, max_replans, out_json, out_csv, table, timings):
    """Race the planners and report executed energy relative to optimal."""
    kinds = tuple(PlannerKind(p) for p in planners) if planners else DEFAULT_KINDS
    if PlannerKind.OPTIMAL not in kinds:
        kinds = kinds + (PlannerKind.OPTIMAL,)
    if (env_path is None) == (seeds is None):
        raise click.UsageError("pass exactly one of --env or --seeds")

    if env_path is not None:
        if start is None or goal is None:
            raise click.UsageError("--env mode requires --start and --goal")
        grid, class_table = load_environment(env_path)
        start_cell = _cell(grid, start, "--start")
        goal_cell = _cell(grid, goal, "--goal")
        config = _nav_config(class_table, m, init, floor, init_value, noise_std,
                             int(connectivity), nav_seed, robot_weight, max_replans)
        rows = rows_for_grid(grid, class_table, config, start_cell, goal_cell,
                             kinds, timings)
        rows.sort(key=lambda r: (r.seed, r.planner))
        report = ComparisonReport(rows=rows)
        meta = {"mode": "env", "env": str(env_path), "seeds": [config.seed]}
    else:
        class_specs = default_class_specs(classes)
        specs = [
            GenSpec(seed=base_seed + i, width=width, height=height, cell_size=1.0,
                    class_specs=class_specs, layout=layout)
            for i in range(seeds)
        ]
        resolved_floor = floor if floor is not None else 0.5 * min(
            c.prior_mean for c in class_specs
        )
        config = _nav_config([], m, init, resolved_floor, init_value, noise_std,
                             int(connectivity), nav_seed, robot_weight, max_replans)
        report = compare_on_specs(specs, config, kinds=kinds, timings=timings)
        meta = {"mode": "generated", "layout": layout, "classes": classes,
                "width": width, "height": height,
                "seeds": [s.seed for s in specs]}

    payload = {
        "meta": meta,
        "aggregate": report.aggregate(),
        "rows": [r.as_dict() for r in report.rows],
    }
    _dump_json(out_json, payload)
    if out_csv is not None:
        with open(out_csv, "w", encoding="utf-8") as fh:
            fh.write(report_csv(report))
    if table:
        click.echo(report_table(report), nl=False)
    click.echo(f"wrote {out_json}" + (f" and {out_csv}" if out_csv else ""))
    return 0


@cli.command("plot")
@click.option("--env", "env_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--traj", "traj_paths", type=click.Path(exists=True, dir_okay=False),
              multiple=True, help="trajectory CSV(s) to overlay (repeatable).")
@click.option("--snapshot", type=click.IntRange(min=0), default=None,
              help="render the estimate held before plan K instead of ground truth.")
@click.option("--planner", type=click.Choice(["proposed", "local"]), default="proposed",
              show_default=True, help="planner to re-run for --snapshot.")
@click.option("--start", type=ROWCOL, default=None,
              help="start marker; required with --snapshot.")
@click.option("--goal", type=ROWCOL, default=None,
              help="goal marker; required with --snapshot.")
@_nav_options
@click.option("--cell-px", type=click.FloatRange(min=1), default=12.0, show_default=True)
@click.option("--title", default=None, help="figure title [default: derived].")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), required=True)
def cmd_plot(env_path, traj_paths, snapshot, planner, start, goal, m, init, floor,
             init_value, noise_std, connectivity, nav_seed, robot_weight, max_replans,
             cell_px, title, out):
    """Render an SVG heatmap with optional trajectory overlays."""
    grid, class_table = load_environment(env_path)
    start_cell = _cell(grid, start, "--start") if start is not None else None
    goal_cell = _cell(grid, goal, "--goal") if goal is not None else None

    if snapshot is not None:
        if start_cell is None or goal_cell is None:
            raise click.UsageError("--snapshot requires --start and --goal")
        config = _nav_config(class_table, m, init, floor, init_value, noise_std,
                             int(connectivity), nav_seed, robot_weight, max_replans)
        run = run_planner(PlannerKind(planner), grid, class_table, config,
                          start_cell, goal_cell)
        try:
            costmap, _ = estimate_snapshot(run, snapshot)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from exc
        values = costmap.values
        fig_title = title if title is not None else f"estimated energy before plan {snapshot}"
    else:
        values = grid.energy_true
        fig_title = title if title is not None else "ground truth energy"

    paths = [(FsPath(p).stem, read_trajectory_cells(p, grid)) for p in traj_paths]
    if start_cell is None and paths and paths[0][1]:
        start_cell = paths[0][1][0]
    if goal_cell is None and paths and paths[0][1]:
        goal_cell = paths[0][1][-1]

    svg = render_field_svg(grid, values, paths=paths, start=start_cell,
                           goal=goal_cell, cell_px=cell_px, title=fig_title)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    click.echo(f"wrote {out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    """Run the CLI without exiting the interpreter; returns the exit code."""
    try:
        rv = cli.main(args=argv, prog_name="terragp", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except TerragpError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return int(rv) if isinstance(rv, int) else 0


def entrypoint() -> None:
    sys.exit(main())
