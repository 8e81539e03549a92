"""Online navigation loop: measuring, replanning, accounting, snapshots."""

import math

import numpy as np
import pytest

from terragp import (
    CostMap,
    NavConfig,
    ReplanBudgetError,
    estimate_snapshot,
    initialize_costmap,
    navigate,
    path_cost_on,
    read_trajectory_cells,
    run_optimal,
    write_trajectory_csv,
)

from conftest import make_grid
from oracles import reprice_trajectory_csv


def checker_grid(side=8, cheap=5.0, dear=40.0):
    """Two classes in vertical half-planes with mild per-cell texture."""
    rng = np.random.Generator(np.random.Philox(17))
    class_of = np.zeros((side, side), dtype=np.int32)
    class_of[:, side // 2:] = 1
    energy = np.where(class_of == 0, dear, cheap).astype(np.float64)
    energy += rng.uniform(-0.5, 0.5, (side, side))
    return make_grid(side, side, class_of.ravel(), energy.ravel(),
                     [(dear, 4.0, 2.0), (cheap, 2.0, 2.0)])


def test_nav_config_validation():
    with pytest.raises(ValueError):
        NavConfig(m=0)
    with pytest.raises(ValueError):
        NavConfig(init_mode="fixed")  # needs init_value
    with pytest.raises(ValueError):
        NavConfig(init_mode="fixed", init_value=-3.0)
    with pytest.raises(ValueError):
        NavConfig(admissible_floor=0.0)
    with pytest.raises(ValueError):
        NavConfig(cost_floor=50.0, admissible_floor=10.0)  # floor above init
    assert NavConfig().initial_value() == 40.0
    assert NavConfig(init_mode="fixed", init_value=900.0).initial_value() == 900.0
    assert NavConfig(m=10).replan_budget(3600) == 1440
    assert NavConfig(max_replans=7).replan_budget(3600) == 7


def test_initialize_costmap_uniform(two_band_grid):
    grid, table = two_band_grid
    cm = initialize_costmap(grid, table, NavConfig(admissible_floor=8.0))
    assert np.array_equal(cm.values, np.full(36, 8.0))


def test_navigate_trivial_when_start_is_goal(two_band_grid):
    grid, table = two_band_grid
    s = grid.cell(2, 2)
    run = navigate(grid, table, NavConfig(admissible_floor=8.0), s, s)
    assert run.reached and run.executed_energy == 0.0
    assert run.trajectory == [s] and run.measurements == []
    assert run.replan_offsets == [0] and run.replan_count == 0


def test_navigate_reaches_and_accounts_exactly():
    grid, table = checker_grid()
    config = NavConfig(m=4, admissible_floor=3.0)
    start, goal = grid.cell(0, 0), grid.cell(7, 7)
    run = navigate(grid, table, config, start, goal)
    assert run.reached
    assert run.trajectory[0] == start and run.trajectory[-1] == goal
    # executed energy is exactly the ground-truth price of the trajectory
    truth = CostMap.ground_truth(grid, config.connectivity, config.robot_weight)
    assert run.executed_energy == path_cost_on(truth, run.trajectory)
    # plans = replans + 1; one offsets entry per plan, nondecreasing
    assert len(run.replan_offsets) == run.replan_count + 1
    assert run.replan_offsets == sorted(run.replan_offsets)
    assert run.replan_offsets[0] == 0


def test_measurements_once_per_cell_on_first_entry():
    grid, table = checker_grid()
    run = navigate(grid, table, NavConfig(m=4, admissible_floor=3.0),
                   grid.cell(0, 0), grid.cell(7, 7))
    cells = [m.cell.index for m in run.measurements]
    assert len(cells) == len(set(cells))
    visited_after_start = {c.index for c in run.trajectory[1:]}
    assert set(cells) == visited_after_start
    # the start cell is not measured unless re-entered
    if grid.cell(0, 0).index not in visited_after_start:
        assert grid.cell(0, 0).index not in cells
    for m in run.measurements:
        assert m.class_id == int(grid.class_of[m.cell.index])
        assert m.energy == grid.energy_true[m.cell.index]  # noiseless, flat


def test_batches_bounded_by_m():
    grid, table = checker_grid()
    m = 3
    run = navigate(grid, table, NavConfig(m=m, admissible_floor=3.0),
                   grid.cell(0, 0), grid.cell(7, 7))
    sizes = [b - a for a, b in zip(run.replan_offsets, run.replan_offsets[1:])]
    assert all(0 < s <= m for s in sizes)
    assert len(run.measurements) - run.replan_offsets[-1] <= m


def test_noise_is_seeded_and_reproducible():
    grid, table = checker_grid()
    cfg = NavConfig(m=4, admissible_floor=3.0, measurement_noise_std=0.3, seed=5)
    a = navigate(grid, table, cfg, grid.cell(0, 0), grid.cell(7, 7))
    b = navigate(grid, table, cfg, grid.cell(0, 0), grid.cell(7, 7))
    assert a.executed_energy == b.executed_energy
    assert [m.energy for m in a.measurements] == [m.energy for m in b.measurements]
    other = navigate(grid, table,
                     NavConfig(m=4, admissible_floor=3.0, measurement_noise_std=0.3, seed=6),
                     grid.cell(0, 0), grid.cell(7, 7))
    assert [m.energy for m in other.measurements] != [m.energy for m in a.measurements]


def test_replan_budget_error_carries_partial_run():
    grid, table = checker_grid()
    cfg = NavConfig(m=1, admissible_floor=3.0, max_replans=2)
    with pytest.raises(ReplanBudgetError) as err:
        navigate(grid, table, cfg, grid.cell(0, 0), grid.cell(7, 7))
    partial = err.value.run
    assert partial is not None and not partial.reached
    assert len(partial.trajectory) >= 2
    assert partial.replan_count == 1  # two plans happened, then the budget hit


def test_estimate_snapshot_zero_equals_initialization():
    grid, table = checker_grid()
    cfg = NavConfig(m=4, admissible_floor=3.0)
    run = navigate(grid, table, cfg, grid.cell(0, 0), grid.cell(7, 7))
    snap0, var0 = estimate_snapshot(run, 0)
    init = initialize_costmap(grid, table, cfg)
    assert np.array_equal(snap0.values, init.values)
    # variance starts at the per-class signal variance
    want = np.where(grid.class_of == 0, 16.0, 4.0)
    assert np.array_equal(var0, want)


def test_estimate_snapshot_progression():
    grid, table = checker_grid()
    cfg = NavConfig(m=4, admissible_floor=3.0)
    run = navigate(grid, table, cfg, grid.cell(0, 0), grid.cell(7, 7))
    assert run.replan_count >= 1
    prev_var_sum = math.inf
    for k in range(len(run.replan_offsets)):
        snap, var = estimate_snapshot(run, k)
        assert snap.values.shape == (64,)
        assert np.all(var >= 0.0)
        assert var.sum() <= prev_var_sum + 1e-9  # information only accumulates
        prev_var_sum = var.sum()
    with pytest.raises(ValueError, match="out of range"):
        estimate_snapshot(run, len(run.replan_offsets))


def test_snapshot_marks_measured_cells():
    grid, table = checker_grid()
    cfg = NavConfig(m=4, admissible_floor=3.0)
    run = navigate(grid, table, cfg, grid.cell(0, 0), grid.cell(7, 7))
    k = len(run.replan_offsets) - 1
    snap, var = estimate_snapshot(run, k)
    seen = [m.cell.index for m in run.measurements[: run.replan_offsets[k]]]
    assert np.all(var[seen] < 1e-9)  # noiseless: certainty at measured cells
    np.testing.assert_allclose(
        snap.values[seen], grid.energy_true[seen], atol=1e-9
    )


def test_sloped_run_charges_gravity():
    # 1-wide corridor forces the trajectory, so flat vs sloped differ only
    # by the mg*sin(theta)*d climb terms
    width = 24
    rng = np.random.Generator(np.random.Philox(8))
    energy = rng.uniform(2.0, 6.0, width)
    slope = np.linspace(0.0, math.pi / 6, width)
    flat_grid, table = make_grid(width, 1, [0] * width, energy, [(4.0, 1.0, 3.0)])
    slop_grid, _ = make_grid(width, 1, [0] * width, energy, [(4.0, 1.0, 3.0)], slope=slope)
    cfg = NavConfig(m=5, admissible_floor=1.0, robot_weight=98.0, seed=3)
    s_flat = navigate(flat_grid, table, cfg, flat_grid.cell(0, 0), flat_grid.cell(0, width - 1))
    s_slope = navigate(slop_grid, table, cfg, slop_grid.cell(0, 0), slop_grid.cell(0, width - 1))
    assert [c.index for c in s_flat.trajectory] == [c.index for c in s_slope.trajectory]
    climb = sum(98.0 * math.sin(slope[c.index]) * 1.0 for c in s_slope.trajectory[1:])
    assert abs((s_slope.executed_energy - s_flat.executed_energy) - climb) < 1e-9
    # stored measurements are surface-only: the slope term is subtracted out
    got = np.array([m.energy for m in s_slope.measurements])
    want = np.array([m.energy for m in s_flat.measurements])
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_trajectory_csv_round_trip(tmp_path):
    grid, table = checker_grid()
    cfg = NavConfig(m=4, admissible_floor=3.0)
    run = navigate(grid, table, cfg, grid.cell(0, 0), grid.cell(7, 7))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(run, path)
    cells = read_trajectory_cells(path, grid)
    assert cells == run.trajectory
    # independent re-pricing of the file equals the recorded executed energy
    assert reprice_trajectory_csv(path, grid) == run.executed_energy
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "step,cell_index,row,col,class_id,measured_e,cumulative_energy"
    assert len(lines) == len(run.trajectory) + 1
    last_cum = float(lines[-1].split(",")[-1])
    assert last_cum == run.executed_energy  # repr round-trips exactly
    measured_count = sum(1 for ln in lines[1:] if ln.split(",")[5] != "")
    assert measured_count == len(run.measurements)


def test_read_trajectory_rejects_mismatched_grid(tmp_path):
    grid, table = checker_grid()
    run = navigate(grid, table, NavConfig(m=4, admissible_floor=3.0),
                   grid.cell(0, 0), grid.cell(7, 7))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(run, path)
    small, _ = make_grid(3, 3, [0] * 9, [1.0] * 9, [(1.0, 1.0, 1.0)])
    from terragp import TerragpError

    with pytest.raises(TerragpError, match="does not fit"):
        read_trajectory_cells(path, small)


def test_fully_measured_estimate_plans_like_truth():
    """With every cell measured, the belief interpolates truth and the
    planned route costs what the clairvoyant optimum costs."""
    from terragp import GpEnergyModel, Measurement, plan
    from terragp.navigator import _build_estimate

    grid, table = checker_grid()
    model = GpEnergyModel(table)
    model.add_measurements(
        Measurement(
            cell=grid.cell_at(i),
            position=grid.center(grid.cell_at(i)),
            energy=float(grid.energy_true[i]),
            class_id=int(grid.class_of[i]),
        )
        for i in range(grid.n_cells)
    )
    values, _ = _build_estimate(model, grid, init_value=3.0, cost_floor=1e-3)
    np.testing.assert_allclose(values, grid.energy_true, atol=1e-6)
    est = CostMap.from_grid(grid, values)
    start, goal = grid.cell(0, 0), grid.cell(7, 7)
    opt = run_optimal(grid, start, goal)
    truth = CostMap.ground_truth(grid)
    chosen = plan(est, start, goal)
    assert abs(path_cost_on(truth, chosen.cells) - opt.executed_energy) < 1e-5
