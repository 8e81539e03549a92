"""GP energy model: masked kernel, posterior routes, jitter ladder."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import LinAlgError

import terragp.gp as gp_mod
from terragp import GpEnergyModel, GpSolveError, Measurement

from conftest import make_grid
from oracles import naive_gp_posterior


def meas(grid, index, energy):
    cell = grid.cell_at(index)
    return Measurement(
        cell=cell,
        position=grid.center(cell),
        energy=energy,
        class_id=int(grid.class_of[index]),
    )


def gp_instances(count, seed, max_side=10, max_meas=60, max_classes=3,
                 noise_choices=(0.0, 0.1, 0.25)):
    """Deterministic randomized instances: (grid, model) with measurements added."""
    rng = np.random.Generator(np.random.Philox(seed))
    for _ in range(count):
        w = int(rng.integers(3, max_side + 1))
        h = int(rng.integers(3, max_side + 1))
        k = int(rng.integers(1, max_classes + 1))
        class_of = rng.integers(0, k, w * h)
        classes = [
            (float(rng.uniform(5, 100)), float(rng.uniform(0.5, 3.0)), float(rng.uniform(0.8, 1.5)))
            for _ in range(k)
        ]
        grid, table = make_grid(w, h, class_of, np.ones(w * h), classes)
        model = GpEnergyModel(table, noise_std=float(rng.choice(noise_choices)))
        n_m = int(rng.integers(0, min(max_meas, w * h) + 1))
        picks = rng.choice(w * h, size=n_m, replace=False)
        batch = [
            meas(grid, int(i), float(table[class_of[i]].prior_mean + rng.normal(0.0, 2.0)))
            for i in picks
        ]
        if batch:
            model.add_measurements(batch)
        yield grid, model


def all_cells(grid):
    return [grid.cell_at(i) for i in range(grid.n_cells)]


# -- kernel ------------------------------------------------------------------


def test_kernel_zero_across_classes(two_band_grid):
    grid, table = two_band_grid
    model = GpEnergyModel(table)
    assert model.kernel((0.5, 0.5), 0, (1.5, 0.5), 1) == 0.0
    assert model.kernel((0.5, 0.5), 1, (0.5, 0.5), 0) == 0.0


def test_kernel_within_class_matches_formula(two_band_grid):
    grid, table = two_band_grid
    model = GpEnergyModel(table)
    a, b = (0.5, 0.5), (2.5, 1.5)
    d2 = 4.0 + 1.0
    want = 5.0**2 * math.exp(-0.5 * d2 / 2.0**2)
    assert model.kernel(a, 0, b, 0) == pytest.approx(want, rel=1e-15)
    # coincident points give the full signal variance
    assert model.kernel(a, 1, a, 1) == 2.0**2


def test_kernel_unknown_class_rejected(two_band_grid):
    _, table = two_band_grid
    model = GpEnergyModel(table)
    with pytest.raises(ValueError, match="unknown terrain class"):
        model.kernel((0.0, 0.0), 0, (1.0, 1.0), 7)


@settings(max_examples=30, deadline=None)
@given(
    ax=st.floats(-20, 20), ay=st.floats(-20, 20),
    bx=st.floats(-20, 20), by=st.floats(-20, 20),
)
def test_kernel_symmetric_and_bounded(ax, ay, bx, by):
    from terragp import TerrainClassParams

    model = GpEnergyModel([TerrainClassParams(0, "c0", 50.0, 5.0, 2.0)])
    k_ab = model.kernel((ax, ay), 0, (bx, by), 0)
    assert k_ab == model.kernel((bx, by), 0, (ax, ay), 0)
    assert 0.0 < k_ab <= 25.0 + 1e-12


# -- measurement bookkeeping ---------------------------------------------------


def test_measurement_requires_finite_energy(two_band_grid):
    grid, _ = two_band_grid
    with pytest.raises(ValueError):
        meas(grid, 0, float("inf"))


def test_empty_batch_rejected(two_band_grid):
    _, table = two_band_grid
    with pytest.raises(ValueError):
        GpEnergyModel(table).add_measurements([])


def test_noiseless_duplicate_cell_replaces(two_band_grid):
    grid, table = two_band_grid
    model = GpEnergyModel(table, noise_std=0.0)
    model.add_measurements([meas(grid, 3, 48.0)])
    model.add_measurements([meas(grid, 3, 52.0), meas(grid, 4, 50.0)])
    assert len(model.measurements) == 2
    post = model.posterior([grid.cell_at(3)], grid)
    assert post.mean[0] == pytest.approx(52.0, abs=1e-9)


def test_noisy_duplicate_cells_kept(two_band_grid):
    grid, table = two_band_grid
    model = GpEnergyModel(table, noise_std=0.5)
    model.add_measurements([meas(grid, 3, 48.0), meas(grid, 3, 52.0)])
    assert len(model.measurements) == 2
    # two noisy looks at one cell average out
    post = model.posterior([grid.cell_at(3)], grid)
    assert abs(post.mean[0] - 50.0) < 1.0


def test_measurement_class_checked_against_grid(two_band_grid):
    grid, table = two_band_grid
    model = GpEnergyModel(table)
    bad = Measurement(cell=grid.cell_at(0), position=grid.center(grid.cell_at(0)),
                      energy=50.0, class_id=1)  # cell 0 is class 0
    model.add_measurements([bad])
    with pytest.raises(ValueError, match="cell 0"):
        model.posterior(all_cells(grid), grid)


def test_query_bounds_checked(two_band_grid):
    from terragp import CellId
    grid, table = two_band_grid
    model = GpEnergyModel(table)
    with pytest.raises(ValueError, match="out of bounds"):
        model.posterior([CellId(99, 16, 3)], grid)


# -- posterior ----------------------------------------------------------------


def test_posterior_without_measurements_is_prior(two_band_grid):
    grid, table = two_band_grid
    model = GpEnergyModel(table)
    post = model.posterior(all_cells(grid), grid)
    want_mean = np.where(np.arange(36) < 18, 50.0, 10.0)
    want_var = np.where(np.arange(36) < 18, 25.0, 4.0)
    assert np.array_equal(post.mean, want_mean)
    assert np.array_equal(post.variance, want_var)
    assert post.jitter_used == 0.0


def test_unmeasured_class_unaffected_exactly(two_band_grid):
    """The class mask is absolute: class-1 cells keep their prior bitwise."""
    grid, table = two_band_grid
    model = GpEnergyModel(table)
    model.add_measurements([meas(grid, i, 45.0 + i) for i in range(6)])  # row 0, class 0
    post = model.posterior(all_cells(grid), grid)
    lower = np.arange(18, 36)
    assert np.array_equal(post.mean[lower], np.full(18, 10.0))
    assert np.array_equal(post.variance[lower], np.full(18, 4.0))
    # while measured-class cells moved off the prior
    assert not np.allclose(post.mean[:6], 50.0)


def test_zero_residual_measurements_recover_prior(two_band_grid):
    grid, table = two_band_grid
    model = GpEnergyModel(table)
    model.add_measurements([meas(grid, i, 50.0) for i in (0, 7, 14)])
    post = model.posterior(all_cells(grid)[:18], grid)
    assert np.max(np.abs(post.mean - 50.0)) < 1e-9


def test_noiseless_interpolation_and_variance_collapse(two_band_grid):
    grid, table = two_band_grid
    model = GpEnergyModel(table, noise_std=0.0)
    batch = [meas(grid, i, 50.0 + 0.5 * i) for i in (0, 3, 13, 16)]
    model.add_measurements(batch)
    post = model.posterior([m.cell for m in batch], grid)
    assert post.jitter_used == 0.0
    for j, m in enumerate(batch):
        assert abs(post.mean[j] - m.energy) < 1e-9
        assert 0.0 <= post.variance[j] < 1e-9


def test_noise_turns_interpolation_into_smoothing(two_band_grid):
    grid, table = two_band_grid
    model = GpEnergyModel(table, noise_std=1.0)
    batch = [meas(grid, i, 50.0 + 2.0 * (i % 2)) for i in (0, 1, 2, 3)]
    model.add_measurements(batch)
    post = model.posterior([m.cell for m in batch], grid)
    # variance stays strictly positive at measured cells
    assert np.all(post.variance > 1e-4)
    assert not np.allclose(post.mean, [m.energy for m in batch], atol=1e-3)


def test_variance_monotone_under_new_measurements():
    rng = np.random.Generator(np.random.Philox(42))
    for _ in range(10):
        w = h = 6
        k = int(rng.integers(1, 3))
        class_of = rng.integers(0, k, 36)
        classes = [(float(rng.uniform(10, 60)), 2.0, 1.2) for _ in range(k)]
        grid, table = make_grid(w, h, class_of, np.ones(36), classes)
        model = GpEnergyModel(table)
        order = rng.permutation(36)[:12]
        prev = None
        for lo in range(0, 12, 3):
            batch = [meas(grid, int(i), float(rng.uniform(5, 70))) for i in order[lo:lo + 3]]
            model.add_measurements(batch)
            post = model.posterior(all_cells(grid), grid)
            if prev is not None:
                assert np.all(post.variance <= prev + 1e-9)
            prev = post.variance


def test_joint_and_block_routes_agree():
    for grid, model in gp_instances(25, seed=7):
        joint = model.posterior(all_cells(grid), grid)
        blocks = model.posterior_by_class_blocks(all_cells(grid), grid)
        assert np.max(np.abs(joint.mean - blocks.mean)) <= 1e-9
        assert np.max(np.abs(joint.variance - blocks.variance)) <= 1e-9


def test_posterior_matches_naive_dense_oracle():
    for grid, model in gp_instances(25, seed=13):
        post = model.posterior(all_cells(grid), grid)
        mean, var = naive_gp_posterior(model, grid, all_cells(grid), jitter=post.jitter_used)
        assert np.max(np.abs(post.mean - mean)) <= 1e-9
        assert np.max(np.abs(post.variance - var)) <= 1e-9


# -- jitter ladder --------------------------------------------------------------


def test_jitter_ladder_engages_on_singular_gram():
    from terragp import TerrainClassParams

    model = GpEnergyModel([TerrainClassParams(0, "c0", 10.0, 2.0, 1.0)])
    factor, jit = model._factor_with_jitter(np.ones((3, 3)), scale=4.0)
    assert jit > 0.0
    assert factor is not None


def test_public_posterior_survives_near_singular_kernel():
    # an absurd length scale makes every pair almost perfectly correlated
    grid, table = make_grid(5, 5, [0] * 25, np.ones(25), [(20.0, 3.0, 1e6)])
    model = GpEnergyModel(table, noise_std=0.0)
    rng = np.random.Generator(np.random.Philox(3))
    model.add_measurements(
        [meas(grid, int(i), float(20.0 + rng.normal(0, 0.01))) for i in range(20)]
    )
    post = model.posterior(all_cells(grid), grid)
    assert post.jitter_used > 0.0
    assert np.all(np.isfinite(post.mean)) and np.all(np.isfinite(post.variance))
    assert np.all(post.variance >= 0.0)


def test_gp_solve_error_after_ladder_exhausted(monkeypatch, two_band_grid):
    grid, table = two_band_grid
    model = GpEnergyModel(table)
    model.add_measurements([meas(grid, 0, 50.0), meas(grid, 1, 51.0)])

    def always_fail(*args, **kwargs):
        raise LinAlgError("forced")

    monkeypatch.setattr(gp_mod, "cho_factor", always_fail)
    with pytest.raises(GpSolveError, match="singular"):
        model.posterior(all_cells(grid), grid)


def test_model_rejects_bad_config(two_band_grid):
    _, table = two_band_grid
    with pytest.raises(ValueError):
        GpEnergyModel(table, noise_std=-0.1)
    with pytest.raises(ValueError):
        GpEnergyModel(table, jitter=0.0)
