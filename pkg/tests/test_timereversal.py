import numpy as np
import pytest

from patwave import (
    BoundaryRecord,
    ConfigError,
    ConstantDamping,
    ExpDecayDamping,
    Gaussian,
    GridSpec,
    Medium,
    TimeGrid,
    build_phantom,
    build_sound_speed,
    generate_observations,
    simulate_forward,
    time_reverse,
)
from patwave.boundary import boundary_points, n_boundary_nodes

from conftest import preset_medium, unit_medium


def test_zero_data_zero_reconstruction(grid1d):
    med = preset_medium(grid1d)
    tg = TimeGrid(1.0, 150)
    g = BoundaryRecord(boundary_points(grid1d), tg, np.zeros((2, tg.n_steps)))
    rec = time_reverse(g, med, tg, grid1d)
    assert np.all(rec.values == 0.0)


def test_linearity_in_data(grid1d):
    med = preset_medium(grid1d)
    tg = TimeGrid(1.0, 150)
    rng = np.random.default_rng(2)
    v1 = rng.standard_normal((2, tg.n_steps))
    v2 = rng.standard_normal((2, tg.n_steps))
    locs = boundary_points(grid1d)
    r1 = time_reverse(BoundaryRecord(locs, tg, v1), med, tg, grid1d)
    r2 = time_reverse(BoundaryRecord(locs, tg, v2), med, tg, grid1d)
    r12 = time_reverse(BoundaryRecord(locs, tg, 1.5 * v1 - 2.0 * v2), med, tg, grid1d)
    assert np.max(np.abs(r12.values - (1.5 * r1.values - 2.0 * r2.values))) < 1e-12


def test_undamped_time_reversal_recovers_phantom(grid1d):
    # gamma = 0, long horizon: time reversal is nearly exact
    med = unit_medium(grid1d, gamma=0.0)
    tg = TimeGrid(2.5, 500)
    p0 = build_phantom(Gaussian((0.2,), 1.0, 0.15), grid1d)
    _, g = simulate_forward(p0, med, tg, pad_width=med.c_max * tg.t_final, store_history=False)
    rec = time_reverse(g, med, tg, grid1d)
    rel = np.linalg.norm(rec.values - p0.values) / np.linalg.norm(p0.values)
    assert rel < 0.15


def test_damping_contrast_loss(grid1d):
    # exp(-t) damping: reconstructed peak visibly below the true peak
    med = preset_medium(grid1d)
    tg = TimeGrid(1.0, 200)
    g = generate_observations(
        Gaussian((0.5,), 1.0, 0.25), med, GridSpec((-1.0,), (1.0,), (50,)), TimeGrid(1.0, 50), tg, 0.0, 0,
        target_grid=grid1d,
    )
    rec = time_reverse(g, med, tg, grid1d)
    assert rec.values.max() < 1.0
    assert rec.values.max() < 0.8  # well below, not a marginal effect


def test_sensor_count_mismatch_raises(grid1d):
    med = preset_medium(grid1d)
    tg = TimeGrid(1.0, 100)
    bad = BoundaryRecord(np.zeros((3, 1)), tg, np.zeros((3, tg.n_steps)))
    with pytest.raises(ConfigError):
        time_reverse(bad, med, tg, grid1d)


def test_2d_contrast_loss(grid2d_small):
    med = preset_medium(grid2d_small)
    tg = TimeGrid(2.0, 100)
    g = generate_observations(
        Gaussian((-0.3, -0.3), 1.0, 0.5), med, GridSpec((-1.0, -1.0), (1.0, 1.0), (20, 20)), TimeGrid(2.0, 50),
        tg, 0.0, 0, target_grid=grid2d_small,
    )
    rec = time_reverse(g, med, tg, grid2d_small)
    assert np.all(np.isfinite(rec.values))
    assert rec.values.max() < 1.0
