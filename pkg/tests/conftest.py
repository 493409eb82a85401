import numpy as np
import pytest

from patwave import ConstantDamping, ExpDecayDamping, GridSpec, Medium, ScalarField, build_sound_speed


@pytest.fixture
def grid1d():
    return GridSpec((-1.0,), (1.0,), (200,))


@pytest.fixture
def grid2d_small():
    return GridSpec((-1.0, -1.0), (1.0, 1.0), (40, 40))


def unit_medium(grid, gamma=0.0):
    return Medium(build_sound_speed(grid, 1.0), ConstantDamping(gamma))


def preset_medium(grid, damping=None):
    preset = "1d" if grid.dim == 1 else "2d"
    return Medium(build_sound_speed(grid, preset), damping or ExpDecayDamping(1.0))


def smooth_random_direction(rng, grid, n_modes=12):
    """Band-limited random field, unit norm in the grid quadrature."""
    w = grid.quad_weights()
    if grid.dim == 1:
        x = grid.axes()[0]
        d = np.zeros(grid.shape)
        for m in range(1, n_modes + 1):
            d += rng.standard_normal() / m * np.sin(m * np.pi * (x - grid.extent_lo[0]) / (grid.extent_hi[0] - grid.extent_lo[0]))
    else:
        x1, x2 = grid.meshgrid()
        d = np.zeros(grid.shape)
        lx = grid.extent_hi[0] - grid.extent_lo[0]
        ly = grid.extent_hi[1] - grid.extent_lo[1]
        for m in range(1, n_modes + 1):
            for n in range(1, n_modes + 1):
                d += rng.standard_normal() / (m * n) * np.sin(m * np.pi * (x1 - grid.extent_lo[0]) / lx) * np.sin(
                    n * np.pi * (x2 - grid.extent_lo[1]) / ly
                )
    return d / np.sqrt(np.sum(w * d**2))
