"""Time-reversal baseline: march the damped wave backward with the data as boundary values.

The backward march keeps the damping sign (the wave is damped again on the
way back), which reproduces the characteristic contrast loss of time reversal
under time-dependent attenuation. The damping coefficient is evaluated at the
physical time gamma(T - s) during the reversed march.
"""

from __future__ import annotations

import numpy as np

from .boundary import BoundaryRecord, boundary_index_arrays, n_boundary_nodes
from .errors import BlowUpError, ConfigError
from .fields import ScalarField
from .forward import DEFAULT_CFL_SAFETY, _diverged, laplacian, resolve_substeps
from .grids import GridSpec, TimeGrid
from .media import Medium


def time_reverse(
    g: BoundaryRecord,
    medium: Medium,
    tg: TimeGrid,
    grid: GridSpec,
    *,
    cfl_safety: float = DEFAULT_CFL_SAFETY,
    substeps: int | None = None,
) -> ScalarField:
    """Reconstruct the initial pressure by backward integration on the region only.

    Zero terminal state, measured data enforced on the boundary nodes at every
    step; the field at the final backward step approximates p0.
    """
    if medium.grid != grid:
        raise ConfigError("time_reverse: medium must live on the reconstruction grid")
    if g.n_sensors != n_boundary_nodes(grid):
        raise ConfigError("time_reverse: record does not cover the grid's boundary nodes")
    if g.times.n_steps != tg.n_steps or abs(g.times.t_final - tg.t_final) > 1e-12:
        raise ConfigError("time_reverse: record is not sampled on the supplied time grid")

    n_sub = resolve_substeps(tg.dt, grid, medium.c_max, cfl_safety, substeps)
    ds = tg.dt / n_sub
    n_internal = (tg.n_steps - 1) * n_sub + 1
    T = tg.t_final

    bidx = boundary_index_arrays(grid)
    t_rev = T - ds * np.arange(n_internal)
    t_samples = g.times.times()
    g_internal = np.empty((g.n_sensors, n_internal))
    for i in range(g.n_sensors):
        g_internal[i] = np.interp(t_rev, t_samples, g.values[i])

    c2 = medium.sound_speed.values**2
    damping = medium.damping

    v_prev = np.zeros(grid.shape)
    v_prev[bidx] = g_internal[:, 0]
    v_curr = v_prev + 0.5 * ds**2 * c2 * laplacian(v_prev, grid.spacing)
    v_curr[bidx] = g_internal[:, 1]
    for n in range(1, n_internal - 1):
        gam = damping.value(T - n * ds)
        half = 0.5 * gam * ds
        v_next = (2.0 * v_curr - (1.0 - half) * v_prev + ds**2 * c2 * laplacian(v_curr, grid.spacing)) / (1.0 + half)
        v_next[bidx] = g_internal[:, n + 1]
        if _diverged(v_next):
            raise BlowUpError(n + 1)
        v_prev, v_curr = v_curr, v_next
    return ScalarField(grid, v_curr)
