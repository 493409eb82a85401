"""Backward-in-time adjoint solver; exposes the two t=0 traces used by the Hamiltonian.

The adjoint equation
    d_tt q - d_t[gamma(t) q] - Lap[c^2 q] = -(p - g) chi_boundary,
    q(T) = 0, d_t q(T) = 0
is integrated with the substitution s = T - t (terminal conditions become
initial ones), the same Dirichlet collar as the forward solver, and the
boundary residual realized as a discrete surface delta on the sensor nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryRecord, boundary_index_arrays, boundary_weights
from .errors import BlowUpError, ConfigError
from .fields import ScalarField
from .forward import DEFAULT_CFL_SAFETY, _diverged, laplacian, pad_domain, resolve_substeps
from .grids import TimeGrid
from .media import Medium


@dataclass(frozen=True)
class AdjointTraces:
    """q(.,0) and d_t q(.,0) on the region-of-interest grid, plus gamma(0)."""

    q0: ScalarField
    dq0: ScalarField
    gamma0: float

    def __post_init__(self):
        if self.q0.grid != self.dq0.grid:
            raise ConfigError("adjoint traces must share a grid")


def simulate_adjoint(
    residual: BoundaryRecord,
    medium: Medium,
    tg: TimeGrid,
    pad_width: float,
    *,
    cfl_safety: float = DEFAULT_CFL_SAFETY,
    substeps: int | None = None,
) -> AdjointTraces:
    """Solve the adjoint problem driven by a boundary residual p - g.

    In reversed time s = T - t the equation reads
        d_ss w + gamma(T-s) d_s w - gamma'(T-s) w - Lap(c^2 w) = -r(T-s) delta_sensors
    with homogeneous initial data; gamma' is evaluated analytically from the
    damping law, never by differencing.
    """
    grid = medium.grid
    if residual.times.n_steps != tg.n_steps or abs(residual.times.t_final - tg.t_final) > 1e-12:
        raise ConfigError("residual must be sampled on the supplied time grid")
    dom = pad_domain(medium, pad_width)
    c_max = max(medium.c_max, float(np.max(dom.sound_speed)))
    n_sub = resolve_substeps(tg.dt, dom.grid, c_max, cfl_safety, substeps)
    ds = tg.dt / n_sub
    n_internal = (tg.n_steps - 1) * n_sub + 1
    T = tg.t_final

    bidx = boundary_index_arrays(grid)
    bidx_pad = tuple(b + sl.start for b, sl in zip(bidx, dom.interior))
    src_scale = boundary_weights(grid) / grid.cell_volume

    # residual sampled at every internal reversed time: r(T - s_n)
    t_rev = T - ds * np.arange(n_internal)
    t_samples = residual.times.times()
    r_internal = np.empty((residual.n_sensors, n_internal))
    for i in range(residual.n_sensors):
        r_internal[i] = np.interp(t_rev, t_samples, residual.values[i])

    c2 = dom.sound_speed**2
    damping = medium.damping

    def rhs(w: np.ndarray, n: int) -> np.ndarray:
        out = laplacian(c2 * w, dom.grid.spacing)
        gp = damping.derivative(T - n * ds)
        if gp != 0.0:
            out += gp * w
        out[bidx_pad] -= r_internal[:, n] * src_scale
        return out

    w_prev = np.zeros(dom.grid.shape)
    w_curr = 0.5 * ds**2 * rhs(w_prev, 0)
    w_back2 = w_prev  # level n-2, for the one-sided derivative at the end
    for n in range(1, n_internal - 1):
        g = damping.value(T - n * ds)
        half = 0.5 * g * ds
        w_next = (2.0 * w_curr - (1.0 - half) * w_prev + ds**2 * rhs(w_curr, n)) / (1.0 + half)
        if _diverged(w_next):
            raise BlowUpError(n + 1)
        w_back2, w_prev, w_curr = w_prev, w_curr, w_next

    # q(.,0) = w(.,T); d_t q(.,0) = -d_s w(.,T), second-order one-sided
    q0 = dom.restrict(w_curr)
    if n_internal >= 3:
        dw = (3.0 * w_curr - 4.0 * w_prev + w_back2) / (2.0 * ds)
    else:
        dw = (w_curr - w_prev) / ds
    dq0 = -dom.restrict(dw)
    gamma0 = float(damping.value(0.0))
    return AdjointTraces(ScalarField(grid, q0), ScalarField(grid, dq0), gamma0)


def hamiltonian_kernel(traces: AdjointTraces) -> ScalarField:
    """Pointwise factor multiplying the initial pressure in the Hamiltonian:
    d_t q(.,0) - gamma(0) q(.,0)."""
    return ScalarField(traces.q0.grid, traces.dq0.values - traces.gamma0 * traces.q0.values)
