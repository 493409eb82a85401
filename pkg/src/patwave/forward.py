"""Explicit leapfrog solver for the damped wave equation.

Free space is emulated by padding the region of interest with a collar of
width >= c_max * T and homogeneous Dirichlet conditions on the outer edge:
reflections from the collar cannot re-enter the region within the recording
horizon. A pad width of zero gives the capped problem (zero pressure on the
region boundary itself), the setting of the modal-decomposition diagnostics.

Time stepping refines the requested storage grid internally until the CFL
bound holds and decimates the stored history back onto it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryRecord, boundary_index_arrays, boundary_points
from .errors import BlowUpError, CflError, ConfigError
from .fields import ScalarField
from .grids import GridSpec, TimeGrid
from .media import DampingSpec, Medium
from .phantoms import PhantomSpec, build_phantom

DEFAULT_CFL_SAFETY = 0.5
BLOWUP_THRESHOLD = 1e100


def _diverged(values: np.ndarray) -> bool:
    m = float(np.max(np.abs(values)))
    return not math.isfinite(m) or m > BLOWUP_THRESHOLD


def cfl_max_dt(grid: GridSpec, c_max: float, safety: float = DEFAULT_CFL_SAFETY) -> float:
    """Largest stable time step: c_max * dt / dx <= safety / sqrt(dim)."""
    return safety * min(grid.spacing) / (c_max * math.sqrt(grid.dim))


@dataclass(frozen=True)
class PaddedDomain:
    """Computational grid extending the region of interest by a Dirichlet collar."""

    grid: GridSpec
    interior: tuple[slice, ...]
    sound_speed: np.ndarray

    def embed(self, values: np.ndarray) -> np.ndarray:
        out = np.zeros(self.grid.shape)
        out[self.interior] = values
        return out

    def restrict(self, values: np.ndarray) -> np.ndarray:
        return values[self.interior].copy()


def pad_domain(medium: Medium, pad_width: float) -> PaddedDomain:
    """Extend the medium's grid by ceil(pad_width/dx) cells per side, speed 1 outside."""
    grid = medium.grid
    if pad_width < 0:
        raise ConfigError("pad_width must be nonnegative")
    n_pad = []
    for dx in grid.spacing:
        n_pad.append(int(math.ceil(pad_width / dx - 1e-9)) if pad_width > 0 else 0)
    lo = tuple(l - n * dx for l, n, dx in zip(grid.extent_lo, n_pad, grid.spacing))
    hi = tuple(h + n * dx for h, n, dx in zip(grid.extent_hi, n_pad, grid.spacing))
    n_points = tuple(n + 2 * p for n, p in zip(grid.n_points, n_pad))
    big = GridSpec(lo, hi, n_points)
    interior = tuple(slice(p, p + n) for p, n in zip(n_pad, grid.n_points))
    c = np.ones(big.shape)
    c[interior] = medium.sound_speed.values
    return PaddedDomain(big, interior, c)


@dataclass(frozen=True)
class WaveState:
    """Two consecutive pressure levels of a leapfrog run."""

    p_prev: ScalarField
    p_curr: ScalarField
    step_index: int
    time: float
    dt: float

    def __post_init__(self):
        if self.p_prev.grid != self.p_curr.grid:
            raise ConfigError("wave state levels must share a grid")


def laplacian(values: np.ndarray, spacing) -> np.ndarray:
    """Second-order centered Laplacian; boundary rows left zero (Dirichlet)."""
    lap = np.zeros_like(values)
    if values.ndim == 1:
        dx2 = spacing[0] ** 2
        lap[1:-1] = (values[2:] - 2.0 * values[1:-1] + values[:-2]) / dx2
    else:
        dx2, dy2 = spacing[0] ** 2, spacing[1] ** 2
        core = lap[1:-1, 1:-1]
        core += (values[2:, 1:-1] - 2.0 * values[1:-1, 1:-1] + values[:-2, 1:-1]) / dx2
        core += (values[1:-1, 2:] - 2.0 * values[1:-1, 1:-1] + values[1:-1, :-2]) / dy2
    return lap


def resolve_substeps(requested_dt: float, grid: GridSpec, c_max: float, safety: float, substeps: int | None) -> int:
    """Internal refinements per stored step; explicit values are CFL-checked."""
    dt_max = cfl_max_dt(grid, c_max, safety)
    if substeps is None:
        return max(1, int(math.ceil(requested_dt / dt_max - 1e-12)))
    if substeps < 1:
        raise ConfigError("substeps must be >= 1")
    if requested_dt / substeps > dt_max * (1 + 1e-12):
        raise CflError(
            f"dt={requested_dt / substeps:.3e} exceeds CFL bound {dt_max:.3e} "
            f"(c_max={c_max:.3f}, dx={min(grid.spacing):.3e})"
        )
    return substeps


def _leapfrog_states(p0_pad: np.ndarray, c_pad: np.ndarray, damping: DampingSpec, grid: GridSpec, dt: float, n_steps: int):
    """Yield (step_index, time, p_prev, p_curr) for every internal step.

    Update: p^{n+1} = [2 p^n - (1 - g_n dt/2) p^{n-1} + dt^2 c^2 Lap p^n] / (1 + g_n dt/2)
    with g_n = gamma(t_n); first step uses the zero-velocity Taylor start.
    """
    c2 = c_pad**2
    p_prev = p0_pad.copy()
    p_curr = p0_pad + 0.5 * dt**2 * c2 * laplacian(p0_pad, grid.spacing)
    if _diverged(p_curr):
        raise BlowUpError(1)
    yield 1, dt, p_prev, p_curr
    for n in range(1, n_steps - 1):
        g = damping.value(n * dt)
        half = 0.5 * g * dt
        p_next = (2.0 * p_curr - (1.0 - half) * p_prev + dt**2 * c2 * laplacian(p_curr, grid.spacing)) / (1.0 + half)
        if _diverged(p_next):
            raise BlowUpError(n + 1)
        p_prev, p_curr = p_curr, p_next
        yield n + 1, (n + 1) * dt, p_prev, p_curr


def simulate_forward(
    p0: ScalarField,
    medium: Medium,
    tg: TimeGrid,
    pad_width: float,
    *,
    cfl_safety: float = DEFAULT_CFL_SAFETY,
    substeps: int | None = None,
    store_history: bool = True,
    on_state=None,
):
    """Propagate an initial pressure (zero initial velocity) and record the boundary trace.

    Returns (history, g): fields on the region-of-interest grid at the stored
    times, and the pressure at the boundary sensors. `on_state` receives a
    WaveState (on the padded grid) at every internal step, for energy audits.
    """
    grid = medium.grid
    if p0.grid != grid:
        raise ConfigError("p0 and medium must share a grid")
    if 0 < pad_width < medium.c_max * tg.t_final - 1e-9:
        warnings.warn(
            f"pad_width={pad_width:.3g} < c_max*T={medium.c_max * tg.t_final:.3g}: "
            "collar reflections may re-enter the region within the horizon",
            stacklevel=2,
        )
    dom = pad_domain(medium, pad_width)
    c_max = max(medium.c_max, float(np.max(dom.sound_speed)))
    n_sub = resolve_substeps(tg.dt, dom.grid, c_max, cfl_safety, substeps)
    dt = tg.dt / n_sub
    n_internal = (tg.n_steps - 1) * n_sub + 1

    bidx = boundary_index_arrays(grid)
    bidx_pad = tuple(b + sl.start for b, sl in zip(bidx, dom.interior))
    g_vals = np.empty((bidx[0].size, tg.n_steps))
    p0_pad = dom.embed(p0.values)
    g_vals[:, 0] = p0_pad[bidx_pad]
    history: list[ScalarField] | None = [ScalarField(grid, dom.restrict(p0_pad))] if store_history else None

    for step, t, p_prev, p_curr in _leapfrog_states(p0_pad, dom.sound_speed, medium.damping, dom.grid, dt, n_internal):
        if on_state is not None:
            on_state(
                WaveState(
                    ScalarField(dom.grid, p_prev),
                    ScalarField(dom.grid, p_curr),
                    step_index=step,
                    time=t,
                    dt=dt,
                )
            )
        if step % n_sub == 0:
            stored = step // n_sub
            g_vals[:, stored] = p_curr[bidx_pad]
            if store_history:
                history.append(ScalarField(grid, dom.restrict(p_curr)))

    g = BoundaryRecord(boundary_points(grid), tg, g_vals)
    return history, g


def add_noise(g: BoundaryRecord, level: float, seed: int) -> BoundaryRecord:
    """Additive Gaussian noise scaled by level * RMS(signal); level 0 is exact identity."""
    if level < 0:
        raise ConfigError("noise level must be nonnegative")
    if level == 0:
        return g
    rng = np.random.default_rng(seed)
    sigma = level * g.rms()
    noisy = g.values + sigma * rng.standard_normal(g.values.shape)
    return BoundaryRecord(g.sensor_locations, g.times, noisy)


def generate_observations(
    p0_spec: PhantomSpec,
    medium: Medium,
    data_grid: GridSpec,
    data_tg: TimeGrid,
    target_tg: TimeGrid,
    noise_level: float,
    seed: int,
    *,
    target_grid: GridSpec | None = None,
    cfl_safety: float = DEFAULT_CFL_SAFETY,
) -> BoundaryRecord:
    """Synthesize boundary data on a coarse grid, then interpolate and add noise.

    Simulating on a grid coarser than the reconstruction grid avoids the
    inverse crime. `target_grid`, when given, also resamples the record onto
    that grid's sensor set (needed in 2D where the boundaries differ).
    """
    from .fields import resample

    if target_grid is not None and min(target_grid.n_points) <= min(data_grid.n_points):
        warnings.warn("data grid is not coarser than the target grid (inverse crime)", stacklevel=2)
    c_data = resample(medium.sound_speed, data_grid)
    med_data = Medium(c_data, medium.damping)
    p0 = build_phantom(p0_spec, data_grid)
    pad = med_data.c_max * data_tg.t_final
    _, g = simulate_forward(p0, med_data, data_tg, pad, cfl_safety=cfl_safety, store_history=False)
    g = g.interp_time(target_tg)
    if target_grid is not None and target_grid.dim == 2:
        from .boundary import interp_along_boundary

        g = interp_along_boundary(g, data_grid, target_grid)
    elif target_grid is not None:
        from .boundary import boundary_points as _bp

        g = BoundaryRecord(_bp(target_grid), g.times, g.values)
    return add_noise(g, noise_level, seed)


def _gradient_faces(values: np.ndarray, spacing):
    """Forward-difference gradients on cell faces, per axis."""
    grads = []
    if values.ndim == 1:
        grads.append(np.diff(values) / spacing[0])
    else:
        grads.append(np.diff(values, axis=0) / spacing[0])
        grads.append(np.diff(values, axis=1) / spacing[1])
    return grads


def discrete_energy(state: WaveState, medium: Medium) -> float:
    """Discrete wave energy of a consecutive state pair at the half step.

    E = 1/2 sum[ c^-2 ((p^n - p^{n-1})/dt)^2 + grad p^n . grad p^{n-1} ] * cell_volume.
    The staggered product form of the gradient term makes the damped leapfrog
    dissipation identity exact: E^{n+1/2} - E^{n-1/2} =
    -gamma(t_n) dt || (p^{n+1}-p^{n-1})/(2dt) ||^2_{c^-2}.
    """
    grid = state.p_curr.grid
    if medium.grid != grid:
        raise ConfigError("discrete_energy: medium must live on the state grid")
    vol = grid.cell_volume
    c2 = medium.sound_speed.values**2
    vel = (state.p_curr.values - state.p_prev.values) / state.dt
    kinetic = 0.5 * vol * float(np.sum(vel**2 / c2))
    pot = 0.0
    for g_curr, g_prev in zip(_gradient_faces(state.p_curr.values, grid.spacing), _gradient_faces(state.p_prev.values, grid.spacing)):
        pot += 0.5 * vol * float(np.sum(g_curr * g_prev))
    return kinetic + pot
