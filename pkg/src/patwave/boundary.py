"""Boundary sensor enumeration, quadrature, and recorded pressure traces.

2D boundary nodes are enumerated counter-clockwise starting from the
lower-left corner (bottom edge, right edge, top edge, left edge), each corner
appearing once. This order is shared by sensor records, eigenmode normal
derivatives, and exported datasets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .grids import GridSpec, TimeGrid


def boundary_multi_indices(grid: GridSpec) -> np.ndarray:
    """(n_sensors, dim) integer grid indices of the boundary nodes."""
    if grid.dim == 1:
        n = grid.n_points[0]
        return np.array([[0], [n - 1]])
    nx, ny = grid.n_points
    idx = []
    for i in range(nx):  # bottom edge, left -> right
        idx.append((i, 0))
    for j in range(1, ny):  # right edge, bottom -> top
        idx.append((nx - 1, j))
    for i in range(nx - 2, -1, -1):  # top edge, right -> left
        idx.append((i, ny - 1))
    for j in range(ny - 2, 0, -1):  # left edge, top -> bottom
        idx.append((0, j))
    return np.array(idx)


def boundary_index_arrays(grid: GridSpec) -> tuple[np.ndarray, ...]:
    """Index arrays suitable for fancy-indexing a grid-shaped array."""
    multi = boundary_multi_indices(grid)
    return tuple(multi[:, d] for d in range(grid.dim))


def boundary_points(grid: GridSpec) -> np.ndarray:
    """(n_sensors, dim) coordinates of the boundary nodes."""
    axes = grid.axes()
    multi = boundary_multi_indices(grid)
    return np.stack([axes[d][multi[:, d]] for d in range(grid.dim)], axis=-1)


def boundary_weights(grid: GridSpec) -> np.ndarray:
    """Surface quadrature weight per boundary node.

    1D: unit point masses at the two endpoints. 2D: each perimeter node
    represents one spacing of arc length (trapezoid along the edges; the two
    half-cells meeting at a corner sum to a full spacing).
    """
    n = boundary_multi_indices(grid).shape[0]
    if grid.dim == 1:
        return np.ones(n)
    return np.full(n, grid.spacing[0])


def n_boundary_nodes(grid: GridSpec) -> int:
    if grid.dim == 1:
        return 2
    nx, ny = grid.n_points
    return 2 * nx + 2 * ny - 4


@dataclass(frozen=True)
class BoundaryRecord:
    """Time series of pressure at the boundary sensors: values[sensor, time]."""

    sensor_locations: np.ndarray
    times: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        locs = np.atleast_2d(np.asarray(self.sensor_locations, dtype=float))
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ConfigError("boundary record values must be [sensor, time]")
        if vals.shape[0] != locs.shape[0]:
            raise ConfigError("sensor count mismatch between locations and values")
        if vals.shape[1] != self.times.n_steps:
            raise ConfigError("time sample count mismatch between values and time grid")
        if not np.all(np.isfinite(vals)):
            raise ConfigError("boundary record contains non-finite values")
        vals = np.ascontiguousarray(vals)
        vals.setflags(write=False)
        locs.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "sensor_locations", locs)

    @property
    def n_sensors(self) -> int:
        return self.values.shape[0]

    def rms(self) -> float:
        return float(np.sqrt(np.mean(self.values**2)))

    def interp_time(self, target: TimeGrid) -> "BoundaryRecord":
        """Linear interpolation of every sensor trace onto a new time grid."""
        if target.t_final > self.times.t_final + 1e-12:
            raise ConfigError("cannot interpolate beyond the recorded horizon")
        t_src = self.times.times()
        t_dst = target.times()
        out = np.empty((self.n_sensors, target.n_steps))
        for s in range(self.n_sensors):
            out[s] = np.interp(t_dst, t_src, self.values[s])
        return BoundaryRecord(self.sensor_locations, target, out)


def interp_along_boundary(record: BoundaryRecord, src_grid: GridSpec, dst_grid: GridSpec) -> BoundaryRecord:
    """Resample a boundary record onto the sensor set of a finer grid.

    Both grids must share extents. 1D is an identity (same two endpoint
    sensors); 2D interpolates linearly along each edge using arc length from
    the lower-left corner.
    """
    if src_grid.dim != dst_grid.dim:
        raise ConfigError("boundary interpolation: dimension mismatch")
    for a, b in zip(src_grid.extent_lo + src_grid.extent_hi, dst_grid.extent_lo + dst_grid.extent_hi):
        if abs(a - b) > 1e-12:
            raise ConfigError("boundary interpolation requires matching extents")
    if src_grid.dim == 1:
        return BoundaryRecord(boundary_points(dst_grid), record.times, record.values)

    def arc_length(grid: GridSpec) -> np.ndarray:
        pts = boundary_points(grid)
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        return np.concatenate([[0.0], np.cumsum(seg)])

    s_src = arc_length(src_grid)
    s_dst = arc_length(dst_grid)
    # close the loop so the last left-edge node interpolates toward the start corner
    perim = s_src[-1] + np.linalg.norm(boundary_points(src_grid)[-1] - boundary_points(src_grid)[0])
    s_closed = np.concatenate([s_src, [perim]])
    vals_closed = np.vstack([record.values, record.values[:1]])
    out = np.empty((s_dst.size, record.values.shape[1]))
    for j in range(record.values.shape[1]):
        out[:, j] = np.interp(s_dst, s_closed, vals_closed[:, j])
    return BoundaryRecord(boundary_points(dst_grid), record.times, out)
