"""Spatial grids and time axes shared by every solver and reconstruction method.

Grids are vertex-centered tensor products: both endpoints of each axis are
grid points, so boundary sensors sit exactly on the domain edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


def _as_tuple(value, dim=None) -> tuple:
    arr = np.atleast_1d(value)
    if dim is not None and arr.size == 1:
        arr = np.repeat(arr, dim)
    return tuple(arr.tolist())


@dataclass(frozen=True)
class GridSpec:
    """Uniform tensor-product grid on a box (1D interval or 2D rectangle)."""

    extent_lo: tuple[float, ...]
    extent_hi: tuple[float, ...]
    n_points: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "extent_lo", _as_tuple([float(v) for v in np.atleast_1d(self.extent_lo)]))
        object.__setattr__(self, "extent_hi", _as_tuple([float(v) for v in np.atleast_1d(self.extent_hi)]))
        object.__setattr__(self, "n_points", _as_tuple([int(v) for v in np.atleast_1d(self.n_points)]))
        if not (len(self.extent_lo) == len(self.extent_hi) == len(self.n_points)):
            raise ConfigError("grid extents and point counts must have matching dimension")
        if self.dim not in (1, 2):
            raise ConfigError(f"only 1D and 2D grids are supported, got dim={self.dim}")
        for lo, hi, n in zip(self.extent_lo, self.extent_hi, self.n_points):
            if n < 3:
                raise ConfigError(f"need at least 3 points per axis, got {n}")
            if not hi > lo:
                raise ConfigError(f"extent_hi must exceed extent_lo, got [{lo}, {hi}]")

    @property
    def dim(self) -> int:
        return len(self.n_points)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((hi - lo) / (n - 1) for lo, hi, n in zip(self.extent_lo, self.extent_hi, self.n_points))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n_points

    @property
    def n_total(self) -> int:
        return int(np.prod(self.n_points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(lo, hi, n) for lo, hi, n in zip(self.extent_lo, self.extent_hi, self.n_points)]

    def meshgrid(self) -> list[np.ndarray]:
        return list(np.meshgrid(*self.axes(), indexing="ij"))

    def points(self) -> np.ndarray:
        """All grid points as an (n_total, dim) array, row-major order."""
        mesh = self.meshgrid()
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def quad_weights(self) -> np.ndarray:
        """Trapezoid quadrature weights (incl. cell volume), shaped like the grid."""
        w = np.ones(self.n_points[0])
        w[0] = w[-1] = 0.5
        weights = w
        for n in self.n_points[1:]:
            w2 = np.ones(n)
            w2[0] = w2[-1] = 0.5
            weights = np.multiply.outer(weights, w2)
        return weights * self.cell_volume

    def contains_extent(self, other: "GridSpec", tol: float = 1e-12) -> bool:
        return all(
            slo - tol <= olo and ohi <= shi + tol
            for slo, shi, olo, ohi in zip(self.extent_lo, self.extent_hi, other.extent_lo, other.extent_hi)
        )


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time axis from 0 to t_final with n_steps samples (both ends included)."""

    t_final: float
    n_steps: int

    def __post_init__(self):
        object.__setattr__(self, "t_final", float(self.t_final))
        object.__setattr__(self, "n_steps", int(self.n_steps))
        if self.n_steps < 2:
            raise ConfigError("TimeGrid needs at least 2 samples")
        if not self.t_final > 0:
            raise ConfigError("t_final must be positive")

    @property
    def dt(self) -> float:
        return self.t_final / (self.n_steps - 1)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_final, self.n_steps)
