"""Sampled scalar fields and grid-to-grid resampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import ConfigError
from .grids import GridSpec


@dataclass(frozen=True)
class ScalarField:
    """Real-valued function sampled on a GridSpec; immutable after construction."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if vals.size == self.grid.n_total and vals.ndim == 1:
            vals = vals.reshape(self.grid.shape)
        if vals.shape != self.grid.shape:
            raise ConfigError(f"field shape {vals.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ConfigError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def __add__(self, other: "ScalarField") -> "ScalarField":
        if other.grid != self.grid:
            raise ConfigError("cannot add fields on different grids")
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        if other.grid != self.grid:
            raise ConfigError("cannot subtract fields on different grids")
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "ScalarField":
        return ScalarField(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def zeros(grid: GridSpec) -> ScalarField:
    return ScalarField(grid, np.zeros(grid.shape))


def l2_norm(field: ScalarField, weight: np.ndarray | None = None) -> float:
    """Quadrature L2 norm; optional pointwise weight (e.g. 1/c^2)."""
    w = field.grid.quad_weights()
    v2 = field.values**2
    if weight is not None:
        v2 = v2 * weight
    return float(np.sqrt(np.sum(w * v2)))


def resample(field: ScalarField, dst: GridSpec) -> ScalarField:
    """Multilinear interpolation of a field onto a destination grid.

    The destination extent must be contained in the source extent. Exact for
    fields affine along each axis.
    """
    src = field.grid
    if src.dim != dst.dim:
        raise ConfigError("resample: dimension mismatch")
    if not src.contains_extent(dst):
        raise ConfigError("resample: destination extent not contained in source extent")
    if src.dim == 1:
        out = np.interp(dst.axes()[0], src.axes()[0], field.values)
    else:
        interp = RegularGridInterpolator(src.axes(), field.values, method="linear", bounds_error=False, fill_value=None)
        out = interp(dst.points()).reshape(dst.shape)
    return ScalarField(dst, out)
