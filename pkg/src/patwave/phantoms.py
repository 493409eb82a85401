"""Initial-pressure phantom generators (Gaussians, boxes, disks, ellipses, sums)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .fields import ScalarField
from .grids import GridSpec


class PhantomSpec:
    """Base class for phantom descriptions; build with build_phantom."""


@dataclass(frozen=True)
class Gaussian(PhantomSpec):
    """peak * exp(-|x - center|^2 / (2 sigma^2))."""

    center: tuple[float, ...]
    peak: float
    sigma: float

    def __post_init__(self):
        if self.peak < 0:
            raise ConfigError("phantom peak must be nonnegative (admissible set starts at 0)")
        if not self.sigma > 0:
            raise ConfigError("gaussian sigma must be positive")


@dataclass(frozen=True)
class Characteristic(PhantomSpec):
    """value on the closed box |x - center|_inf <= width/2, zero outside."""

    center: tuple[float, ...]
    value: float
    width: float

    def __post_init__(self):
        if self.value < 0:
            raise ConfigError("phantom value must be nonnegative (admissible set starts at 0)")
        if not self.width > 0:
            raise ConfigError("characteristic width must be positive")


@dataclass(frozen=True)
class Disk(PhantomSpec):
    """value on the closed disk |x - center|_2 <= radius."""

    center: tuple[float, ...]
    radius: float
    value: float

    def __post_init__(self):
        if self.value < 0:
            raise ConfigError("phantom value must be nonnegative (admissible set starts at 0)")
        if not self.radius > 0:
            raise ConfigError("disk radius must be positive")


@dataclass(frozen=True)
class Ellipse(PhantomSpec):
    """value inside an ellipse with given semi-axes, rotated by angle (radians)."""

    center: tuple[float, float]
    semi_axes: tuple[float, float]
    angle: float
    value: float

    def __post_init__(self):
        if self.value < 0:
            raise ConfigError("phantom value must be nonnegative (admissible set starts at 0)")
        if not (self.semi_axes[0] > 0 and self.semi_axes[1] > 0):
            raise ConfigError("ellipse semi-axes must be positive")


@dataclass(frozen=True)
class PhantomSum(PhantomSpec):
    parts: tuple[PhantomSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


def build_phantom(spec: PhantomSpec, grid: GridSpec) -> ScalarField:
    """Sample a phantom on a grid; sums evaluate pointwise exactly."""
    if isinstance(spec, PhantomSum):
        total = np.zeros(grid.shape)
        for part in spec.parts:
            total = total + build_phantom(part, grid).values
        return ScalarField(grid, total)

    if grid.dim == 1:
        x = grid.axes()[0]
        pts = x[:, None]
    else:
        mesh = grid.meshgrid()
        pts = np.stack([m for m in mesh], axis=-1)

    if isinstance(spec, Gaussian):
        c = np.asarray(spec.center, dtype=float)
        r2 = np.sum((pts - c) ** 2, axis=-1)
        vals = spec.peak * np.exp(-r2 / (2.0 * spec.sigma**2))
    elif isinstance(spec, Characteristic):
        c = np.asarray(spec.center, dtype=float)
        inside = np.all(np.abs(pts - c) <= spec.width / 2.0, axis=-1)
        vals = spec.value * inside.astype(float)
    elif isinstance(spec, Disk):
        c = np.asarray(spec.center, dtype=float)
        r2 = np.sum((pts - c) ** 2, axis=-1)
        vals = spec.value * (r2 <= spec.radius**2).astype(float)
    elif isinstance(spec, Ellipse):
        if grid.dim != 2:
            raise ConfigError("ellipse phantoms require a 2D grid")
        cx, cy = spec.center
        a, b = spec.semi_axes
        ca, sa = np.cos(spec.angle), np.sin(spec.angle)
        dx = pts[..., 0] - cx
        dy = pts[..., 1] - cy
        xi = ca * dx + sa * dy
        eta = -sa * dx + ca * dy
        vals = spec.value * ((xi / a) ** 2 + (eta / b) ** 2 <= 1.0).astype(float)
    else:
        raise ConfigError(f"unknown phantom spec: {type(spec).__name__}")
    if grid.dim == 1:
        vals = vals.reshape(grid.shape)
    return ScalarField(grid, vals)


def heart_lung_phantom() -> PhantomSum:
    """Two tilted ellipses ('lungs') plus a disk ('heart')."""
    return PhantomSum(
        (
            Ellipse(center=(-0.35, -0.1), semi_axes=(0.25, 0.45), angle=0.35, value=0.8),
            Ellipse(center=(0.35, -0.1), semi_axes=(0.25, 0.45), angle=-0.35, value=0.8),
            Disk(center=(0.0, 0.25), radius=0.12, value=1.0),
        )
    )
