"""Acoustic media: sound-speed presets, damping laws, and the mollifier bump."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .fields import ScalarField
from .grids import GridSpec


class DampingSpec:
    """Time-dependent damping coefficient gamma(t) with an analytic derivative."""

    def value(self, t):
        raise NotImplementedError

    def derivative(self, t):
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return False


@dataclass(frozen=True)
class ConstantDamping(DampingSpec):
    """Constant damping; gamma = 0 gives the undamped equation for diagnostics."""

    gamma: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ConfigError("constant damping must be nonnegative")

    def value(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.gamma) if np.ndim(t) else self.gamma

    def derivative(self, t):
        return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0

    @property
    def is_constant(self) -> bool:
        return True


@dataclass(frozen=True)
class ExpDecayDamping(DampingSpec):
    """gamma(t) = exp(-t / scale); positive for all t."""

    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ConfigError("decay scale must be positive")

    def value(self, t):
        return np.exp(-np.asarray(t, dtype=float) / self.scale) if np.ndim(t) else float(np.exp(-t / self.scale))

    def derivative(self, t):
        if np.ndim(t):
            return -np.exp(-np.asarray(t, dtype=float) / self.scale) / self.scale
        return float(-np.exp(-t / self.scale) / self.scale)


@dataclass(frozen=True)
class Medium:
    """Sound speed field plus damping law; speed bounds cached at construction."""

    sound_speed: ScalarField
    damping: DampingSpec
    c_min: float = 0.0
    c_max: float = 0.0

    def __post_init__(self):
        cmin = float(np.min(self.sound_speed.values))
        cmax = float(np.max(self.sound_speed.values))
        if not cmin > 0:
            raise ConfigError("sound speed must be positive everywhere")
        object.__setattr__(self, "c_min", cmin)
        object.__setattr__(self, "c_max", cmax)

    @property
    def grid(self) -> GridSpec:
        return self.sound_speed.grid


def mollifier_value(x, center, radius: float):
    """Smooth compactly-supported bump, peak 1 at the center, 0 for |x-center| >= radius.

    Uses the standard C-infinity bump exp(1 - 1/(1 - r^2)) with
    r = |x - center| / radius. Accepts scalars or arrays of points (last axis
    = coordinate in 2D).
    """
    if not radius > 0:
        raise ConfigError("mollifier radius must be positive")
    x = np.asarray(x, dtype=float)
    c = np.asarray(center, dtype=float)
    if x.ndim == 0 or (x.ndim == 1 and c.ndim == 0):
        r2 = ((x - c) / radius) ** 2
    else:
        r2 = np.sum((x - c) ** 2, axis=-1) / radius**2
    inside = r2 < 1.0
    with np.errstate(divide="ignore"):
        out = np.where(inside, np.exp(1.0 - 1.0 / np.maximum(1.0 - r2, 1e-300)), 0.0)
    if np.ndim(out) == 0:
        return float(out)
    return out


def build_sound_speed(grid: GridSpec, preset) -> ScalarField:
    """Sound speed presets: '1d', '2d', or a positive constant.

    The variable presets perturb a unit background inside a mollifier bump
    centered at the domain midpoint with radius sqrt(0.5):
      1d: c(x) = 1 + w(x) * 0.1 * cos(2 pi x)
      2d: c(x) = 1 + w(x) * (0.1 * cos(2 pi x1) + 0.05 * sin(2 pi x2))
    """
    center = tuple((lo + hi) / 2 for lo, hi in zip(grid.extent_lo, grid.extent_hi))
    radius = np.sqrt(0.5)
    if isinstance(preset, (int, float)):
        const = float(preset)
        if not const > 0:
            raise ConfigError("constant sound speed must be positive")
        return ScalarField(grid, np.full(grid.shape, const))
    name = str(preset).lower()
    if name in ("1d", "oned"):
        if grid.dim != 1:
            raise ConfigError("'1d' sound speed preset requires a 1D grid")
        x = grid.axes()[0]
        w = mollifier_value(x, center[0], radius)
        return ScalarField(grid, 1.0 + w * 0.1 * np.cos(2 * np.pi * x))
    if name in ("2d", "twod"):
        if grid.dim != 2:
            raise ConfigError("'2d' sound speed preset requires a 2D grid")
        x1, x2 = grid.meshgrid()
        pts = np.stack([x1, x2], axis=-1)
        w = mollifier_value(pts, center, radius)
        return ScalarField(grid, 1.0 + w * (0.1 * np.cos(2 * np.pi * x1) + 0.05 * np.sin(2 * np.pi * x2)))
    raise ConfigError(f"unknown sound speed preset: {preset!r}")
