"""Figures of merit: MSE, PSNR, and global (windowless) SSIM.

SSIM here uses single whole-field means, variances, and covariance rather
than local windows, so values differ from windowed implementations in common
image libraries.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .fields import ScalarField

PSNR_CAP_DB = 200.0


def _check(a: ScalarField, b: ScalarField) -> None:
    if a.grid != b.grid:
        raise ConfigError("metric inputs must share a grid")


def mse(a: ScalarField, b: ScalarField) -> float:
    """Mean of squared pixel differences."""
    _check(a, b)
    return float(np.mean((a.values - b.values) ** 2))


def psnr(a: ScalarField, b: ScalarField, cap_db: float = PSNR_CAP_DB) -> float:
    """10 log10(M^2 / MSE) with M the max over the entries of both fields.

    Identical fields return cap_db; two identically-zero fields have no peak
    and raise.
    """
    _check(a, b)
    if not np.any(a.values) and not np.any(b.values):
        raise ConfigError("psnr undefined for two identically-zero fields")
    err = mse(a, b)
    if err == 0.0:
        return cap_db
    peak = max(float(np.max(a.values)), float(np.max(b.values)))
    if peak <= 0.0:
        raise ConfigError("psnr undefined for a nonpositive peak value")
    return 10.0 * np.log10(peak**2 / err)


def ssim(a: ScalarField, b: ScalarField) -> float:
    """Global structural similarity from whole-field statistics.

    C1 = (0.01 L)^2, C2 = (0.03 L)^2 with L the joint dynamic range
    (floored at 1e-12 to keep constant fields well defined).
    """
    _check(a, b)
    av, bv = a.values, b.values
    mu1 = float(np.mean(av))
    mu2 = float(np.mean(bv))
    var1 = float(np.mean(av**2)) - mu1**2
    var2 = float(np.mean(bv**2)) - mu2**2
    cov = float(np.mean(av * bv)) - mu1 * mu2
    joint_max = max(float(np.max(av)), float(np.max(bv)))
    joint_min = min(float(np.min(av)), float(np.min(bv)))
    L = max(joint_max - joint_min, 1e-12)
    c1 = (0.01 * L) ** 2
    c2 = (0.03 * L) ** 2
    num = (2.0 * mu1 * mu2 + c1) * (2.0 * cov + c2)
    den = (mu1**2 + mu2**2 + c1) * (var1 + var2 + c2)
    return num / den
