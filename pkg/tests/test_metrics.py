import numpy as np
import pytest

from patwave import ConfigError, GridSpec, ScalarField, mse, psnr, ssim


def _field(vals):
    vals = np.asarray(vals, dtype=float)
    grid = GridSpec((0.0,), (1.0,), (vals.size,))
    return ScalarField(grid, vals)


class TestMse:
    def test_identical(self):
        a = _field([1.0, 2.0, 3.0])
        assert mse(a, a) == 0.0

    def test_unit_difference(self):
        assert mse(_field([0.0, 0.0, 0.0]), _field([1.0, 1.0, 1.0])) == 1.0

    def test_hand_sum(self):
        assert mse(_field([1.0, 2.0, 3.0]), _field([1.0, 1.0, 5.0])) == pytest.approx(5.0 / 3.0, abs=1e-15)

    def test_grid_mismatch(self):
        a = _field([0.0, 1.0, 2.0])
        b = ScalarField(GridSpec((0.0,), (2.0,), (3,)), np.zeros(3))
        with pytest.raises(ConfigError):
            mse(a, b)


class TestPsnr:
    def test_identical_nonzero_caps(self):
        a = _field([0.5, 1.0, 0.25])
        assert psnr(a, a) == 200.0

    def test_hand_value(self):
        # M = 1, mse = 0.04/4 = 0.01 -> 20 dB
        a = _field([1.0, 0.0, 0.0, 0.0])
        b = _field([0.8, 0.0, 0.0, 0.0])
        assert psnr(a, b) == pytest.approx(20.0, abs=1e-9)

    def test_scale_invariance(self):
        rng = np.random.default_rng(8)
        a = _field(rng.uniform(0.1, 1.0, 50))
        b = _field(rng.uniform(0.1, 1.0, 50))
        assert psnr(a, b) == pytest.approx(psnr(3.7 * a, 3.7 * b), abs=1e-12)

    def test_both_zero_raises(self):
        z = _field([0.0, 0.0, 0.0])
        with pytest.raises(ConfigError):
            psnr(z, z)


class TestSsim:
    def test_identical_is_one(self):
        rng = np.random.default_rng(1)
        a = _field(rng.standard_normal(64))
        assert ssim(a, a) == 1.0

    def test_symmetry(self):
        rng = np.random.default_rng(2)
        a = _field(rng.standard_normal(64))
        b = _field(rng.standard_normal(64))
        assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-15)

    def test_anticorrelated_zero_mean(self):
        rng = np.random.default_rng(3)
        vals = rng.standard_normal(200)
        vals -= vals.mean()
        a = _field(vals)
        b = _field(-vals)
        s = ssim(a, b)
        assert -1.0 <= s <= 0.0

    def test_hand_value(self):
        # mu = (0.5, 0.25), var = (0.25, 0.0625), cov = 0.125, L = 1
        a = _field([0.0, 1.0, 0.0, 1.0])
        b = _field([0.0, 0.5, 0.0, 0.5])
        c1, c2 = 1e-4, 9e-4
        num = (2 * 0.5 * 0.25 + c1) * (2 * 0.125 + c2)
        den = (0.5**2 + 0.25**2 + c1) * (0.25 + 0.0625 + c2)
        assert ssim(a, b) == pytest.approx(num / den, abs=1e-12)

    def test_constant_fields(self):
        a = _field([0.7, 0.7, 0.7])
        assert ssim(a, a) == 1.0
