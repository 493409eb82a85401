import math

import numpy as np
import pytest

from patwave import (
    Characteristic,
    ConfigError,
    ConstantDamping,
    Disk,
    Ellipse,
    ExpDecayDamping,
    Gaussian,
    GridSpec,
    Medium,
    PhantomSum,
    ScalarField,
    build_phantom,
    build_sound_speed,
    heart_lung_phantom,
    mollifier_value,
)


class TestMollifier:
    def test_peak(self):
        assert mollifier_value(0.0, 0.0, 1.0) == 1.0
        assert mollifier_value(np.array([0.3, 0.4]), np.array([0.3, 0.4]), 0.5) == 1.0

    def test_support_boundary(self):
        assert mollifier_value(1.0, 0.0, 1.0) == 0.0
        assert mollifier_value(1.5, 0.0, 1.0) == 0.0

    def test_half_radius_value(self):
        # exp(1 - 1/(1 - 0.25)) = exp(-1/3)
        assert mollifier_value(0.5, 0.0, 1.0) == pytest.approx(math.exp(-1.0 / 3.0), rel=1e-14)

    def test_reflection_symmetry(self):
        for d in (0.1, 0.37, 0.9234):
            assert mollifier_value(0.2 + d, 0.2, 1.3) == mollifier_value(0.2 - d, 0.2, 1.3)

    def test_range(self):
        x = np.linspace(-3, 3, 500)
        v = mollifier_value(x, 0.3, 0.8)
        assert np.all(v >= 0) and np.all(v <= 1)


class TestSoundSpeed:
    def test_constant(self):
        g = GridSpec((-1.0,), (1.0,), (64,))
        c = build_sound_speed(g, 1.0)
        assert np.all(c.values == 1.0)

    def test_1d_boundary_unperturbed(self):
        # mollifier support radius sqrt(0.5) < 1: speed is exactly 1 at x = +-1
        g = GridSpec((-1.0,), (1.0,), (201,))
        c = build_sound_speed(g, "1d")
        assert c.values[0] == 1.0 and c.values[-1] == 1.0

    def test_1d_center_value(self):
        g = GridSpec((-1.0,), (1.0,), (201,))
        c = build_sound_speed(g, "1d")
        mid = 100
        assert c.values[mid] == pytest.approx(1.1, rel=1e-14)

    def test_preset_bounds(self):
        g1 = GridSpec((-1.0,), (1.0,), (201,))
        c1 = build_sound_speed(g1, "1d")
        assert np.all(c1.values >= 0.85) and np.all(c1.values <= 1.15)
        g2 = GridSpec((-1.0, -1.0), (1.0, 1.0), (81, 81))
        c2 = build_sound_speed(g2, "2d")
        assert np.all(c2.values >= 0.85) and np.all(c2.values <= 1.15)

    def test_positive(self):
        g2 = GridSpec((-1.0, -1.0), (1.0, 1.0), (51, 51))
        assert np.min(build_sound_speed(g2, "2d").values) > 0


class TestDamping:
    def test_constant(self):
        d = ConstantDamping(0.7)
        assert d.value(3.0) == 0.7
        assert d.derivative(3.0) == 0.0
        assert d.is_constant

    def test_exp_decay(self):
        d = ExpDecayDamping(1.0)
        assert d.value(0.0) == pytest.approx(1.0)
        assert d.value(2.0) == pytest.approx(math.exp(-2.0))
        assert d.derivative(2.0) == pytest.approx(-math.exp(-2.0))
        assert not d.is_constant
        assert np.all(d.value(np.linspace(0, 10, 50)) > 0)

    def test_medium_bounds(self):
        g = GridSpec((-1.0,), (1.0,), (101,))
        med = Medium(build_sound_speed(g, "1d"), ExpDecayDamping(1.0))
        assert 0.85 < med.c_min < 1.0
        assert med.c_max == pytest.approx(1.1, abs=1e-6)

    def test_medium_rejects_nonpositive_speed(self):
        g = GridSpec((-1.0,), (1.0,), (11,))
        with pytest.raises(ConfigError):
            Medium(ScalarField(g, np.linspace(-0.1, 1.0, 11)), ConstantDamping(1.0))


class TestPhantoms:
    def test_gaussian_peak(self):
        g = GridSpec((-1.0,), (1.0,), (201,))
        f = build_phantom(Gaussian((0.5,), 1.0, 0.25), g)
        x = g.axes()[0]
        assert f.values[np.argmin(np.abs(x - 0.5))] == pytest.approx(1.0)

    def test_gaussian_hand_value(self):
        g = GridSpec((-1.0,), (1.0,), (201,))
        f = build_phantom(Gaussian((0.5,), 1.0, 0.25), g)
        x = g.axes()[0]
        i = np.argmin(np.abs(x - 0.75))
        assert f.values[i] == pytest.approx(math.exp(-0.5), rel=1e-12)

    def test_characteristic_support(self):
        g = GridSpec((-1.0,), (1.0,), (201,))
        f = build_phantom(Characteristic((-0.2,), 1.0, 0.3), g)
        x = g.axes()[0]
        assert f.values[np.argmin(np.abs(x - 0.9))] == 0.0
        assert f.values[np.argmin(np.abs(x + 0.2))] == 1.0
        # closed support: ties at the edge included
        assert f.values[np.argmin(np.abs(x + 0.35))] == 1.0

    def test_disk_and_ellipse(self):
        g = GridSpec((-1.0, -1.0), (1.0, 1.0), (101, 101))
        d = build_phantom(Disk((-0.2, -0.2), 0.1, 1.0), g)
        x1, x2 = g.meshgrid()
        inside = (x1 + 0.2) ** 2 + (x2 + 0.2) ** 2 <= 0.1**2
        assert np.array_equal(d.values, inside.astype(float))
        e = build_phantom(Ellipse((0.0, 0.0), (0.5, 0.25), 0.0, 0.8), g)
        assert e.values[50, 50] == 0.8
        assert e.values[np.argmin(np.abs(g.axes()[0] - 0.45)), 50] == 0.8
        assert e.values[50, np.argmin(np.abs(g.axes()[1] - 0.45))] == 0.0

    def test_sum_is_pointwise(self):
        g = GridSpec((-1.0,), (1.0,), (101,))
        a = Gaussian((0.5,), 0.5, 0.25)
        b = Characteristic((-0.2,), 1.0, 0.2)
        fa = build_phantom(a, g).values
        fb = build_phantom(b, g).values
        fs = build_phantom(PhantomSum((a, b)), g).values
        assert np.array_equal(fs, fa + fb)

    def test_negative_rejected(self):
        with pytest.raises(ConfigError):
            Gaussian((0.0,), -1.0, 0.2)
        with pytest.raises(ConfigError):
            Characteristic((0.0,), -0.5, 0.2)

    def test_admissible_range(self):
        g = GridSpec((-1.0, -1.0), (1.0, 1.0), (81, 81))
        f = build_phantom(heart_lung_phantom(), g)
        assert np.min(f.values) >= 0.0
        assert np.max(f.values) <= 2.0
