import math
import warnings

import numpy as np
import pytest

from patwave import (
    BoundaryRecord,
    ConfigError,
    ConstantDamping,
    EigenSolverError,
    Gaussian,
    GridSpec,
    Medium,
    ScalarField,
    TimeGrid,
    build_phantom,
    build_sound_speed,
    decay_kernel,
    dirichlet_eigs,
    harmonic_extension,
    modal_coefficients,
    modal_source,
    reconstruct_series,
    series_coefficient,
    simulate_forward,
)
from patwave.boundary import boundary_points, boundary_weights, n_boundary_nodes

from conftest import unit_medium


@pytest.fixture(scope="module")
def basis_1d():
    grid = GridSpec((-1.0,), (1.0,), (200,))
    med = unit_medium(grid, gamma=1.0)
    return grid, med, dirichlet_eigs(med, grid, 40)


class TestDirichletEigs:
    def test_1d_unit_speed_eigenvalues(self, basis_1d):
        grid, med, basis = basis_1d
        exact = np.arange(1, 11) * np.pi / 2
        rel = np.abs(basis.lambdas[:10] - exact) / exact
        assert rel[0] < 1e-3
        assert np.all(rel < 5e-3)

    def test_1d_mode_shapes(self, basis_1d):
        grid, med, basis = basis_1d
        x = grid.axes()[0]
        for k in range(3):
            exact = np.sin((k + 1) * np.pi * (x + 1) / 2)
            exact /= np.sqrt(np.sum(grid.quad_weights() * exact**2))
            got = basis.modes[k].values
            if np.sum(got * exact) < 0:
                exact = -exact
            assert np.max(np.abs(got - exact)) < 5e-3

    def test_modes_vanish_on_boundary(self, basis_1d):
        _, _, basis = basis_1d
        for m in basis.modes[:5]:
            assert m.values[0] == 0.0 and m.values[-1] == 0.0

    def test_orthonormality(self, basis_1d):
        grid, med, basis = basis_1d
        w = grid.quad_weights() / med.sound_speed.values**2
        G = np.array([[np.sum(w * a.values * b.values) for b in basis.modes[:20]] for a in basis.modes[:20]])
        assert np.max(np.abs(G - np.eye(20))) < 1e-8

    def test_inward_normal_derivative_sign(self, basis_1d):
        # ground mode is positive inside, so its inward slope is positive at
        # both endpoints
        _, _, basis = basis_1d
        assert basis.normal_derivs[0, 0] > 0
        assert basis.normal_derivs[0, 1] > 0

    def test_k_out_of_range(self, basis_1d):
        grid, med, _ = basis_1d
        with pytest.raises(EigenSolverError):
            dirichlet_eigs(med, grid, 10_000)

    def test_2d_unit_speed_eigenvalue(self):
        grid = GridSpec((-1.0, -1.0), (1.0, 1.0), (100, 100))
        med = unit_medium(grid, gamma=1.0)
        basis = dirichlet_eigs(med, grid, 4)
        exact = np.pi / np.sqrt(2)
        assert abs(basis.lambdas[0] - exact) / exact < 5e-3
        # next two eigenvalues are the degenerate (1,2)/(2,1) pair
        exact2 = np.pi / 2 * np.sqrt(5)
        assert abs(basis.lambdas[1] - exact2) / exact2 < 5e-3
        assert abs(basis.lambdas[2] - exact2) / exact2 < 5e-3

    def test_2d_orthonormality(self, grid2d_small):
        med = unit_medium(grid2d_small, gamma=1.0)
        basis = dirichlet_eigs(med, grid2d_small, 12)
        w = grid2d_small.quad_weights() / med.sound_speed.values**2
        G = np.array([[np.sum(w * a.values * b.values) for b in basis.modes] for a in basis.modes])
        assert np.max(np.abs(G - np.eye(12))) < 1e-8


class TestHarmonicExtension:
    def test_constant_boundary(self, grid2d_small):
        n = n_boundary_nodes(grid2d_small)
        he = harmonic_extension(np.full(n, 4.2), grid2d_small)
        assert np.max(np.abs(he.values - 4.2)) < 1e-10

    def test_1d_affine(self):
        grid = GridSpec((-1.0,), (1.0,), (101,))
        he = harmonic_extension(np.array([0.5, 1.5]), grid)
        x = grid.axes()[0]
        assert np.max(np.abs(he.values - (1.0 + 0.5 * x))) < 1e-14

    def test_2d_reproduces_coordinate(self, grid2d_small):
        bp = boundary_points(grid2d_small)
        he = harmonic_extension(bp[:, 0], grid2d_small)
        x1 = grid2d_small.meshgrid()[0]
        assert np.max(np.abs(he.values - x1)) < 1e-10

    def test_discrete_laplacian_residual(self, grid2d_small):
        rng = np.random.default_rng(4)
        he = harmonic_extension(rng.standard_normal(n_boundary_nodes(grid2d_small)), grid2d_small)
        v = he.values
        dx2, dy2 = grid2d_small.spacing[0] ** 2, grid2d_small.spacing[1] ** 2
        lap = (v[2:, 1:-1] - 2 * v[1:-1, 1:-1] + v[:-2, 1:-1]) / dx2 + (
            v[1:-1, 2:] - 2 * v[1:-1, 1:-1] + v[1:-1, :-2]
        ) / dy2
        assert np.max(np.abs(lap)) < 1e-9


class TestModalCoefficients:
    def test_hand_values(self):
        mc = modal_coefficients(3.0, np.array([1.0]))
        assert mc.A_k[0] == pytest.approx(np.sqrt(5.0))
        assert mc.B_plus[0].real == pytest.approx((-3 + np.sqrt(5)) / 2)
        assert mc.B_minus[0].real == pytest.approx((-3 - np.sqrt(5)) / 2)
        assert abs(mc.B_plus[0] ** 2 + 3 * mc.B_plus[0] + 1.0) < 1e-12

    def test_root_identity_random(self):
        rng = np.random.default_rng(17)
        gammas = rng.uniform(1e-3, 20.0, 300)
        lams = rng.uniform(1e-2, 30.0, 300)
        for gamma, lam in zip(gammas, lams):
            mc = modal_coefficients(gamma, np.array([lam]))
            for B in (mc.B_plus[0], mc.B_minus[0]):
                assert abs(B**2 + gamma * B + lam**2) < 1e-10 * max(1.0, lam**2)

    def test_exactly_critical(self):
        mc = modal_coefficients(4.0, np.array([2.0]))
        assert mc.A_k[0] == 0.0
        assert mc.B_plus[0] == mc.B_minus[0] == -2.0

    def test_roots_decay_for_positive_damping(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            gamma = rng.uniform(0.01, 10)
            lam = rng.uniform(0.01, 10)
            mc = modal_coefficients(gamma, np.array([lam]))
            assert mc.B_plus[0].real < 0 and mc.B_minus[0].real < 0


class TestDecayKernel:
    def test_branch_independence(self):
        t = np.linspace(0, 3, 50)
        for gamma, lam in [(1.0, 2.0), (5.0, 1.0), (2.0, 1.0)]:
            A = np.sqrt(complex(gamma**2 - 4 * lam**2))
            k1 = decay_kernel(gamma, A, t)
            k2 = decay_kernel(gamma, -A, t)
            assert np.max(np.abs(k1 - k2)) < 1e-12

    def test_critical_limit(self):
        t = np.linspace(0, 2, 30)
        gamma = 4.0
        exact = -t * np.exp(gamma * t / 2)
        assert np.max(np.abs(decay_kernel(gamma, 0.0, t) - exact)) < 1e-10
        # nearly-critical matches the limit
        near = decay_kernel(gamma, 1e-7 + 0j, t)
        assert np.max(np.abs(near - exact)) < 1e-8

    def test_matches_definition_underdamped(self):
        gamma, lam = 1.0, 2.0
        A = np.sqrt(complex(gamma**2 - 4 * lam**2))
        Bp, Bm = (-gamma + A) / 2, (-gamma - A) / 2
        t = np.linspace(0, 3, 40)
        direct = ((np.exp(-Bp * t) - np.exp(-Bm * t)) / A).real
        assert np.max(np.abs(decay_kernel(gamma, A, t) - direct)) < 1e-12


def test_integral_formula_solves_modal_ode():
    # u(t) = int_t^inf kernel(tau - t) G(tau) dtau solves u'' + g u' + l^2 u = -G
    # and decays, for a fast-decaying synthetic source
    gamma, lam = 1.0, 2.0
    A = np.sqrt(complex(gamma**2 - 4 * lam**2))

    def G(tau):
        return np.exp(-2.0 * tau) * np.sin(3.0 * tau)

    tau_grid = np.linspace(0.0, 40.0, 40001)
    t_grid = np.linspace(0.0, 6.0, 301)
    u = np.empty_like(t_grid)
    for i, t in enumerate(t_grid):
        mask = tau_grid >= t
        tt = tau_grid[mask]
        u[i] = np.trapezoid(decay_kernel(gamma, A, tt - t) * G(tt), tt)
    dt = t_grid[1] - t_grid[0]
    upp = (u[2:] - 2 * u[1:-1] + u[:-2]) / dt**2
    up = (u[2:] - u[:-2]) / (2 * dt)
    resid = upp + gamma * up + lam**2 * u[1:-1] + G(t_grid[1:-1])
    scale = np.sqrt(np.mean((lam**2 * u[1:-1]) ** 2))
    assert np.sqrt(np.mean(resid**2)) / scale < 0.01
    assert abs(u[-1]) <= np.exp(-0.5 * 6.0) * np.max(np.abs(u)) + 1e-6


class TestModalSource:
    def test_constant_data_zero_source(self, basis_1d):
        grid, med, basis = basis_1d
        tg = TimeGrid(1.0, 100)
        g = BoundaryRecord(boundary_points(grid), tg, np.full((2, tg.n_steps), 0.7))
        s = modal_source(g, 1.0, basis, 0)
        assert np.max(np.abs(s)) < 1e-10

    def test_linear_in_time_data(self, basis_1d):
        # g(y,t) = phi(y) t with gamma = 1: source is the constant
        # lambda_k^-2 * sum sigma phi d_nu psi_k (time derivatives are exact
        # on linear data)
        grid, med, basis = basis_1d
        tg = TimeGrid(1.0, 100)
        phi = np.array([0.3, -1.1])
        vals = phi[:, None] * tg.times()[None, :]
        g = BoundaryRecord(boundary_points(grid), tg, vals)
        for k in (0, 3):
            s = modal_source(g, 1.0, basis, k)
            expected = float(np.sum(boundary_weights(grid) * phi * basis.normal_derivs[k])) / basis.lambdas[k] ** 2
            assert np.max(np.abs(s - expected)) < 1e-10

    def test_too_few_samples(self, basis_1d):
        grid, med, basis = basis_1d
        with pytest.raises(ConfigError):
            tg = TimeGrid(1.0, 2)
            g = BoundaryRecord(boundary_points(grid), tg, np.zeros((2, 2)))
            modal_source(g, 1.0, basis, 0)


def _fine_data(p0_spec_or_field, gamma, T, n_data=1600, nt=6401):
    """Free-space boundary data from a fine-grid solve at matched CFL ratio."""
    dgrid = GridSpec((-1.0,), (1.0,), (n_data,))
    dmed = unit_medium(dgrid, gamma=gamma)
    if isinstance(p0_spec_or_field, ScalarField):
        from patwave.fields import resample

        p0 = resample(p0_spec_or_field, dgrid)
    else:
        p0 = build_phantom(p0_spec_or_field, dgrid)
    _, g = simulate_forward(p0, dmed, TimeGrid(T, nt), pad_width=T, store_history=False)
    return g


class TestSeriesReconstruction:
    def test_zero_data(self, basis_1d):
        grid, med, basis = basis_1d
        tg = TimeGrid(4.0, 400)
        g = BoundaryRecord(boundary_points(grid), tg, np.zeros((2, tg.n_steps)))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rec = reconstruct_series(g, 1.0, med, grid, K=10, basis=basis)
        assert np.all(rec.values == 0.0)

    def test_single_mode_recovery(self, basis_1d):
        grid, med, basis = basis_1d
        p0 = basis.modes[2]
        g = _fine_data(p0, 1.0, 4.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rec = reconstruct_series(g, 1.0, med, grid, K=20, basis=basis)
        err = basis.weighted_norm(rec.values - p0.values) / basis.weighted_norm(p0.values)
        assert err < 0.05

    def test_single_mode_coefficient_and_leakage(self, basis_1d):
        grid, med, basis = basis_1d
        p0 = basis.modes[2]
        g = _fine_data(p0, 1.0, 4.0)
        coeffs = np.array([series_coefficient(g, 1.0, basis, k) / basis.lambdas[k] ** 2 for k in range(12)])
        assert abs(coeffs[2] - 1.0) < 0.03  # matches lambda_k^2 <p0, psi_k> after the prefactor
        leak = np.max(np.abs(np.delete(coeffs, 2)))
        assert leak < 0.02 * abs(coeffs[2])

    def test_smooth_phantom_recovery(self, basis_1d):
        grid, med, basis = basis_1d
        p0 = build_phantom(Gaussian((0.5,), 1.0, 0.25), grid)
        g = _fine_data(Gaussian((0.5,), 1.0, 0.25), 1.0, 4.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rec = reconstruct_series(g, 1.0, med, grid, K=40, basis=basis)
        err = basis.weighted_norm(rec.values - p0.values) / basis.weighted_norm(p0.values)
        assert err < 0.10

    def test_horizon_warning(self, basis_1d):
        grid, med, basis = basis_1d
        tg = TimeGrid(1.0, 200)  # far too short for gamma = 1 decay
        g = BoundaryRecord(boundary_points(grid), tg, np.ones((2, tg.n_steps)))
        with pytest.warns(UserWarning, match="horizon"):
            reconstruct_series(g, 1.0, med, grid, K=5, basis=basis)

    def test_requires_positive_gamma(self, basis_1d):
        grid, med, basis = basis_1d
        tg = TimeGrid(4.0, 400)
        g = BoundaryRecord(boundary_points(grid), tg, np.zeros((2, tg.n_steps)))
        with pytest.raises(ConfigError):
            reconstruct_series(g, 0.0, med, grid, K=10, basis=basis)


def test_modal_ode_residual_of_capped_run(basis_1d):
    # projecting the capped-domain solution onto each mode satisfies the
    # homogeneous modal oscillator equation to discretization accuracy
    grid, med, basis = basis_1d
    p0 = build_phantom(Gaussian((0.17,), 1.0, 0.2), grid)  # off-center: excites every low mode
    tg = TimeGrid(2.0, 800)
    hist, _ = simulate_forward(p0, med, tg, pad_width=0.0)
    w = grid.quad_weights() / med.sound_speed.values**2
    dt = tg.dt
    for k in range(5):
        u = np.array([float(np.sum(w * h.values * basis.modes[k].values)) for h in hist])
        upp = (u[2:] - 2 * u[1:-1] + u[:-2]) / dt**2
        up = (u[2:] - u[:-2]) / (2 * dt)
        resid = upp + 1.0 * up + basis.lambdas[k] ** 2 * u[1:-1]
        scale = np.sqrt(np.mean((basis.lambdas[k] ** 2 * u[1:-1]) ** 2))
        assert scale > 1e-6  # mode actually excited
        assert np.sqrt(np.mean(resid**2)) / scale < 0.03


def test_boundary_series_identity_converges():
    # harmonic extension of boundary values equals its mode series in the
    # weighted norm; the truncation error shrinks like 1/sqrt(K) for data
    # that does not vanish on the boundary
    grid = GridSpec((-1.0,), (1.0,), (800,))
    med = unit_medium(grid, gamma=1.0)
    basis = dirichlet_eigs(med, grid, 200)
    bvals = np.array([1.0, 0.5])
    he = harmonic_extension(bvals, grid)
    sigma = boundary_weights(grid)
    partial = np.zeros(grid.shape)
    checkpoints = {20: None, 40: None, 80: None, 200: None}
    for k in range(200):
        coeff = float(np.sum(sigma * bvals * basis.normal_derivs[k])) / basis.lambdas[k] ** 2
        partial += coeff * basis.modes[k].values
        if k + 1 in checkpoints:
            checkpoints[k + 1] = basis.weighted_norm(partial - he.values) / basis.weighted_norm(he.values)
    errs = [checkpoints[K] for K in (20, 40, 80, 200)]
    assert all(a > b for a, b in zip(errs, errs[1:]))  # monotone in K
    assert errs[-1] < 0.05
    assert errs[1] < 0.15  # K=40 sits near the 1/sqrt(K) estimate (~10%)


def test_parseval_partial_sums(basis_1d):
    grid, med, basis = basis_1d
    f = build_phantom(Gaussian((0.0,), 1.0, 0.2), grid)
    w = grid.quad_weights() / med.sound_speed.values**2
    norm2 = float(np.sum(w * f.values**2))
    partial = np.cumsum([float(np.sum(w * f.values * m.values)) ** 2 for m in basis.modes])
    assert np.all(np.diff(partial) >= -1e-15)
    assert partial[-1] <= norm2 * (1 + 1e-9)
    assert partial[-1] > 0.99 * norm2
