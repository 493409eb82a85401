"""Eigenfunction-series inversion for constant damping.

Pipeline: weighted Dirichlet eigenpairs of -c^2 Lap, harmonic extension of
boundary data, modal sources assembled from boundary integrals of the data's
time derivatives, and the closed-form modal coefficients of the initial
pressure.

Sign convention: `EigenBasis.normal_derivs` stores the INWARD normal
derivative of each mode at the boundary nodes. With that choice the
boundary-reduction identities hold verbatim, e.g.
<E(phi), psi_k>_{c^-2} = lambda_k^-2 * integral_boundary phi * d_nu psi_k ds
(Green's second identity; with the outward normal the right side flips sign).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eigh_tridiagonal

from .boundary import BoundaryRecord, boundary_multi_indices, boundary_weights
from .errors import ConfigError, EigenSolverError
from .fields import ScalarField
from .grids import GridSpec
from .media import Medium


@dataclass(frozen=True)
class EigenBasis:
    """Dirichlet eigenpairs of -c^2 Lap, orthonormal in the c^-2-weighted inner product."""

    grid: GridSpec
    lambdas: np.ndarray  # lambda_k > 0, ascending (eigenvalues are lambda_k^2)
    modes: tuple[ScalarField, ...]
    normal_derivs: np.ndarray  # [K, n_boundary_nodes], inward normal derivative
    sound_speed: ScalarField

    @property
    def count(self) -> int:
        return len(self.modes)

    def weighted_inner(self, a: np.ndarray, b: np.ndarray) -> float:
        w = self.grid.quad_weights() / self.sound_speed.values**2
        return float(np.sum(w * a * b))

    def weighted_norm(self, a: np.ndarray) -> float:
        return math.sqrt(max(self.weighted_inner(a, a), 0.0))


@dataclass(frozen=True)
class ModalCoefficients:
    """Characteristic roots of the constant-damping modal ODEs.

    B_{k,+-} = (-gamma +- A_k)/2 with A_k = sqrt(gamma^2 - 4 lambda_k^2)
    (principal branch). Both roots satisfy B^2 + gamma B + lambda_k^2 = 0 and
    have negative real part for gamma > 0.
    """

    gamma: float
    A_k: np.ndarray
    B_plus: np.ndarray
    B_minus: np.ndarray

    def __post_init__(self):
        lam2 = (self.B_plus * self.B_minus).real  # product of roots = lambda^2
        for b in (self.B_plus, self.B_minus):
            res = np.abs(b**2 + self.gamma * b + lam2)
            scale = np.maximum(1.0, np.abs(lam2))
            if np.any(res / scale > 1e-10):
                raise EigenSolverError("characteristic-root identity violated")
        if self.gamma > 0 and (np.any(self.B_plus.real >= 0) or np.any(self.B_minus.real >= 0)):
            raise EigenSolverError("modal roots must decay for positive damping")


def modal_coefficients(gamma: float, lambdas: np.ndarray) -> ModalCoefficients:
    lam = np.asarray(lambdas, dtype=float)
    disc = gamma**2 - 4.0 * lam**2
    A = np.sqrt(disc.astype(complex))
    B_plus = (-gamma + A) / 2.0
    B_minus = (-gamma - A) / 2.0
    return ModalCoefficients(gamma=float(gamma), A_k=A, B_plus=B_plus, B_minus=B_minus)


def _interior_laplacian_1d(n_int: int, dx: float) -> tuple[np.ndarray, np.ndarray]:
    main = np.full(n_int, 2.0 / dx**2)
    off = np.full(n_int - 1, -1.0 / dx**2)
    return main, off


def _interior_laplacian_2d(shape_int: tuple[int, int], spacing) -> sp.csr_matrix:
    nx, ny = shape_int
    dx2, dy2 = spacing[0] ** 2, spacing[1] ** 2
    ex = np.ones(nx)
    ey = np.ones(ny)
    Lx = sp.diags([ex[:-1], -2.0 * ex, ex[:-1]], [-1, 0, 1]) / dx2
    Ly = sp.diags([ey[:-1], -2.0 * ey, ey[:-1]], [-1, 0, 1]) / dy2
    lap = sp.kron(Lx, sp.identity(ny)) + sp.kron(sp.identity(nx), Ly)
    return (-lap).tocsc()


def _inward_normal_derivs(psi: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Second-order one-sided inward normal derivative at each boundary node.

    Modes vanish on the boundary, so the three-point formula reduces to
    (4 f_1 - f_2) / (2 dx) along the inward axis.
    """
    multi = boundary_multi_indices(grid)
    out = np.zeros(multi.shape[0])
    if grid.dim == 1:
        dx = grid.spacing[0]
        out[0] = (4.0 * psi[1] - psi[2]) / (2.0 * dx)
        out[1] = (4.0 * psi[-2] - psi[-3]) / (2.0 * dx)
        return out
    nx, ny = grid.n_points
    dx, dy = grid.spacing
    for s, (i, j) in enumerate(multi):
        on_x_lo, on_x_hi = i == 0, i == nx - 1
        on_y_lo, on_y_hi = j == 0, j == ny - 1
        if (on_x_lo or on_x_hi) and (on_y_lo or on_y_hi):
            continue  # corners: modes vanish along both edges, derivative 0
        if on_x_lo:
            out[s] = (4.0 * psi[1, j] - psi[2, j]) / (2.0 * dx)
        elif on_x_hi:
            out[s] = (4.0 * psi[nx - 2, j] - psi[nx - 3, j]) / (2.0 * dx)
        elif on_y_lo:
            out[s] = (4.0 * psi[i, 1] - psi[i, 2]) / (2.0 * dy)
        else:
            out[s] = (4.0 * psi[i, ny - 2] - psi[i, ny - 3]) / (2.0 * dy)
    return out


def dirichlet_eigs(medium: Medium, grid: GridSpec, K: int) -> EigenBasis:
    """First K eigenpairs of the generalized problem (-Lap) psi = lambda^2 c^-2 psi.

    Interior nodes only (Dirichlet), modes normalized in the discrete
    c^-2-weighted inner product, signs fixed so the largest-magnitude entry is
    positive.
    """
    c = medium.sound_speed
    if c.grid != grid:
        from .fields import resample

        c = resample(c, grid)
    c_vals = c.values
    n_interior = int(np.prod([n - 2 for n in grid.n_points]))
    if K < 1 or K > n_interior - 1:
        raise EigenSolverError(f"K={K} out of range for {n_interior} interior nodes")

    if grid.dim == 1:
        w_int = c_vals[1:-1] ** -2
        main, off = _interior_laplacian_1d(grid.n_points[0] - 2, grid.spacing[0])
        # symmetrize the generalized problem: W^-1/2 A W^-1/2 z = mu z
        s = 1.0 / np.sqrt(w_int)
        d = main * s**2
        e = off * s[:-1] * s[1:]
        try:
            mu, z = eigh_tridiagonal(d, e, select="i", select_range=(0, K - 1))
        except Exception as exc:  # pragma: no cover - LAPACK failure
            raise EigenSolverError(f"tridiagonal eigensolver failed: {exc}") from exc
        psi_int = z * s[:, None]
    else:
        shape_int = tuple(n - 2 for n in grid.n_points)
        A = _interior_laplacian_2d(shape_int, grid.spacing)
        w_int = (c_vals[1:-1, 1:-1] ** -2).ravel()
        M = sp.diags(w_int).tocsc()
        try:
            mu, psi_flat = spla.eigsh(A, k=K, M=M, sigma=0.0, which="LM")
        except Exception as exc:
            raise EigenSolverError(f"sparse eigensolver failed: {exc}") from exc
        order = np.argsort(mu)
        mu = mu[order]
        psi_int = psi_flat[:, order]

    if np.any(mu <= 0):
        raise EigenSolverError("nonpositive eigenvalue from the discrete Dirichlet problem")
    lambdas = np.sqrt(mu)

    weights = grid.quad_weights()
    modes = []
    nds = []
    for k in range(K):
        full = np.zeros(grid.shape)
        if grid.dim == 1:
            full[1:-1] = psi_int[:, k]
        else:
            full[1:-1, 1:-1] = psi_int[:, k].reshape(tuple(n - 2 for n in grid.n_points))
        norm = math.sqrt(np.sum(weights * full**2 / c_vals**2))
        full /= norm
        peak = np.unravel_index(np.argmax(np.abs(full)), full.shape)
        if full[peak] < 0:
            full = -full
        modes.append(ScalarField(grid, full))
        nds.append(_inward_normal_derivs(full, grid))
    return EigenBasis(grid=grid, lambdas=lambdas, modes=tuple(modes), normal_derivs=np.array(nds), sound_speed=c)


def harmonic_extension(boundary_values: np.ndarray, grid: GridSpec) -> ScalarField:
    """Harmonic function matching Dirichlet data given at the boundary nodes.

    Values follow the grid's boundary-node order. 1D: the affine interpolant.
    2D: direct sparse solve of the five-point Laplace system.
    """
    vals = np.asarray(boundary_values, dtype=float)
    multi = boundary_multi_indices(grid)
    if vals.shape != (multi.shape[0],):
        raise ConfigError("boundary value count does not match the grid's boundary nodes")
    if grid.dim == 1:
        a, b = vals
        x = grid.axes()[0]
        lo, hi = grid.extent_lo[0], grid.extent_hi[0]
        return ScalarField(grid, a + (b - a) * (x - lo) / (hi - lo))

    nx, ny = grid.n_points
    shape_int = (nx - 2, ny - 2)
    A = _interior_laplacian_2d(shape_int, grid.spacing)
    rhs = np.zeros(shape_int)
    bfield = np.zeros(grid.shape)
    bfield[tuple(multi.T)] = vals
    dx2, dy2 = grid.spacing[0] ** 2, grid.spacing[1] ** 2
    rhs[0, :] += bfield[0, 1:-1] / dx2
    rhs[-1, :] += bfield[-1, 1:-1] / dx2
    rhs[:, 0] += bfield[1:-1, 0] / dy2
    rhs[:, -1] += bfield[1:-1, -1] / dy2
    try:
        sol = spla.spsolve(A, rhs.ravel())
    except Exception as exc:
        raise EigenSolverError(f"harmonic extension solve failed: {exc}") from exc
    out = bfield.copy()
    out[1:-1, 1:-1] = sol.reshape(shape_int)
    return ScalarField(grid, out)


def _time_derivatives(values: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Second-order first and second time derivatives along axis 1."""
    if values.shape[1] < 3:
        raise ConfigError("need at least 3 time samples for derivatives")
    d1 = np.gradient(values, dt, axis=1, edge_order=2)
    d2 = np.empty_like(values)
    d2[:, 1:-1] = (values[:, 2:] - 2.0 * values[:, 1:-1] + values[:, :-2]) / dt**2
    if values.shape[1] >= 4:
        d2[:, 0] = (2.0 * values[:, 0] - 5.0 * values[:, 1] + 4.0 * values[:, 2] - values[:, 3]) / dt**2
        d2[:, -1] = (2.0 * values[:, -1] - 5.0 * values[:, -2] + 4.0 * values[:, -3] - values[:, -4]) / dt**2
    else:  # three samples: the interpolating quadratic has constant curvature
        d2[:, 0] = d2[:, 1]
        d2[:, -1] = d2[:, 1]
    return d1, d2


def _boundary_source_series(g: BoundaryRecord, gamma: float, basis: EigenBasis) -> np.ndarray:
    """integral_boundary (d_tt g + gamma d_t g) d_nu psi_k ds for every mode: [K, nt]."""
    sigma = boundary_weights(basis.grid)
    d1, d2 = _time_derivatives(g.values, g.times.dt)
    integrand = d2 + gamma * d1
    return basis.normal_derivs @ (sigma[:, None] * integrand)


def modal_source(g: BoundaryRecord, gamma: float, basis: EigenBasis, k: int) -> np.ndarray:
    """Time series G_k(t) driving the k-th modal ODE u'' + gamma u' + lambda_k^2 u = -G_k.

    Assembled purely from boundary data:
    G_k(t) = lambda_k^-2 * integral_boundary (d_tt g + gamma d_t g) d_nu psi_k ds.
    """
    if k < 0 or k >= basis.count:
        raise ConfigError(f"mode index {k} out of range")
    series = _boundary_source_series(g, gamma, basis)
    return series[k] / basis.lambdas[k] ** 2


def _sinhc(z: np.ndarray) -> np.ndarray:
    """sinh(z)/z, stable near 0 (even function, so branch-independent in z)."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-6
    out = np.empty_like(z)
    out[~small] = np.sinh(z[~small]) / z[~small]
    zs = z[small]
    out[small] = 1.0 + zs**2 / 6.0 + zs**4 / 120.0
    return out


def decay_kernel(gamma: float, A_k: complex, t: np.ndarray) -> np.ndarray:
    """(e^{-B_+ t} - e^{-B_- t}) / A_k = -t e^{gamma t / 2} sinhc(A_k t / 2).

    Real for every damping regime (underdamped A_k imaginary gives
    sin/argument); the critically damped limit A_k -> 0 is -t e^{gamma t/2}.
    """
    t = np.asarray(t, dtype=float)
    val = -t * np.exp(gamma * t / 2.0) * _sinhc(A_k * t / 2.0)
    imag_scale = np.max(np.abs(val)) + 1e-300
    if np.max(np.abs(val.imag)) > 1e-8 * imag_scale:
        raise EigenSolverError("decay kernel acquired a nontrivial imaginary part")
    return val.real


def series_coefficient(g: BoundaryRecord, gamma: float, basis: EigenBasis, k: int) -> float:
    """Modal coefficient of the initial pressure from boundary data alone.

    p_{0,k} = integral_boundary g(.,0) d_nu psi_k ds
              + integral_0^T kernel_k(t) * integral_boundary (d_tt g + gamma d_t g) d_nu psi_k ds dt,
    truncating the infinite horizon at the data horizon T.
    """
    if k < 0 or k >= basis.count:
        raise ConfigError(f"mode index {k} out of range")
    coeffs = modal_coefficients(gamma, basis.lambdas[k : k + 1])
    sigma = boundary_weights(basis.grid)
    head = float(np.sum(sigma * g.values[:, 0] * basis.normal_derivs[k]))
    bsum = _boundary_source_series(g, gamma, basis)[k]
    t = g.times.times()
    kern = decay_kernel(gamma, coeffs.A_k[0], t)
    tail = float(np.trapezoid(kern * bsum, t))
    return head + tail


def reconstruct_series(
    g: BoundaryRecord,
    gamma: float,
    medium: Medium,
    grid: GridSpec,
    K: int | None = None,
    *,
    basis: EigenBasis | None = None,
) -> ScalarField:
    """Series reconstruction p0 = sum_k lambda_k^-2 p_{0,k} psi_k (constant damping only).

    K defaults to min(40, interior nodes / 4): discrete modes with fewer than
    ~8 points per wavelength are excluded. A precomputed basis can be passed
    to amortize the eigensolve.
    """
    if not gamma > 0:
        raise ConfigError("series reconstruction requires constant gamma > 0")
    n_interior = int(np.prod([n - 2 for n in grid.n_points]))
    if K is None:
        K = min(40, max(1, n_interior // 4))
    if basis is None:
        basis = dirichlet_eigs(medium, grid, K)
    elif basis.count < K:
        raise ConfigError("supplied basis has fewer modes than requested")

    coeffs = modal_coefficients(gamma, basis.lambdas[:K])
    horizon_decay = math.exp(coeffs.B_plus[0].real * g.times.t_final)
    if horizon_decay > 0.05:
        warnings.warn(
            f"modal energy retains a factor {horizon_decay:.2f} at the data horizon; "
            "series truncation error may be significant",
            stacklevel=2,
        )

    sigma = boundary_weights(basis.grid)
    bsum = _boundary_source_series(g, gamma, basis)[:K]
    t = g.times.times()
    out = np.zeros(grid.shape)
    for k in range(K):
        head = float(np.sum(sigma * g.values[:, 0] * basis.normal_derivs[k]))
        kern = decay_kernel(gamma, coeffs.A_k[k], t)
        p0k = head + float(np.trapezoid(kern * bsum[k], t))
        out += (p0k / basis.lambdas[k] ** 2) * basis.modes[k].values
    return ScalarField(grid, out)
