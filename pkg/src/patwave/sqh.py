"""Sequential quadratic Hamiltonian (SQH) minimization of the Tikhonov-L1 functional.

The functional
    J(p0) = 1/2 int_0^T int_boundary (p - g)^2 + alpha/2 int p0^2 + beta int |p0|
is minimized over the box [p_lo, p_hi] by alternating one adjoint solve with
pointwise minimization of the augmented Hamiltonian
    H_eps(x, v) = alpha/2 v^2 + beta |v| + b0(x) v + eps (v - p0_prev(x))^2,
where b0 = d_t q(.,0) - gamma(0) q(.,0). The proximal weight eps is increased
on insufficient decrease (repeating the sweep with the same adjoint) and
relaxed after every accepted step.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .adjoint import AdjointTraces, hamiltonian_kernel, simulate_adjoint
from .boundary import BoundaryRecord
from .errors import ConfigError, OptimizerAbort
from .fields import ScalarField
from .forward import DEFAULT_CFL_SAFETY, simulate_forward
from .media import Medium


@dataclass(frozen=True)
class SqhParams:
    """Regularization weights, admissible box, and the adaptive-eps schedule."""

    alpha: float = 0.2
    beta: float = 0.005
    p_lo: float = 0.0
    p_hi: float = 2.0
    eps0: float = 1.0
    inc_factor: float = 5.0
    dec_factor: float = 0.9
    eta: float = 1e-3
    kappa: float = 1e-8
    k_max: int = 300
    eps_max: float = 1e12

    def __post_init__(self):
        if not (0 <= self.p_lo <= self.p_hi):
            raise ConfigError("admissible box must satisfy 0 <= p_lo <= p_hi")
        if self.alpha < 0 or self.beta < 0:
            raise ConfigError("regularization weights must be nonnegative")
        if not self.eps0 > 0 or not self.inc_factor > 1 or not (0 < self.dec_factor < 1):
            raise ConfigError("need eps0 > 0, inc_factor > 1, dec_factor in (0,1)")
        if not self.eta > 0 or not self.kappa > 0 or self.k_max < 1:
            raise ConfigError("need eta > 0, kappa > 0, k_max >= 1")


@dataclass(frozen=True)
class Iterate:
    k: int
    J: float
    eps: float
    tau: float
    accepted: bool


@dataclass
class SqhRun:
    """Full iteration history of one SQH solve."""

    params: SqhParams
    J_init: float
    iterates: list[Iterate] = field(default_factory=list)
    final_p0: ScalarField | None = None
    inner_rejections: int = 0
    converged: bool = False

    @property
    def final_J(self) -> float:
        accepted = [it.J for it in self.iterates if it.accepted]
        return accepted[-1] if accepted else self.J_init

    @property
    def max_eps(self) -> float:
        return max((it.eps for it in self.iterates), default=0.0)

    def accepted_J(self) -> list[float]:
        return [it.J for it in self.iterates if it.accepted]

    def write_log(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "J", "eps", "tau", "accepted"])
            for it in self.iterates:
                writer.writerow([it.k, repr(it.J), repr(it.eps), repr(it.tau), int(it.accepted)])


def cost_functional(
    p0: ScalarField,
    g: BoundaryRecord,
    medium: Medium,
    params: SqhParams,
    *,
    pad_width: float | None = None,
    cfl_safety: float = DEFAULT_CFL_SAFETY,
) -> tuple[float, BoundaryRecord]:
    """Evaluate J and return the forward boundary trace for reuse by the adjoint.

    Data term by trapezoid in time and sensor quadrature on the boundary;
    regularizers by trapezoid quadrature over the region.
    """
    grid = medium.grid
    if p0.grid != grid:
        raise ConfigError("cost_functional: p0 must live on the medium grid")
    vals = p0.values
    if np.any(vals < params.p_lo - 1e-12) or np.any(vals > params.p_hi + 1e-12):
        warnings.warn("initial pressure outside the admissible box; clamping", stacklevel=2)
        p0 = ScalarField(grid, np.clip(vals, params.p_lo, params.p_hi))
    tg = g.times
    if pad_width is None:
        pad_width = medium.c_max * tg.t_final
    _, trace = simulate_forward(p0, medium, tg, pad_width, cfl_safety=cfl_safety, store_history=False)

    from .boundary import boundary_weights

    sigma = boundary_weights(grid)
    wt = np.full(tg.n_steps, tg.dt)
    wt[0] = wt[-1] = 0.5 * tg.dt
    diff = trace.values - g.values
    data_term = 0.5 * float(np.sum(sigma[:, None] * diff**2 * wt[None, :]))
    w = grid.quad_weights()
    reg = 0.5 * params.alpha * float(np.sum(w * p0.values**2)) + params.beta * float(np.sum(w * np.abs(p0.values)))
    return data_term + reg, trace


def pointwise_min(b0, p_prev, params: SqhParams, eps: float):
    """Closed-form minimizer of the scalar augmented Hamiltonian over the box.

    f(v) = (alpha/2) v^2 + beta |v| + b0 v + eps (v - p_prev)^2 is convex and
    piecewise quadratic; the minimum is one of the soft-thresholded stationary
    points of the two branches, 0, or a box endpoint. Vectorized over arrays.
    """
    if eps < 0:
        raise ConfigError("eps must be nonnegative")
    b0_arr = np.asarray(b0, dtype=float)
    prev_arr = np.asarray(p_prev, dtype=float)
    scalar_input = b0_arr.ndim == 0 and prev_arr.ndim == 0
    b0_arr, prev_arr = np.broadcast_arrays(b0_arr, prev_arr)

    a = 0.5 * params.alpha + eps
    b = b0_arr - 2.0 * eps * prev_arr

    def objective(v):
        return (0.5 * params.alpha) * v**2 + params.beta * np.abs(v) + b0_arr * v + eps * (v - prev_arr) ** 2

    candidates = [np.full_like(b0_arr, params.p_lo), np.full_like(b0_arr, params.p_hi)]
    if params.p_lo <= 0.0 <= params.p_hi:
        candidates.append(np.zeros_like(b0_arr))
    if a > 0:
        candidates.append(np.clip(-(b - params.beta) / (2.0 * a), params.p_lo, params.p_hi))
        candidates.append(np.clip(-(b + params.beta) / (2.0 * a), params.p_lo, params.p_hi))

    best = candidates[0]
    best_f = objective(best)
    for cand in candidates[1:]:
        f = objective(cand)
        take = f < best_f
        best = np.where(take, cand, best)
        best_f = np.where(take, f, best_f)
    if scalar_input:
        return float(best)
    return best


def sqh_solve(
    g: BoundaryRecord,
    medium: Medium,
    params: SqhParams,
    p0_init: ScalarField,
    *,
    pad_width: float | None = None,
    cfl_safety: float = DEFAULT_CFL_SAFETY,
    verbose: bool = False,
) -> SqhRun:
    """Run the adaptive-eps SQH iteration until the squared step norm drops below kappa.

    Per iteration: adjoint solve from the cached forward trace, pointwise
    minimization sweep, forward solve, sufficient-decrease test
    J_new - J_old <= -eta * tau with tau = ||p0_new - p0_old||^2_{L2}. On
    rejection eps is increased and the sweep repeats with the SAME adjoint.
    Exhausting k_max returns a run flagged non-converged; eps beyond eps_max
    aborts (stationarity or solver inconsistency).
    """
    grid = medium.grid
    if p0_init.grid != grid:
        raise ConfigError("sqh_solve: p0_init must live on the medium grid")
    if np.any(p0_init.values < params.p_lo - 1e-12) or np.any(p0_init.values > params.p_hi + 1e-12):
        raise ConfigError("sqh_solve: p0_init violates the admissible box")
    tg = g.times
    if pad_width is None:
        pad_width = medium.c_max * tg.t_final
    w = grid.quad_weights()

    p_curr = p0_init
    J_curr, trace = cost_functional(p_curr, g, medium, params, pad_width=pad_width, cfl_safety=cfl_safety)
    run = SqhRun(params=params, J_init=J_curr)
    eps = params.eps0
    k = 0
    while k < params.k_max and not run.converged:
        residual = BoundaryRecord(g.sensor_locations, tg, trace.values - g.values)
        traces = simulate_adjoint(residual, medium, tg, pad_width, cfl_safety=cfl_safety)
        b0 = hamiltonian_kernel(traces).values
        while True:
            if eps > params.eps_max:
                raise OptimizerAbort(
                    f"eps={eps:.3e} exceeded eps_max={params.eps_max:.3e} at iterate {k} "
                    "(stationary point or inconsistent forward/adjoint pair)"
                )
            p_new = ScalarField(grid, pointwise_min(b0, p_curr.values, params, eps))
            J_new, trace_new = cost_functional(p_new, g, medium, params, pad_width=pad_width, cfl_safety=cfl_safety)
            tau = float(np.sum(w * (p_new.values - p_curr.values) ** 2))
            accepted = J_new - J_curr <= -params.eta * tau
            run.iterates.append(Iterate(k=k, J=J_new, eps=eps, tau=tau, accepted=accepted))
            if accepted:
                eps *= params.dec_factor
                p_curr, J_curr, trace = p_new, J_new, trace_new
                if tau <= params.kappa:
                    run.converged = True
                break
            run.inner_rejections += 1
            if tau <= params.kappa:
                # the eps-proximal sweep no longer moves the iterate: PMP
                # stationarity to tolerance; escalating eps further only
                # chases rounding noise
                run.converged = True
                break
            eps *= params.inc_factor
        if verbose:
            print(f"[sqh] k={k:3d} J={J_curr:.6e} eps={eps:.3e} tau={tau:.3e}")
        k += 1
    run.final_p0 = p_curr
    return run


def pmp_residual(p0: ScalarField, traces: AdjointTraces, params: SqhParams) -> float:
    """Sup over grid nodes of H(x, p0(x)) - min_v H(x, v); zero when the
    pointwise minimum principle holds on the grid."""
    if p0.grid != traces.q0.grid:
        raise ConfigError("pmp_residual: p0 and traces must share a grid")
    b0 = hamiltonian_kernel(traces).values

    def H(v):
        return 0.5 * params.alpha * v**2 + params.beta * np.abs(v) + b0 * v

    v_star = pointwise_min(b0, np.zeros_like(b0), params, eps=0.0)
    gap = H(p0.values) - H(v_star)
    return float(np.max(gap))
