"""Reconstruction toolkit for photoacoustic tomography with time-dependent damping.

Forward/adjoint damped-wave solvers, time-reversal and eigenfunction-series
baselines, a sequential quadratic Hamiltonian optimizer with L2-L1
regularization, plus metrics, bit-exact field I/O, and a reproducible
experiment pipeline.
"""

from .adjoint import AdjointTraces, hamiltonian_kernel, simulate_adjoint
from .boundary import BoundaryRecord, boundary_points, boundary_weights, n_boundary_nodes
from .errors import BlowUpError, CflError, ConfigError, EigenSolverError, OptimizerAbort, PatwaveError
from .experiment import ExperimentConfig, export_training_pairs, run_testcase, testcase_config
from .fieldio import read_boundary_record, read_field, write_boundary_record, write_field
from .fields import ScalarField, l2_norm, resample, zeros
from .forward import (
    WaveState,
    add_noise,
    cfl_max_dt,
    discrete_energy,
    generate_observations,
    pad_domain,
    simulate_forward,
)
from .grids import GridSpec, TimeGrid
from .media import ConstantDamping, DampingSpec, ExpDecayDamping, Medium, build_sound_speed, mollifier_value
from .metrics import mse, psnr, ssim
from .phantoms import Characteristic, Disk, Ellipse, Gaussian, PhantomSum, build_phantom, heart_lung_phantom
from .spectral import (
    EigenBasis,
    ModalCoefficients,
    decay_kernel,
    dirichlet_eigs,
    harmonic_extension,
    modal_coefficients,
    modal_source,
    reconstruct_series,
    series_coefficient,
)
from .sqh import SqhParams, SqhRun, cost_functional, pmp_residual, pointwise_min, sqh_solve
from .timereversal import time_reverse

__version__ = "0.1.0"
