"""Experiment configuration, the six built-in test cases, and dataset export.

Configs are JSON-serializable; all randomness hangs off a single 64-bit seed,
so identical configs regenerate outputs bit-identically.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError
from .fields import ScalarField, resample, zeros
from .fieldio import read_field, write_boundary_record, write_field
from .forward import generate_observations
from .grids import GridSpec, TimeGrid
from .media import ConstantDamping, DampingSpec, ExpDecayDamping, Medium, build_sound_speed
from .metrics import mse, psnr, ssim
from .phantoms import Characteristic, Disk, Ellipse, Gaussian, PhantomSpec, PhantomSum, build_phantom, heart_lung_phantom
from .spectral import reconstruct_series
from .sqh import SqhParams, SqhRun, sqh_solve
from .timereversal import time_reverse

METHODS = ("tr", "spectral", "sqh", "cnn")


# ---------------------------------------------------------------------------
# JSON <-> spec objects


def phantom_to_dict(spec: PhantomSpec) -> dict:
    if isinstance(spec, Gaussian):
        return {"kind": "gaussian", "center": list(spec.center), "peak": spec.peak, "sigma": spec.sigma}
    if isinstance(spec, Characteristic):
        return {"kind": "characteristic", "center": list(spec.center), "value": spec.value, "width": spec.width}
    if isinstance(spec, Disk):
        return {"kind": "disk", "center": list(spec.center), "radius": spec.radius, "value": spec.value}
    if isinstance(spec, Ellipse):
        return {
            "kind": "ellipse",
            "center": list(spec.center),
            "semi_axes": list(spec.semi_axes),
            "angle": spec.angle,
            "value": spec.value,
        }
    if isinstance(spec, PhantomSum):
        return {"kind": "sum", "parts": [phantom_to_dict(p) for p in spec.parts]}
    raise ConfigError(f"cannot serialize phantom {type(spec).__name__}")


def phantom_from_dict(d: dict) -> PhantomSpec:
    kind = d.get("kind")
    try:
        if kind == "gaussian":
            return Gaussian(tuple(d["center"]), float(d["peak"]), float(d["sigma"]))
        if kind == "characteristic":
            return Characteristic(tuple(d["center"]), float(d["value"]), float(d["width"]))
        if kind == "disk":
            return Disk(tuple(d["center"]), float(d["radius"]), float(d["value"]))
        if kind == "ellipse":
            return Ellipse(tuple(d["center"]), tuple(d["semi_axes"]), float(d["angle"]), float(d["value"]))
        if kind == "sum":
            return PhantomSum(tuple(phantom_from_dict(p) for p in d["parts"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad phantom spec: {exc}") from exc
    raise ConfigError(f"unknown phantom kind {kind!r}")


def damping_to_dict(d: DampingSpec) -> dict:
    if isinstance(d, ConstantDamping):
        return {"kind": "constant", "gamma": d.gamma}
    if isinstance(d, ExpDecayDamping):
        return {"kind": "exp_decay", "scale": d.scale}
    raise ConfigError(f"cannot serialize damping {type(d).__name__}")


def damping_from_dict(d: dict) -> DampingSpec:
    kind = d.get("kind")
    if kind == "constant":
        return ConstantDamping(float(d["gamma"]))
    if kind == "exp_decay":
        return ExpDecayDamping(float(d.get("scale", 1.0)))
    raise ConfigError(f"unknown damping kind {kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one reconstruction experiment."""

    dim: int
    phantom: PhantomSpec
    sound_speed_preset: object  # '1d', '2d', or a constant
    damping: DampingSpec
    extent_lo: tuple[float, ...]
    extent_hi: tuple[float, ...]
    recon_n: tuple[int, ...]
    data_n: tuple[int, ...]
    t_final: float
    n_time_recon: int
    n_time_data: int
    noise_level: float = 0.1
    seed: int = 12345
    methods: tuple[str, ...] = ("tr", "sqh")
    sqh: SqhParams = field(default_factory=SqhParams)
    init: str = "tr"  # 'zero' | 'tr' | 'tr+cnn'
    cnn_guess: str | None = None
    label: str = "custom"

    def __post_init__(self):
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}; choose from {METHODS}")
        if self.init not in ("zero", "tr", "tr+cnn"):
            raise ConfigError("init must be one of 'zero', 'tr', 'tr+cnn'")
        if "spectral" in self.methods and not self.damping.is_constant:
            raise ConfigError("spectral reconstruction requires constant damping")
        if self.init == "tr+cnn" and not self.cnn_guess:
            raise ConfigError("init 'tr+cnn' needs a cnn_guess field file")
        if "cnn" in self.methods and not self.cnn_guess:
            raise ConfigError("method 'cnn' needs a cnn_guess field file")

    # -- derived pieces -----------------------------------------------------
    def recon_grid(self) -> GridSpec:
        return GridSpec(self.extent_lo, self.extent_hi, self.recon_n)

    def data_grid(self) -> GridSpec:
        return GridSpec(self.extent_lo, self.extent_hi, self.data_n)

    def recon_tg(self) -> TimeGrid:
        return TimeGrid(self.t_final, self.n_time_recon)

    def data_tg(self) -> TimeGrid:
        return TimeGrid(self.t_final, self.n_time_data)

    def medium(self) -> Medium:
        c = build_sound_speed(self.recon_grid(), self.sound_speed_preset)
        return Medium(c, self.damping)

    def to_json(self) -> str:
        d = {
            "label": self.label,
            "dim": self.dim,
            "phantom": phantom_to_dict(self.phantom),
            "sound_speed": self.sound_speed_preset,
            "damping": damping_to_dict(self.damping),
            "extent_lo": list(self.extent_lo),
            "extent_hi": list(self.extent_hi),
            "recon_n": list(self.recon_n),
            "data_n": list(self.data_n),
            "t_final": self.t_final,
            "n_time_recon": self.n_time_recon,
            "n_time_data": self.n_time_data,
            "noise_level": self.noise_level,
            "seed": self.seed,
            "methods": list(self.methods),
            "sqh": asdict(self.sqh),
            "init": self.init,
            "cnn_guess": self.cnn_guess,
        }
        return json.dumps(d, indent=1, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "ExperimentConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad config JSON: {exc}") from exc
        try:
            return ExperimentConfig(
                dim=int(d["dim"]),
                phantom=phantom_from_dict(d["phantom"]),
                sound_speed_preset=d["sound_speed"],
                damping=damping_from_dict(d["damping"]),
                extent_lo=tuple(d["extent_lo"]),
                extent_hi=tuple(d["extent_hi"]),
                recon_n=tuple(d["recon_n"]),
                data_n=tuple(d["data_n"]),
                t_final=float(d["t_final"]),
                n_time_recon=int(d["n_time_recon"]),
                n_time_data=int(d["n_time_data"]),
                noise_level=float(d.get("noise_level", 0.1)),
                seed=int(d.get("seed", 12345)),
                methods=tuple(d.get("methods", ["tr", "sqh"])),
                sqh=SqhParams(**d.get("sqh", {})),
                init=d.get("init", "tr"),
                cnn_guess=d.get("cnn_guess"),
                label=d.get("label", "custom"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad config contents: {exc}") from exc

    @staticmethod
    def load(path: str) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                return ExperimentConfig.from_json(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc


def testcase_config(case: int, **overrides) -> ExperimentConfig:
    """Built-in configurations for the six benchmark reconstructions."""
    damping = ExpDecayDamping(1.0)
    if case == 1:
        base = dict(
            dim=1,
            phantom=Gaussian((0.5,), 1.0, 0.25),
            sound_speed_preset="1d",
            label="1d_gaussian",
        )
    elif case == 2:
        base = dict(
            dim=1,
            phantom=Characteristic((-0.2,), 1.0, 0.3),
            sound_speed_preset="1d",
            label="1d_characteristic",
        )
    elif case == 3:
        base = dict(
            dim=1,
            phantom=PhantomSum((Gaussian((0.5,), 0.5, 0.25), Characteristic((-0.2,), 1.0, 0.2))),
            sound_speed_preset="1d",
            label="1d_mixed",
        )
    elif case == 4:
        base = dict(
            dim=2,
            phantom=Gaussian((-0.3, -0.3), 1.0, 0.5),
            sound_speed_preset="2d",
            label="2d_gaussian",
        )
    elif case == 5:
        base = dict(
            dim=2,
            phantom=Disk((-0.2, -0.2), 0.1, 1.0),
            sound_speed_preset="2d",
            label="2d_disk",
        )
    elif case == 6:
        base = dict(
            dim=2,
            phantom=heart_lung_phantom(),
            sound_speed_preset="2d",
            label="2d_heart_lung",
        )
    else:
        raise ConfigError(f"test case must be 1..6, got {case}")
    dim = base["dim"]
    geometry = dict(
        extent_lo=(-1.0,) * dim,
        extent_hi=(1.0,) * dim,
        recon_n=(200,) if dim == 1 else (100, 100),
        data_n=(50,) * dim,
        t_final=1.0 if dim == 1 else 2.0,
        n_time_recon=200,
        n_time_data=50,
        damping=damping,
        # quadrature-weighted regularizers need much smaller weights than
        # plain node sums for the same shrinkage (factor ~ cell volume)
        sqh=SqhParams(alpha=0.01, beta=0.001),
    )
    cfg = dict(base, **geometry)
    cfg.update(overrides)
    return ExperimentConfig(**cfg)


# ---------------------------------------------------------------------------
# test-case runner


def run_testcase(config: ExperimentConfig, out_dir: str) -> dict:
    """Generate data, run every requested method, and write fields + metrics.

    Returns {"metrics": {method: {mse, psnr, ssim}}, "files": {...}}.
    """
    os.makedirs(out_dir, exist_ok=True)
    grid = config.recon_grid()
    medium = config.medium()
    tg = config.recon_tg()
    truth = build_phantom(config.phantom, grid)

    g = generate_observations(
        config.phantom,
        medium,
        config.data_grid(),
        config.data_tg(),
        tg,
        config.noise_level,
        config.seed,
        target_grid=grid,
    )

    files = {}
    write_field(os.path.join(out_dir, "truth.field"), truth, name="truth")
    write_boundary_record(os.path.join(out_dir, "g.field"), g)
    files["truth"] = os.path.join(out_dir, "truth.field")
    files["g"] = os.path.join(out_dir, "g.field")
    with open(os.path.join(out_dir, "config.json"), "w") as fh:
        fh.write(config.to_json())
        fh.write("\n")

    recons: dict[str, ScalarField] = {}
    sqh_run: SqhRun | None = None

    tr_field: ScalarField | None = None
    need_tr = "tr" in config.methods or ("sqh" in config.methods and config.init in ("tr", "tr+cnn"))
    if need_tr:
        tr_field = time_reverse(g, medium, tg, grid)
    if "tr" in config.methods:
        recons["tr"] = tr_field

    if "spectral" in config.methods:
        if not isinstance(config.damping, ConstantDamping):
            raise ConfigError("spectral method requires constant damping")
        recons["spectral"] = reconstruct_series(g, config.damping.gamma, medium, grid)

    cnn_field: ScalarField | None = None
    if config.cnn_guess:
        cnn_field = read_field(config.cnn_guess)
        if cnn_field.grid != grid:
            cnn_field = resample(cnn_field, grid)
    if "cnn" in config.methods:
        recons["cnn"] = cnn_field

    if "sqh" in config.methods:
        if config.init == "zero":
            init = zeros(grid)
        elif config.init == "tr":
            init = tr_field
        else:
            init = tr_field + cnn_field
        params = config.sqh
        init = ScalarField(grid, np.clip(init.values, params.p_lo, params.p_hi))
        sqh_run = sqh_solve(g, medium, params, init)
        recons["sqh"] = sqh_run.final_p0
        sqh_run.write_log(os.path.join(out_dir, "sqh_log.csv"))
        files["sqh_log"] = os.path.join(out_dir, "sqh_log.csv")

    metrics_rows = {}
    for method in config.methods:
        fld = recons[method]
        metrics_rows[method] = {
            "mse": mse(fld, truth),
            "psnr": psnr(fld, truth) if (np.any(fld.values) or np.any(truth.values)) else float("nan"),
            "ssim": ssim(fld, truth),
        }
        path = os.path.join(out_dir, f"recon_{method}.field")
        write_field(path, fld, name=f"recon_{method}")
        files[f"recon_{method}"] = path
        _write_profile(os.path.join(out_dir, f"profile_{method}.dat"), fld)
    _write_profile(os.path.join(out_dir, "profile_truth.dat"), truth)

    metrics_path = os.path.join(out_dir, "metrics.csv")
    with open(metrics_path, "w") as fh:
        fh.write("method,mse,psnr,ssim\n")
        for method in config.methods:
            row = metrics_rows[method]
            fh.write(f"{method},{row['mse']!r},{row['psnr']!r},{row['ssim']!r}\n")
    files["metrics"] = metrics_path

    report = {"metrics": metrics_rows, "files": files}
    if sqh_run is not None:
        report["sqh"] = {
            "converged": sqh_run.converged,
            "iterations": len(sqh_run.accepted_J()),
            "rejections": sqh_run.inner_rejections,
            "final_J": sqh_run.final_J,
            "max_eps": sqh_run.max_eps,
        }
    return report


def _write_profile(path: str, fld: ScalarField) -> None:
    """Gnuplot-ready profile: the field itself in 1D, the center row in 2D."""
    grid = fld.grid
    x = grid.axes()[0]
    if grid.dim == 1:
        vals = fld.values
    else:
        vals = fld.values[:, grid.n_points[1] // 2]
    with open(path, "w") as fh:
        fh.write("# x value\n")
        for xi, vi in zip(x, vals):
            fh.write(f"{xi!r} {vi!r}\n")


# ---------------------------------------------------------------------------
# dataset export for the learned initializer


@dataclass(frozen=True)
class FamilySpec:
    """Sampling rules for one phantom family of the training dataset."""

    name: str
    count: int
    gaussian_center: tuple | None = None  # list of (lo, hi) intervals
    gaussian_invwidth: tuple | None = None
    char_center: tuple | None = None
    char_width: tuple | None = None


def dataset_spec_1d() -> tuple[FamilySpec, ...]:
    return (
        FamilySpec(
            "gaussian",
            150,
            gaussian_center=((-0.5, 0.1), (0.3, 0.7)),
            gaussian_invwidth=((50.0, 70.0), (120.0, 150.0)),
        ),
        FamilySpec("characteristic", 350, char_center=((-0.7, -0.1),), char_width=((0.1, 0.7),)),
        FamilySpec(
            "mixed",
            250,
            gaussian_center=((-0.9, 0.9),),
            gaussian_invwidth=((50.0, 150.0),),
            char_center=((-0.9, 0.9),),
            char_width=((0.1, 0.3),),
        ),
    )


def dataset_spec_2d() -> tuple[FamilySpec, ...]:
    return (
        FamilySpec("gaussian", 150, gaussian_center=((-0.9, 0.9),), gaussian_invwidth=((50.0, 150.0),)),
        FamilySpec("characteristic", 350, char_center=((-0.9, 0.9),), char_width=((0.1, 0.5),)),
        FamilySpec(
            "mixed",
            250,
            gaussian_center=((-0.9, 0.9),),
            gaussian_invwidth=((10.0, 60.0),),
            char_center=((-0.9, 0.9),),
            char_width=((0.1, 0.5),),
        ),
    )


def _draw_from_union(rng: np.random.Generator, intervals) -> float:
    lengths = np.array([hi - lo for lo, hi in intervals])
    idx = rng.choice(len(intervals), p=lengths / lengths.sum()) if len(intervals) > 1 else 0
    lo, hi = intervals[idx]
    return float(rng.uniform(lo, hi))


def _sample_phantom(rng: np.random.Generator, family: FamilySpec, dim: int) -> PhantomSpec:
    parts = []
    if family.gaussian_center is not None:
        center = tuple(_draw_from_union(rng, family.gaussian_center) for _ in range(dim))
        invw = _draw_from_union(rng, family.gaussian_invwidth)
        sigma = math.sqrt(1.0 / (2.0 * invw))  # exp(-w r^2) == exp(-r^2 / (2 sigma^2))
        parts.append(Gaussian(center, 1.0, sigma))
    if family.char_center is not None:
        center = tuple(_draw_from_union(rng, family.char_center) for _ in range(dim))
        width = _draw_from_union(rng, family.char_width)
        parts.append(Characteristic(center, 1.0, width))
    return parts[0] if len(parts) == 1 else PhantomSum(tuple(parts))


def scale_counts(families: tuple[FamilySpec, ...], n_samples: int) -> list[int]:
    total = sum(f.count for f in families)
    counts = [int(round(n_samples * f.count / total)) for f in families]
    counts[-1] += n_samples - sum(counts)
    return counts


def export_training_pairs(
    n_samples: int,
    families: tuple[FamilySpec, ...],
    out_dir: str,
    seed: int,
    *,
    dim: int = 1,
    config: ExperimentConfig | None = None,
) -> dict:
    """Write (boundary data, initial pressure) training pairs plus a manifest.

    Phantoms are drawn per family; boundary data is simulated noiselessly on
    the coarse data grid and interpolated onto the reconstruction sampling,
    mirroring the measurement pipeline. Fully seeded and reproducible.
    """
    if config is None:
        config = testcase_config(1 if dim == 1 else 4)
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(seed)
    grid = config.recon_grid()
    medium = config.medium()
    tg = config.recon_tg()
    counts = scale_counts(families, n_samples)

    manifest = {
        "seed": seed,
        "dim": dim,
        "n_samples": n_samples,
        "recon_n": list(config.recon_n),
        "data_n": list(config.data_n),
        "t_final": config.t_final,
        "n_time_recon": config.n_time_recon,
        "n_time_data": config.n_time_data,
        "samples": [],
    }
    idx = 0
    for family, count in zip(families, counts):
        for _ in range(count):
            spec = _sample_phantom(rng, family, dim)
            truth = build_phantom(spec, grid)
            g = generate_observations(
                spec,
                medium,
                config.data_grid(),
                config.data_tg(),
                tg,
                noise_level=0.0,
                seed=0,
                target_grid=grid,
            )
            g_path = os.path.join(out_dir, f"sample_{idx:04d}_g.field")
            p_path = os.path.join(out_dir, f"sample_{idx:04d}_p0.field")
            write_boundary_record(g_path, g)
            write_field(p_path, truth, name="p0")
            manifest["samples"].append(
                {
                    "index": idx,
                    "family": family.name,
                    "phantom": phantom_to_dict(spec),
                    "g_file": os.path.basename(g_path),
                    "p0_file": os.path.basename(p_path),
                }
            )
            idx += 1
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return manifest
