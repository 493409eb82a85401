"""Command-line entry points for simulation, reconstruction, metrics, and datasets.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .errors import BlowUpError, CflError, ConfigError, EigenSolverError, OptimizerAbort, PatwaveError
from .experiment import (
    ExperimentConfig,
    dataset_spec_1d,
    dataset_spec_2d,
    export_training_pairs,
    run_testcase,
    testcase_config,
)
from .fieldio import read_boundary_record, read_field, write_boundary_record, write_field
from .fields import ScalarField, resample, zeros
from .forward import generate_observations
from .media import ConstantDamping
from .metrics import mse, psnr, ssim
from .phantoms import build_phantom
from .spectral import reconstruct_series
from .sqh import sqh_solve
from .timereversal import time_reverse

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; those are config errors here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _load_config(args) -> ExperimentConfig:
    if getattr(args, "case", None):
        overrides = {}
        if getattr(args, "seed", None) is not None:
            overrides["seed"] = args.seed
        cfg = testcase_config(args.case, **overrides)
    elif getattr(args, "config", None):
        cfg = ExperimentConfig.load(args.config)
        if getattr(args, "seed", None) is not None:
            from dataclasses import replace

            cfg = replace(cfg, seed=args.seed)
    else:
        raise ConfigError("either --case or --config is required")
    return cfg


def _cmd_simulate(args) -> int:
    cfg = _load_config(args)
    os.makedirs(args.out, exist_ok=True)
    grid = cfg.recon_grid()
    truth = build_phantom(cfg.phantom, grid)
    g = generate_observations(
        cfg.phantom, cfg.medium(), cfg.data_grid(), cfg.data_tg(), cfg.recon_tg(),
        cfg.noise_level, cfg.seed, target_grid=grid,
    )
    write_field(os.path.join(args.out, "truth.field"), truth, name="truth")
    write_boundary_record(os.path.join(args.out, "g.field"), g)
    with open(os.path.join(args.out, "config.json"), "w") as fh:
        fh.write(cfg.to_json())
        fh.write("\n")
    print(f"wrote {args.out}/truth.field and {args.out}/g.field")
    return EXIT_OK


def _cmd_reconstruct(args) -> int:
    cfg = _load_config(args)
    grid = cfg.recon_grid()
    medium = cfg.medium()
    tg = cfg.recon_tg()
    g = read_boundary_record(args.g, grid)
    os.makedirs(args.out, exist_ok=True)
    if args.method == "tr":
        recon = time_reverse(g, medium, tg, grid)
    elif args.method == "spectral":
        if not isinstance(cfg.damping, ConstantDamping):
            raise ConfigError("spectral reconstruction requires constant damping")
        recon = reconstruct_series(g, cfg.damping.gamma, medium, grid)
    else:
        if args.init and args.init != "zero":
            init = read_field(args.init)
            if init.grid != grid:
                init = resample(init, grid)
            init = ScalarField(grid, np.clip(init.values, cfg.sqh.p_lo, cfg.sqh.p_hi))
        elif cfg.init == "tr" and not args.init:
            tr = time_reverse(g, medium, tg, grid)
            init = ScalarField(grid, np.clip(tr.values, cfg.sqh.p_lo, cfg.sqh.p_hi))
        else:
            init = zeros(grid)
        run = sqh_solve(g, medium, cfg.sqh, init)
        run.write_log(os.path.join(args.out, "sqh_log.csv"))
        recon = run.final_p0
        print(f"sqh: {len(run.accepted_J())} accepted steps, converged={run.converged}, J={run.final_J!r}")
    out_path = os.path.join(args.out, f"recon_{args.method}.field")
    write_field(out_path, recon, name=f"recon_{args.method}")
    print(f"wrote {out_path}")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    a = read_field(args.truth)
    b = read_field(args.recon)
    line = f"mse,{mse(b, a)!r}\npsnr,{psnr(b, a)!r}\nssim,{ssim(b, a)!r}"
    print(line)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("metric,value\n")
            fh.write(line + "\n")
    return EXIT_OK


def _cmd_gen_dataset(args) -> int:
    families = dataset_spec_1d() if args.dim == 1 else dataset_spec_2d()
    cfg = None
    if args.config:
        cfg = ExperimentConfig.load(args.config)
    manifest = export_training_pairs(args.n, families, args.out, args.seed, dim=args.dim, config=cfg)
    print(f"wrote {len(manifest['samples'])} pairs to {args.out}")
    return EXIT_OK


def _cmd_run_testcase(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.kmax is not None:
        from .sqh import SqhParams

        base = testcase_config(args.case)
        overrides["sqh"] = SqhParams(**{**base.sqh.__dict__, "k_max": args.kmax})
    if args.cnn_guess:
        overrides["cnn_guess"] = args.cnn_guess
        overrides["init"] = "tr+cnn"
        base_methods = testcase_config(args.case).methods
        if "cnn" not in base_methods:
            overrides["methods"] = tuple(base_methods) + ("cnn",)
    cfg = testcase_config(args.case, **overrides)
    report = run_testcase(cfg, args.out)
    print("method,mse,psnr,ssim")
    for method, row in report["metrics"].items():
        print(f"{method},{row['mse']!r},{row['psnr']!r},{row['ssim']!r}")
    return EXIT_OK


def _cmd_combine_guess(args) -> int:
    a = read_field(args.field_a)
    b = read_field(args.field_b)
    if a.grid != b.grid:
        b = resample(b, a.grid)
    out = ScalarField(a.grid, a.values + b.values)
    if args.clamp is not None:
        lo, hi = args.clamp
        out = ScalarField(a.grid, np.clip(out.values, lo, hi))
    write_field(args.out, out, name="guess")
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="patwave", description="Damped-wave photoacoustic reconstruction toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate boundary data for a config or test case")
    sim.add_argument("--config", help="experiment config JSON")
    sim.add_argument("--case", type=int, choices=range(1, 7), help="built-in test case")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=_cmd_simulate)

    rec = sub.add_parser("reconstruct", help="run one reconstruction method on recorded data")
    rec.add_argument("--method", required=True, choices=["tr", "spectral", "sqh"])
    rec.add_argument("--config", help="experiment config JSON")
    rec.add_argument("--case", type=int, choices=range(1, 7))
    rec.add_argument("--seed", type=int)
    rec.add_argument("--g", required=True, help="boundary record field file")
    rec.add_argument("--init", help="initial-guess field file for sqh, or 'zero'")
    rec.add_argument("--out", required=True)
    rec.set_defaults(func=_cmd_reconstruct)

    met = sub.add_parser("metrics", help="MSE/PSNR/SSIM between two field files")
    met.add_argument("--truth", required=True)
    met.add_argument("--recon", required=True)
    met.add_argument("--csv", help="also write metric,value rows here")
    met.set_defaults(func=_cmd_metrics)

    gen = sub.add_parser("gen-dataset", help="export (g, p0) training pairs with a manifest")
    gen.add_argument("--dim", type=int, default=1, choices=[1, 2])
    gen.add_argument("--n", type=int, default=750)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--config", help="override the geometry config")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen_dataset)

    run = sub.add_parser("run-testcase", help="full pipeline for one built-in test case")
    run.add_argument("--case", type=int, required=True, choices=range(1, 7))
    run.add_argument("--seed", type=int)
    run.add_argument("--kmax", type=int, help="cap SQH iterations")
    run.add_argument("--cnn-guess", help="field file with a learned initial guess")
    run.add_argument("--out", required=True)
    run.set_defaults(func=_cmd_run_testcase)

    comb = sub.add_parser("combine-guess", help="pointwise sum of two field files")
    comb.add_argument("field_a")
    comb.add_argument("field_b")
    comb.add_argument("--clamp", type=float, nargs=2, metavar=("LO", "HI"))
    comb.add_argument("--out", required=True)
    comb.set_defaults(func=_cmd_combine_guess)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CflError, BlowUpError, EigenSolverError, OptimizerAbort) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PatwaveError as exc:  # pragma: no cover - catch-all for new subtypes
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
