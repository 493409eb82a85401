"""CLI: `train --dataset DIR --out MODEL` and `predict --model M --data G --out GUESS`."""

from __future__ import annotations

import argparse
import os
import sys

from .data import load_dataset
from .fieldfile import FieldFileError
from .predict import predict_guess
from .training import TrainSettings, save_model, train_model, write_history


def _cmd_train(args) -> int:
    dataset = load_dataset(args.dataset)
    settings = TrainSettings(epochs=args.epochs, batch_size=args.batch_size, seed=args.seed)
    model, result = train_model(dataset, settings)
    save_model(args.out, model, dataset, settings)
    history_path = args.loss_history or (os.path.splitext(args.out)[0] + "_loss.csv")
    write_history(history_path, result.history)
    print(
        f"trained {settings.epochs} epochs on {dataset.n_samples} samples: "
        f"loss {result.first_train_loss:.4e} -> {result.final_train_loss:.4e} "
        f"({result.loss_reduction:.2%} of epoch 1)"
    )
    print(f"model: {args.out}\nloss history: {history_path}")
    return 0


def _cmd_predict(args) -> int:
    predict_guess(args.model, args.data, args.out, clamp=(args.clamp[0], args.clamp[1]))
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cnn-init", description="Learned initial guesses for damped-wave reconstruction")
    sub = p.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="train on an exported (g, p0) dataset")
    tr.add_argument("--dataset", required=True, help="directory with manifest.json")
    tr.add_argument("--out", required=True, help="model file to write")
    tr.add_argument("--epochs", type=int, default=500)
    tr.add_argument("--batch-size", type=int, default=32)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--loss-history", help="CSV path (default: <model>_loss.csv)")
    tr.set_defaults(func=_cmd_train)

    pr = sub.add_parser("predict", help="map one boundary record to a guess field")
    pr.add_argument("--model", required=True)
    pr.add_argument("--data", required=True, help="boundary record field file")
    pr.add_argument("--out", required=True, help="guess field file to write")
    pr.add_argument("--clamp", type=float, nargs=2, default=(0.0, 2.0), metavar=("LO", "HI"))
    pr.set_defaults(func=_cmd_predict)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FieldFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
