"""Training loop: Adam on the Huber loss, fixed split, seeded and reproducible."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .data import PairDataset
from .model import BoundaryToPressureNet


@dataclass(frozen=True)
class TrainSettings:
    epochs: int = 500
    batch_size: int = 32
    learning_rate: float = 1e-3
    huber_delta: float = 1.0
    val_fraction: float = 0.1
    seed: int = 0


@dataclass
class TrainResult:
    history: list[dict]
    final_train_loss: float
    first_train_loss: float

    @property
    def loss_reduction(self) -> float:
        return self.final_train_loss / self.first_train_loss


def train_model(dataset: PairDataset, settings: TrainSettings) -> tuple[BoundaryToPressureNet, TrainResult]:
    torch.manual_seed(settings.seed)
    rng = np.random.default_rng(settings.seed)
    n = dataset.n_samples
    perm = rng.permutation(n)
    n_val = int(round(n * settings.val_fraction)) if n > 1 else 0
    val_idx, train_idx = perm[:n_val], perm[n_val:]

    X = torch.from_numpy(dataset.inputs)
    Y = torch.from_numpy(dataset.targets)
    model = BoundaryToPressureNet(X.shape[1], X.shape[2], Y.shape[1])
    opt = torch.optim.Adam(model.parameters(), lr=settings.learning_rate)
    loss_fn = nn.HuberLoss(delta=settings.huber_delta)

    history = []
    for epoch in range(settings.epochs):
        model.train()
        order = rng.permutation(train_idx)
        losses = []
        for start in range(0, len(order), settings.batch_size):
            idx = torch.from_numpy(order[start : start + settings.batch_size].copy())
            opt.zero_grad()
            pred = model(X[idx])
            loss = loss_fn(pred, Y[idx])
            loss.backward()
            opt.step()
            losses.append(float(loss.detach()))
        train_loss = float(np.mean(losses))
        if n_val:
            model.eval()
            with torch.no_grad():
                val_loss = float(loss_fn(model(X[val_idx]), Y[val_idx]))
        else:
            val_loss = float("nan")
        history.append({"epoch": epoch + 1, "train_loss": train_loss, "val_loss": val_loss})
        if not np.isfinite(train_loss):
            raise RuntimeError(f"training loss diverged at epoch {epoch + 1}")
    result = TrainResult(
        history=history,
        final_train_loss=history[-1]["train_loss"],
        first_train_loss=history[0]["train_loss"],
    )
    return model, result


def save_model(path: str, model: BoundaryToPressureNet, dataset: PairDataset, settings: TrainSettings) -> None:
    torch.save(
        {
            "state_dict": model.state_dict(),
            "meta": {
                "n_sensors": model.n_sensors,
                "n_times": model.n_times,
                "n_out": model.n_out,
                "grid_shape": list(dataset.grid_shape),
                "extent_lo": list(dataset.extent_lo),
                "extent_hi": list(dataset.extent_hi),
                "settings": settings.__dict__,
            },
        },
        path,
    )


def load_model(path: str) -> tuple[BoundaryToPressureNet, dict]:
    blob = torch.load(path, map_location="cpu", weights_only=False)
    meta = blob["meta"]
    model = BoundaryToPressureNet(meta["n_sensors"], meta["n_times"], meta["n_out"])
    model.load_state_dict(blob["state_dict"])
    model.eval()
    return model, meta


def write_history(path: str, history: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["epoch", "train_loss", "val_loss"])
        writer.writeheader()
        writer.writerows(history)
