"""Inference: boundary record in, clamped initial-pressure guess out."""

from __future__ import annotations

import numpy as np
import torch

from .fieldfile import FieldFileError, read, write
from .training import load_model


def predict_guess(model_path: str, g_path: str, out_path: str, clamp=(0.0, 2.0)) -> np.ndarray:
    """Run the network on one boundary record and export the guess field.

    Values are clamped into the admissible box before export (the linear
    output layer is unbounded).
    """
    model, meta = load_model(model_path)
    g = read(g_path)
    if tuple(g.shape) != (meta["n_sensors"], meta["n_times"]):
        raise FieldFileError(
            f"boundary record shape {g.shape} does not match the training layout "
            f"({meta['n_sensors']}, {meta['n_times']})"
        )
    with torch.no_grad():
        x = torch.from_numpy(np.ascontiguousarray(g.values, dtype=np.float32)).unsqueeze(0)
        pred = model(x).squeeze(0).numpy().astype(np.float64)
    lo, hi = clamp
    guess = np.clip(pred.reshape(tuple(meta["grid_shape"])), lo, hi)
    write(out_path, guess, meta["extent_lo"], meta["extent_hi"], name="cnn_guess")
    return guess
