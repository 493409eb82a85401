"""Dataset loading from the manifest written by the toolkit's dataset exporter."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .fieldfile import FieldFileError, read


@dataclass(frozen=True)
class PairDataset:
    """Boundary records and matching initial pressures, as stacked arrays."""

    inputs: np.ndarray  # [n, sensors, times]
    targets: np.ndarray  # [n, grid nodes]
    grid_shape: tuple[int, ...]
    extent_lo: tuple[float, ...]
    extent_hi: tuple[float, ...]

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]


def load_dataset(dataset_dir: str) -> PairDataset:
    manifest_path = os.path.join(dataset_dir, "manifest.json")
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FieldFileError(f"cannot read manifest {manifest_path}: {exc}") from exc
    samples = manifest.get("samples", [])
    if not samples:
        raise FieldFileError("manifest lists no samples")
    inputs, targets = [], []
    grid_shape = extent_lo = extent_hi = None
    for rec in samples:
        g = read(os.path.join(dataset_dir, rec["g_file"]))
        p0 = read(os.path.join(dataset_dir, rec["p0_file"]))
        if grid_shape is None:
            grid_shape = p0.shape
            extent_lo, extent_hi = p0.extent_lo, p0.extent_hi
        elif p0.shape != grid_shape:
            raise FieldFileError(f"inconsistent target shape in sample {rec['index']}")
        inputs.append(g.values)
        targets.append(p0.values.ravel())
    return PairDataset(
        inputs=np.stack(inputs).astype(np.float32),
        targets=np.stack(targets).astype(np.float32),
        grid_shape=grid_shape,
        extent_lo=extent_lo,
        extent_hi=extent_hi,
    )
