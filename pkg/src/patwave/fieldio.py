"""Bit-exact field files: a JSON header plus a sibling raw float64 payload.

Header (JSON, parseable standalone):
    {"field_name": ..., "dtype": "f64le", "shape": [...],
     "extent_lo": [...], "extent_hi": [...], "payload": "<basename>"}
Payload: little-endian 64-bit floats, row-major, in the sibling file; its
size must equal 8 * prod(shape) bytes. read(write(f)) round-trips bit-exactly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryRecord, boundary_points, n_boundary_nodes
from .errors import ConfigError
from .fields import ScalarField
from .grids import GridSpec, TimeGrid

DTYPE_TAG = "f64le"


@dataclass(frozen=True)
class FieldFile:
    """Parsed header plus payload array of one field file."""

    field_name: str
    shape: tuple[int, ...]
    extent_lo: tuple[float, ...]
    extent_hi: tuple[float, ...]
    values: np.ndarray


def _payload_path(header_path: str) -> str:
    return header_path + ".bin"


def write_array(path: str, values: np.ndarray, extent_lo, extent_hi, name: str = "field") -> None:
    values = np.ascontiguousarray(values, dtype="<f8")
    header = {
        "field_name": name,
        "dtype": DTYPE_TAG,
        "shape": list(values.shape),
        "extent_lo": [float(v) for v in np.atleast_1d(extent_lo)],
        "extent_hi": [float(v) for v in np.atleast_1d(extent_hi)],
        "payload": os.path.basename(_payload_path(path)),
    }
    with open(path, "w") as fh:
        json.dump(header, fh, indent=1)
        fh.write("\n")
    with open(_payload_path(path), "wb") as fh:
        fh.write(values.tobytes(order="C"))


def read_array(path: str) -> FieldFile:
    try:
        with open(path) as fh:
            header = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"malformed field header {path}: {exc}") from exc
    for key in ("field_name", "dtype", "shape", "extent_lo", "extent_hi", "payload"):
        if key not in header:
            raise ConfigError(f"field header {path} missing key {key!r}")
    if header["dtype"] != DTYPE_TAG:
        raise ConfigError(f"unsupported dtype {header['dtype']!r} in {path}")
    shape = tuple(int(n) for n in header["shape"])
    payload = os.path.join(os.path.dirname(os.path.abspath(path)), header["payload"])
    try:
        raw = open(payload, "rb").read()
    except OSError as exc:
        raise ConfigError(f"cannot read payload for {path}: {exc}") from exc
    expected = 8 * int(np.prod(shape))
    if len(raw) != expected:
        raise ConfigError(f"payload size mismatch for {path}: {len(raw)} bytes, expected {expected}")
    values = np.frombuffer(raw, dtype="<f8").reshape(shape)
    return FieldFile(
        field_name=str(header["field_name"]),
        shape=shape,
        extent_lo=tuple(float(v) for v in header["extent_lo"]),
        extent_hi=tuple(float(v) for v in header["extent_hi"]),
        values=values,
    )


def write_field(path: str, field: ScalarField, name: str = "field") -> None:
    write_array(path, field.values, field.grid.extent_lo, field.grid.extent_hi, name=name)


def read_field(path: str) -> ScalarField:
    ff = read_array(path)
    grid = GridSpec(ff.extent_lo, ff.extent_hi, ff.shape)
    return ScalarField(grid, ff.values)


def write_boundary_record(path: str, record: BoundaryRecord, name: str = "g") -> None:
    """Boundary records stored as [sensor, time] arrays; extents carry (count-1, T)."""
    write_array(
        path,
        record.values,
        extent_lo=[0.0, 0.0],
        extent_hi=[float(record.n_sensors - 1), record.times.t_final],
        name=name,
    )


def read_boundary_record(path: str, grid: GridSpec) -> BoundaryRecord:
    ff = read_array(path)
    if len(ff.shape) != 2:
        raise ConfigError(f"{path} does not hold a boundary record")
    n_sensors, n_times = ff.shape
    if n_sensors != n_boundary_nodes(grid):
        raise ConfigError(
            f"{path}: {n_sensors} sensors but the grid has {n_boundary_nodes(grid)} boundary nodes"
        )
    tg = TimeGrid(ff.extent_hi[1], n_times)
    return BoundaryRecord(boundary_points(grid), tg, ff.values)
