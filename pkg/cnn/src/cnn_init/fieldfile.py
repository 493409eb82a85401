"""Reader/writer for the field-file container used by the reconstruction toolkit.

A field file is a JSON header (field_name, dtype "f64le", shape, extent_lo,
extent_hi, payload) plus a sibling binary file of row-major little-endian
float64 values, exactly 8 * prod(shape) bytes. Implemented here independently
so this package couples to the primary toolkit only through the documented
format.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np


class FieldFileError(ValueError):
    pass


@dataclass(frozen=True)
class FieldFile:
    field_name: str
    shape: tuple[int, ...]
    extent_lo: tuple[float, ...]
    extent_hi: tuple[float, ...]
    values: np.ndarray


def read(path: str) -> FieldFile:
    try:
        with open(path) as fh:
            header = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FieldFileError(f"malformed field header {path}: {exc}") from exc
    if header.get("dtype") != "f64le":
        raise FieldFileError(f"unsupported dtype in {path}")
    shape = tuple(int(n) for n in header["shape"])
    payload = os.path.join(os.path.dirname(os.path.abspath(path)), header["payload"])
    raw = open(payload, "rb").read()
    if len(raw) != 8 * int(np.prod(shape)):
        raise FieldFileError(f"payload size mismatch for {path}")
    values = np.frombuffer(raw, dtype="<f8").reshape(shape)
    return FieldFile(
        field_name=str(header.get("field_name", "field")),
        shape=shape,
        extent_lo=tuple(float(v) for v in header["extent_lo"]),
        extent_hi=tuple(float(v) for v in header["extent_hi"]),
        values=values,
    )


def write(path: str, values: np.ndarray, extent_lo, extent_hi, name: str = "field") -> None:
    values = np.ascontiguousarray(values, dtype="<f8")
    header = {
        "field_name": name,
        "dtype": "f64le",
        "shape": list(values.shape),
        "extent_lo": [float(v) for v in np.atleast_1d(extent_lo)],
        "extent_hi": [float(v) for v in np.atleast_1d(extent_hi)],
        "payload": os.path.basename(path) + ".bin",
    }
    with open(path, "w") as fh:
        json.dump(header, fh, indent=1)
        fh.write("\n")
    with open(path + ".bin", "wb") as fh:
        fh.write(values.tobytes(order="C"))
