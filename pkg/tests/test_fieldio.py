import json
import os

import numpy as np
import pytest

from patwave import (
    BoundaryRecord,
    ConfigError,
    GridSpec,
    ScalarField,
    TimeGrid,
    read_boundary_record,
    read_field,
    write_boundary_record,
    write_field,
)
from patwave.boundary import boundary_points, n_boundary_nodes


def test_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    grid = GridSpec((-1.0, -1.0), (1.0, 1.0), (17, 23))
    f = ScalarField(grid, rng.standard_normal(grid.shape))
    path = str(tmp_path / "f.field")
    write_field(path, f, name="truth")
    back = read_field(path)
    assert back.grid == grid
    assert np.array_equal(back.values, f.values)
    assert back.values.tobytes() == f.values.tobytes()


def test_header_is_standalone_json(tmp_path):
    grid = GridSpec((-1.0,), (1.0,), (100,))
    path = str(tmp_path / "g.field")
    write_field(path, ScalarField(grid, np.zeros(100)))
    header = json.loads(open(path).read())
    assert header["shape"] == [100]
    assert header["dtype"] == "f64le"
    assert header["extent_lo"] == [-1.0]
    assert header["extent_hi"] == [1.0]
    assert os.path.exists(os.path.join(os.path.dirname(path), header["payload"]))


def test_grid_reconstructed_from_header(tmp_path):
    grid = GridSpec((-1.0, -1.0), (1.0, 1.0), (100, 100))
    path = str(tmp_path / "sq.field")
    write_field(path, ScalarField(grid, np.zeros((100, 100))))
    assert read_field(path).grid == grid


def test_truncated_payload_rejected(tmp_path):
    grid = GridSpec((-1.0,), (1.0,), (50,))
    path = str(tmp_path / "t.field")
    write_field(path, ScalarField(grid, np.ones(50)))
    payload = path + ".bin"
    data = open(payload, "rb").read()
    open(payload, "wb").write(data[:-8])
    with pytest.raises(ConfigError, match="size mismatch"):
        read_field(path)


def test_malformed_header_rejected(tmp_path):
    path = str(tmp_path / "bad.field")
    open(path, "w").write("{not json")
    with pytest.raises(ConfigError, match="malformed"):
        read_field(path)


def test_missing_key_rejected(tmp_path):
    path = str(tmp_path / "bad2.field")
    open(path, "w").write(json.dumps({"field_name": "x"}))
    with pytest.raises(ConfigError, match="missing key"):
        read_field(path)


def test_boundary_record_round_trip(tmp_path):
    grid = GridSpec((-1.0, -1.0), (1.0, 1.0), (12, 12))
    tg = TimeGrid(2.0, 37)
    rng = np.random.default_rng(5)
    rec = BoundaryRecord(boundary_points(grid), tg, rng.standard_normal((n_boundary_nodes(grid), 37)))
    path = str(tmp_path / "rec.field")
    write_boundary_record(path, rec)
    back = read_boundary_record(path, grid)
    assert np.array_equal(back.values, rec.values)
    assert back.times.t_final == tg.t_final
    assert back.times.n_steps == tg.n_steps


def test_boundary_record_wrong_grid(tmp_path):
    grid = GridSpec((-1.0,), (1.0,), (20,))
    tg = TimeGrid(1.0, 10)
    rec = BoundaryRecord(boundary_points(grid), tg, np.zeros((2, 10)))
    path = str(tmp_path / "rec1.field")
    write_boundary_record(path, rec)
    grid2 = GridSpec((-1.0, -1.0), (1.0, 1.0), (8, 8))
    with pytest.raises(ConfigError):
        read_boundary_record(path, grid2)
