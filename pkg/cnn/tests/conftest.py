import json
import subprocess
import sys

import numpy as np
import pytest

PRIMARY = [sys.executable, "-m", "patwave"]


def run_primary(*args, check=True):
    proc = subprocess.run(PRIMARY + list(args), capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"primary CLI failed ({proc.returncode}): {proc.stderr}")
    return proc


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """A 12-sample down-scaled dataset generated through the primary CLI."""
    root = tmp_path_factory.mktemp("dataset")
    cfg = {
        "label": "tiny",
        "dim": 1,
        "phantom": {"kind": "gaussian", "center": [0.5], "peak": 1.0, "sigma": 0.25},
        "sound_speed": "1d",
        "damping": {"kind": "exp_decay", "scale": 1.0},
        "extent_lo": [-1.0],
        "extent_hi": [1.0],
        "recon_n": [60],
        "data_n": [30],
        "t_final": 1.0,
        "n_time_recon": 60,
        "n_time_data": 30,
        "noise_level": 0.1,
        "seed": 7,
        "methods": ["tr", "sqh"],
        "init": "tr",
        "cnn_guess": None,
    }
    cfg_path = root / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = root / "ds"
    run_primary("gen-dataset", "--dim", "1", "--n", "12", "--seed", "3", "--config", str(cfg_path), "--out", str(out))
    return out
