"""Shared fixtures: experiment CSVs produced by the lab's own CLI.

The renderer talks to the experiment harness only through CSV files, so the
fixture shells out to the ``sparsebandit`` command instead of importing it.
"""

import subprocess
import sys

import pytest

ELLIPSOID_CONFIG = """\
[experiment]
name = fixture
mode = greedy_lock
trials = 20
horizon = 2000
seed = 7
delta = 0.1
sigma = 0.5

[geometry]
kind = ellipsoid
dim = 20
sparsity = 5
matrix_seed = 11
matrix_eig_low = 0.9

[theta]
source = uniform

[alpha]
source = value
value = 0.5934303402594009
"""


@pytest.fixture(scope="session")
def ellipsoid_csvs(tmp_path_factory):
    root = tmp_path_factory.mktemp("fixture_run")
    cfg = root / "ellipsoid.cfg"
    cfg.write_text(ELLIPSOID_CONFIG)
    out = root / "csv"
    proc = subprocess.run(
        [sys.executable, "-m", "sparsebandit.cli", "run", str(cfg), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        pytest.fail(f"fixture experiment failed:\n{proc.stdout}\n{proc.stderr}")
    return out
