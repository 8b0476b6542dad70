"""The figure tests consume a real pipeline run through the store files
only; the run is produced once per session by the sbmlab CLI."""
import subprocess
import sys

import pytest


@pytest.fixture(scope="session")
def pipeline_store(tmp_path_factory):
    root = tmp_path_factory.mktemp("store")
    proc = subprocess.run(
        [sys.executable, "-m", "sbmlab.cli", "--out", str(root), "--seed", "3",
         "pipeline"],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    run_id = proc.stdout.split("run ")[1].split(" ")[0]
    return root, run_id
