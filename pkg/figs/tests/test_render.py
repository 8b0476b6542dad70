import json
from pathlib import Path

import numpy as np
import pytest

from sbmfigs import (KINDS, MissingRun, SchemaMismatch, eigen_series_gap,
                     load_run, render)
from sbmfigs.cli import main
from sbmfigs.render import SERIES
from sbmfigs.store import _parse_profile


def test_missing_run_rejected(tmp_path):
    with pytest.raises(MissingRun):
        load_run(tmp_path, "deadbeef")


def test_profile_parser_rejects_bad_header():
    with pytest.raises(SchemaMismatch):
        _parse_profile("x,value\n0,1\n")
    with pytest.raises(SchemaMismatch):
        _parse_profile("# label=p,x_min=0,x_max=1,n_points=5\nx,value\n0,1\n")


def test_all_kinds_render(pipeline_store, tmp_path):
    root, run_id = pipeline_store
    run = load_run(root, run_id)
    for kind in KINDS:
        path = render(run, kind, tmp_path)
        assert path.exists() and path.stat().st_size > 0


def test_rendering_is_pure(pipeline_store):
    root, run_id = pipeline_store
    run = load_run(root, run_id)
    for kind in KINDS:
        a = SERIES[kind](run)
        b = SERIES[kind](run)
        assert sorted(a) == sorted(b)
        for key in a:
            assert np.array_equal(a[key][0], b[key][0])
            assert np.array_equal(a[key][1], b[key][1])


def test_eigen_overlay_gap(pipeline_store):
    # the plotted ground state and the closed-form reference must agree
    root, run_id = pipeline_store
    run = load_run(root, run_id)
    gap = eigen_series_gap(run)
    assert gap <= 2e-2


def test_cli_renders_all(pipeline_store, tmp_path):
    root, run_id = pipeline_store
    rc = main(["--store", str(root), "--run", run_id, "--kind", "all",
               "--out", str(tmp_path), "--fmt", "svg"])
    assert rc == 0
    files = list(Path(tmp_path).glob("*.svg"))
    assert len(files) == len(KINDS)


def test_cli_unknown_kind_usage_error(pipeline_store, tmp_path):
    root, run_id = pipeline_store
    assert main(["--store", str(root), "--run", run_id,
                 "--kind", "nonsense"]) == 2


def test_cli_missing_run_is_error(tmp_path):
    assert main(["--store", str(tmp_path), "--run", "nope"]) == 1
