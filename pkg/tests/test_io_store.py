import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbmlab.errors import CollisionError, CorruptManifest, SchemaMismatch
from sbmlab.grid import GridFunction
from sbmlab.io_store import (RunManifest, Table, canonical_config_text,
                             grid_function_from_csv, grid_function_to_csv,
                             read_run, run_id_for, write_run)


def sample_artifacts():
    gf = GridFunction(-1.0, 1.0, 5, np.array([0.0, 0.5, 1.0, 0.5, 0.0]),
                      label="demo")
    return {
        "profile": gf,
        "table": Table(columns=["a", "b"], rows=[[1.0, 2.0], [3.0, 4.5]]),
        "summary": {"alpha": 0.5, "note": "hello"},
        "log": "plain text artifact",
    }


def test_run_id_stable_under_reordering():
    a = {"x": 1, "y": [1, 2], "z": {"k": 2.5}}
    b = {"z": {"k": 2.5}, "y": [1, 2], "x": 1}
    assert run_id_for(a) == run_id_for(b)
    assert canonical_config_text(a) == canonical_config_text(b)


def test_run_id_changes_with_seed():
    assert run_id_for({"seed": 1}) != run_id_for({"seed": 2})


def test_roundtrip(tmp_path):
    cfg = {"subcommand": "demo", "seed": 9, "x": 2.5}
    manifest = RunManifest.for_config(cfg, seed=9)
    path = write_run(manifest, sample_artifacts(), tmp_path)
    man2, arts = read_run(path)
    assert man2.run_id == manifest.run_id
    assert man2.config == cfg
    assert man2.seed == 9
    assert isinstance(arts["profile"], GridFunction)
    assert np.allclose(arts["profile"].values, [0.0, 0.5, 1.0, 0.5, 0.0])
    assert arts["profile"].label == "demo"
    assert arts["table"].columns == ["a", "b"]
    assert arts["summary"]["alpha"] == 0.5
    assert arts["log"] == "plain text artifact"


def test_idempotent_rewrite(tmp_path):
    cfg = {"subcommand": "demo", "seed": 1}
    m1 = RunManifest.for_config(cfg, seed=1)
    p1 = write_run(m1, sample_artifacts(), tmp_path)
    first = (p1 / "manifest.json").read_bytes()
    m2 = RunManifest.for_config(cfg, seed=1)
    p2 = write_run(m2, sample_artifacts(), tmp_path)
    assert p1 == p2
    assert (p2 / "manifest.json").read_bytes() == first


def test_collision_on_changed_content(tmp_path):
    cfg = {"subcommand": "demo", "seed": 1}
    write_run(RunManifest.for_config(cfg, seed=1), sample_artifacts(), tmp_path)
    arts = sample_artifacts()
    arts["summary"] = {"alpha": 0.75}
    with pytest.raises(CollisionError):
        write_run(RunManifest.for_config(cfg, seed=1), arts, tmp_path)


def test_truncated_artifact_detected(tmp_path):
    cfg = {"subcommand": "demo", "seed": 4}
    path = write_run(RunManifest.for_config(cfg, seed=4), sample_artifacts(),
                     tmp_path)
    target = path / "profile.csv"
    blob = target.read_bytes()
    target.write_bytes(blob[: len(blob) // 2])
    with pytest.raises(CorruptManifest) as err:
        read_run(path)
    assert err.value.offset is not None


def test_bad_manifest_json_reports_offset(tmp_path):
    cfg = {"subcommand": "demo", "seed": 5}
    path = write_run(RunManifest.for_config(cfg, seed=5), sample_artifacts(),
                     tmp_path)
    man = path / "manifest.json"
    man.write_bytes(man.read_bytes()[:-30])
    with pytest.raises(CorruptManifest):
        read_run(path)


def test_extra_fields_preserved(tmp_path):
    cfg = {"subcommand": "demo", "seed": 6}
    path = write_run(RunManifest.for_config(cfg, seed=6), sample_artifacts(),
                     tmp_path)
    man = path / "manifest.json"
    doc = json.loads(man.read_text())
    doc["annotation"] = {"review": "keep me"}
    man.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    manifest, arts = read_run(path)
    assert manifest.extra["annotation"] == {"review": "keep me"}
    # rewriting the same content into a fresh store keeps the extras
    out = write_run(manifest, arts, tmp_path / "other")
    again, _ = read_run(out)
    assert again.extra["annotation"] == {"review": "keep me"}


def test_empty_artifact_list_ok(tmp_path):
    cfg = {"subcommand": "empty", "seed": 0}
    path = write_run(RunManifest.for_config(cfg, seed=0), {}, tmp_path)
    manifest, arts = read_run(path)
    assert arts == {}
    assert manifest.artifact_paths == []


def test_profile_csv_schema_errors():
    with pytest.raises(SchemaMismatch):
        grid_function_from_csv("x,value\n0,1\n")
    gf = GridFunction(0.0, 1.0, 3, np.array([1.0, 2.0, 3.0]), label="p")
    text = grid_function_to_csv(gf, "rid")
    broken = text.replace("x,value", "a,b")
    with pytest.raises(SchemaMismatch):
        grid_function_from_csv(broken)


def test_csv_floats_roundtrip_exactly():
    vals = np.array([1.0 / 3.0, 1e-17, 123456.789, 0.1])
    gf = GridFunction(0.0, 1.0, 4, vals)
    back = grid_function_from_csv(grid_function_to_csv(gf, ""))
    assert np.array_equal(back.values, vals)


@given(st.dictionaries(st.text(min_size=1, max_size=8),
                       st.one_of(st.integers(-100, 100),
                                 st.floats(-1e6, 1e6, allow_nan=False),
                                 st.text(max_size=10)),
                       max_size=6))
@settings(max_examples=60, deadline=None)
def test_canonical_text_permutation_invariant(d):
    items = list(d.items())
    shuffled = dict(reversed(items))
    assert canonical_config_text(d) == canonical_config_text(shuffled)
