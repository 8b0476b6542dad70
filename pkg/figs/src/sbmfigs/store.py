"""Reader for the sbmlab run-store layout.

This package consumes the store purely through its file formats:
<root>/runs/<run_id>/manifest.json plus CSV/JSON artifacts. Profile CSVs
carry a '# key=value,...' metadata line followed by 'x,value' rows;
table CSVs are plain header + rows.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class MissingRun(Exception):
    """The requested run id is not present in the store."""


class SchemaMismatch(Exception):
    """A stored CSV does not follow the store dialect."""


@dataclass
class Profile:
    x: np.ndarray
    values: np.ndarray
    label: str
    meta: dict


@dataclass
class RunData:
    run_id: str
    path: Path
    manifest: dict
    profiles: dict                 # name -> Profile
    tables: dict                   # name -> dict of column arrays
    json_docs: dict                # name -> dict


def _parse_profile(text: str) -> Profile:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise SchemaMismatch("profile CSV must start with '# ' metadata")
    meta = {}
    for part in lines[0][2:].split(","):
        k, _, v = part.partition("=")
        meta[k] = v
    if len(lines) < 2 or lines[1] != "x,value":
        raise SchemaMismatch("profile CSV must have an 'x,value' header")
    try:
        n = int(meta["n_points"])
    except (KeyError, ValueError) as e:
        raise SchemaMismatch(f"bad profile metadata: {e}") from e
    if len(lines) < n + 2:
        raise SchemaMismatch("profile CSV truncated")
    data = np.array([ln.split(",") for ln in lines[2:n + 2]], dtype=float)
    return Profile(x=data[:, 0], values=data[:, 1],
                   label=meta.get("label", ""), meta=meta)


def _parse_table(text: str) -> dict:
    lines = [ln for ln in text.splitlines() if ln]
    if not lines:
        raise SchemaMismatch("empty table CSV")
    cols = lines[0].split(",")
    raw = [ln.split(",") for ln in lines[1:]]
    out = {}
    for j, c in enumerate(cols):
        col = [r[j] for r in raw]
        try:
            out[c] = np.array(col, dtype=float)
        except ValueError:
            out[c] = np.array(col)
    return out


def load_run(store_root, run_id: str) -> RunData:
    path = Path(store_root) / "runs" / run_id
    man_path = path / "manifest.json"
    if not man_path.exists():
        raise MissingRun(f"run {run_id} not found under {store_root}")
    manifest = json.loads(man_path.read_text())
    profiles, tables, jsons = {}, {}, {}
    for fname in manifest.get("artifact_paths", []):
        fpath = path / fname
        stem = fname.rsplit(".", 1)[0]
        if fname.endswith(".json"):
            jsons[stem] = json.loads(fpath.read_text())
        elif fname.endswith(".csv"):
            text = fpath.read_text()
            if text.startswith("# "):
                profiles[stem] = _parse_profile(text)
            else:
                tables[stem] = _parse_table(text)
    return RunData(run_id=run_id, path=path, manifest=manifest,
                   profiles=profiles, tables=tables, json_docs=jsons)
