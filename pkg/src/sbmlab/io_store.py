"""Deterministic run store: manifests, CSV/JSON artifacts, content hashes.

Layout: <root>/runs/<run_id>/manifest.json plus one file per artifact.
The run id is a content hash of the canonicalized config, so identical
configs land in the same directory and rewrites are idempotent. Floats
are serialized as shortest round-trip decimals with LF line endings.
"""
from __future__ import annotations

import hashlib
import json
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from filelock import FileLock

from .errors import CollisionError, CorruptManifest, IoError, SbmLabError, SchemaMismatch
from .grid import GridFunction

TOOL_VERSION = "sbmlab 0.1.0"


def canonical_config_text(config: dict) -> str:
    """Key-sorted, compact JSON; stable under field reordering."""
    return json.dumps(config, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def run_id_for(config: dict) -> str:
    return hashlib.sha256(canonical_config_text(config).encode()).hexdigest()[:16]


@dataclass
class RunManifest:
    run_id: str
    config: dict
    seed: int
    artifact_paths: list = field(default_factory=list)
    tool_version: str = TOOL_VERSION
    extra: dict = field(default_factory=dict)

    @classmethod
    def for_config(cls, config: dict, seed: int) -> "RunManifest":
        return cls(run_id=run_id_for(config), config=config, seed=seed)


@dataclass
class Table:
    """A plain rectangular table artifact, stored as CSV."""
    columns: list
    rows: list

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def grid_function_to_csv(gf: GridFunction, run_id: str = "") -> str:
    label = gf.label.replace(",", ";")     # commas delimit the metadata line
    head = (f"# label={label},x_min={_fmt(gf.x_min)},x_max={_fmt(gf.x_max)},"
            f"n_points={gf.n_points},run_id={run_id}")
    lines = [head, "x,value"]
    x = gf.x
    lines.extend(f"{_fmt(xv)},{_fmt(v)}" for xv, v in zip(x, gf.values))
    return "\n".join(lines) + "\n"


def grid_function_from_csv(text: str) -> GridFunction:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise SchemaMismatch("profile CSV must start with a '# ' metadata line")
    meta = {}
    for part in lines[0][2:].split(","):
        k, _, v = part.partition("=")
        meta[k] = v
    try:
        n = int(meta["n_points"])
        x_min, x_max = float(meta["x_min"]), float(meta["x_max"])
    except (KeyError, ValueError) as e:
        raise SchemaMismatch(f"bad profile CSV metadata: {e}") from e
    if lines[1] != "x,value":
        raise SchemaMismatch("profile CSV needs an 'x,value' header row")
    vals = np.empty(n)
    if len(lines) < n + 2:
        raise SchemaMismatch(f"profile CSV truncated: {len(lines) - 2} of {n} rows")
    for i in range(n):
        vals[i] = float(lines[2 + i].split(",")[1])
    return GridFunction(x_min, x_max, n, vals, label=meta.get("label", ""))


def table_to_csv(t: Table) -> str:
    lines = [",".join(str(c) for c in t.columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in t.rows)
    return "\n".join(lines) + "\n"


def table_from_csv(text: str) -> Table:
    lines = [ln for ln in text.splitlines() if ln]
    if not lines:
        raise SchemaMismatch("empty table CSV")
    cols = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        parsed = []
        for c in cells:
            try:
                parsed.append(float(c))
            except ValueError:
                parsed.append(c)
        rows.append(parsed)
    return Table(columns=cols, rows=rows)


def _encode_artifact(name: str, art, run_id: str) -> tuple:
    """(filename, bytes) for one artifact."""
    if isinstance(art, GridFunction):
        return f"{name}.csv", grid_function_to_csv(art, run_id).encode()
    if isinstance(art, Table):
        return f"{name}.csv", table_to_csv(art).encode()
    if isinstance(art, dict):
        return f"{name}.json", (json.dumps(art, sort_keys=True, indent=1,
                                           default=_jsonify) + "\n").encode()
    if isinstance(art, str):
        return f"{name}.txt", art.encode()
    if isinstance(art, bytes):
        return name, art
    raise SbmLabError(f"cannot serialize artifact {name!r} of type {type(art)}")


def _jsonify(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not JSON-serializable: {type(v)}")


def _manifest_json(manifest: RunManifest, artifact_index: dict) -> str:
    doc = dict(manifest.extra)
    doc.update(
        run_id=manifest.run_id,
        config=manifest.config,
        seed=manifest.seed,
        tool_version=manifest.tool_version,
        artifact_paths=sorted(artifact_index),
        artifacts=artifact_index,
    )
    return json.dumps(doc, sort_keys=True, indent=1, default=_jsonify) + "\n"


def write_run(manifest: RunManifest, artifacts: dict, root) -> Path:
    """Atomically write a run directory; idempotent for identical content."""
    root = Path(root)
    runs = root / "runs"
    try:
        runs.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoError(f"cannot create store root {runs}: {e}") from e
    expected = run_id_for(manifest.config)
    if manifest.run_id != expected:
        raise SbmLabError(
            f"manifest run_id {manifest.run_id} != config hash {expected}")
    encoded = {}
    index = {}
    for name, art in artifacts.items():
        fname, blob = _encode_artifact(name, art, manifest.run_id)
        encoded[fname] = blob
        index[fname] = dict(sha256=hashlib.sha256(blob).hexdigest(),
                            bytes=len(blob))
    manifest.artifact_paths = sorted(index)
    man_text = _manifest_json(manifest, index)
    target = runs / manifest.run_id
    lock = FileLock(str(runs / f".{manifest.run_id}.lock"))
    with lock:
        if target.exists():
            existing = (target / "manifest.json").read_bytes()
            if existing == man_text.encode():
                return target
            raise CollisionError(
                f"run {manifest.run_id} exists with different content")
        tmp = Path(tempfile.mkdtemp(prefix=f".tmp-{manifest.run_id}-", dir=runs))
        try:
            for fname, blob in encoded.items():
                (tmp / fname).write_bytes(blob)
            (tmp / "manifest.json").write_bytes(man_text.encode())
            os.replace(tmp, target)
        except OSError as e:
            shutil.rmtree(tmp, ignore_errors=True)
            raise IoError(f"failed writing run {manifest.run_id}: {e}") from e
    return target


_MANIFEST_KEYS = {"run_id", "config", "seed", "tool_version",
                  "artifact_paths", "artifacts"}


def read_run(path) -> tuple:
    """Load (manifest, artifacts) from a run directory, verifying hashes."""
    path = Path(path)
    man_path = path / "manifest.json"
    if not man_path.exists():
        raise CorruptManifest(f"no manifest.json under {path}", offset=0)
    raw = man_path.read_bytes()
    try:
        doc = json.loads(raw.decode())
    except json.JSONDecodeError as e:
        raise CorruptManifest(f"manifest parse failure: {e.msg}", offset=e.pos) from e
    extra = {k: v for k, v in doc.items() if k not in _MANIFEST_KEYS}
    manifest = RunManifest(run_id=doc["run_id"], config=doc["config"],
                           seed=doc["seed"],
                           artifact_paths=list(doc.get("artifact_paths", [])),
                           tool_version=doc.get("tool_version", ""),
                           extra=extra)
    artifacts = {}
    for fname, meta in doc.get("artifacts", {}).items():
        fpath = path / fname
        if not fpath.exists():
            raise CorruptManifest(f"artifact {fname} missing", offset=0)
        blob = fpath.read_bytes()
        if len(blob) != meta["bytes"]:
            raise CorruptManifest(
                f"artifact {fname} has {len(blob)} bytes, manifest says {meta['bytes']}",
                offset=min(len(blob), meta["bytes"]))
        digest = hashlib.sha256(blob).hexdigest()
        if digest != meta["sha256"]:
            raise CorruptManifest(f"artifact {fname} hash mismatch",
                                  offset=len(blob))
        artifacts[_strip_ext(fname)] = _decode_artifact(fname, blob)
    return manifest, artifacts


def _strip_ext(fname: str) -> str:
    return fname.rsplit(".", 1)[0] if "." in fname else fname


def _decode_artifact(fname: str, blob: bytes):
    if fname.endswith(".json"):
        return json.loads(blob.decode())
    if fname.endswith(".csv"):
        text = blob.decode()
        if text.startswith("# "):
            return grid_function_from_csv(text)
        return table_from_csv(text)
    if fname.endswith(".txt"):
        return blob.decode()
    return blob


def find_run(root, run_id: str) -> Path:
    p = Path(root) / "runs" / run_id
    if not p.exists():
        raise IoError(f"run {run_id} not found under {root}")
    return p


def resolve_out_root(explicit=None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get("SBMLAB_OUT")
    return Path(env) if env else Path("sbmlab_out")
