"""Figure kinds for sbmlab runs.

Each kind has a pure data-preparation function returning the exact series
that get plotted (so rendering the same run twice plots identical data),
and ``render`` turns those series into a figure file. No science is
recomputed here: series come straight from the store, plus closed-form
overlay curves (the left asymptote at 2, the |x| e^{-x^2/2} tail
envelope, reference eigenvalue lines at 1/2 and 1).
"""
from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .store import RunData, SchemaMismatch

KINDS = ("profiles", "eigen", "convergence", "powerlaw", "boxdim")


def _require(mapping, key, kind):
    if key not in mapping:
        raise SchemaMismatch(f"figure kind {kind!r} needs artifact {key!r}")
    return mapping[key]


def profiles_series(run: RunData) -> dict:
    out = {}
    for name in ("F", "G", "G_ode"):
        if name in run.profiles:
            p = run.profiles[name]
            out[name] = (p.x, p.values)
    if not out:
        raise SchemaMismatch("no profile artifacts in run")
    if "G" in out:
        x = out["G"][0]
        out["left_asymptote"] = (x, np.full_like(x, 2.0))
        xe = x[x > 0.5]
        anchor = 3.0
        g_anchor = np.interp(anchor, *out["G"])
        scale = g_anchor / (anchor * np.exp(-anchor ** 2 / 2.0))
        out["tail_envelope"] = (xe, scale * xe * np.exp(-xe ** 2 / 2.0))
    return out


def eigen_series(run: RunData) -> dict:
    psi = _require(run.profiles, "psi0_G", "eigen")
    ref = _require(run.profiles, "psi0_reference", "eigen")
    out = {"psi0_G": (psi.x, psi.values), "reference": (ref.x, ref.values)}
    if "psi0_F" in run.profiles:
        p = run.profiles["psi0_F"]
        out["psi0_F"] = (p.x, p.values)
    return out


def eigen_series_gap(run: RunData) -> float:
    """Pointwise max gap between psi0 and the closed-form reference,
    relative to their common max, on the overlap of their grids."""
    s = eigen_series(run)
    xp, vp = s["psi0_G"]
    xr, vr = s["reference"]
    lo, hi = max(xp[0], xr[0]), min(xp[-1], xr[-1])
    x = np.linspace(lo, hi, 801)
    a = np.interp(x, xp, vp)
    b = np.interp(x, xr, vr)
    common_max = max(a.max(), b.max())
    return float(np.max(np.abs(a - b)) / common_max)


def convergence_series(run: RunData) -> dict:
    t = _require(run.tables, "convergence", "convergence")
    methods = np.asarray(t["method"])
    out = {}
    for m in dict.fromkeys(methods.tolist()):
        sel = methods == m
        out[str(m)] = (np.asarray(t["parameter"], dtype=float)[sel],
                       np.asarray(t["lambda0"], dtype=float)[sel])
    return out


def powerlaw_series(run: RunData) -> dict:
    t = _require(run.tables, "localtime", "powerlaw")
    fit = run.json_docs.get("localtime_fit", {})
    tv = np.asarray(t["t"], dtype=float)
    out = {
        "mean": (tv, np.asarray(t["mean_rate_total"], dtype=float)),
        "second": (tv, np.asarray(t["second_moment_rate"], dtype=float)),
    }
    if "mean_exponent" in fit:
        a = float(fit["mean_exponent"])
        ref = out["mean"][1][len(tv) // 2] * (tv / tv[len(tv) // 2]) ** a
        out["mean_fit"] = (tv, ref)
    return out


def boxdim_series(run: RunData) -> dict:
    t = _require(run.tables, "boxcounts", "boxdim")
    snaps = np.asarray(t["snapshot"])
    out = {}
    for name in list(dict.fromkeys(snaps.tolist()))[:12]:
        sel = snaps == name
        out[str(name)] = (np.asarray(t["eps"], dtype=float)[sel],
                          np.asarray(t["count"], dtype=float)[sel])
    return out


SERIES = {
    "profiles": profiles_series,
    "eigen": eigen_series,
    "convergence": convergence_series,
    "powerlaw": powerlaw_series,
    "boxdim": boxdim_series,
}


def render(run: RunData, kind: str, out_dir, fmt: str = "png") -> Path:
    if kind not in KINDS:
        raise SchemaMismatch(f"unknown figure kind {kind!r}")
    if fmt not in ("png", "svg", "pdf"):
        raise SchemaMismatch(f"unknown output format {fmt!r}")
    series = SERIES[kind](run)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if kind == "profiles":
        for name, (x, y) in series.items():
            style = dict(lw=1.6)
            if name == "left_asymptote":
                style = dict(ls="--", lw=1.0, color="grey")
            elif name == "tail_envelope":
                style = dict(ls=":", lw=1.0, color="grey")
            ax.plot(x, y, label=name, **style)
        ax.set(xlabel="x", ylabel="profile value")
    elif kind == "eigen":
        x, y = series["psi0_G"]
        ax.plot(x, y, lw=1.8, label="psi0 (killing G)")
        xr, yr = series["reference"]
        ax.plot(xr, yr, lw=1.2, ls="--", label="-e^{x^2/2} G' (normalized)")
        if "psi0_F" in series:
            ax.plot(*series["psi0_F"], lw=1.0, alpha=0.6, label="psi0 (killing F)")
        ax.set(xlabel="x", ylabel="eigenfunction", xlim=(-5, 5))
    elif kind == "convergence":
        for m, (p, lam) in series.items():
            ax.plot(p, lam, marker="o", label=m)
        ax.axhline(0.5, ls=":", color="grey", lw=0.8)
        ax.axhline(1.0, ls=":", color="grey", lw=0.8)
        ax.set(xlabel="basis size / truncation box", ylabel="lambda_0")
    elif kind == "powerlaw":
        ax.loglog(*series["mean"], marker="o", label="mean local-time total rate")
        ax.loglog(*series["second"], marker="s", label="second moment rate")
        if "mean_fit" in series:
            ax.loglog(*series["mean_fit"], ls="--", color="grey", label="fitted power")
        ax.set(xlabel="t", ylabel="cluster-rate moment")
    elif kind == "boxdim":
        for name, (e, n) in series.items():
            ax.loglog(e, n, marker=".", alpha=0.7, lw=0.8)
        ax.set(xlabel="box size", ylabel="boxes hit")
    if ax.get_legend_handles_labels()[1]:
        ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{run.run_id}_{kind}.{fmt}"
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
