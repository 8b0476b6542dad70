"""Box-counting dimension of the zero-set boundary of density snapshots.

The continuum boundary is not observable below grid scale, so a positive
threshold defines the numerical zero set; a cell is a boundary cell when
one of its neighbours sits on the other side of the threshold. The
box-counting estimate is exploratory by design: it targets box dimension
on a finite scale ladder, not the Hausdorff dimension itself, and every
report carries a threshold-robustness flag.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFit, SbmLabError
from .grid import GridFunction
from .powerlaw import PowerLawFit, fit_power_law


def boundary_cells(snapshot: GridFunction, threshold: float) -> np.ndarray:
    """Indices of cells adjacent to the opposite side of the threshold."""
    if threshold <= 0:
        raise SbmLabError("threshold must be positive")
    above = snapshot.values > threshold
    edge = np.zeros(snapshot.n_points, dtype=bool)
    flip = above[1:] != above[:-1]
    edge[1:] |= flip
    edge[:-1] |= flip
    return np.flatnonzero(edge)


def box_count(points, eps_ladder, origin: float = 0.0) -> np.ndarray:
    """Number of eps-boxes (anchored at origin) hit by a 1-D point set."""
    points = np.asarray(points, dtype=float)
    counts = []
    for eps in eps_ladder:
        if eps <= 0:
            raise SbmLabError("box sizes must be positive")
        if points.size == 0:
            counts.append(0)
        else:
            counts.append(np.unique(np.floor((points - origin) / eps)).size)
    return np.asarray(counts, dtype=int)


@dataclass
class BoxCountResult:
    eps_ladder: np.ndarray
    counts: np.ndarray
    fit: PowerLawFit
    threshold_used: float


def _fit_counts(eps_ladder, counts) -> PowerLawFit:
    if counts.size and counts.min() >= 1 and counts.max() == 1:
        # a single occupied box at every scale: dimension zero exactly
        return PowerLawFit(exponent=0.0, intercept=0.0, stderr=0.0, r2=1.0,
                           x_values=np.asarray(eps_ladder, dtype=float),
                           y_values=np.asarray(counts, dtype=float))
    if int((counts >= 2).sum()) < 3:
        raise DegenerateFit(
            f"only {(counts >= 2).sum()} ladder points with N(eps) >= 2")
    return fit_power_law(eps_ladder, counts, min_points=3)


def fit_box_dimension(points, eps_ladder, origin: float = 0.0) -> PowerLawFit:
    """log N(eps) against log eps; the dimension estimate is -slope."""
    eps_ladder = np.asarray(sorted(eps_ladder), dtype=float)
    counts = box_count(points, eps_ladder, origin)
    return _fit_counts(eps_ladder, counts)


def box_dimension(snapshot: GridFunction, eps_ladder, threshold: float) -> BoxCountResult:
    """Box-count the boundary-cell positions of one snapshot."""
    eps_ladder = np.asarray(sorted(eps_ladder), dtype=float)
    if eps_ladder.size < 4:
        raise SbmLabError("need at least 4 ladder scales")
    if eps_ladder.min() < snapshot.h:
        raise SbmLabError("box sizes below the grid spacing are meaningless")
    idx = boundary_cells(snapshot, threshold)
    pts = snapshot.x[idx]
    counts = box_count(pts, eps_ladder, origin=snapshot.x_min)
    fit = _fit_counts(eps_ladder, counts)
    return BoxCountResult(eps_ladder=eps_ladder, counts=counts, fit=fit,
                          threshold_used=threshold)


def estimated_dimension(result: BoxCountResult) -> float:
    return -result.fit.exponent


def threshold_robust(snapshot: GridFunction, eps_ladder, threshold: float,
                     tol: float = 0.05) -> bool:
    """Flag: does halving the threshold move the fitted dimension < tol?"""
    try:
        d1 = estimated_dimension(box_dimension(snapshot, eps_ladder, threshold))
        d2 = estimated_dimension(box_dimension(snapshot, eps_ladder, threshold / 2))
    except DegenerateFit:
        return False
    return abs(d1 - d2) < tol


def cantor_points(level: int = 9) -> np.ndarray:
    """Endpoints of the level-n middle-thirds construction on [0, 1].

    A deterministic calibration set whose box dimension is log 2 / log 3.
    """
    intervals = [(0.0, 1.0)]
    for _ in range(level):
        nxt = []
        for a, b in intervals:
            third = (b - a) / 3.0
            nxt.append((a, a + third))
            nxt.append((b - third, b))
        intervals = nxt
    return np.unique(np.array(intervals).ravel())


def ensemble_dimension_report(snapshots, eps_ladder, threshold: float) -> dict:
    """Median/IQR of per-snapshot fitted dimensions plus robustness flags."""
    dims, robust, skipped = [], 0, 0
    for s in snapshots:
        try:
            res = box_dimension(s, eps_ladder, threshold)
        except DegenerateFit:
            skipped += 1
            continue
        dims.append(estimated_dimension(res))
        if threshold_robust(s, eps_ladder, threshold):
            robust += 1
    if not dims:
        raise DegenerateFit("no snapshot produced a usable box-count fit")
    dims = np.asarray(dims)
    q25, q50, q75 = np.percentile(dims, [25, 50, 75])
    return dict(median=float(q50), iqr=(float(q25), float(q75)),
                n_fitted=int(dims.size), n_skipped=int(skipped),
                robust_fraction=float(robust / max(dims.size, 1)),
                dimensions=dims)
