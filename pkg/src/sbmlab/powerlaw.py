"""Least-squares power-law fits on log-log pairs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFit


@dataclass
class PowerLawFit:
    exponent: float
    intercept: float
    stderr: float
    r2: float
    x_values: np.ndarray
    y_values: np.ndarray

    def predict(self, x) -> np.ndarray:
        return np.exp(self.intercept) * np.asarray(x, dtype=float) ** self.exponent


def fit_power_law(x, y, min_points: int = 3) -> PowerLawFit:
    """Fit y ~ exp(b) * x^a by least squares on log-log pairs.

    Pairs with y <= 0 (or x <= 0) are dropped; at least ``min_points``
    usable pairs are required.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    xs, ys = x[keep], y[keep]
    if xs.size < min_points:
        raise DegenerateFit(
            f"power-law fit needs >= {min_points} positive pairs, got {xs.size}")
    lx, ly = np.log(xs), np.log(ys)
    n = lx.size
    A = np.column_stack([lx, np.ones(n)])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    a, b = float(coef[0]), float(coef[1])
    resid = ly - A @ coef
    ss_res = float(resid @ resid)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    if n > 2:
        sxx = float(((lx - lx.mean()) ** 2).sum())
        stderr = np.sqrt(ss_res / (n - 2) / sxx) if sxx > 0 else float("inf")
    else:
        stderr = float("inf")
    return PowerLawFit(a, b, float(stderr), r2, xs, ys)
