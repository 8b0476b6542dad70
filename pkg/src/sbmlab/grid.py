"""Uniform-grid sampled functions and finite-difference derivatives.

``GridFunction`` is the common container for every profile handled here:
the symmetric decay profile F, the survival-intensity profile G, dual
profiles v^lambda(t, .), simulated density snapshots and eigenfunctions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SbmLabError

#: tiny negatives tolerated on nonnegative profiles before clipping
NONNEG_TOL = 1e-12


@dataclass(eq=False)
class GridFunction:
    x_min: float
    x_max: float
    n_points: int
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.n_points != self.values.size:
            raise SbmLabError(
                f"n_points={self.n_points} does not match values size {self.values.size}")
        if self.n_points < 2 or not self.x_max > self.x_min:
            raise SbmLabError("grid must have at least two points and positive extent")
        if not np.all(np.isfinite(self.values)):
            raise SbmLabError(f"non-finite values in grid function {self.label!r}")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @classmethod
    def from_callable(cls, f, x_min, x_max, n_points, label="") -> "GridFunction":
        x = np.linspace(x_min, x_max, n_points)
        return cls(x_min, x_max, n_points, np.asarray(f(x), dtype=float), label)

    def interp(self, xq) -> np.ndarray:
        """Linear interpolation, constant extension beyond the grid."""
        return np.interp(np.asarray(xq, dtype=float), self.x, self.values)

    def trapz(self) -> float:
        return float(np.trapezoid(self.values, dx=self.h))

    def right_cumulative(self) -> np.ndarray:
        """R[i] = trapezoid integral of the function over [x_i, x_max]."""
        v = self.values
        seg = 0.5 * (v[:-1] + v[1:]) * self.h
        out = np.zeros(self.n_points)
        out[:-1] = seg[::-1].cumsum()[::-1]
        return out

    def clipped_nonnegative(self, tol: float = NONNEG_TOL) -> "GridFunction":
        """Return a copy with tiny negatives clipped; reject real ones."""
        if self.values.min(initial=0.0) < -tol:
            raise SbmLabError(
                f"{self.label!r} dips to {self.values.min():g}, below -{tol:g}")
        return GridFunction(self.x_min, self.x_max, self.n_points,
                            np.maximum(self.values, 0.0), self.label)

    def allclose(self, other: "GridFunction", atol=1e-12) -> bool:
        return (self.n_points == other.n_points
                and abs(self.x_min - other.x_min) <= atol
                and abs(self.x_max - other.x_max) <= atol
                and np.allclose(self.values, other.values, atol=atol, rtol=0.0))


def derivative(f: GridFunction) -> GridFunction:
    """Fourth-order finite-difference derivative on the grid.

    Five-point central stencil in the interior, one-sided five-point
    stencils at the two cells nearest each edge; exact for cubics.
    """
    if f.n_points < 5:
        raise SbmLabError("derivative needs at least 5 grid points")
    v, h = f.values, f.h
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    # one-sided / skewed 4th-order stencils
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * h)
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h)
    d[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * h)
    d[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * h)
    return GridFunction(f.x_min, f.x_max, f.n_points, d,
                        label=f"d({f.label})" if f.label else "derivative")
