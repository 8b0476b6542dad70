"""Figure rendering for sbmlab result stores."""

__version__ = "0.1.0"

from .render import KINDS, eigen_series_gap, render
from .store import MissingRun, RunData, SchemaMismatch, load_run

__all__ = ["KINDS", "MissingRun", "RunData", "SchemaMismatch",
           "eigen_series_gap", "load_run", "render"]
