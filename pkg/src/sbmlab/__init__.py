"""Numerical laboratory for the boundary of the zero set of 1-D
super-Brownian motion: profile solvers, killed Ornstein-Uhlenbeck
spectra, branching/grid simulators, boundary local-time statistics,
box-counting dimension estimates, and a deterministic result store.
"""

__version__ = "0.1.0"

from .grid import GridFunction, derivative
from .powerlaw import PowerLawFit, fit_power_law
from .profiles import (PdeRunConfig, ShootingResult, solve_F, solve_G,
                       solve_G_ode, solve_v_lambda)
from .spectral import (EigenResult, KillingSpec, dimension_from_lambda0,
                       eig_hermite, eig_neumann_fd, survival_probability_check)
from .sbm_sim import (ClusterSample, DensityEnsemble, SimConfig,
                      hitting_tail_check, sample_cluster, simulate)
from .boundary_stats import (LocalTimeApprox, TauEps, boundary_growth_experiment,
                             left_tail_experiment, local_time_approx,
                             local_time_stabilization, tau_eps)
from .fractal_dim import (BoxCountResult, boundary_cells, box_dimension,
                          cantor_points)
from .io_store import RunManifest, Table, read_run, write_run

__all__ = [name for name in dir() if not name.startswith("_")]
