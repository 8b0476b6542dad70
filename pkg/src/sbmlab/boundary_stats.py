"""Edge-of-support statistics: local-time approximants, tau^eps, power laws.

The local-time approximant of a density snapshot X is the measure with
density  lam^{2 lambda0} X e^{-lam X},  which for large lam concentrates
where 0 < X = O(1/lam). Totals of this measure over conditioned-cluster
ensembles follow the power laws tested by the experiments below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSurvivors, SbmLabError
from .grid import GridFunction
from .powerlaw import PowerLawFit, fit_power_law
from . import sbm_sim

NEG_INF = float("-inf")


@dataclass
class LocalTimeApprox:
    lam: float
    lambda0_used: float
    measure: GridFunction
    total: float


@dataclass
class TauEps:
    eps: float
    value: float                      # -inf sentinel when total mass < eps


def _snapshots(obj) -> list:
    """Accept a DensityEnsemble, a list of snapshots/clusters, or one snapshot."""
    if isinstance(obj, GridFunction):
        return [obj]
    if isinstance(obj, sbm_sim.DensityEnsemble):
        return obj.snapshots
    out = []
    for item in obj:
        out.append(item.snapshot if isinstance(item, sbm_sim.ClusterSample) else item)
    return out


def local_time_approx(snapshot: GridFunction, lam: float,
                      lambda0: float) -> LocalTimeApprox:
    if lam <= 0:
        raise SbmLabError("lambda must be positive")
    X = np.maximum(snapshot.values, 0.0)
    dens = lam ** (2.0 * lambda0) * X * np.exp(-lam * X)
    measure = GridFunction(snapshot.x_min, snapshot.x_max, snapshot.n_points,
                           dens, label=f"L^{lam:g}")
    return LocalTimeApprox(lam=lam, lambda0_used=lambda0, measure=measure,
                           total=measure.trapz())


def local_time_distance(snapshot: GridFunction, lam_a: float, lam_b: float,
                        lambda0: float) -> float:
    """L1 distance between the lam_a and lam_b approximant densities."""
    da = local_time_approx(snapshot, lam_a, lambda0).measure.values
    db = local_time_approx(snapshot, lam_b, lambda0).measure.values
    return float(np.trapezoid(np.abs(da - db), dx=snapshot.h))


def local_time_stabilization(snapshots, lambda_ladder, lambda0: float):
    """Mean consecutive-rung L1 distances across an ensemble.

    Returns rows (lam_i, lam_{i+1}, mean distance); a stabilizing family
    shows eventually decreasing distances along a geometric ladder.
    """
    snaps = _snapshots(snapshots)
    ladder = list(lambda_ladder)
    rows = []
    for la, lb in zip(ladder[:-1], ladder[1:]):
        d = float(np.mean([local_time_distance(s, la, lb, lambda0) for s in snaps]))
        rows.append((la, lb, d))
    return rows


def concentration_window_ok(snapshot: GridFunction, lam: float,
                            lambda0: float) -> bool:
    """Approximant mass should sit where the density is small but positive.

    Vacuously true when the approximant density never exceeds the
    visibility threshold theta_lam.
    """
    la = local_time_approx(snapshot, lam, lambda0)
    theta = lam ** (2.0 * lambda0 - 1.0) * math.exp(-1.0) * 1e-3
    dens = la.measure.values
    if dens.max(initial=0.0) <= theta:
        return True
    xval = snapshot.values[int(np.argmax(dens))]
    return 0.0 < xval < 10.0 / lam


# ---------------------------------------------------------------------------
# tau^eps and boundary growth
# ---------------------------------------------------------------------------

def tau_eps(snapshot: GridFunction, eps: float) -> TauEps:
    """Leftmost point with less than eps mass to its right.

    The right-cumulative mass is linearly interpolated between cells; when
    the whole snapshot carries less than eps the sentinel -inf is returned.
    """
    if eps <= 0:
        raise SbmLabError("eps must be positive")
    R = snapshot.right_cumulative()
    if R[0] < eps:
        return TauEps(eps=eps, value=NEG_INF)
    x = snapshot.x
    below = np.flatnonzero(R < eps)
    if below.size == 0:
        return TauEps(eps=eps, value=float(x[-1]))
    j = int(below[0])                  # first index strictly below eps
    i = j - 1                          # R[i] >= eps > R[j]
    denom = R[i] - R[j]
    frac = 0.0 if denom <= 0 else (R[i] - eps) / denom
    return TauEps(eps=eps, value=float(x[i] + frac * snapshot.h))


def mass_above(snapshot: GridFunction, x_from: float) -> float:
    """Trapezoid mass of the snapshot on [x_from, x_max], interpolated."""
    R = snapshot.right_cumulative()
    x = snapshot.x
    if x_from <= x[0]:
        return float(R[0])
    if x_from >= x[-1]:
        return 0.0
    return float(np.interp(x_from, x, R))


@dataclass
class BoundaryGrowthResult:
    eps: float
    u_values: np.ndarray
    mean_mass: np.ndarray
    n_survivors: int
    fit: PowerLawFit


def boundary_growth_experiment(ensemble, eps: float, u_ladder,
                               min_survivors: int = 100) -> BoundaryGrowthResult:
    """Mean mass within u of tau^eps, fitted as a power of u.

    In the regime u >= sqrt(eps) the expected exponent is about 2.
    """
    snaps = _snapshots(ensemble)
    u_values = np.asarray(sorted(u_ladder), dtype=float)
    sums = np.zeros(u_values.size)
    n_surv = 0
    for s in snaps:
        tau = tau_eps(s, eps)
        if tau.value == NEG_INF:
            continue
        n_surv += 1
        for k, u in enumerate(u_values):
            sums[k] += mass_above(s, tau.value - u)
    if n_surv < min_survivors:
        raise InsufficientSurvivors(
            f"only {n_surv} replicates carry mass >= eps={eps:g}")
    mean_mass = sums / n_surv
    fit = fit_power_law(u_values, mean_mass)
    return BoundaryGrowthResult(eps=eps, u_values=u_values, mean_mass=mean_mass,
                                n_survivors=n_surv, fit=fit)


# ---------------------------------------------------------------------------
# left tail of the right-mass distribution
# ---------------------------------------------------------------------------

@dataclass
class LeftTailResult:
    x: float
    lambdas: np.ndarray
    probabilities: np.ndarray
    fit: PowerLawFit


def left_tail_experiment(ensemble, x_values, lambda_ladder) -> list:
    """Empirical P(0 < X_t([x, inf)) <= 1/lam) against lam, per x.

    Exact particle right-masses are used when the ensemble kept positions;
    otherwise interpolated grid cumulative masses.
    """
    lambdas = np.asarray(sorted(lambda_ladder), dtype=float)
    results = []
    snaps = _snapshots(ensemble)
    positions = getattr(ensemble, "positions", None)
    if positions is not None:
        eps_mass = 1.0 / ensemble.config.n_particles_per_unit_mass
    for xv in x_values:
        if positions is not None:
            masses = np.array([eps_mass * (p >= xv).sum() for p in positions])
        else:
            masses = np.array([mass_above(s, xv) for s in snaps])
        probs = np.array([np.mean((masses > 0) & (masses <= 1.0 / lam))
                          for lam in lambdas])
        fit = fit_power_law(lambdas, probs)
        results.append(LeftTailResult(x=float(xv), lambdas=lambdas,
                                      probabilities=probs, fit=fit))
    return results


# ---------------------------------------------------------------------------
# time-exponent experiment for local-time totals
# ---------------------------------------------------------------------------

@dataclass
class TimeScalingResult:
    t_values: np.ndarray
    lam_values: np.ndarray
    mean_rate_totals: np.ndarray       # (2/t) * conditional mean of totals
    second_moment_rates: np.ndarray    # (2/t) * conditional mean of squared totals
    mean_fit: PowerLawFit
    second_fit: PowerLawFit
    n_clusters: int


def _t_ladder_point(args):
    """One ladder point; top-level so process pools can run it."""
    (t, lam, lambda0, n_clusters, seed, n_ppum_base, h_base, m0_factor) = args
    n_ppum = max(int(round(n_ppum_base / t)), 8)
    clusters = sbm_sim.sample_cluster(
        t=float(t), n_replicates=n_clusters, seed=seed,
        n_ppum=n_ppum, m0=m0_factor * t, grid=sbm_sim.cluster_grid(t, h_base))
    totals = np.array([local_time_approx(c.snapshot, lam, lambda0).total
                       for c in clusters])
    rate = 2.0 / t
    return rate * totals.mean(), rate * (totals ** 2).mean()


def local_time_t_exponent(lambda0: float, t_values=(0.5, 1.0, 2.0),
                          n_clusters: int = 2000, seed: int = 0, mu: float = 6.0,
                          n_ppum_base: int = 1000, h_base: float = 0.02,
                          m0_factor: float = 1.0 / 200.0,
                          jobs: int = 1) -> TimeScalingResult:
    """Cluster-rate mean of local-time totals across a time ladder.

    All discretization parameters are coupled to the diffusive scaling
    (particle mass ~ t, bandwidth ~ sqrt(t), lam = mu / sqrt(t)), so every
    ladder point is a rescaled copy of the same discrete experiment and
    the fitted exponent estimates the continuum power without a
    resolution-dependent tilt. The mean total scales as t^{-lambda0}, the
    second moment as t^{1 - 2 lambda0}.
    """
    t_values = np.asarray(sorted(t_values), dtype=float)
    lam_values = mu / np.sqrt(t_values)
    tasks = [(float(t), float(lam_values[i]), lambda0, n_clusters, seed + i,
              n_ppum_base, h_base, m0_factor) for i, t in enumerate(t_values)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as ex:
            results = list(ex.map(_t_ladder_point, tasks))
    else:
        results = [_t_ladder_point(task) for task in tasks]
    means = np.array([r[0] for r in results])
    seconds = np.array([r[1] for r in results])
    return TimeScalingResult(
        t_values=t_values, lam_values=lam_values, mean_rate_totals=means,
        second_moment_rates=seconds,
        mean_fit=fit_power_law(t_values, means),
        second_fit=fit_power_law(t_values, seconds),
        n_clusters=n_clusters)
