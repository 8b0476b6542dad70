"""Super-Brownian motion simulation: particle and grid backends.

Both backends target branching-rate-one normalization, under which the
total mass is the standard Feller diffusion:

    E exp(-lam * M_t) = exp(-2 lam M_0 / (2 + lam t)),
    P(M_t = 0) = exp(-2 M_0 / t).

* particles: critical binary branching random walk. Each particle carries
  mass eps = 1/n_ppum; every time step of length dt = eps it moves by a
  N(0, dt) increment and then dies or splits in two with probability 1/2
  each. Offspring variance 1 per step of length eps reproduces the Feller
  mass variance exactly in the eps -> 0 limit.

* spde_grid: explicit diffusion step plus an exact noise substep. Under
  pure sqrt(X) noise each cell's mass is a martingale Feller diffusion,
  whose transition over dt is sampled exactly as (dt/2) * Gamma(N) with
  N ~ Poisson(2 m / dt). The clipped-Gaussian Euler scheme is *not* used:
  at any feasible dt its clipping inflates the mass law by whole
  multiples, while the exact substep makes the simulated total-mass law
  match the closed form identically (diffusion redistributes mass without
  creating or destroying it).

Replicates are processed in fixed-size chunks, each chunk owning one
spawned generator, so ensembles are bit-for-bit reproducible for a given
seed regardless of how chunks are scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (MassExplosion, RejectionBudgetExceeded, SbmLabError)
from .grid import GridFunction

#: replicates per RNG chunk (fixed: changing it changes ensembles)
CHUNK = 64
#: conditioned-cluster attempts per RNG batch (fixed, same reason)
ATTEMPT_BATCH = 4096


@dataclass
class SimConfig:
    backend: str                       # "particles" | "spde_grid"
    x0: object                         # [(mass, location), ...] or GridFunction
    t_final: float
    dt: float | None = None
    grid: tuple | None = None          # (x_min, x_max, n_points)
    n_particles_per_unit_mass: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.backend not in ("particles", "spde_grid"):
            raise SbmLabError(f"unknown backend {self.backend!r}")
        if self.t_final <= 0:
            raise SbmLabError("t_final must be positive")
        if self.n_particles_per_unit_mass < 1:
            raise SbmLabError("need at least one particle per unit mass")
        if self.grid is None:
            self.grid = self._auto_grid()
        x_min, x_max, n = self.grid
        h = (x_max - x_min) / (n - 1)
        if self.dt is None:
            if self.backend == "particles":
                self.dt = 1.0 / self.n_particles_per_unit_mass
            else:
                self.dt = h * h / 2.0
        if self.backend == "spde_grid" and self.dt > h * h / 2.0 * (1 + 1e-12):
            raise SbmLabError("explicit grid backend needs dt <= h^2/2")

    def _auto_grid(self):
        locs = self._atom_locations()
        pad = 5.0 * math.sqrt(self.t_final) + 1.0
        lo, hi = min(locs) - pad, max(locs) + pad
        h = 0.02 if self.backend == "particles" else 0.04
        n = int(math.ceil((hi - lo) / h)) + 1
        return (lo, lo + (n - 1) * h, n)

    def _atom_locations(self):
        if isinstance(self.x0, GridFunction):
            return [self.x0.x_min, self.x0.x_max]
        return [loc for _, loc in self.x0] or [0.0]

    @property
    def h(self) -> float:
        x_min, x_max, n = self.grid
        return (x_max - x_min) / (n - 1)

    def total_mass0(self) -> float:
        if isinstance(self.x0, GridFunction):
            return self.x0.trapz()
        return float(sum(m for m, _ in self.x0))

    def as_dict(self) -> dict:
        x0 = (["gridfunction", self.x0.label] if isinstance(self.x0, GridFunction)
              else [list(a) for a in self.x0])
        return dict(backend=self.backend, x0=x0, t_final=self.t_final, dt=self.dt,
                    grid=list(self.grid),
                    n_particles_per_unit_mass=self.n_particles_per_unit_mass,
                    seed=self.seed)


@dataclass
class DensityEnsemble:
    snapshots: list
    config: SimConfig
    replicate_seeds: list
    total_masses: np.ndarray = None
    positions: list | None = None      # particle backend only, when kept


@dataclass
class ClusterSample:
    snapshot: GridFunction
    conditioned_on_survival: bool = True
    mass: float = 0.0
    positions: np.ndarray | None = None


def _rng_for(seed: int, key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(key,)))


def _initial_particles(cfg: SimConfig, n_rep: int, rng) -> tuple:
    """Positions (f32) and replicate ids (i32) for one chunk of replicates.

    Single precision is ample: positions only feed histogram bins and
    threshold comparisons at scales far above float32 resolution.
    """
    eps = 1.0 / cfg.n_particles_per_unit_mass
    if isinstance(cfg.x0, GridFunction):
        mass = cfg.x0.trapz()
        n0 = int(round(mass / eps))
        dens = np.maximum(cfg.x0.values, 0.0)
        cdf = np.cumsum(dens)
        cdf = cdf / cdf[-1]
        pos_one = [np.interp(rng.random(n0), cdf, cfg.x0.x) for _ in range(n_rep)]
        pos = np.concatenate(pos_one) if n0 else np.empty(0)
        rep = np.repeat(np.arange(n_rep, dtype=np.int32), n0)
        return pos.astype(np.float32), rep
    parts = []
    for m, loc in cfg.x0:
        k = int(round(m / eps))
        parts.append(np.full(k, float(loc), dtype=np.float32))
    one = np.concatenate(parts) if parts else np.empty(0, dtype=np.float32)
    pos = np.tile(one, n_rep)
    rep = np.repeat(np.arange(n_rep, dtype=np.int32), one.size)
    return pos, rep


def _branch_step(pos, rep, rng, sqrt_dt):
    """One move-then-branch step; RNG draw sizes depend only on history."""
    n = pos.size
    if n == 0:
        return pos, rep
    pos = pos + sqrt_dt * rng.standard_normal(n, dtype=np.float32)
    doubles = rng.integers(0, 2, n, dtype=np.uint8) == 1
    kept = pos[doubles]
    out = np.empty(2 * kept.size, dtype=pos.dtype)
    out[0::2] = kept
    out[1::2] = kept
    kept_rep = rep[doubles]
    out_rep = np.empty(2 * kept_rep.size, dtype=rep.dtype)
    out_rep[0::2] = kept_rep
    out_rep[1::2] = kept_rep
    return out, out_rep


def _histogram_snapshot(pos, cfg: SimConfig, label: str) -> GridFunction:
    x_min, x_max, n = cfg.grid
    h = cfg.h
    eps = 1.0 / cfg.n_particles_per_unit_mass
    edges = np.linspace(x_min - h / 2, x_max + h / 2, n + 1)
    counts, _ = np.histogram(pos, bins=edges)
    return GridFunction(x_min, x_max, n, counts * (eps / h), label=label)


def _extend_grid_for(cfg: SimConfig, pos_min: float, pos_max: float):
    """Grow the histogram grid by whole cells if particles left it."""
    x_min, x_max, n = cfg.grid
    h = cfg.h
    grow_lo = max(0, int(math.ceil((x_min - pos_min) / h)) + 2) if pos_min < x_min else 0
    grow_hi = max(0, int(math.ceil((pos_max - x_max) / h)) + 2) if pos_max > x_max else 0
    if grow_lo or grow_hi:
        cfg.grid = (x_min - grow_lo * h, x_max + grow_hi * h, n + grow_lo + grow_hi)


def _simulate_particles(cfg: SimConfig, n_replicates: int, keep_positions: bool):
    eps = 1.0 / cfg.n_particles_per_unit_mass
    dt = cfg.dt
    n_steps = int(round(cfg.t_final / dt))
    sqrt_dt = math.sqrt(cfg.t_final / n_steps)
    mass0 = cfg.total_mass0()
    all_pos, all_rep, seeds = [], [], []
    for c0 in range(0, n_replicates, CHUNK):
        nb = min(CHUNK, n_replicates - c0)
        chunk = c0 // CHUNK
        rng = _rng_for(cfg.seed, chunk)
        pos, rep = _initial_particles(cfg, nb, rng)
        for _ in range(n_steps):
            pos, rep = _branch_step(pos, rep, rng, sqrt_dt)
            if pos.size * eps > 100.0 * max(mass0, 1e-12) * nb:
                raise MassExplosion("particle count exceeded 100x initial mass")
        all_pos.append(pos)
        all_rep.append(rep + c0)
        seeds.extend((cfg.seed, chunk, i) for i in range(nb))
    pos = np.concatenate(all_pos)
    rep = np.concatenate(all_rep)
    if pos.size:
        _extend_grid_for(cfg, pos.min(), pos.max())
    snapshots, positions = [], []
    counts = np.bincount(rep, minlength=n_replicates)
    masses = counts * eps
    order = np.argsort(rep, kind="stable")
    pos_sorted = pos[order]
    bounds = np.searchsorted(rep[order], np.arange(n_replicates + 1))
    for i in range(n_replicates):
        pi = pos_sorted[bounds[i]:bounds[i + 1]]
        snapshots.append(_histogram_snapshot(pi, cfg, label=f"X_t rep{i}"))
        if keep_positions:
            positions.append(pi.copy())
    return DensityEnsemble(snapshots=snapshots, config=cfg, replicate_seeds=seeds,
                           total_masses=masses,
                           positions=positions if keep_positions else None)


def _besq_noise(m, dt, rng):
    """Exact zero-drift Feller transition for a vector of cell masses."""
    out = np.zeros_like(m)
    pos = m > 0
    if np.any(pos):
        counts = rng.poisson(2.0 * m[pos] / dt)
        nz = counts > 0
        if np.any(nz):
            vals = rng.gamma(counts[nz]) * (dt / 2.0)
            tmp = np.zeros(counts.size)
            tmp[nz] = vals
            out[pos] = tmp
    return out


def _initial_density(cfg: SimConfig) -> np.ndarray:
    x_min, x_max, n = cfg.grid
    h = cfg.h
    X = np.zeros(n)
    if isinstance(cfg.x0, GridFunction):
        x = np.linspace(x_min, x_max, n)
        X[:] = np.maximum(cfg.x0.interp(x), 0.0)
        inside = (x >= cfg.x0.x_min) & (x <= cfg.x0.x_max)
        X[~inside] = 0.0
        return X
    for m, loc in cfg.x0:
        i = int(round((loc - x_min) / h))
        if not 0 < i < n - 1:
            raise SbmLabError(f"atom at {loc} outside the grid interior")
        X[i] += m / h
    return X


def _simulate_spde(cfg: SimConfig, n_replicates: int):
    x_min, x_max, n = cfg.grid
    h = cfg.h
    dt = cfg.dt
    n_steps = int(round(cfg.t_final / dt))
    dt = cfg.t_final / n_steps
    mass0 = cfg.total_mass0()
    guard = 100.0 * max(mass0, 1e-12)
    c = dt / (2.0 * h * h)
    X0 = _initial_density(cfg)
    snapshots, seeds = [], []
    masses = np.zeros(n_replicates)
    for c0 in range(0, n_replicates, CHUNK):
        nb = min(CHUNK, n_replicates - c0)
        chunk = c0 // CHUNK
        rng = _rng_for(cfg.seed, chunk)
        X = np.tile(X0, (nb, 1))
        for step in range(n_steps):
            X[:, 1:-1] += c * (X[:, 2:] - 2.0 * X[:, 1:-1] + X[:, :-2])
            X[:, 0] = X[:, -1] = 0.0
            m = h * X
            X = _besq_noise(m, dt, rng) / h
            if step % 64 == 0 and (h * X.sum(axis=1) > guard).any():
                raise MassExplosion("grid-backend mass exceeded 100x initial mass")
        for i in range(nb):
            snapshots.append(GridFunction(x_min, x_max, n, X[i],
                                          label=f"X_t rep{c0 + i}"))
            masses[c0 + i] = h * X[i].sum()
        seeds.extend((cfg.seed, chunk, i) for i in range(nb))
    return DensityEnsemble(snapshots=snapshots, config=cfg,
                           replicate_seeds=seeds, total_masses=masses)


def simulate(cfg: SimConfig, n_replicates: int,
             keep_positions: bool = False) -> DensityEnsemble:
    """Simulate n_replicates independent densities X(t_final, .)."""
    if cfg.backend == "particles":
        return _simulate_particles(cfg, n_replicates, keep_positions)
    return _simulate_spde(cfg, n_replicates)


# ---------------------------------------------------------------------------
# conditioned clusters
# ---------------------------------------------------------------------------

def cluster_grid(t: float, h_base: float = 0.02) -> tuple:
    """Default snapshot grid for clusters at time t, scaled with sqrt(t)."""
    h = h_base * math.sqrt(t)
    L = 5.0 * math.sqrt(t) + 1.0
    n = 2 * int(math.ceil(L / h)) + 1
    half = (n - 1) // 2 * h
    return (-half, half, n)


def sample_cluster(t: float, n_replicates: int, seed: int,
                   n_ppum: int = 1000, m0: float | None = None,
                   grid: tuple | None = None, keep_positions: bool = False,
                   max_attempts: int = 5_000_000) -> list:
    """Draw conditioned clusters: descendants of one surviving ancestor.

    Simulates from a small atom of mass m0 (default t/200) at the origin
    and keeps only replicates alive at time t. As m0 -> 0 the surviving
    law converges to the single-cluster conditional law; at the default
    the chance of a second contributing ancestor is m0/t = 0.5%.
    """
    if m0 is None:
        m0 = t / 200.0
    eps = 1.0 / n_ppum
    n0 = int(round(m0 / eps))
    if n0 < 1:
        raise SbmLabError("m0 below one particle mass; raise n_ppum or m0")
    p_surv = 1.0 - math.exp(-2.0 * m0 / t)
    expected = n_replicates / p_surv
    if expected > max_attempts:
        raise RejectionBudgetExceeded(
            f"would need ~{expected:.0f} attempts (> {max_attempts}) at "
            f"survival rate {p_surv:.2e}")
    if grid is None:
        grid = cluster_grid(t)
    cfg = SimConfig(backend="particles", x0=[(n0 * eps, 0.0)], t_final=t,
                    grid=grid, n_particles_per_unit_mass=n_ppum, seed=seed)
    dt = cfg.dt
    n_steps = int(round(t / dt))
    sqrt_dt = math.sqrt(t / n_steps)
    out = []
    attempts = 0
    batch = 0
    while len(out) < n_replicates:
        if attempts >= 2 * max_attempts:
            raise RejectionBudgetExceeded(
                f"spent {attempts} attempts for {len(out)}/{n_replicates} clusters")
        rng = _rng_for(seed, batch)
        pos = np.zeros(ATTEMPT_BATCH * n0, dtype=np.float32)
        rep = np.repeat(np.arange(ATTEMPT_BATCH, dtype=np.int32), n0)
        for _ in range(n_steps):
            pos, rep = _branch_step(pos, rep, rng, sqrt_dt)
        attempts += ATTEMPT_BATCH
        batch += 1
        if pos.size == 0:
            continue
        if pos.size:
            _extend_grid_for(cfg, pos.min(), pos.max())
        order = np.argsort(rep, kind="stable")
        pos = pos[order]
        rep = rep[order]
        cuts = np.flatnonzero(np.diff(rep)) + 1
        for pi in np.split(pos, cuts):
            if len(out) >= n_replicates:
                break
            out.append(ClusterSample(
                snapshot=_histogram_snapshot(pi, cfg, label=f"cluster{len(out)}"),
                conditioned_on_survival=True,
                mass=pi.size * eps,
                positions=pi.copy() if keep_positions else None))
    return out


# ---------------------------------------------------------------------------
# hitting tail
# ---------------------------------------------------------------------------

@dataclass
class HittingTailResult:
    t: float
    m0: float
    n_attempts: int
    R_values: np.ndarray
    hit_counts: np.ndarray
    nhat: np.ndarray                  # estimated cluster-rate of hitting [R, inf)
    bound_shape: np.ndarray           # R^{-2} (R/sqrt t)^3 exp(-R^2/2t)
    fitted_c: float
    gauss_slope: float                # slope of log nhat against -R^2/(2t)

    def rows(self):
        return list(zip(self.R_values, self.hit_counts, self.nhat,
                        self.bound_shape))


def hitting_tail_check(t: float, R_values, seed: int, n_attempts: int = 150_000,
                       m0: float | None = None, n_ppum: int = 100) -> HittingTailResult:
    """Estimate the cluster rate of ever charging [R, inf) by time t.

    With a small initial atom of mass m0 the per-attempt hit probability
    is 1 - exp(-m0 * rate), inverted exactly. Requires R > 2 sqrt(t).
    Coarse particles are enough for this macroscopic event, and checking
    only at step times undercounts slightly, which is the safe direction
    for an upper-bound comparison.
    """
    R_values = np.asarray(sorted(R_values), dtype=float)
    if R_values.min() <= 2.0 * math.sqrt(t):
        raise SbmLabError("hitting bound applies for R > 2 sqrt(t)")
    if m0 is None:
        m0 = t / 5.0
    eps = 1.0 / n_ppum
    n0 = int(round(m0 / eps))
    if n0 < 1:
        raise SbmLabError("m0 below one particle mass")
    dt = eps
    n_steps = int(round(t / dt))
    sqrt_dt = math.sqrt(t / n_steps)
    R_min = float(R_values[0])
    hits = np.zeros(R_values.size, dtype=np.int64)
    done = 0
    batch = 0
    while done < n_attempts:
        nb = min(ATTEMPT_BATCH, n_attempts - done)
        rng = _rng_for(seed, batch)
        pos = np.zeros(nb * n0, dtype=np.float32)
        rep = np.repeat(np.arange(nb, dtype=np.int32), n0)
        runmax = np.full(nb, -np.inf)
        for _ in range(n_steps):
            pos, rep = _branch_step(pos, rep, rng, sqrt_dt)
            # excursions beyond R_min are rare; only then pay for per-rep maxima
            if pos.size and pos.max() >= R_min:
                high = pos >= R_min
                np.maximum.at(runmax, rep[high], pos[high])
        for j, R in enumerate(R_values):
            hits[j] += int((runmax >= R).sum())
        done += nb
        batch += 1
    freq = hits / n_attempts
    with np.errstate(divide="ignore"):
        nhat = -np.log1p(-np.minimum(freq, 1 - 1e-12)) / (n0 * eps)
    shape = R_values ** -2.0 * (R_values / math.sqrt(t)) ** 3 \
        * np.exp(-R_values ** 2 / (2.0 * t))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(nhat > 0, nhat / shape, 0.0)
    fitted_c = float(max(ratio.max(), 1.0))
    use = nhat > 0
    if use.sum() >= 2:
        slope = float(np.polyfit(-R_values[use] ** 2 / (2.0 * t),
                                 np.log(nhat[use]), 1)[0])
    else:
        slope = float("nan")
    return HittingTailResult(t=t, m0=n0 * eps, n_attempts=n_attempts,
                             R_values=R_values, hit_counts=hits, nhat=nhat,
                             bound_shape=shape, fitted_c=fitted_c,
                             gauss_slope=slope)
