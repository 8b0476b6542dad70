"""Command-line front door: one subcommand per experiment.

Exit codes: 0 success, 1 numerical failure (package errors), 2 usage
errors (argparse, unknown config keys). Config precedence per key is
CLI flag > config file > built-in default; the resolved config and the
source of every key are recorded in the run manifest.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import boundary_stats, fractal_dim, profiles, sbm_sim, spectral
from .errors import SbmLabError
from .grid import GridFunction
from .io_store import RunManifest, Table, resolve_out_root, write_run

_SQRT2PI = math.sqrt(2.0 * math.pi)


def _float_list(text):
    return [float(v) for v in text.split(",") if v]


DEFAULTS = {
    "solve-f": dict(x_max=10.0, n_points=2001, tol=1e-10),
    "solve-g": dict(x_min=-12.0, x_max=12.0, n_points=2401,
                    lambda_surrogate=1e6, tol=5e-3),
    "eig": dict(phi="F", method="both", basis_size=120, K=8.0, n=2000,
                n_modes=12),
    "simulate": dict(backend="particles", t=1.0, n_replicates=200,
                     n_ppum=1000, mass=1.0),
    "localtime": dict(t_values=[0.5, 1.0, 2.0], n_clusters=400, mu=6.0,
                      n_ppum_base=1000, lambda0=None),
    "growth": dict(t=1.0, n_clusters=500, eps=1e-3, u_points=8),
    "tail": dict(t=1.0, n_replicates=4000, x_values=[0.0, 1.0],
                 lambda_max=256.0),
    "boxdim": dict(t=1.0, n_clusters=150, n_ppum=1500, h_base=0.01,
                   threshold=None),
    "pipeline": dict(n_clusters=240, n_ppum_base=800, boxdim_clusters=150),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sbmlab",
                                description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="output root (default $SBMLAB_OUT or ./sbmlab_out)")
    sub = p.add_subparsers(dest="subcommand")

    sp = sub.add_parser("solve-f", help="shooting solve of the symmetric profile F")
    sp.add_argument("--x-max", dest="x_max", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--n-points", dest="n_points", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--tol", type=float, default=argparse.SUPPRESS)

    sp = sub.add_parser("solve-g", help="PDE + shooting solve of the profile G")
    sp.add_argument("--x-min", dest="x_min", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--x-max", dest="x_max", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--n-points", dest="n_points", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--lambda-surrogate", dest="lambda_surrogate", type=float,
                    default=argparse.SUPPRESS)
    sp.add_argument("--tol", type=float, default=argparse.SUPPRESS)

    sp = sub.add_parser("eig", help="killed-OU eigenvalues/eigenfunctions")
    sp.add_argument("--phi", choices=spectral.BUILTIN_KILLINGS,
                    default=argparse.SUPPRESS)
    sp.add_argument("--method", choices=["hermite", "fd", "both"],
                    default=argparse.SUPPRESS)
    sp.add_argument("--basis-size", dest="basis_size", type=int,
                    default=argparse.SUPPRESS)
    sp.add_argument("--K", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--n", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--n-modes", dest="n_modes", type=int, default=argparse.SUPPRESS)

    sp = sub.add_parser("simulate", help="density ensembles from delta mass")
    sp.add_argument("--backend", choices=["particles", "spde_grid"],
                    default=argparse.SUPPRESS)
    sp.add_argument("--t", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--n-replicates", dest="n_replicates", type=int,
                    default=argparse.SUPPRESS)
    sp.add_argument("--n-ppum", dest="n_ppum", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--mass", type=float, default=argparse.SUPPRESS)

    sp = sub.add_parser("localtime", help="local-time totals across a time ladder")
    sp.add_argument("--t-values", dest="t_values", type=_float_list,
                    default=argparse.SUPPRESS)
    sp.add_argument("--n-clusters", dest="n_clusters", type=int,
                    default=argparse.SUPPRESS)
    sp.add_argument("--mu", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--n-ppum-base", dest="n_ppum_base", type=int,
                    default=argparse.SUPPRESS)
    sp.add_argument("--lambda0", type=float, default=argparse.SUPPRESS)

    sp = sub.add_parser("growth", help="mass near tau^eps against the u^2 law")
    sp.add_argument("--t", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--n-clusters", dest="n_clusters", type=int,
                    default=argparse.SUPPRESS)
    sp.add_argument("--eps", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--u-points", dest="u_points", type=int, default=argparse.SUPPRESS)

    sp = sub.add_parser("tail", help="left tail of the right-mass law")
    sp.add_argument("--t", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--n-replicates", dest="n_replicates", type=int,
                    default=argparse.SUPPRESS)
    sp.add_argument("--x-values", dest="x_values", type=_float_list,
                    default=argparse.SUPPRESS)
    sp.add_argument("--lambda-max", dest="lambda_max", type=float,
                    default=argparse.SUPPRESS)

    sp = sub.add_parser("boxdim", help="box dimension of the zero-set boundary")
    sp.add_argument("--t", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--n-clusters", dest="n_clusters", type=int,
                    default=argparse.SUPPRESS)
    sp.add_argument("--n-ppum", dest="n_ppum", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--h-base", dest="h_base", type=float, default=argparse.SUPPRESS)
    sp.add_argument("--threshold", type=float, default=argparse.SUPPRESS)

    sp = sub.add_parser("pipeline",
                        help="profiles -> spectra -> dimension, plus light "
                             "ensembles for the figure kinds")
    sp.add_argument("--n-clusters", dest="n_clusters", type=int,
                    default=argparse.SUPPRESS)
    sp.add_argument("--n-ppum-base", dest="n_ppum_base", type=int,
                    default=argparse.SUPPRESS)
    sp.add_argument("--boxdim-clusters", dest="boxdim_clusters", type=int,
                    default=argparse.SUPPRESS)
    return p


def resolve_config(subcommand: str, args: argparse.Namespace) -> tuple:
    """Merge defaults < config file < explicit CLI flags."""
    base = dict(DEFAULTS[subcommand])
    sources = {k: "default" for k in base}
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(base)
        if unknown:
            raise _UsageError(f"unknown config keys for {subcommand}: {sorted(unknown)}")
        for k, v in file_cfg.items():
            base[k] = v
            sources[k] = "file"
    skip = {"config", "seed", "jobs", "out", "subcommand"}
    for k, v in vars(args).items():
        if k in skip:
            continue
        base[k] = v
        sources[k] = "cli"
    base["subcommand"] = subcommand
    base["seed"] = args.seed
    return base, sources


class _UsageError(Exception):
    pass


def _store(cfg, sources, artifacts, out) -> str:
    manifest = RunManifest.for_config(cfg, seed=cfg["seed"])
    manifest.extra["config_sources"] = sources
    path = write_run(manifest, artifacts, resolve_out_root(out))
    print(f"run {manifest.run_id} -> {path}")
    return manifest.run_id


def _psi0_reference_from(g_prime: GridFunction) -> GridFunction:
    """Unit-normalized positive multiple of -e^{x^2/2} G' on g_prime's grid."""
    x = g_prime.x
    vals = -np.exp(x * x / 2.0) * g_prime.values
    w = np.exp(-x * x / 2.0) / _SQRT2PI
    nrm = math.sqrt(float(np.trapezoid(vals * vals * w, x)))
    return GridFunction(g_prime.x_min, g_prime.x_max, g_prime.n_points,
                        vals / nrm, label="psi0_reference")


def _restrict(gf: GridFunction, window: float) -> GridFunction:
    """Slice a grid function to |x| <= window.

    Eigenfunction series are only pointwise-meaningful on the core window:
    outside it the truncated basis rings and the e^{x^2/2} factor in the
    reference amplifies tail residue, both of which are invisible in the
    weighted norm but would dominate a plot.
    """
    x = gf.x
    keep = np.abs(x) <= window + 1e-12
    vals = gf.values[keep]
    xs = x[keep]
    return GridFunction(float(xs[0]), float(xs[-1]), int(xs.size), vals,
                        label=gf.label)


def cmd_solve_f(cfg, sources, args):
    res = profiles.solve_F(grid=(cfg["x_max"], cfg["n_points"]), tol=cfg["tol"])
    print(f"F(0) = {res.c_star:.8f}  (bracket width {res.bracket[1] - res.bracket[0]:.2e}, "
          f"{res.iterations} bisections)")
    artifacts = {
        "F": res.profile,
        "F_full": profiles.even_extension(res.profile),
        "shooting": dict(c_star=res.c_star, bracket=list(res.bracket),
                         iterations=res.iterations,
                         blowup_or_negativity_x=res.blowup_or_negativity_x),
    }
    return _store(cfg, sources, artifacts, args.out)


def cmd_solve_g(cfg, sources, args):
    grid = (cfg["x_min"], cfg["x_max"], cfg["n_points"])
    g_pde = profiles.solve_G(grid=grid, lambda_surrogate=cfg["lambda_surrogate"],
                             tol=cfg["tol"])
    g_ode, g_prime = profiles.solve_G_ode(grid=grid)
    gap = float(np.max(np.abs(g_pde.values - g_ode.values)))
    print(f"G(0) = {g_ode.interp(0.0):.6f}; PDE/ODE sup gap = {gap:.2e}")
    artifacts = {
        "G": g_pde,
        "G_ode": g_ode,
        "G_prime": g_prime,
        "solve_g": dict(sup_gap=gap, lambda_surrogate=cfg["lambda_surrogate"],
                        g_at_0=float(g_ode.interp(0.0))),
    }
    return _store(cfg, sources, artifacts, args.out)


def _eig_artifacts(phi_name, method, cfg):
    spec = spectral.KillingSpec(phi=phi_name)
    out = {}
    results = {}
    if method in ("hermite", "both"):
        results["hermite"] = spectral.eig_hermite(spec, basis_size=cfg["basis_size"],
                                                  n_modes=cfg["n_modes"])
    if method in ("fd", "both"):
        results["fd"] = spectral.eig_neumann_fd(spec, K=cfg["K"], n=cfg["n"],
                                                n_modes=cfg["n_modes"])
    summary = {}
    for name, er in results.items():
        summary[name] = dict(eigenvalues=[float(v) for v in er.eigenvalues],
                             theta0=er.theta0, method=er.method,
                             basis_size_or_n=er.basis_size_or_n,
                             truncation_K=er.truncation_K, notes=list(er.notes))
        out[f"psi0_{name}"] = er.eigenfunctions[0]
    out["eig_summary"] = dict(phi=phi_name, **summary)
    return out, results


def cmd_eig(cfg, sources, args):
    out, results = _eig_artifacts(cfg["phi"], cfg["method"], cfg)
    for name, er in results.items():
        print(f"lambda_0^{cfg['phi']} [{name}] = {er.lambda0:.4f}   theta0 = {er.theta0:.4f}")
    if cfg["phi"] == "G":
        _, g_prime = profiles.solve_G_ode(grid=(-8.0, 8.0, 1601))
        out["psi0_reference"] = _psi0_reference_from(g_prime)
    return _store(cfg, sources, out, args.out)


def cmd_simulate(cfg, sources, args):
    sim_cfg = sbm_sim.SimConfig(backend=cfg["backend"],
                                x0=[(cfg["mass"], 0.0)], t_final=cfg["t"],
                                n_particles_per_unit_mass=cfg["n_ppum"],
                                seed=cfg["seed"])
    ens = sbm_sim.simulate(sim_cfg, cfg["n_replicates"])
    masses = ens.total_masses
    rows = [[i, float(m)] for i, m in enumerate(masses)]
    lam_probe = [0.5, 1.0, 2.0]
    checks = {}
    for lam in lam_probe:
        est = float(np.mean(np.exp(-lam * masses)))
        tgt = math.exp(-2 * lam * cfg["mass"] / (2 + lam * cfg["t"]))
        checks[f"laplace_{lam:g}"] = dict(estimate=est, closed_form=tgt)
    checks["extinct"] = dict(estimate=float((masses == 0).mean()),
                             closed_form=math.exp(-2 * cfg["mass"] / cfg["t"]))
    print(f"{cfg['backend']}: {cfg['n_replicates']} replicates, "
          f"mean mass {masses.mean():.4f}, extinct {(masses == 0).mean():.4f}")
    artifacts = {
        "masses": Table(columns=["replicate", "mass"], rows=rows),
        "snapshot0": ens.snapshots[0],
        "sim_summary": dict(checks=checks, config=sim_cfg.as_dict()),
    }
    return _store(cfg, sources, artifacts, args.out)


def _default_lambda0(cfg):
    if cfg.get("lambda0") is None:
        er = spectral.eig_hermite(spectral.KillingSpec(phi="F"))
        cfg["lambda0"] = float(er.lambda0)
    return cfg["lambda0"]


def cmd_localtime(cfg, sources, args):
    lam0 = _default_lambda0(cfg)
    res = boundary_stats.local_time_t_exponent(
        lambda0=lam0, t_values=tuple(cfg["t_values"]), n_clusters=cfg["n_clusters"],
        seed=cfg["seed"], mu=cfg["mu"], n_ppum_base=cfg["n_ppum_base"],
        jobs=args.jobs)
    print(f"mean-total exponent {res.mean_fit.exponent:+.4f} (target {-lam0:+.4f}); "
          f"second-moment exponent {res.second_fit.exponent:+.4f} "
          f"(target {1 - 2 * lam0:+.4f})")
    rows = [[t, la, m, s] for t, la, m, s in
            zip(res.t_values, res.lam_values, res.mean_rate_totals,
                res.second_moment_rates)]
    artifacts = {
        "localtime": Table(columns=["t", "lambda", "mean_rate_total",
                                    "second_moment_rate"], rows=rows),
        "localtime_fit": dict(
            mean_exponent=res.mean_fit.exponent, mean_stderr=res.mean_fit.stderr,
            mean_r2=res.mean_fit.r2, second_exponent=res.second_fit.exponent,
            second_stderr=res.second_fit.stderr, lambda0_used=lam0,
            n_clusters=res.n_clusters),
    }
    return _store(cfg, sources, artifacts, args.out)


def cmd_growth(cfg, sources, args):
    clusters = sbm_sim.sample_cluster(t=cfg["t"], n_replicates=cfg["n_clusters"],
                                      seed=cfg["seed"])
    eps = cfg["eps"]
    u = np.sqrt(eps) * np.geomspace(1.0, 10.0, cfg["u_points"])
    res = boundary_stats.boundary_growth_experiment(clusters, eps, u)
    print(f"u-exponent = {res.fit.exponent:.3f} over {res.n_survivors} survivors")
    artifacts = {
        "growth": Table(columns=["u", "mean_mass"],
                        rows=[[float(a), float(b)] for a, b in
                              zip(res.u_values, res.mean_mass)]),
        "growth_fit": dict(exponent=res.fit.exponent, stderr=res.fit.stderr,
                           r2=res.fit.r2, eps=eps, n_survivors=res.n_survivors),
    }
    return _store(cfg, sources, artifacts, args.out)


def cmd_tail(cfg, sources, args):
    sim_cfg = sbm_sim.SimConfig(backend="particles", x0=[(1.0, 0.0)],
                                t_final=cfg["t"], seed=cfg["seed"])
    ens = sbm_sim.simulate(sim_cfg, cfg["n_replicates"], keep_positions=True)
    ladder = 2.0 ** np.arange(0, int(math.log2(cfg["lambda_max"])) + 1)
    results = boundary_stats.left_tail_experiment(ens, cfg["x_values"], ladder)
    rows = []
    fits = {}
    for r in results:
        for lam, pr in zip(r.lambdas, r.probabilities):
            rows.append([r.x, float(lam), float(pr)])
        fits[f"x={r.x:g}"] = dict(slope=r.fit.exponent, stderr=r.fit.stderr)
        print(f"x={r.x:g}: slope {r.fit.exponent:+.3f}")
    artifacts = {
        "tail": Table(columns=["x", "lambda", "probability"], rows=rows),
        "tail_fit": fits,
    }
    return _store(cfg, sources, artifacts, args.out)


def _boxdim_threshold(cfg) -> float:
    if cfg.get("threshold"):
        return cfg["threshold"]
    # ten times the single-particle density quantum at the chosen bandwidth
    h = cfg["h_base"] * math.sqrt(cfg["t"])
    return 10.0 / (cfg["n_ppum"] * h)


def cmd_boxdim(cfg, sources, args):
    t = cfg["t"]
    grid = sbm_sim.cluster_grid(t, cfg["h_base"])
    clusters = sbm_sim.sample_cluster(t=t, n_replicates=cfg["n_clusters"],
                                      seed=cfg["seed"], n_ppum=cfg["n_ppum"],
                                      grid=grid)
    h = cfg["h_base"] * math.sqrt(t)
    ladder = h * 2.0 ** np.arange(1, 7)
    thr = _boxdim_threshold(cfg)
    report = fractal_dim.ensemble_dimension_report(
        [c.snapshot for c in clusters], ladder, thr)
    print(f"median box dimension {report['median']:.3f} "
          f"(IQR {report['iqr'][0]:.3f}..{report['iqr'][1]:.3f}, "
          f"robust fraction {report['robust_fraction']:.2f})")
    counts_rows = []
    for c in clusters[:50]:
        res = None
        try:
            res = fractal_dim.box_dimension(c.snapshot, ladder, thr)
        except Exception:
            continue
        for e, n in zip(res.eps_ladder, res.counts):
            counts_rows.append([c.snapshot.label, float(e), int(n)])
    artifacts = {
        "boxcounts": Table(columns=["snapshot", "eps", "count"], rows=counts_rows),
        "boxdim_summary": dict(median=report["median"], iqr=list(report["iqr"]),
                               n_fitted=report["n_fitted"],
                               robust_fraction=report["robust_fraction"],
                               threshold=thr,
                               note="box-count estimate on a finite ladder; "
                                    "exploratory, not a Hausdorff computation"),
    }
    return _store(cfg, sources, artifacts, args.out)


def cmd_pipeline(cfg, sources, args):
    # profiles
    shoot = profiles.solve_F()
    f_full = profiles.even_extension(shoot.profile)
    g_pde = profiles.solve_G()
    g_ode, g_prime = profiles.solve_G_ode(grid=(-8.0, 8.0, 1601))

    # spectra: both methods for F; hermite for F/2 and G
    spec_f = spectral.KillingSpec(phi="F")
    er_h = spectral.eig_hermite(spec_f)
    er_fd = spectral.eig_neumann_fd(spec_f)
    er_fh = spectral.eig_hermite(spectral.KillingSpec(phi="F_half"))
    er_g = spectral.eig_hermite(spectral.KillingSpec(phi="G"))
    lam0 = float(er_h.lambda0)
    dim = spectral.dimension_from_lambda0(lam0)

    # convergence ladders (basis size and truncation box)
    conv_rows = []
    for bs in (60, 90, 120):
        er = spectral.eig_hermite(spec_f, basis_size=bs, n_modes=2)
        conv_rows.append(["hermite", float(bs), float(er.lambda0)])
    for K in (6.0, 7.0, 8.0):
        er = spectral.eig_neumann_fd(spec_f, K=K, n=int(250 * K), n_modes=2,
                                     check_truncation=False)
        conv_rows.append(["fd", float(K), float(er.lambda0)])

    # light ensembles so every figure kind has data
    res_lt = boundary_stats.local_time_t_exponent(
        lambda0=lam0, n_clusters=cfg["n_clusters"], seed=cfg["seed"],
        n_ppum_base=cfg["n_ppum_base"], jobs=args.jobs)
    bd_cfg = dict(t=1.0, n_clusters=cfg["boxdim_clusters"], n_ppum=1500,
                  h_base=0.01, threshold=None)
    grid = sbm_sim.cluster_grid(1.0, bd_cfg["h_base"])
    clusters = sbm_sim.sample_cluster(t=1.0, n_replicates=bd_cfg["n_clusters"],
                                      seed=cfg["seed"] + 7, n_ppum=bd_cfg["n_ppum"],
                                      grid=grid)
    ladder = bd_cfg["h_base"] * 2.0 ** np.arange(1, 7)
    thr = _boxdim_threshold(bd_cfg)
    report = fractal_dim.ensemble_dimension_report(
        [c.snapshot for c in clusters], ladder, thr)

    print(f"lambda_0^F = {lam0:.4f} (hermite)   {er_fd.lambda0:.4f} (fd)")
    print(f"lambda_0^(F/2) = {er_fh.lambda0:.4f}   lambda_0^G = {er_g.lambda0:.4f}")
    print(f"dim = 2 - 2*lambda_0 = {dim:.4f}")
    print(f"{dim:.4f}")

    artifacts = {
        "F": shoot.profile,
        "F_full": f_full,
        "G": g_pde,
        "G_ode": g_ode,
        "G_prime": g_prime,
        "psi0_G": _restrict(er_g.eigenfunctions[0], 5.0),
        "psi0_reference": _restrict(_psi0_reference_from(g_prime), 5.0),
        "psi0_F": _restrict(er_h.eigenfunctions[0], 5.0),
        "convergence": Table(columns=["method", "parameter", "lambda0"],
                             rows=conv_rows),
        "localtime": Table(columns=["t", "lambda", "mean_rate_total",
                                    "second_moment_rate"],
                           rows=[[float(t), float(la), float(m), float(s)]
                                 for t, la, m, s in zip(
                                     res_lt.t_values, res_lt.lam_values,
                                     res_lt.mean_rate_totals,
                                     res_lt.second_moment_rates)]),
        "localtime_fit": dict(mean_exponent=res_lt.mean_fit.exponent,
                              mean_stderr=res_lt.mean_fit.stderr,
                              second_exponent=res_lt.second_fit.exponent,
                              lambda0_used=lam0),
        "boxcounts": Table(
            columns=["snapshot", "eps", "count"],
            rows=[[c.snapshot.label, float(e), int(n)]
                  for c in clusters[:50]
                  for e, n in _safe_boxcounts(c.snapshot, ladder, thr)]),
        "boxdim_summary": dict(median=report["median"], iqr=list(report["iqr"]),
                               n_fitted=report["n_fitted"], threshold=thr,
                               robust_fraction=report["robust_fraction"]),
        "pipeline_summary": dict(
            lambda0_hermite=lam0, lambda0_fd=float(er_fd.lambda0),
            lambda0_F_half=float(er_fh.lambda0), lambda0_G=float(er_g.lambda0),
            dimension=dim, F_at_0=shoot.c_star,
            G_at_0=float(g_ode.interp(0.0)),
            theta0_F=er_h.theta0, theta0_G=er_g.theta0),
    }
    return _store(cfg, sources, artifacts, args.out)


def _safe_boxcounts(snapshot, ladder, thr):
    try:
        res = fractal_dim.box_dimension(snapshot, ladder, thr)
    except Exception:
        return []
    return list(zip(res.eps_ladder, res.counts))


COMMANDS = {
    "solve-f": cmd_solve_f,
    "solve-g": cmd_solve_g,
    "eig": cmd_eig,
    "simulate": cmd_simulate,
    "localtime": cmd_localtime,
    "growth": cmd_growth,
    "tail": cmd_tail,
    "boxdim": cmd_boxdim,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg, sources = resolve_config(args.subcommand, args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        COMMANDS[args.subcommand](cfg, sources, args)
    except SbmLabError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
