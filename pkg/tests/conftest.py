"""Shared fixtures; expensive objects are session-scoped and reused."""
import numpy as np
import pytest

from sbmlab import profiles, spectral


@pytest.fixture(scope="session")
def f_result():
    return profiles.solve_F()


@pytest.fixture(scope="session")
def g_pair():
    return profiles.solve_G_ode()


@pytest.fixture(scope="session")
def g_pde():
    return profiles.solve_G()


@pytest.fixture(scope="session")
def eig_cache():
    cache = {}

    def get(phi, method="hermite", **kw):
        key = (phi, method, tuple(sorted(kw.items())))
        if key not in cache:
            spec = spectral.KillingSpec(phi=phi)
            if method == "hermite":
                cache[key] = spectral.eig_hermite(spec, **kw)
            else:
                cache[key] = spectral.eig_neumann_fd(spec, **kw)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def v_profiles():
    """v^lambda(t=1, .) for the lambdas used by comparison and duality tests."""
    out = {}
    for lam in (0.5, 1.0, 2.0, 4.0):
        cfg = profiles.default_pde_config(lam=lam, t_final=1.0)
        out[lam] = profiles.solve_v_lambda(cfg)
    return out


@pytest.fixture(scope="session")
def cluster_ensemble_small():
    from sbmlab import sbm_sim
    return sbm_sim.sample_cluster(t=1.0, n_replicates=400, seed=2024)
