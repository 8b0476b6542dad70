import math

import numpy as np
import pytest
from scipy.stats import ks_2samp

from sbmlab.errors import RejectionBudgetExceeded, SbmLabError
from sbmlab.sbm_sim import (ClusterSample, SimConfig, cluster_grid,
                            hitting_tail_check, sample_cluster, simulate)


def laplace_z(masses, lam, mass0, t):
    est = np.exp(-lam * masses)
    target = math.exp(-2 * lam * mass0 / (2 + lam * t))
    se = est.std(ddof=1) / math.sqrt(masses.size)
    return (est.mean() - target) / se


@pytest.fixture(scope="module")
def small_ensembles():
    out = {}
    for backend in ("particles", "spde_grid"):
        cfg = SimConfig(backend=backend, x0=[(1.0, 0.0)], t_final=1.0,
                        seed=101)
        out[backend] = simulate(cfg, 600)
    return out


class TestClosedFormMassLaw:
    @pytest.mark.parametrize("backend", ["particles", "spde_grid"])
    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
    def test_laplace_transform(self, small_ensembles, backend, lam):
        m = small_ensembles[backend].total_masses
        assert abs(laplace_z(m, lam, 1.0, 1.0)) < 3.5

    @pytest.mark.parametrize("backend", ["particles", "spde_grid"])
    def test_extinction_probability(self, small_ensembles, backend):
        m = small_ensembles[backend].total_masses
        p = (m == 0.0).mean()
        target = math.exp(-2.0)
        se = math.sqrt(target * (1 - target) / m.size)
        assert abs(p - target) < 3.5 * se

    def test_backends_agree_in_distribution(self, small_ensembles):
        a = small_ensembles["particles"].total_masses
        b = small_ensembles["spde_grid"].total_masses
        assert ks_2samp(a, b).pvalue > 0.01


class TestInvariants:
    def test_zero_initial_mass_stays_zero(self):
        cfg = SimConfig(backend="particles", x0=[], t_final=0.5, seed=3)
        ens = simulate(cfg, 5)
        assert all(s.values.sum() == 0 for s in ens.snapshots)
        assert np.all(ens.total_masses == 0)

    @pytest.mark.parametrize("backend", ["particles", "spde_grid"])
    def test_deterministic_given_seed(self, backend):
        cfg = lambda: SimConfig(backend=backend, x0=[(0.5, 0.0)], t_final=0.25,
                                seed=777)
        a = simulate(cfg(), 70)
        b = simulate(cfg(), 70)
        assert np.array_equal(a.total_masses, b.total_masses)
        for s, t in zip(a.snapshots, b.snapshots):
            assert np.array_equal(s.values, t.values)
            assert (s.x_min, s.x_max) == (t.x_min, t.x_max)

    def test_support_inside_grid(self):
        cfg = SimConfig(backend="particles", x0=[(1.0, 0.0)], t_final=1.0,
                        seed=11)
        ens = simulate(cfg, 40)
        for s in ens.snapshots:
            assert s.values[0] == 0.0 and s.values[-1] == 0.0

    def test_grid_auto_extends(self):
        # deliberately tiny declared grid: the histogram grid must grow
        cfg = SimConfig(backend="particles", x0=[(1.0, 0.0)], t_final=1.0,
                        grid=(-0.5, 0.5, 51), seed=13)
        ens = simulate(cfg, 30)
        s = ens.snapshots[0]
        assert s.x_min < -0.5 or s.x_max > 0.5

    def test_atom_outside_spde_grid_rejected(self):
        with pytest.raises(SbmLabError):
            cfg = SimConfig(backend="spde_grid", x0=[(1.0, 3.0)], t_final=0.5,
                            grid=(-1.0, 1.0, 51), seed=1)
            simulate(cfg, 2)


class TestClusters:
    def test_conditional_mean_mass(self, cluster_ensemble_small):
        masses = np.array([c.mass for c in cluster_ensemble_small])
        m0 = 1.0 / 200.0
        # from the closed-form mass law: E[M_t ; survive] = M_0
        target = m0 / (1.0 - math.exp(-2.0 * m0 / 1.0))
        se = masses.std(ddof=1) / math.sqrt(masses.size)
        assert abs(masses.mean() - target) < 3.5 * se

    def test_all_conditioned_and_positive(self, cluster_ensemble_small):
        assert all(isinstance(c, ClusterSample) for c in cluster_ensemble_small)
        assert all(c.conditioned_on_survival for c in cluster_ensemble_small)
        assert all(c.mass > 0 for c in cluster_ensemble_small)

    def test_survival_frequency(self):
        # unconditioned runs from a small atom: survival chance 1 - e^{-2 m0/t}
        m0, t = 0.05, 1.0
        cfg = SimConfig(backend="particles", x0=[(m0, 0.0)], t_final=t, seed=29)
        ens = simulate(cfg, 4000)
        p = (ens.total_masses > 0).mean()
        target = 1.0 - math.exp(-2 * m0 / t)
        se = math.sqrt(target * (1 - target) / 4000)
        assert abs(p - target) < 3.5 * se

    def test_additivity_of_independent_copies(self):
        # branching property: masses from a doubled atom match sums of two
        # independent single-atom runs
        m0, t = 0.1, 1.0
        cfg2 = SimConfig(backend="particles", x0=[(2 * m0, 0.0)], t_final=t,
                         seed=31)
        both = simulate(cfg2, 1500).total_masses
        cfg1 = SimConfig(backend="particles", x0=[(m0, 0.0)], t_final=t, seed=37)
        ones = simulate(cfg1, 3000).total_masses
        summed = ones[:1500] + ones[1500:]
        assert ks_2samp(both, summed).pvalue > 0.01

    def test_rejection_budget(self):
        with pytest.raises(RejectionBudgetExceeded):
            sample_cluster(t=1.0, n_replicates=1000, seed=1, m0=1e-4,
                           n_ppum=20000, max_attempts=10_000)

    def test_grid_scales_with_time(self):
        g1 = cluster_grid(1.0)
        g4 = cluster_grid(4.0)
        assert g4[1] > g1[1]


@pytest.fixture(scope="module")
def hit():
    return hitting_tail_check(t=1.0, R_values=[2.2, 2.6, 3.0, 3.4, 12.0],
                              seed=3, n_attempts=40_000)


class TestHitting:
    def test_far_field_never_hit(self, hit):
        assert hit.hit_counts[-1] == 0

    def test_gaussian_slope(self, hit):
        assert 0.8 <= hit.gauss_slope <= 1.2

    def test_fitted_constant_dominates(self, hit):
        assert hit.fitted_c >= 1.0
        assert np.all(hit.nhat <= hit.fitted_c * hit.bound_shape + 1e-12)

    def test_requires_tail_range(self):
        with pytest.raises(SbmLabError):
            hitting_tail_check(t=1.0, R_values=[1.0], seed=1, n_attempts=10)
