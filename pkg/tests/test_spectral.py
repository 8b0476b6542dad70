import math
import warnings

import numpy as np
import pytest

from sbmlab.errors import OutOfRange, QuadratureUnderflow, SbmLabError, TruncationWarning
from sbmlab.grid import GridFunction, derivative
from sbmlab.spectral import (KillingSpec, dimension_from_lambda0, eig_hermite,
                             eig_neumann_fd, killing_callable,
                             survival_probability_check)

SQRT2PI = math.sqrt(2 * math.pi)


def m_weight(x):
    return np.exp(-x * x / 2) / SQRT2PI


def weighted_l2(x, v):
    return math.sqrt(float(np.trapezoid(v * v * m_weight(x), x)))


class TestUnkilled:
    def test_hermite_spectrum(self, eig_cache):
        er = eig_cache("zero")
        expected = 0.5 * np.arange(len(er.eigenvalues))
        assert np.max(np.abs(er.eigenvalues - expected)) < 1e-8
        psi0 = er.eigenfunctions[0]
        assert np.max(np.abs(psi0.values - 1.0)) < 1e-8
        assert er.theta0 == pytest.approx(1.0, abs=1e-10)

    def test_fd_even_sector(self, eig_cache):
        er = eig_cache("zero", "fd")
        assert abs(er.eigenvalues[0]) < 1e-4
        # half-interval Neumann discretization sees the even modes 0, 1, 2 ...
        assert er.eigenvalues[1] == pytest.approx(1.0, abs=1e-3)


class TestKnownEigenvalues:
    def test_half_killing_is_half(self, eig_cache):
        for method in ("hermite", "fd"):
            er = eig_cache("F_half", method)
            assert er.lambda0 == pytest.approx(0.5, abs=1e-3)

    def test_full_killing_headline(self, eig_cache):
        for method in ("hermite", "fd"):
            er = eig_cache("F", method)
            assert er.lambda0 == pytest.approx(0.8882, abs=5e-3)

    def test_methods_agree(self, eig_cache):
        for phi in ("zero", "F_half", "F", "G"):
            a = eig_cache(phi, "hermite").lambda0
            b = eig_cache(phi, "fd").lambda0
            assert abs(a - b) < 1e-3

    def test_g_killing_is_one(self, eig_cache):
        er = eig_cache("G")
        assert er.lambda0 == pytest.approx(1.0, abs=1e-3)

    def test_f_killing_has_exact_odd_eigenvalue(self, eig_cache):
        # differentiating the profile equation shows e^{x^2/2} F' is an
        # odd eigenfunction with eigenvalue exactly 1
        er = eig_cache("F")
        assert np.min(np.abs(er.eigenvalues - 1.0)) < 1e-6

    def test_half_killing_ground_state_identity(self, eig_cache, f_result):
        # e^{x^2/2} F(x) is a positive exact eigenfunction for killing F/2
        er = eig_cache("F_half")
        psi0 = er.eigenfunctions[0]
        x = psi0.x
        ref = np.exp(x * x / 2) * f_result.profile.interp(np.abs(x))
        ref /= weighted_l2(x, ref)
        assert weighted_l2(x, psi0.values - ref) < 1e-3

    def test_convergence_in_basis(self, eig_cache):
        a = eig_cache("F", basis_size=120).lambda0
        b = eig_cache("F", basis_size=240).lambda0
        assert abs(a - b) <= 1e-5


class TestEigenfunctions:
    def test_orthonormal(self, eig_cache):
        er = eig_cache("F", n_modes=8)
        x = er.eigenfunctions[0].x
        w = m_weight(x)
        for i in range(6):
            for j in range(i, 6):
                ip = float(np.trapezoid(er.eigenfunctions[i].values *
                                        er.eigenfunctions[j].values * w, x))
                assert ip == pytest.approx(1.0 if i == j else 0.0, abs=1e-6)

    def test_ground_state_positive(self, eig_cache):
        for phi in ("F", "G"):
            for method in ("hermite", "fd"):
                er = eig_cache(phi, method)
                assert er.eigenfunctions[0].values.min() > -1e-8

    def test_fd_orthonormal_in_native_weights(self, eig_cache):
        # the finite-volume route is orthonormal in its own discrete
        # m-weighted inner product by construction
        er = eig_cache("G", "fd")
        K, n = er.truncation_K, er.basis_size_or_n
        x = np.linspace(-K, K, n)
        h = x[1] - x[0]
        V = np.full(n, h)
        V[0] = V[-1] = h / 2
        w = V * np.exp(-x * x / 2) / SQRT2PI
        for i in range(4):
            for j in range(i, 4):
                f, g = er.eigenfunctions[i].values, er.eigenfunctions[j].values
                ip = float((w * f * g).sum())
                assert ip == pytest.approx(1.0 if i == j else 0.0, abs=1e-9)

    def test_g_ground_state_matches_gradient_form(self, eig_cache, g_pair):
        _, g_prime = g_pair
        er = eig_cache("G")
        psi0 = er.eigenfunctions[0]
        x = psi0.x
        ref = -np.exp(x * x / 2.0) * g_prime.interp(x)
        ref /= weighted_l2(x, ref)
        window = np.abs(x) <= 4.0
        num = math.sqrt(float(np.trapezoid(
            (psi0.values - ref)[window] ** 2 * m_weight(x[window]), x[window])))
        den = math.sqrt(float(np.trapezoid(
            psi0.values[window] ** 2 * m_weight(x[window]), x[window])))
        assert num / den <= 1e-2

    def test_gradient_form_is_eigenfunction(self, g_pair):
        # apply the killed generator to e^{x^2/2} G' on a grid and compare
        # with -1 times itself, in the weighted norm on [-4, 4]
        g_ode, g_prime = g_pair
        x0, x1, n = -5.0, 5.0, 2001
        x = np.linspace(x0, x1, n)
        psi = GridFunction(x0, x1, n, -np.exp(x * x / 2) * g_prime.interp(x))
        p1 = derivative(psi)
        p2 = derivative(p1)
        Apsi = 0.5 * p2.values - 0.5 * x * p1.values - g_ode.interp(x) * psi.values
        resid = Apsi + psi.values
        win = np.abs(x) <= 4.0
        rel = weighted_l2(x[win], resid[win]) / weighted_l2(x[win], psi.values[win])
        assert rel <= 1e-2

    def test_gradient_form_square_integrable(self, g_pair):
        _, g_prime = g_pair
        vals = []
        for K in (6.0, 8.0):
            x = np.linspace(-K, K, 2001)
            f = np.exp(x * x / 2) * g_prime.interp(x)
            vals.append(float(np.trapezoid(f * f * m_weight(x), x)))
        assert np.isfinite(vals).all()
        # the tail beyond |x| = 6 carries only ~3e-6 of relative mass
        assert abs(vals[1] - vals[0]) / vals[0] < 1e-4


class TestDimension:
    def test_values(self):
        assert dimension_from_lambda0(0.8882) == pytest.approx(0.2236, abs=1e-12)
        assert dimension_from_lambda0(0.75) == pytest.approx(0.5)
        assert dimension_from_lambda0(0.9999) == pytest.approx(0.0002)

    def test_out_of_range(self):
        for bad in (0.5, 1.0, 0.2, 1.3):
            with pytest.raises(OutOfRange):
                dimension_from_lambda0(bad)


class TestSurvival:
    def test_unkilled_survives(self):
        chk = survival_probability_check(KillingSpec(phi="zero"), t=2.0,
                                         mc_samples=500, seed=1)
        assert chk.mc_estimate == 1.0

    def test_requires_time_horizon(self):
        with pytest.raises(SbmLabError):
            survival_probability_check(KillingSpec(phi="zero"), t=0.5,
                                       mc_samples=10, seed=1)

    def test_g_killing_with_leading_order(self, eig_cache):
        # modest sample size: the omitted higher spectral modes contribute
        # about +20% here, so the statistical error must stay comparable
        chk = survival_probability_check(KillingSpec(phi="G"), t=3.0,
                                         mc_samples=2500, seed=5,
                                         eig=eig_cache("G"))
        assert abs(chk.z_score) <= 3.0


class TestValidation:
    def test_narrow_grid_rejected(self):
        phi = GridFunction(-0.5, 0.5, 11, np.ones(11))
        with pytest.raises(QuadratureUnderflow):
            killing_callable(KillingSpec(phi=phi))

    def test_negative_killing_rejected(self):
        phi = GridFunction(-2.0, 2.0, 11, -np.ones(11))
        with pytest.raises(SbmLabError):
            KillingSpec(phi=phi)

    def test_asymmetry_detected(self):
        x = np.linspace(-2, 2, 41)
        phi = GridFunction(-2.0, 2.0, 41, np.exp(x))
        with pytest.raises(SbmLabError):
            KillingSpec(phi=phi, symmetric=True)

    def test_basis_size_bounds(self):
        with pytest.raises(SbmLabError):
            eig_hermite(KillingSpec(phi="zero"), basis_size=10)

    def test_truncation_warning_for_small_box(self):
        # at K = 6 the left plateau of G is still being cut off
        with warnings.catch_warnings(record=True) as rec:
            warnings.simplefilter("always")
            er = eig_neumann_fd(KillingSpec(phi="G"), K=6.0, n=1200)
        assert any(issubclass(w.category, TruncationWarning) for w in rec) \
            or abs(er.lambda0 - 1.0) < 1e-3
