"""Memory kernel, its half-plane transform, and the winding stability check."""

import numpy as np
import pytest
from scipy.special import wofz

import hmflab as H

COS = H.InteractionKernel.cosine()
ANTI = H.InteractionKernel.anticosine()


def khat_closed_form(p1, T, tau):
    """Transform of -p1 * t * exp(-T t^2 / 2) on t >= 0 via the Faddeeva function.

    int_0^inf t e^{-a t^2 - i tau t} dt = 1/(2a) - (i tau / 2a) * J,
    J = sqrt(pi)/(2 sqrt(a)) * wofz(-tau / (2 sqrt(a))), valid for Im tau <= 0.
    """
    a = T / 2.0
    tau = np.asarray(tau, dtype=complex)
    J = np.sqrt(np.pi) / (2 * np.sqrt(a)) * wofz(-tau / (2 * np.sqrt(a)))
    return -p1 * (1 / (2 * a) - 1j * tau / (2 * a) * J)


class TestMemoryKernel:
    def test_cosine_maxwellian_value(self):
        got = H.memory_kernel(COS, H.maxwellian(1.0), 1, 1.0)
        assert got == pytest.approx(-0.5 * np.exp(-0.5), rel=1e-14)

    def test_causality(self):
        t = np.array([-5.0, -0.5, -1e-9])
        assert np.all(H.memory_kernel(COS, H.maxwellian(1.0), 1, t) == 0.0)

    def test_anticosine_value(self):
        got = H.memory_kernel(ANTI, H.maxwellian(0.5), 1, 2.0)
        assert got == pytest.approx(np.exp(-1.0), rel=1e-14)

    def test_inactive_mode_is_zero(self):
        assert np.all(H.memory_kernel(COS, H.maxwellian(1.0), 3, np.linspace(0, 5, 11)) == 0.0)

    def test_fourth_power_decay_bound(self):
        t = np.linspace(0.0, 100.0, 2001)
        k = H.memory_kernel(COS, H.maxwellian(1.0), 1, t)
        assert np.max(np.abs(k) * (1 + t * t) ** 2) < 10.0


class TestKernelTransform:
    def test_at_zero_frequency(self):
        assert H.memory_kernel_transform(COS, H.maxwellian(1.0), 1, 0.0) == pytest.approx(-0.5, abs=1e-12)
        assert H.memory_kernel_transform(ANTI, H.maxwellian(0.25), 1, 0.0) == pytest.approx(2.0, abs=1e-11)

    def test_inactive_mode(self):
        taus = np.linspace(-5, 5, 11)
        assert np.all(H.memory_kernel_transform(COS, H.maxwellian(1.0), 2, taus) == 0.0)

    def test_against_faddeeva_oracle_on_real_axis(self):
        taus = np.linspace(-40.0, 40.0, 101)
        got = H.memory_kernel_transform(COS, H.maxwellian(1.0), 1, taus)
        exact = khat_closed_form(0.5, 1.0, taus)
        assert np.max(np.abs(got - exact)) < 1e-10

    def test_against_faddeeva_oracle_lower_half_plane(self):
        taus = np.array([0.3 - 0.7j, -2.0 - 0.1j, -1j * 1.5, 5.0 - 2.0j])
        got = H.memory_kernel_transform(ANTI, H.maxwellian(0.4), 1, taus)
        exact = khat_closed_form(-0.5, 0.4, taus)
        assert np.max(np.abs(got - exact)) < 1e-10

    def test_upper_half_plane_rejected(self):
        with pytest.raises(ValueError, match="Im tau"):
            H.memory_kernel_transform(COS, H.maxwellian(1.0), 1, 1.0 + 0.5j)

    def test_conjugacy(self):
        for tau in (1.7, 0.4 - 0.9j):
            a = H.memory_kernel_transform(COS, H.maxwellian(1.0), 1, tau)
            b = H.memory_kernel_transform(COS, H.maxwellian(1.0), 1, -np.conj(tau))
            assert b == pytest.approx(np.conj(a), rel=1e-12)

    def test_inverse_square_decay(self):
        taus = np.array([10.0, 20.0, 40.0, 80.0])
        vals = np.abs(H.memory_kernel_transform(COS, H.maxwellian(1.0), 1, taus))
        assert np.max(vals * (1 + taus ** 2)) < 10.0


class TestPenroseCheck:
    def test_cosine_maxwellian_stable(self):
        report = H.penrose_check(COS, H.maxwellian(1.0))
        assert report.stable
        mode = report.modes[0]
        assert mode.winding == 0
        # independent oracle for the real-axis minimum via the Faddeeva form
        taus = np.linspace(-60, 60, 40001)
        oracle = float(np.min(np.abs(1 - khat_closed_form(0.5, 1.0, taus))))
        assert mode.kappa_est == pytest.approx(oracle, abs=1e-4)

    def test_anticosine_cold_unstable(self):
        report = H.penrose_check(ANTI, H.maxwellian(0.4))
        assert not report.stable
        assert report.modes[0].winding != 0
        assert report.modes[0].kappa_est == 0.0

    def test_zero_kernel_trivially_stable(self):
        report = H.penrose_check(H.InteractionKernel((0.0,)), H.maxwellian(1.0))
        assert report.stable
        assert report.kappa_est == 1.0
        assert report.modes == ()

    def test_winding_invariant_under_refinement(self):
        for kernel, T in ((COS, 1.0), (ANTI, 0.4), (ANTI, 0.7)):
            coarse = H.penrose_check(kernel, H.maxwellian(T), scan=H.ScanParameters(n_tau=801))
            fine = H.penrose_check(kernel, H.maxwellian(T), scan=H.ScanParameters(n_tau=1601))
            assert coarse.modes[0].winding == fine.modes[0].winding

    def test_two_mode_kernel_reports_both(self):
        report = H.penrose_check(H.InteractionKernel((0.5, 0.25)), H.maxwellian(1.0))
        assert [m.n for m in report.modes] == [1, 2]
        assert report.stable

    def test_json_dict_keys(self):
        report = H.penrose_check(COS, H.maxwellian(1.0))
        doc = report.to_json_dict()
        mode = doc["modes"][0]
        for key in ("n", "winding", "min_abs", "kappa_est", "stable", "tau_scan"):
            assert key in mode
        assert len(mode["tau_scan"][0]) == 3


class TestCriticalParameter:
    def test_anticosine_critical_temperature(self):
        family = lambda T: (ANTI, H.maxwellian(T))
        t_c = H.critical_parameter(family, 0.1, 1.0, tol=1e-3)
        # closed form: 1 - Khat(1, 0) = 1 - 1/(2T) vanishes at T = 1/2
        assert t_c == pytest.approx(0.5, abs=1e-3)

    def test_same_verdict_bracket_rejected(self):
        family = lambda T: (COS, H.maxwellian(T))
        with pytest.raises(ValueError, match="verdict"):
            H.critical_parameter(family, 0.1, 1.0)

    def test_degenerate_bracket_rejected(self):
        family = lambda T: (ANTI, H.maxwellian(T))
        with pytest.raises(ValueError, match="bracket"):
            H.critical_parameter(family, 0.4, 0.4)


class TestGrowthRate:
    def test_matches_independent_quadrature_root(self):
        # frozen from a scipy.integrate.quad + bisection computation of
        # (1/2) int t exp(-0.2 t^2 - lam t) dt = 1
        lam = H.growth_rate(ANTI, H.maxwellian(0.4))
        assert lam == pytest.approx(0.11616622852666483, abs=1e-6)

    def test_root_is_resolvent_zero(self):
        lam = H.growth_rate(ANTI, H.maxwellian(0.4))
        val = H.memory_kernel_transform(ANTI, H.maxwellian(0.4), 1, -1j * lam)
        assert abs(1.0 - val) < 1e-8

    def test_stable_state_rejected(self):
        with pytest.raises(ValueError, match="no root"):
            H.growth_rate(COS, H.maxwellian(1.0))
