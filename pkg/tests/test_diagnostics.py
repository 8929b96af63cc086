"""Norm monitors, rate fits, scattering limit, and the weak limit."""

import numpy as np
import pytest

import hmflab as H

COS = H.InteractionKernel.cosine()


@pytest.fixture(scope="module")
def small_run():
    """Stable weakly nonlinear run with per-step snapshots."""
    grid = H.make_grid(2, 26.0, 521, 1)
    cfg = H.SimConfig(grid=grid, kernel=COS, profile=H.maxwellian(1.0),
                      perturbations=H.Perturbation(mode=1, amplitude=1.0),
                      epsilon=0.02, dt=0.025, t_final=12.0, record_every=1, s=7,
                      check_stability=False)
    return H.run(cfg)


class TestDecayFit:
    def test_exact_power_law(self):
        t = np.arange(0, 2001) * 0.05
        series = H.ModeSeries(t, {1: np.where(t > 0, t, 1.0) ** -6.0 + 0j})
        slope, r2 = H.decay_fit(series, (2.0, 90.0))
        assert slope == pytest.approx(-6.0, abs=1e-3)
        assert r2 > 0.999999

    def test_exponential_looks_steep(self):
        t = np.arange(0, 421) * 0.05
        series = H.ModeSeries(t, {1: np.exp(-t) + 0j})
        slope, r2 = H.decay_fit(series, (5.0, 20.0))
        assert slope < -10.0
        assert r2 < 1.0

    def test_window_must_start_past_one(self):
        t = np.arange(0, 101) * 0.1
        series = H.ModeSeries(t, {1: np.ones_like(t) + 0j})
        with pytest.raises(ValueError, match="t >= 1"):
            H.decay_fit(series, (0.5, 8.0))

    def test_needs_twenty_samples(self):
        t = np.arange(0, 101) * 0.1
        series = H.ModeSeries(t, {1: np.ones_like(t) + 0j})
        with pytest.raises(ValueError, match="20 samples"):
            H.decay_fit(series, (9.0, 10.0))

    def test_underflow_reports_usable_subwindow(self):
        t = np.arange(0, 2001) * 0.05
        vals = np.exp(-t).astype(complex)      # underflows 1e-14 near t = 32
        series = H.ModeSeries(t, {1: vals})
        with pytest.raises(ValueError, match="usable sub-window"):
            H.decay_fit(series, (5.0, 90.0))


class TestQMonitor:
    def test_zero_trajectory(self):
        grid = H.make_grid(1, 12.0, 241, 1)
        cfg = H.SimConfig(grid=grid, kernel=COS, profile=H.maxwellian(1.0),
                          perturbations=H.Perturbation(mode=1, amplitude=0.0),
                          epsilon=0.0, dt=0.1, t_final=10.0, record_every=100, s=7,
                          check_stability=False)
        mon = H.q_monitor(H.run(cfg))
        assert np.all(mon.growth_part == 0.0)
        assert np.all(mon.mode_part == 0.0)
        assert np.all(mon.low_part == 0.0)

    def test_parts_match_recorded_series(self, small_run):
        mon = H.q_monitor(small_run, variant="cosine")
        t = small_run.times
        w = np.sqrt(1 + t * t)
        assert np.allclose(mon.growth_part, small_run.norm_history[:, 7] / w ** 3)
        assert np.allclose(mon.low_part, small_run.norm_history[:, 3])
        expected_mode = np.maximum(w ** 6 * np.abs(small_run.field_modes.mode(1)),
                                   w ** 6 * np.abs(small_run.field_modes.mode(-1)))
        assert np.allclose(mon.mode_part, expected_mode)

    def test_q_series_nondecreasing(self, small_run):
        mon = H.q_monitor(small_run)
        assert np.all(np.diff(mon.q_series) >= -1e-15)

    def test_finite_m_exponents(self, small_run):
        # with M from the kernel (1 here) the variants agree; the finite_M
        # growth weight is <t>^{2M+1} and the low order is s - 2M - 2
        a = H.q_monitor(small_run, variant="cosine")
        b = H.q_monitor(small_run, variant="finite_M")
        assert np.allclose(a.q_series, b.q_series)
        assert b.m_kernel == 1

    def test_bounded_flag(self, small_run):
        mon = H.q_monitor(small_run)
        assert mon.bounded(threshold=2.0)

    def test_two_mode_kernel_monitor_exponents(self):
        # with M = 2 the growth weight is <t>^{2M+1} = <t>^5 and the low
        # order is s - 2M - 2; mode 2 carries the <t>^{s-3} weight
        grid = H.make_grid(2, 6.0, 121, 1)
        cfg = H.SimConfig(grid=grid, kernel=H.InteractionKernel((0.5, 0.25)),
                          profile=H.maxwellian(1.0),
                          perturbations=H.Perturbation(mode=1, amplitude=0.5),
                          epsilon=0.0, dt=0.05, t_final=2.0, record_every=40, s=10,
                          check_stability=False)
        traj = H.run(cfg)
        mon = H.q_monitor(traj, variant="finite_M")
        assert mon.m_kernel == 2
        w = np.sqrt(1 + traj.times ** 2)
        assert np.allclose(mon.growth_part, traj.norm_history[:, 10] / w ** 5)
        assert np.allclose(mon.low_part, traj.norm_history[:, 10 - 6])
        expected = np.zeros_like(traj.times)
        for k in (-2, -1, 1, 2):
            expected = np.maximum(expected,
                                  w ** (11 - 2 * abs(k)) * np.abs(traj.field_modes.mode(k)))
        assert np.allclose(mon.mode_part, expected)

    def test_s_cannot_exceed_logged_ladder(self, small_run):
        with pytest.raises(ValueError, match="ladder"):
            H.q_monitor(small_run, s=9)


class TestScatteringLimit:
    def test_static_when_nothing_moves(self):
        grid = H.make_grid(1, 12.0, 241, 1)
        cfg = H.SimConfig(grid=grid, kernel=COS, profile=H.maxwellian(1.0, mass=0.0),
                          perturbations=H.Perturbation(mode=1, amplitude=1.0),
                          epsilon=0.0, dt=0.1, t_final=10.0, record_every=1, s=7,
                          check_stability=False)
        traj = H.run(cfg)
        res = H.scattering_limit(traj)
        assert np.max(np.abs(res.field.values - traj.snapshots[0].values)) == 0.0
        assert res.tail_estimate == 0.0

    def test_requires_per_step_snapshots(self, small_run):
        grid = small_run.config.grid
        cfg = H.SimConfig(grid=grid, kernel=COS, profile=H.maxwellian(1.0),
                          perturbations=H.Perturbation(mode=1, amplitude=1.0),
                          epsilon=0.0, dt=0.1, t_final=10.0, record_every=2, s=7,
                          check_stability=False)
        traj = H.run(cfg)
        with pytest.raises(ValueError, match="record_every"):
            H.scattering_limit(traj)

    def test_split_and_resume_additivity(self, small_run):
        full = H.scattering_limit(small_run)
        half = H.scattering_limit(small_run, up_to=6.0)
        resumed = H.scattering_limit(small_run, carry=half)
        assert np.max(np.abs(resumed.field.values - full.field.values)) <= 1e-12
        assert resumed.t_final == full.t_final

    def test_distance_decreases_late(self, small_run):
        res = H.scattering_limit(small_run)
        cfg = small_run.config
        t_half = int(round(0.5 * cfg.t_final / cfg.dt))
        norms = []
        for i in (t_half, int(0.75 * cfg.t_final / cfg.dt), cfg.n_steps - 1):
            diff = H.SpectralField(cfg.grid, small_run.snapshots[i].values - res.field.values,
                                   real_valued=False)
            norms.append(H.sobolev_norm(diff, 1))
        assert norms[0] > norms[1] > norms[2]


class TestWeakLimit:
    def test_zero_coupling_returns_background(self, small_run):
        res = H.scattering_limit(small_run)
        prof = H.weak_limit_profile(res.field, small_run.config.profile, 0.0)
        v = prof.v_samples
        assert np.max(np.abs(prof.eta_samples - H.profile_values(H.maxwellian(1.0), v))) == 0.0

    def test_mass_shift_formula(self, small_run):
        cfg = small_run.config
        res = H.scattering_limit(small_run)
        prof = H.weak_limit_profile(res.field, cfg.profile, cfg.epsilon)
        mid = (cfg.grid.n_xi - 1) // 2
        expected = 1.0 + cfg.epsilon * np.real(res.field.values[cfg.grid.row(0), mid])
        assert prof.mass == pytest.approx(expected, abs=1e-6)

    def test_weak_convergence_of_spatial_average(self, small_run):
        # |ghat_0(t, xi) - ghat_inf_0(xi)| decays in t at fixed xi
        cfg = small_run.config
        res = H.scattering_limit(small_run)
        # times chosen while the gap is still above the O(dt^2) accumulation
        # floor of the reference state
        for xi in (0.5, 1.0, 2.0):
            gaps = []
            for t in (1.5, 3.0, 6.0):
                snap = small_run.snapshot_at(t)
                gaps.append(abs(snap.interp(0, xi) - res.field.interp(0, xi)))
            assert gaps[1] < 0.7 * gaps[0] and gaps[2] < 0.7 * gaps[1], f"xi={xi}: {gaps}"


class TestWeightedModeSeries:
    def test_weights_applied(self):
        t = np.arange(0, 11) * 0.5
        s = H.ModeSeries(t, {2: np.ones_like(t, dtype=complex)})
        w = H.weighted_mode_series(s, 3.0, mode=2)
        assert np.allclose(np.abs(w.mode(2)), (1 + t * t) ** 1.5)
