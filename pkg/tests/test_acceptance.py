"""
Acceptance suite: every exit criterion at its stated tolerance, one printed
pass/fail line per criterion.

Two checks are implemented exactly as specified and are expected to fail;
the failures are analytic properties of the quantities being measured, not
implementation defects, and each failure message carries the measurement
that pins this down (the implementation side is cross-validated by an
independent route in both cases):

* criterion 5b: a field mode driven by data with Fourier tail <xi>^{-q}
  decays like t^{-q} (times the resolvent constant), so the <t>^{q-1}-
  weighted series has log-log slope near -1, not >= -0.5.  The tail-matched
  <t>^q weighting is near-flat, which is printed alongside.
* criterion 10: the stated pointwise-bound constant 1/(2 sqrt(pi)) drops
  the torus measure; the Cauchy-Schwarz argument gives 1/sqrt(2), and an
  x-independent gaussian already violates the smaller constant at
  (k, xi, alpha, beta) = (0, 0, 0, 0).  The inequality with the corrected
  constant is covered in test_grids.
"""

import time

import numpy as np
import pytest
from conftest import random_band_limited

import hmflab as H
from hmflab.cli import (damping_run_config, finite_m2_run_config,
                        scattering_run_config, unstable_run_config)

COS = H.InteractionKernel.cosine()
ANTI = H.InteractionKernel.anticosine()


def report(cid: str, ok: bool, detail: str) -> None:
    print(f"[{cid}] {'PASS' if ok else 'FAIL'}: {detail}", flush=True)
    assert ok, f"{cid}: {detail}"


def timed_run(cfg):
    t0 = time.monotonic()
    traj = H.run(cfg)
    return traj, time.monotonic() - t0


@pytest.fixture(scope="module")
def damping_traj():
    return timed_run(damping_run_config())


@pytest.fixture(scope="module")
def scattering_data():
    traj, secs = timed_run(scattering_run_config())
    return traj, H.scattering_limit(traj), secs


@pytest.fixture(scope="module")
def m2_traj():
    return timed_run(finite_m2_run_config())


@pytest.fixture(scope="module")
def unstable_traj():
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return timed_run(unstable_run_config())


@pytest.fixture(scope="module")
def crosscheck_data():
    grid = H.make_grid(4, 82.0, 4097, 1)
    cfg = H.SimConfig(grid=grid, kernel=COS, profile=H.maxwellian(1.0),
                      perturbations=H.Perturbation(mode=1, amplitude=1.0, envelope="gaussian"),
                      epsilon=0.0, dt=5e-3, t_final=20.0, record_every=800, s=7)
    traj, secs = timed_run(cfg)
    forcing = traj.snapshots[0].interp(1, traj.times)
    vol = H.solve_volterra(lambda t: H.memory_kernel(COS, cfg.profile, 1, t),
                           forcing, dt=cfg.dt, mode=1)
    return traj, vol, secs


def test_criterion_01_volterra_analytic_oracle():
    t0 = time.monotonic()
    sol = H.solve_volterra(lambda t: -np.ones_like(t), lambda t: np.ones_like(t),
                           dt=1e-3, t_final=5.0)
    err = float(np.max(np.abs(sol.mode(0) - np.exp(-sol.times))))
    sol2 = H.solve_volterra(lambda t: -np.ones_like(t), lambda t: np.ones_like(t),
                            dt=5e-4, t_final=5.0)
    err2 = float(np.max(np.abs(sol2.mode(0) - np.exp(-sol2.times))))
    ratio = err / err2
    secs = time.monotonic() - t0
    report("criterion 1", err <= 1e-6 and 3.2 <= ratio <= 4.8 and secs < 1.0,
           f"max|z - exp(-t)| = {err:.3e} <= 1e-6, halving ratio {ratio:.3f} in [3.2, 4.8], "
           f"runtime {secs:.2f}s < 1s")


def test_criterion_02_penrose_threshold():
    t0 = time.monotonic()
    family = lambda T: (ANTI, H.maxwellian(T))
    t_c = H.critical_parameter(family, 0.1, 1.0, tol=1e-3)
    rep = H.penrose_check(COS, H.maxwellian(1.0))
    secs = time.monotonic() - t0
    ok = abs(t_c - 0.5) <= 1e-3 and rep.stable and rep.modes[0].winding == 0 and secs < 10.0
    report("criterion 2", ok,
           f"T_c = {t_c:.5f} (|T_c - 0.5| <= 1e-3), cosine stable={rep.stable} "
           f"winding={rep.modes[0].winding}, runtime {secs:.1f}s < 10s")


def test_criterion_03_linear_crossvalidation(crosscheck_data):
    traj, vol, secs = crosscheck_data
    num = float(np.max(np.abs(traj.field_modes.mode(1) - vol.mode(1))))
    den = float(np.max(np.abs(vol.mode(1))))
    rel = num / den
    report("criterion 3", rel <= 1e-4 and secs < 60.0,
           f"relative sup discrepancy {rel:.3e} <= 1e-4 (T=20, n_max=4, n_xi=4097), "
           f"runtime {secs:.1f}s < 60s")


def test_criterion_04_volterra_boundedness():
    t0 = time.monotonic()
    rows = H.lemvolterra_harness(COS, H.maxwellian(1.0), gammas=[2, 3, 4, 5, 6],
                                 t_values=[50.0, 100.0], dt=0.02)
    by_gamma = {}
    for g, T, r in rows:
        by_gamma.setdefault(g, {})[T] = r
    changes = {g: abs(v[100.0] - v[50.0]) / v[50.0] for g, v in by_gamma.items()}
    secs = time.monotonic() - t0
    worst = max(changes.values())
    report("criterion 4", worst < 0.10 and secs < 30.0,
           f"max ratio change T=50 -> T=100 over gamma in 2..6: {100 * worst:.2f}% < 10%, "
           f"runtime {secs:.1f}s < 30s")


def test_criterion_05a_damping_exponent(damping_traj):
    traj, secs = damping_traj
    slope, r2 = H.decay_fit(traj.field_modes, (10.0, 80.0), mode=1)
    report("criterion 5a", slope <= -5.5 and secs < 300.0,
           f"log-log slope of |z_1| on [10, 80] = {slope:.3f} <= -5.5 (r2={r2:.4f}), "
           f"runtime {secs:.1f}s < 5min")


def test_criterion_05b_weighted_series_flatness(damping_traj):
    traj, _ = damping_traj
    tail = traj.config.perturbations[0].tail_exponent      # q = 7
    stated = H.weighted_mode_series(traj.field_modes, tail - 1.0, mode=1)
    slope, r2 = H.decay_fit(stated, (10.0, 80.0), mode=1)
    matched = H.weighted_mode_series(traj.field_modes, tail, mode=1)
    slope_matched, _ = H.decay_fit(matched, (40.0, 88.0), mode=1)
    report("criterion 5b", slope >= -0.5,
           f"<t>^{tail - 1:.0f}|z_1| slope on [10, 80] = {slope:.3f} (required >= -0.5); "
           f"a mode with prescribed tail <xi>^-{tail:.0f} decays like t^-{tail:.0f}, so this "
           f"weighting slopes to -1; the tail-matched <t>^{tail:.0f} weighting is near-flat "
           f"(late-window slope {slope_matched:+.3f})")


def test_criterion_06_scattering_rate(scattering_data):
    traj, result, secs = scattering_data
    cfg = traj.config
    idx = np.unique(np.round(np.geomspace(1, len(traj.snapshots) - 1, 64)).astype(int))
    times = traj.snapshot_times[idx]
    conv = np.empty(idx.size)
    for j, i in enumerate(idx):
        diff = H.SpectralField(cfg.grid, traj.snapshots[i].values - result.field.values,
                               real_valued=False)
        conv[j] = H.sobolev_norm(diff, 1)
    sel = (times >= cfg.t_final / 10.0) & (times <= 0.98 * cfg.t_final)
    slope = np.polyfit(np.log(times[sel]), np.log(conv[sel]), 1)[0]
    bound = -(cfg.s - 4) + 1
    report("criterion 6", slope <= bound and secs < 300.0,
           f"||g(t) - g_inf||_H1 log-log slope on the final decade = {slope:.2f} <= {bound}, "
           f"runtime {secs:.1f}s (run shared with the damping family)")


def test_criterion_07_conservation_suite(damping_traj, scattering_data, m2_traj,
                                         unstable_traj, crosscheck_data):
    runs = {
        "damping": damping_traj[0],
        "scattering": scattering_data[0],
        "finite-M2": m2_traj[0],
        "unstable": unstable_traj[0],
        "crosscheck": crosscheck_data[0],
    }
    details = []
    ok = True
    for name, traj in runs.items():
        mass = float(np.max(np.abs(traj.mass_series - traj.mass_series[0])))
        l2 = float(np.max(np.abs(traj.l2_series - traj.l2_series[0])) / traj.l2_series[0])
        reality = float(np.max(traj.reality_series))
        good = mass <= 1e-12 and l2 <= 1e-6 and reality <= 1e-10
        ok = ok and good
        details.append(f"{name}: mass {mass:.1e}, L2 {l2:.1e}, reality {reality:.1e}")
    report("criterion 7", ok, "; ".join(details) + " (bounds 1e-12 / 1e-6 / 1e-10)")


def test_criterion_08_instability_contrapositive(unstable_traj):
    traj, _ = unstable_traj
    cfg = traj.config
    z = np.abs(traj.field_modes.mode(1))
    growth = float(np.max(z) / z[0])
    lam = H.growth_rate(cfg.kernel, cfg.profile, n=1)
    sel = traj.times >= 15.0
    fitted = float(np.polyfit(traj.times[sel], np.log(z[sel]), 1)[0])
    rel = abs(fitted - lam) / lam
    report("criterion 8", growth >= 10.0 and rel <= 0.2,
           f"|z_1| grew {growth:.1f}x >= 10x over [0, 30]; fitted rate {fitted:.4f} vs "
           f"resolvent root {lam:.4f} ({100 * rel:.1f}% <= 20%)")


def test_criterion_09_finite_mode_preset(m2_traj):
    traj, secs = m2_traj
    cfg = traj.config
    mon = H.q_monitor(traj, variant="finite_M")
    ratio = mon.growth_from_halfway()
    slopes = {}
    for k in (1, 2):
        gamma = cfg.s + 1 - 2 * k
        slopes[k], _ = H.decay_fit(H.weighted_mode_series(traj.field_modes, gamma, mode=k),
                                   (15.0, 40.0), mode=k)
    ok = ratio < 2.0 and all(s >= -0.5 for s in slopes.values())
    report("criterion 9", ok,
           f"monitor growth T/2 -> T: {ratio:.3f} < 2; weighted slopes "
           f"<t>^9|z_1|: {slopes[1]:+.3f}, <t>^7|z_2|: {slopes[2]:+.3f} (both >= -0.5); "
           f"runtime {secs:.1f}s")


def test_criterion_10_embedding_with_stated_constant():
    stated_constant = 1.0 / (2.0 * np.sqrt(np.pi))
    rng = np.random.default_rng(42)
    grid = H.make_grid(3, 16.0, 513, 1)
    worst = 0.0
    for _ in range(100):
        f = random_band_limited(rng, grid)
        norms = H.norm_ladder(f, 3)
        absf = np.abs(f.values)
        kk = grid.modes[:, None].astype(float)
        xx = grid.xi[None, :]
        for alpha in range(4):
            for beta in range(4 - alpha):
                n = alpha + beta
                rhs = (2.0 ** (n / 2) * stated_constant
                       * (1 + kk * kk) ** (-alpha / 2) * (1 + xx * xx) ** (-beta / 2) * norms[n])
                worst = max(worst, float(np.max(absf / rhs)))
    report("criterion 10", worst <= 1.0,
           f"max lhs/rhs over 100 random band-limited fields, alpha+beta <= 3, with "
           f"C = 1/(2 sqrt(pi)): {worst:.3f} (required <= 1); the Cauchy-Schwarz constant "
           f"is 1/sqrt(2) = sqrt(2 pi) * C, and the inequality holds with it (max ratio "
           f"{worst * stated_constant / H.embedding_constant(1):.3f}, see test_grids)")
