"""
Post-processing monitors: composite weighted norms, damping-rate fits, the
scattering limit, and the weak limit of the spatial average.

The composite monitor tracks three suprema over [0, T],

    growth part:  ||g(t)||_{H^s} / <t>^{2M+1}
    mode part:    max_k <t>^{s+1-2|k|} |z_k(t)|    (active modes k)
    low part:     ||g(t)||_{H^{s-2M-2}},

whose sum staying bounded uniformly in T is the quantitative signature of
nonlinear damping.  M = 1 gives the plain cosine exponents (<t>^3 growth
weight, <t>^{s-1} on the field modes, low order s-4); general M is the
finite-mode variant.  Rates are always asserted as log-log slopes with
exponent-level tolerances: the constants in the underlying bounds are not
constructive, only the exponents are falsifiable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import SpectralField, sobolev_norm
from .profiles import HomogeneousProfile, profile_values, tabulated
from .simulate import Trajectory, _rhs
from .volterra import ModeSeries

__all__ = [
    "NormMonitor",
    "q_monitor",
    "decay_fit",
    "weighted_mode_series",
    "ScatteringResult",
    "scattering_limit",
    "weak_limit_profile",
]


@dataclass(frozen=True)
class NormMonitor:
    """Composite weighted-norm monitor sampled along a trajectory."""

    s: int
    variant: str
    m_kernel: int
    times: np.ndarray
    growth_part: np.ndarray
    mode_part: np.ndarray
    low_part: np.ndarray
    q_series: np.ndarray          # running max of each part, summed; nondecreasing
    edge_tail_fraction: float     # weighted spectral mass near the grid edge

    @property
    def q_sup(self) -> float:
        return float(self.q_series[-1])

    def growth_from_halfway(self) -> float:
        """q_sup(T) / q_sup(T/2); values near 1 mean the monitor has saturated."""
        half = int(np.searchsorted(self.times, 0.5 * self.times[-1]))
        half = min(max(half, 1), len(self.times) - 1)
        return float(self.q_series[-1] / self.q_series[half])

    def bounded(self, threshold: float = 2.0) -> bool:
        """Flag runs whose monitor is still growing between T/2 and T."""
        return self.growth_from_halfway() < threshold


def q_monitor(traj: Trajectory, s: int | None = None, variant: str = "cosine") -> NormMonitor:
    """
    Evaluate the composite monitor along a trajectory.

    ``variant="cosine"`` uses M = 1 exponents regardless of the kernel;
    ``variant="finite_M"`` takes M from the kernel.  ``s`` defaults to the
    run's monitor index and may not exceed it (the norm ladder is only
    logged up to that order; grid-truncated norms are lower bounds of the
    true ones, so the edge tail fraction is reported to make
    under-resolution visible).
    """
    if variant not in ("cosine", "finite_M"):
        raise ValueError(f"unknown variant {variant!r}")
    cfg = traj.config
    s = cfg.s if s is None else int(s)
    if s > cfg.s:
        raise ValueError(f"s={s} exceeds the run's logged ladder (s={cfg.s})")
    m = 1 if variant == "cosine" else cfg.kernel.n_modes
    low_order = max(s - 2 * m - 2, 0)

    t = traj.times
    w = np.sqrt(1.0 + t * t)
    growth = traj.norm_history[:, s] / w ** (2 * m + 1)
    low = traj.norm_history[:, low_order]

    mode_part = np.zeros_like(t)
    for k in traj.field_modes.modes:
        weight = w ** (s + 1 - 2 * abs(k))
        mode_part = np.maximum(mode_part, weight * np.abs(traj.field_modes.mode(k)))

    q_series = (np.maximum.accumulate(growth)
                + np.maximum.accumulate(mode_part)
                + np.maximum.accumulate(low))

    last = traj.snapshots[-1]
    xi = last.grid.xi
    weighted = (1.0 + xi * xi) ** s * np.abs(last.values) ** 2
    band = max(3, int(0.05 * last.grid.n_xi))
    edge = float(np.sum(weighted[:, :band]) + np.sum(weighted[:, -band:]))
    total = float(np.sum(weighted))
    tail = edge / total if total > 0 else 0.0

    return NormMonitor(s=s, variant=variant, m_kernel=m, times=t, growth_part=growth,
                       mode_part=mode_part, low_part=low, q_series=q_series,
                       edge_tail_fraction=tail)


def weighted_mode_series(series: ModeSeries, gamma: float, mode: int = 1) -> ModeSeries:
    """Series <t>^gamma * z_mode(t), for flatness checks of weighted modes."""
    w = (1.0 + series.times ** 2) ** (gamma / 2.0)
    return ModeSeries(series.times, {mode: w * series.mode(mode)})


def decay_fit(series: ModeSeries, window: tuple, mode: int = 1) -> tuple:
    """
    Least-squares slope of log|z_mode| against log t on the window.

    Returns (slope, r_squared).  The window must start at t >= 1 and contain
    at least 20 samples; if |z| underflows 1e-14 inside the window the fit
    refuses and reports the largest usable sub-window instead of fitting
    noise.
    """
    t_a, t_b = float(window[0]), float(window[1])
    if t_a < 1.0:
        raise ValueError(f"fit window must start at t >= 1, got {t_a}")
    if not t_b > t_a:
        raise ValueError(f"empty fit window [{t_a}, {t_b}]")
    t = series.times
    sel = (t >= t_a) & (t <= t_b)
    if int(np.sum(sel)) < 20:
        raise ValueError(f"need at least 20 samples in [{t_a}, {t_b}], have {int(np.sum(sel))}")
    mag = np.abs(series.mode(mode)[sel])
    ts = t[sel]
    under = mag <= 1e-14
    if np.any(under):
        first_bad = int(np.argmax(under))
        if first_bad < 20:
            raise ValueError(f"series underflows 1e-14 at t={ts[first_bad]:.6g}; no usable sub-window")
        raise ValueError(
            f"series underflows 1e-14 at t={ts[first_bad]:.6g}; "
            f"largest usable sub-window is [{t_a:.6g}, {ts[first_bad - 1]:.6g}]")
    x = np.log(ts)
    y = np.log(mag)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(r2)


@dataclass(frozen=True)
class ScatteringResult:
    """Accumulated scattering state with a tail-of-integral indicator."""

    field: SpectralField
    tail_estimate: float          # ||rhs(t_final)||_{H^{s-4}} * <t_final>
    t_final: float


def scattering_limit(traj: Trajectory, up_to: float | None = None,
                     carry: ScatteringResult | None = None) -> ScatteringResult:
    """
    Trapezoidal accumulation of the scattering state

        g_inf = g(0) + int_0^T rhs(sigma) dsigma,

    with the integrand re-assembled from the recorded snapshots, which must
    therefore exist at every step (record_every == 1).  Passing ``carry``
    resumes from a previous partial accumulation; composite trapezoid is
    additive, so splitting the range reproduces the full result to roundoff.
    The returned tail estimate ||rhs(T)|| * <T> extrapolates what the
    truncated tail of the integral can still contribute.
    """
    cfg = traj.config
    if cfg.record_every != 1:
        raise ValueError("scattering_limit needs snapshots at every step (record_every == 1)")
    times = traj.snapshot_times
    t_end = float(times[-1]) if up_to is None else float(up_to)
    i1 = int(np.argmin(np.abs(times - t_end)))
    if carry is None:
        i0 = 0
        acc = traj.snapshots[0].values.astype(np.complex128).copy()
    else:
        i0 = int(np.argmin(np.abs(times - carry.t_final)))
        acc = carry.field.values.astype(np.complex128).copy()
    if i1 <= i0:
        raise ValueError(f"empty accumulation range [{times[i0]}, {t_end}]")

    dt = cfg.dt
    rhs_cache = None
    for i in range(i0, i1 + 1):
        rhs_cache = _rhs(traj.snapshots[i].values, float(times[i]), cfg)
        w = 0.5 * dt if i in (i0, i1) else dt
        acc += w * rhs_cache

    field = SpectralField(cfg.grid, acc, real_valued=True)
    low_order = max(cfg.s - 4, 1)
    rhs_field = SpectralField(cfg.grid, rhs_cache, real_valued=False)
    tail = sobolev_norm(rhs_field, low_order) * np.sqrt(1.0 + times[i1] ** 2)
    return ScatteringResult(field=field, tail_estimate=float(tail), t_final=float(times[i1]))


def weak_limit_profile(g_inf: SpectralField, prof: HomogeneousProfile, epsilon: float,
                       v_max: float = 12.0, n_v: int = 961) -> HomogeneousProfile:
    """
    Corrected homogeneous state: the x-average of the scattering state shifts
    the background,

        etainf_hat(xi) = etahat(xi) + eps * ghat_inf_0(xi),

    (the x-average is exactly the n = 0 row under the transform convention).
    The result is inverse-transformed onto a uniform v grid and returned as a
    tabulated profile.
    """
    grid = g_inf.grid
    row0 = g_inf.mode(0)
    v = np.linspace(-v_max, v_max, n_v)
    tw = grid.trapz_weights()
    kernel = np.exp(1j * np.outer(v, grid.xi))
    correction = (kernel @ (tw * row0)) / (2.0 * np.pi)
    eta_inf = profile_values(prof, v) + epsilon * correction.real
    return tabulated(v, eta_inf)
