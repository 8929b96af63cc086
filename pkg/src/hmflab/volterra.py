"""
Product-integration solver for the causal linear field equation

    z(t) = int_0^t K(t - s) z(s) ds + F(t),

and the weighted sup-norm machinery used to monitor field-mode decay.

The quadrature is second-order product trapezoidal.  Higher order would buy
nothing here: the memory kernels of interest are continuous but not C^1 at
t = 0, which caps the gain from smooth quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .penrose import InteractionKernel, memory_kernel, penrose_check

__all__ = [
    "ModeSeries",
    "product_trapezoid",
    "solve_volterra",
    "solve_field_equation",
    "weighted_sup",
    "lemvolterra_harness",
]


@dataclass(frozen=True)
class ModeSeries:
    """
    Complex time series per spatial mode on a uniform time grid 0..T.

    ``values`` maps the mode number k to an array aligned with ``times``.
    For reality-symmetric dynamics the stored modes satisfy
    z_{-k}(t) = conj(z_k(t)), so only one sign needs to be kept.
    """

    times: np.ndarray
    values: dict

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("times must be a 1-D array with at least two samples")
        steps = np.diff(t)
        if not np.all(steps > 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
            raise ValueError("times must be strictly increasing and uniform")
        vals = {}
        for k, v in self.values.items():
            arr = np.asarray(v, dtype=np.complex128)
            if arr.shape != t.shape:
                raise ValueError(f"mode {k}: series length {arr.shape} != times {t.shape}")
            arr = arr.copy()
            arr.flags.writeable = False
            vals[int(k)] = arr
        t = t.copy()
        t.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", vals)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def modes(self) -> list:
        return sorted(self.values)

    def mode(self, k: int) -> np.ndarray:
        return self.values[k]

    def restricted(self, t_max: float) -> "ModeSeries":
        """Copy truncated to times <= t_max."""
        m = int(np.searchsorted(self.times, t_max + 1e-12 * max(t_max, 1.0), side="right"))
        return ModeSeries(self.times[:m], {k: v[:m] for k, v in self.values.items()})


def _samples(obj, times: np.ndarray) -> np.ndarray:
    if callable(obj):
        out = np.asarray(obj(times))
        if out.shape != times.shape:
            raise ValueError("callable must be vectorized over the time grid")
        return out.astype(np.complex128)
    out = np.asarray(obj, dtype=np.complex128)
    if out.shape != times.shape:
        raise ValueError(f"sample array length {out.shape} != time grid {times.shape}")
    return out


def product_trapezoid(kernel_samples: np.ndarray, forcing_samples: np.ndarray, dt: float) -> np.ndarray:
    """
    March the second-kind Volterra equation with product-trapezoidal weights.

    ``kernel_samples[m]`` holds K(m*dt).  Each step solves the implicit
    diagonal term in closed form: z_j = (F_j + dt*(K_j z_0/2 + sum_{0<i<j}
    K_{j-i} z_i)) / (1 - dt*K_0/2).
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    K = np.asarray(kernel_samples, dtype=np.complex128)
    F = np.asarray(forcing_samples, dtype=np.complex128)
    if K.shape != F.shape:
        raise ValueError("kernel and forcing sample arrays must be aligned")
    denom = 1.0 - 0.5 * dt * K[0]
    if abs(denom) < 1e-8:
        raise ValueError(f"step-size failure: |1 - (dt/2) K(0)| = {abs(denom):.2e} < 1e-8, reduce dt")
    n = K.size - 1
    z = np.empty(n + 1, dtype=np.complex128)
    z[0] = F[0]
    for j in range(1, n + 1):
        acc = 0.5 * K[j] * z[0]
        if j > 1:
            acc = acc + np.add.reduce(K[1:j][::-1] * z[1:j])
        z[j] = (F[j] + dt * acc) / denom
    return z


def solve_volterra(kernel, forcing, dt: float, t_final: float | None = None,
                   mode: int = 0) -> ModeSeries:
    """
    Solve one causal integral equation on the grid 0, dt, ..., t_final.

    ``kernel`` and ``forcing`` are vectorized callables of t or sample
    arrays aligned with the grid.  When sample arrays are given, t_final is
    inferred from their length.
    """
    if t_final is None:
        probe = forcing if not callable(forcing) else kernel
        if callable(probe):
            raise ValueError("t_final required when both kernel and forcing are callables")
        t_final = (len(probe) - 1) * dt
    n = int(round(t_final / dt))
    if abs(n * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise ValueError(f"t_final={t_final} is not a multiple of dt={dt}")
    times = np.arange(n + 1) * dt
    z = product_trapezoid(_samples(kernel, times), _samples(forcing, times), dt)
    return ModeSeries(times, {mode: z})


def solve_field_equation(ik: InteractionKernel, prof, forcing: ModeSeries) -> ModeSeries:
    """Solve the linearized field equation mode by mode with kernels K(n, .)."""
    out = {}
    for k in forcing.modes:
        K = memory_kernel(ik, prof, k, forcing.times)
        out[k] = product_trapezoid(K, forcing.mode(k), forcing.dt)
    return ModeSeries(forcing.times, out)


def weighted_sup(series: ModeSeries, gamma: float) -> float:
    """
    Discrete surrogate of the weighted mode norm: max over samples and modes
    of <t>^gamma |z_k(t)|, with <t> = (1 + t^2)^{1/2}.  A lower bound of the
    continuum sup since it only sees the sample grid.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    w = (1.0 + series.times ** 2) ** (gamma / 2.0)
    return max(float(np.max(w * np.abs(series.mode(k)))) for k in series.modes)


def lemvolterra_harness(ik: InteractionKernel, prof, gammas, t_values,
                        dt: float = 0.02, forcing_family=None, mode: int = 1,
                        kappa_target: float = 1e-2):
    """
    Empirical boundedness table for the weighted solve: for each (gamma, T)
    returns the ratio weighted_sup(solution, gamma) / weighted_sup(forcing,
    gamma).  A stabilizing ratio as T grows is the uniform-in-time constant
    the linear theory promises; the state must pass the stability check
    first (the bound presumes it).

    ``forcing_family(gamma)`` returns a vectorized forcing; the default is
    F(t) = <t>^{-gamma}.
    """
    report = penrose_check(ik, prof, kappa_target=kappa_target)
    if not report.stable:
        raise ValueError("harness refused: state fails the stability check; the bound presumes it")
    if forcing_family is None:
        forcing_family = lambda g: (lambda t: (1.0 + t * t) ** (-g / 2.0))
    rows = []
    for gamma in gammas:
        forcing = forcing_family(gamma)
        for t_final in t_values:
            sol = solve_volterra(lambda t: memory_kernel(ik, prof, mode, t),
                                 forcing, dt=dt, t_final=float(t_final), mode=mode)
            f_series = ModeSeries(sol.times, {mode: _samples(forcing, sol.times)})
            num = weighted_sup(sol, gamma)
            den = weighted_sup(f_series, gamma)
            rows.append((float(gamma), float(t_final), num / den if den > 0 else 0.0))
    return rows
