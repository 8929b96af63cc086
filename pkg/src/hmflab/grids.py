"""
Uniform spectral phase-space grids, weighted Sobolev norms, and field I/O.

State convention
----------------
A perturbation g(x, v) on the torus-times-line phase space is represented by
its Fourier transform

    ghat_n(xi) = (1/2pi) * int_{T x R} g(x, v) exp(-i*n*x - i*xi*v) dx dv,

sampled on spatial modes n in [-n_max, n_max] and a uniform frequency grid
xi in [-xi_max, xi_max] with an odd number of nodes (so xi = 0 is a node).
With this convention Parseval reads

    int_{T x R} a conj(b) dx dv = sum_n int ahat_n(xi) conj(bhat_n(xi)) dxi,

i.e. all 2pi bookkeeping lives inside the transform and every quadrature
constant below is 1.  See docs/conventions.md for the full table.

The squared weighted Sobolev norm of order ``order`` is

    sum_{p+q <= order} int (1 + v^2)^{m0} |d_x^p d_v^q g|^2 dx dv,

evaluated spectrally: d_x^p -> (i*n)^p, d_v^q -> (i*xi)^q, and the velocity
weight (1 + v^2)^{m0} becomes the operator (1 - d^2/dxi^2)^{m0}, discretized
with a fourth-order centered stencil and zero extension beyond the grid.
Anything outside the window (|n| > n_max or |xi| > xi_max) is exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

__all__ = [
    "PhaseGrid",
    "SpectralField",
    "make_grid",
    "cubic_interp",
    "sobolev_norm",
    "norm_ladder",
    "embedding_constant",
    "embedding_bound",
    "reality_defect",
    "symmetrized_values",
    "write_field_csv",
    "read_field_csv",
]


@dataclass(frozen=True)
class PhaseGrid:
    """
    Truncated (n, xi) grid carrying the velocity weight exponent.

    Parameters
    ----------
    n_max : int
        Spatial modes n in [-n_max, n_max].
    xi_max : float
        Half-width of the frequency window.
    n_xi : int
        Number of uniform xi nodes; must be odd so xi = 0 is a node.
    m0 : int
        Velocity weight exponent in (1 + v^2)^{m0}; a positive integer so the
        weight acts as an exact finite-difference operator in xi.
    """

    n_max: int
    xi_max: float
    n_xi: int
    m0: int = 1

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if not self.xi_max > 0:
            raise ValueError(f"xi_max must be positive, got {self.xi_max}")
        if self.n_xi < 3 or self.n_xi % 2 == 0:
            raise ValueError(f"n_xi must be odd and >= 3, got {self.n_xi}")
        if self.m0 < 1:
            raise ValueError(f"m0 must be a positive integer, got {self.m0}")
        xi = np.linspace(-self.xi_max, self.xi_max, self.n_xi)
        # make the nodes exactly antisymmetric so reality pairing and the
        # symmetry projector act bitwise on even data
        xi = 0.5 * (xi - xi[::-1])
        xi.flags.writeable = False
        modes = np.arange(-self.n_max, self.n_max + 1)
        modes.flags.writeable = False
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "dxi", 2.0 * self.xi_max / (self.n_xi - 1))

    @property
    def shape(self) -> tuple[int, int]:
        return (2 * self.n_max + 1, self.n_xi)

    def row(self, n: int) -> int:
        """Array row index of spatial mode n."""
        if abs(n) > self.n_max:
            raise ValueError(f"mode {n} outside [-{self.n_max}, {self.n_max}]")
        return n + self.n_max

    def trapz_weights(self) -> np.ndarray:
        w = np.full(self.n_xi, self.dxi)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


def make_grid(n_max: int, xi_max: float, n_xi: int, m0: int = 1) -> PhaseGrid:
    """Build a validated PhaseGrid (rejects even n_xi and nonpositive extents)."""
    return PhaseGrid(n_max=n_max, xi_max=xi_max, n_xi=n_xi, m0=m0)


@dataclass(frozen=True)
class SpectralField:
    """
    Immutable sampled transform ghat_n(xi) on a PhaseGrid.

    ``values[row, j]`` holds ghat_n(xi_j) with row = n + n_max.  When
    ``real_valued`` is set the field represents a real function and must obey
    ghat_{-n}(-xi) = conj(ghat_n(xi)) at paired nodes.
    """

    grid: PhaseGrid
    values: np.ndarray
    real_valued: bool = True

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} != grid shape {self.grid.shape}")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, grid: PhaseGrid, real_valued: bool = True) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128), real_valued)

    def mode(self, n: int) -> np.ndarray:
        """Read-only row of spatial mode n (zeros if |n| > n_max)."""
        if abs(n) > self.grid.n_max:
            return np.zeros(self.grid.n_xi, dtype=np.complex128)
        return self.values[self.grid.row(n)]

    def interp(self, n: int, targets):
        """Cubic interpolation of mode n at frequencies ``targets``."""
        if abs(n) > self.grid.n_max:
            out = np.zeros_like(np.atleast_1d(np.asarray(targets, dtype=float)), dtype=np.complex128)
            return out[0] if np.isscalar(targets) else out
        return cubic_interp(self.mode(n), self.grid, targets)

    def symmetrized(self) -> "SpectralField":
        return SpectralField(self.grid, symmetrized_values(self.values), self.real_valued)


def cubic_interp(row: np.ndarray, grid: PhaseGrid, targets):
    """
    Four-point Lagrange interpolation of one mode row on the uniform xi grid.

    The row is extended by zeros beyond the grid, matching the truncation
    semantics; targets with |xi| > xi_max return exactly 0.  On-node targets
    reproduce the stored value.
    """
    scalar = np.isscalar(targets)
    t = np.atleast_1d(np.asarray(targets, dtype=float))
    pos = (t + grid.xi_max) / grid.dxi
    i0 = np.floor(pos).astype(np.int64)
    th = pos - i0

    padded = np.zeros(grid.n_xi + 4, dtype=np.complex128)
    padded[2:-2] = row
    base = np.clip(i0 + 2, 1, grid.n_xi + 1)

    wm1 = -th * (th - 1.0) * (th - 2.0) / 6.0
    w0 = (th + 1.0) * (th - 1.0) * (th - 2.0) / 2.0
    w1 = -th * (th + 1.0) * (th - 2.0) / 2.0
    w2 = th * (th + 1.0) * (th - 1.0) / 6.0

    out = (wm1 * padded[base - 1] + w0 * padded[base]
           + w1 * padded[base + 1] + w2 * padded[base + 2])
    out[np.abs(t) > grid.xi_max] = 0.0
    return out[0] if scalar else out


def _second_derivative(u: np.ndarray, dxi: float) -> np.ndarray:
    """Fourth-order centered d^2/dxi^2 along the last axis, zero extension."""
    pad = np.zeros(u.shape[:-1] + (u.shape[-1] + 4,), dtype=u.dtype)
    pad[..., 2:-2] = u
    return (-pad[..., :-4] + 16.0 * pad[..., 1:-3] - 30.0 * pad[..., 2:-2]
            + 16.0 * pad[..., 3:-1] - pad[..., 4:]) / (12.0 * dxi * dxi)


def apply_velocity_weight(u: np.ndarray, grid: PhaseGrid) -> np.ndarray:
    """Apply (1 - d^2/dxi^2)^{m0} along the last axis."""
    w = u
    for _ in range(grid.m0):
        w = w - _second_derivative(w, grid.dxi)
    return w


def norm_ladder(field: SpectralField, max_order: int) -> np.ndarray:
    """
    All weighted Sobolev norms of order 0..max_order in one sweep.

    Returns
    -------
    ndarray, shape (max_order + 1,)
        ``out[n]`` is the order-n norm.  The shared building blocks
        W_q[k] = Re <(1 - d^2)^{m0} (xi^q ghat_k), xi^q ghat_k> are computed
        once per q, so the full ladder costs barely more than the top order.
    """
    if max_order < 0:
        raise ValueError(f"norm order must be >= 0, got {max_order}")
    grid = field.grid
    tw = grid.trapz_weights()
    W = np.empty((max_order + 1, grid.shape[0]))
    u = field.values
    for q in range(max_order + 1):
        if q:
            u = u * grid.xi
        a = apply_velocity_weight(u, grid)
        W[q] = np.add.reduce((np.conj(u) * a).real * tw, axis=1)

    k2 = grid.modes.astype(float) ** 2
    norms2 = np.empty(max_order + 1)
    for n in range(max_order + 1):
        total = 0.0
        for q in range(n + 1):
            # sum_{p=0}^{n-q} k^{2p} per mode
            kfac = np.ones_like(k2)
            acc = np.ones_like(k2)
            for _ in range(n - q):
                acc = acc * k2
                kfac = kfac + acc
            total += float(np.add.reduce(kfac * W[q]))
        norms2[n] = max(total, 0.0)
    return np.sqrt(norms2)


def sobolev_norm(field: SpectralField, order: int, m0: int | None = None) -> float:
    """
    Weighted Sobolev norm of the field at the given derivative order.

    ``m0``, when given, must match the grid's weight exponent (the norm is
    tied to the grid discretization of the weight).
    """
    if order < 0:
        raise ValueError(f"norm order must be >= 0, got {order}")
    if m0 is not None and m0 != field.grid.m0:
        raise ValueError(f"m0={m0} does not match grid m0={field.grid.m0}")
    return float(norm_ladder(field, order)[order])


def embedding_constant(m0: int) -> float:
    """
    Cauchy-Schwarz constant of the pointwise Fourier bound,

        C(m0) = (2 pi)^{-1/2} * (int (1 + v^2)^{-m0} dv)^{1/2},

    using the closed form int (1+v^2)^{-m} dv = pi * binom(2m-2, m-1) / 4^{m-1}.
    """
    if m0 < 1:
        raise ValueError(f"m0 must be a positive integer, got {m0}")
    integral = np.pi * comb(2 * m0 - 2, m0 - 1) / 4.0 ** (m0 - 1)
    return float(np.sqrt(integral / (2.0 * np.pi)))


def embedding_bound(field: SpectralField, k: int, xi: float, alpha: int, beta: int,
                    constant: float | None = None) -> tuple[float, float]:
    """
    Evaluate both sides of the pointwise mode bound

        |ghat_k(xi)| <= 2^{n/2} C(m0) <k>^{-alpha} <xi>^{-beta} ||g||_{H^n},

    with n = alpha + beta and <x> = (1 + x^2)^{1/2}.  Returns (lhs, rhs).
    ``constant`` overrides C(m0); the default is ``embedding_constant(m0)``.
    """
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be nonnegative")
    if abs(xi) > field.grid.xi_max:
        raise ValueError(f"xi={xi} outside the grid window [{-field.grid.xi_max}, {field.grid.xi_max}]")
    order = alpha + beta
    lhs = float(abs(field.interp(k, float(xi))))
    c = embedding_constant(field.grid.m0) if constant is None else float(constant)
    rhs = (2.0 ** (order / 2.0) * c
           * (1.0 + k * k) ** (-alpha / 2.0)
           * (1.0 + xi * xi) ** (-beta / 2.0)
           * sobolev_norm(field, order))
    return lhs, rhs


def reality_defect(field: SpectralField) -> float:
    """Max deviation from ghat_{-n}(-xi) = conj(ghat_n(xi)) over all nodes."""
    v = field.values
    return float(np.max(np.abs(v[::-1, ::-1] - np.conj(v))))


def symmetrized_values(values: np.ndarray) -> np.ndarray:
    """Average paired entries so the reality symmetry holds exactly."""
    return 0.5 * (values + np.conj(values[::-1, ::-1]))


def write_field_csv(field: SpectralField, path) -> None:
    """
    Write a field snapshot as CSV with header ``n,xi,re,im``.

    Rows are in lexicographic (n, xi-index) order with 17-significant-digit
    decimal floats, so snapshots round-trip and diff cleanly.
    """
    grid = field.grid
    with open(path, "w") as fh:
        fh.write("n,xi,re,im\n")
        for i, n in enumerate(grid.modes):
            for j in range(grid.n_xi):
                z = field.values[i, j]
                fh.write(f"{n},{grid.xi[j]:.17g},{z.real:.17g},{z.imag:.17g}\n")


def read_field_csv(path, m0: int = 1, real_valued: bool = True) -> SpectralField:
    """Read a snapshot written by :func:`write_field_csv`, rebuilding the grid."""
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding="utf-8")
    n_col = np.asarray(data["n"], dtype=int)
    xi_col = np.asarray(data["xi"], dtype=float)
    n_max = int(n_col.max())
    if n_col.min() != -n_max:
        raise ValueError(f"snapshot modes are not symmetric: [{n_col.min()}, {n_max}]")
    n_xi = int(np.sum(n_col == n_max))
    xi_row = xi_col[:n_xi]
    spacing = np.diff(xi_row)
    if n_xi < 3 or not np.allclose(spacing, spacing[0], rtol=1e-12, atol=1e-12):
        raise ValueError("snapshot xi grid is not uniform")
    grid = PhaseGrid(n_max=n_max, xi_max=float(xi_row[-1]), n_xi=n_xi, m0=m0)
    vals = (np.asarray(data["re"], dtype=float)
            + 1j * np.asarray(data["im"], dtype=float)).reshape(grid.shape)
    return SpectralField(grid, vals, real_valued=real_valued)


_FLOAT_FMT = "%.17g"


def write_series_csv(path, header: str, columns) -> None:
    """Write aligned 1-D arrays as CSV with 17-significant-digit floats."""
    cols = [np.asarray(c) for c in columns]
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in zip(*cols):
            fh.write(",".join(_FLOAT_FMT % float(x) for x in row) + "\n")
