"""Shared test helpers."""

import numpy as np

import hmflab as H


def random_band_limited(rng, grid):
    """Random smooth band-limited field: a few gaussian bumps per mode row,
    reality-symmetric."""
    vals = np.zeros(grid.shape, dtype=complex)
    for n in range(0, grid.n_max + 1):
        row = np.zeros(grid.n_xi, dtype=complex)
        for _ in range(3):
            amp = rng.uniform(0.2, 1.0) * np.exp(2j * np.pi * rng.uniform())
            center = rng.uniform(-5, 5)
            width = rng.uniform(0.6, 2.0)
            row += amp * np.exp(-(grid.xi - center) ** 2 / (2 * width * width))
        vals[grid.row(n)] = row
        vals[grid.row(-n)] = np.conj(row[::-1])
    vals[grid.row(0)] = 0.5 * (vals[grid.row(0)] + np.conj(vals[grid.row(0)][::-1]))
    return H.SpectralField(grid, vals)
