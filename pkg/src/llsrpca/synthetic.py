"""Seeded synthetic ground truth: low-rank cubes and corrupted matrices."""

import numpy as np


def low_rank_cube(rows=32, cols=32, bands=16, terms=4, seed=0):
    """Sum of `terms` nonnegative separable ``spatial x spectral`` products.

    Spatial maps are smooth sinusoidal textures, spectra are Gaussian bumps.
    The cube is divided by its maximum, so it lies in [0, 1] and its
    ``(rows*cols) x bands`` unfolding has rank `terms` (generically).
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:rows, 0:cols] / max(rows, cols)
    w = np.linspace(0.0, 1.0, bands)
    cube = np.zeros((rows, cols, bands))
    for _ in range(terms):
        fx, fy = rng.uniform(0.5, 3.0, 2)
        px, py = rng.uniform(0.0, 2 * np.pi, 2)
        spatial = 1.0 + np.sin(2 * np.pi * fx * xx + px) * np.cos(2 * np.pi * fy * yy + py)
        centre, width = rng.uniform(0.0, 1.0), rng.uniform(0.15, 0.5)
        spectrum = np.exp(-((w - centre) ** 2) / (2 * width**2))
        cube += spatial[:, :, None] * spectrum
    return cube / cube.max()


def column_corrupted(rows=40, cols=30, rank=2, n_outliers=3, seed=0):
    """Rank-`rank` matrix plus `n_outliers` fully corrupted columns.

    ``L0 = A @ B`` with entries of ``A``, ``B`` uniform on [-1, 1]; the
    outlier columns of ``S0`` are uniform on [-1, 1] as well.

    Returns
    -------
    L0, S0 : ndarray
    support : ndarray
      Sorted indices of the corrupted columns.
    """
    rng = np.random.default_rng(seed)
    L0 = rng.uniform(-1, 1, (rows, rank)) @ rng.uniform(-1, 1, (rank, cols))
    support = np.sort(rng.choice(cols, size=n_outliers, replace=False))
    S0 = np.zeros((rows, cols))
    S0[:, support] = rng.uniform(-1, 1, (rows, n_outliers))
    return L0, S0, support


def entry_corrupted(rows=40, cols=30, rank=2, fraction=0.05, seed=0):
    """Rank-`rank` matrix plus sparse entrywise corruption of magnitude ~1."""
    rng = np.random.default_rng(seed)
    L0 = rng.uniform(-1, 1, (rows, rank)) @ rng.uniform(-1, 1, (rank, cols))
    S0 = np.zeros((rows, cols))
    k = int(round(fraction * rows * cols))
    idx = rng.choice(rows * cols, size=k, replace=False)
    S0.flat[idx] = rng.choice([-1.0, 1.0], size=k) * rng.uniform(0.5, 1.5, size=k)
    return L0, S0
