"""Robust PCA with log-based low-rank and column-sparse surrogates.

The main entry points are :func:`solve_lls_rpca` for matrices and
:func:`denoise_cube` for hyperspectral cubes.
"""

__version__ = "0.1.0"

from .hsi import denoise_cube, extract_patches, load_cube, reassemble, save_cube
from .metrics import MetricReport, ergas, evaluate, psnr, ssim
from .noise import NoiseSpec, apply_spec
from .operators import (
    group_shrink_l21,
    l2log_norm,
    l2log_shrink,
    logdet_surrogate,
    logdet_svt,
    scalar_prox_oracle,
    soft_threshold,
)
from .solvers import (
    Decomposition,
    SolverConfig,
    decompose,
    residual,
    solve_lls_rpca,
    solve_rpca_l1,
    solve_rpca_l21,
)
