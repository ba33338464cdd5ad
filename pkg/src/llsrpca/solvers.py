"""Inexact ALM decomposition ``X = L + S`` with pluggable proximal steps.

Three variants share one loop:

=========  ======================  ======================
variant    L-step                  S-step
=========  ======================  ======================
lls_rpca   log-det SVT             column l2,log shrinkage
rpca_l1    nuclear-norm SVT        entrywise soft threshold
rpca_l21   nuclear-norm SVT        column l2,1 shrinkage
=========  ======================  ======================

Each iteration with penalty ``rho`` does::

    L     = prox_L(X - S + Theta/rho, 1/rho)
    S     = prox_S(X - L + Theta/rho, lambda/rho)
    Theta = Theta + rho * (X - L - S)
    rho   = rho * kappa
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import operators as ops

VARIANTS = ("lls_rpca", "rpca_l1", "rpca_l21")

# (L-step, S-step, low-rank penalty, sparse penalty)
_STEPS = {
    "lls_rpca": (ops.logdet_svt, ops.l2log_shrink,
                 ops.logdet_surrogate, ops.l2log_norm),
    "rpca_l1": (ops.nuclear_svt, ops.soft_threshold,
                lambda L: float(np.sum(np.linalg.svd(L, compute_uv=False))),
                lambda S: float(np.abs(S).sum())),
    "rpca_l21": (ops.nuclear_svt, ops.group_shrink_l21,
                 lambda L: float(np.sum(np.linalg.svd(L, compute_uv=False))),
                 lambda S: float(np.linalg.norm(S, axis=0).sum())),
}


class SolverError(RuntimeError):
    """A numeric failure inside the ALM loop."""

    def __init__(self, message, iteration):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass(frozen=True)
class SolverConfig:
    """ALM parameters. ``lam=None`` means ``1/sqrt(max(rows, cols))``."""

    lam: float | None = None
    rho0: float = 1e-2
    kappa: float = 1.2
    tol: float = 1e-7
    max_iter: int = 500
    variant: str = "lls_rpca"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.lam is not None and not self.lam > 0:
            raise ValueError("lam must be positive")
        if not self.rho0 > 0:
            raise ValueError("rho0 must be positive")
        if not self.kappa > 1:
            raise ValueError("kappa must be greater than 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")

    def resolve_lambda(self, shape):
        if self.lam is not None:
            return float(self.lam)
        return 1.0 / np.sqrt(max(shape))

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass
class MultiplierState:
    theta: np.ndarray
    rho: float


@dataclass
class Decomposition:
    L: np.ndarray
    S: np.ndarray
    iterations: int
    final_residual: float
    converged: bool
    objective_trace: list = field(default_factory=list)
    residual_trace: list = field(default_factory=list)
    rho_trace: list = field(default_factory=list)
    lam: float = 0.0
    variant: str = "lls_rpca"


def residual(X, L, S):
    """Relative feasibility gap ``||X - L - S||_F / ||X||_F``."""
    X, L, S = (np.asarray(A, dtype=np.float64) for A in (X, L, S))
    if not X.shape == L.shape == S.shape:
        raise ValueError(f"shape mismatch: {X.shape}, {L.shape}, {S.shape}")
    denom = max(np.linalg.norm(X), np.finfo(np.float64).tiny)
    return float(np.linalg.norm(X - L - S) / denom)


def decompose(X, config=None):
    """Split `X` into low-rank `L` and sparse `S` with the configured variant.

    Parameters
    ----------
    X : array_like
      Data matrix, shape (m, n), finite and nonempty
    config : SolverConfig, optional
      Loop parameters; defaults to ``SolverConfig()``

    Returns
    -------
    Decomposition
      Components plus diagnostics. Hitting ``max_iter`` is not an error;
      it is reported through ``converged=False``.
    """
    config = SolverConfig() if config is None else config
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.size == 0:
        raise ValueError(f"X must be a nonempty 2-D array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")

    prox_L, prox_S, pen_L, pen_S = _STEPS[config.variant]
    lam = config.resolve_lambda(X.shape)

    L = np.zeros_like(X)
    S = np.zeros_like(X)
    state = MultiplierState(theta=np.zeros_like(X), rho=config.rho0)
    out = Decomposition(L, S, 0, residual(X, L, S), False, lam=lam,
                        variant=config.variant)

    for it in range(1, config.max_iter + 1):
        rho = state.rho
        shifted = X + state.theta / rho
        try:
            L = prox_L(shifted - S, 1.0 / rho)
            S = prox_S(shifted - L, lam / rho)
        except (ops.NumericalError, np.linalg.LinAlgError) as exc:
            raise SolverError(str(exc), it) from exc
        gap = X - L - S
        state.theta = state.theta + rho * gap
        # closed form keeps the schedule exact: rho_t = rho0 * kappa**t
        state.rho = config.rho0 * config.kappa**it

        res = residual(X, L, S)
        out.residual_trace.append(res)
        out.rho_trace.append(state.rho)
        out.objective_trace.append(pen_L(L) + lam * pen_S(S))
        if res <= config.tol:
            out.converged = True
            break

    out.L, out.S = L, S
    out.iterations = it
    out.final_residual = res
    return out


def solve_lls_rpca(X, config=None):
    """Log-det + l2,log decomposition (see :func:`decompose`)."""
    config = SolverConfig() if config is None else config
    return decompose(X, config.with_(variant="lls_rpca"))


def solve_rpca_l1(X, config=None):
    """Classic nuclear-norm + l1 robust PCA."""
    config = SolverConfig() if config is None else config
    return decompose(X, config.with_(variant="rpca_l1"))


def solve_rpca_l21(X, config=None):
    """Nuclear-norm + l2,1 (column outlier) robust PCA."""
    config = SolverConfig() if config is None else config
    return decompose(X, config.with_(variant="rpca_l21"))
