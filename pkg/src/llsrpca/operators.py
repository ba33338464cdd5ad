"""Proximal and shrinkage operators for the four regularizers.

All functions take 2-D float arrays, work in float64 and never mutate their
inputs. Columns are the unit of grouping for the column-wise operators.
"""

import numpy as np
from scipy import linalg
from scipy.optimize import minimize_scalar

__all__ = [
    "NumericalError",
    "svd_factors",
    "soft_threshold",
    "group_shrink_l21",
    "nuclear_svt",
    "log_penalty_scale",
    "logdet_svt",
    "l2log_shrink",
    "scalar_prox_oracle",
    "l2log_norm",
    "logdet_surrogate",
    "numerical_rank",
]


class NumericalError(ArithmeticError):
    """Raised when a linear-algebra kernel (the SVD) fails."""


def _as_matrix(Y, name="Y"):
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {Y.shape}")
    if not np.all(np.isfinite(Y)):
        raise ValueError(f"{name} contains non-finite values")
    return Y


def _check_tau(tau):
    tau = float(tau)
    if not tau >= 0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    return tau


def svd_factors(D):
    """Thin SVD ``D = U @ diag(s) @ Vt`` with ``s`` nonincreasing.

    Falls back to the slower but more robust ``gesvd`` driver if the
    default divide-and-conquer driver does not converge.
    """
    D = _as_matrix(D, "D")
    try:
        return linalg.svd(D, full_matrices=False, check_finite=False)
    except linalg.LinAlgError:
        pass
    try:
        return linalg.svd(D, full_matrices=False, check_finite=False,
                          lapack_driver="gesvd")
    except linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed to converge: {exc}") from exc


def soft_threshold(Y, tau):
    """Entrywise soft thresholding, the proximal map of ``tau * ||.||_1``."""
    Y = _as_matrix(Y)
    tau = _check_tau(tau)
    return np.sign(Y) * np.maximum(np.abs(Y) - tau, 0.0)


def group_shrink_l21(Y, tau):
    """Column-wise group shrinkage, the proximal map of ``tau * ||.||_{2,1}``.

    Each column ``y`` becomes ``max(1 - tau / ||y||, 0) * y``; zero columns
    stay zero.
    """
    Y = _as_matrix(Y)
    tau = _check_tau(tau)
    norms = np.linalg.norm(Y, axis=0)
    scale = np.zeros_like(norms)
    nz = norms > 0
    scale[nz] = np.maximum(1.0 - tau / norms[nz], 0.0)
    return Y * scale


def nuclear_svt(D, tau):
    """Singular value soft thresholding, the proximal map of ``tau * ||.||_*``."""
    D = _as_matrix(D, "D")
    tau = _check_tau(tau)
    U, s, Vt = svd_factors(D)
    return (U * np.maximum(s - tau, 0.0)) @ Vt


def log_penalty_scale(a, tau):
    """Closed-form minimizer over ``x >= 0`` of ``(x - a)**2 / 2 + tau*log(1 + x)``.

    Vectorized over ``a``. The candidate is the larger stationary point

        xi = (a - 1)/2 + sqrt((1 + a)**2 / 4 - tau)

    which is kept only if it exists (strict inequality), is positive and
    does at least as well as ``x = 0``.
    """
    a = np.asarray(a, dtype=np.float64)
    tau = _check_tau(tau)
    disc = (1.0 + a) ** 2 / 4.0 - tau
    real = disc > 0
    root = np.sqrt(np.where(real, disc, 0.0))
    half = (a - 1.0) / 2.0
    # for a < 1 use xi = (a - tau) / (root - half) (product of the two roots)
    # to avoid cancellation in half + root
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = np.where(half >= 0, half + root, (a - tau) / (root - half))
    xi = np.where(real, xi, 0.0)
    keep = real & (xi > 0)
    xs = np.where(keep, xi, 0.0)
    f_xi = 0.5 * (xs - a) ** 2 + tau * np.log1p(xs)
    f_zero = 0.5 * a**2
    keep &= f_xi <= f_zero
    return np.where(keep, xi, 0.0)


def logdet_svt(D, tau):
    """Singular value thresholding for the log-determinant rank surrogate.

    Solves ``min_L sum_i log(1 + sigma_i(L)) * tau + ||L - D||_F**2 / 2`` by
    applying :func:`log_penalty_scale` to every singular value of ``D``.
    """
    D = _as_matrix(D, "D")
    tau = _check_tau(tau)
    U, s, Vt = svd_factors(D)
    return (U * log_penalty_scale(s, tau)) @ Vt


def l2log_shrink(Y, tau):
    r"""Column-wise :math:`\ell_{2,\log}` shrinkage.

    Solves

    .. math::
      \min_W \tfrac12 \|Y - W\|_F^2 + \tau \sum_i \log(1 + \|w_i\|_2)

    in closed form: each column keeps its direction and its norm is
    replaced by :func:`log_penalty_scale` of the input column norm.

    Parameters
    ----------
    Y : array_like
      Input matrix, shape (d, n)
    tau : float
      Nonnegative threshold

    Returns
    -------
    W : ndarray
      Shrunk matrix, same shape as `Y`
    """
    Y = _as_matrix(Y)
    tau = _check_tau(tau)
    norms = np.linalg.norm(Y, axis=0)
    target = log_penalty_scale(norms, tau)
    scale = np.zeros_like(norms)
    nz = norms > 0
    scale[nz] = target[nz] / norms[nz]
    return Y * scale


def _penalty(kind):
    if kind == "log1p":
        return np.log1p
    if kind == "abs":
        return np.abs
    raise ValueError(f"unknown penalty {kind!r}")


def scalar_prox_oracle(a, tau, penalty="log1p", n_grid=1_000_001):
    """Brute-force ``argmin_{x in [0, a]} (x - a)**2 / 2 + tau * penalty(x)``.

    Dense grid search followed by bounded scalar refinement around the best
    grid point. Used only as an independent check on the closed forms.
    """
    a = float(a)
    tau = float(tau)
    if a < 0 or tau < 0:
        raise ValueError("a and tau must be nonnegative")
    pen = _penalty(penalty)

    def f(x):
        return 0.5 * (x - a) ** 2 + tau * pen(x)

    if a == 0.0:
        return 0.0
    grid = np.linspace(0.0, a, n_grid)
    k = int(np.argmin(f(grid)))
    h = a / (n_grid - 1)
    lo, hi = max(grid[k] - h, 0.0), min(grid[k] + h, a)
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-13})
    best = min((grid[k], res.x, 0.0, a), key=f)
    return float(best)


def l2log_norm(S):
    """``sum_i log(1 + ||s_i||_2)`` over the columns of `S`."""
    S = _as_matrix(S, "S")
    return float(np.sum(np.log1p(np.linalg.norm(S, axis=0))))


def logdet_surrogate(L):
    """``sum_i log(1 + sigma_i(L))``, i.e. ``logdet(I + (L^T L)^(1/2))``."""
    L = _as_matrix(L, "L")
    try:
        s = linalg.svdvals(L, check_finite=False)
    except linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed to converge: {exc}") from exc
    return float(np.sum(np.log1p(s)))


def numerical_rank(L, rtol=1e-12):
    """Count singular values above ``rtol * sigma_max`` (zero matrix has rank 0)."""
    L = _as_matrix(L, "L")
    s = linalg.svdvals(L, check_finite=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))
