"""Hyperspectral cube I/O, patch extraction and per-patch denoising.

A cube is a float64 array of shape ``(rows, cols, bands)``. A patch with
top-left corner ``(i, j)`` becomes a ``q*q x bands`` matrix whose column
``b`` is ``cube[i:i+q, j:j+q, b]`` flattened row-major.

Cube files ("LLSC v1") are an ASCII header line ``LLSC1 r c n`` followed by
``r*c*n`` little-endian float64 values, band-sequential (band outermost,
then row, then column).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .solvers import SolverConfig, decompose

MAGIC = b"LLSC1"

__all__ = [
    "CubeFormatError",
    "PatchMatrix",
    "load_cube",
    "save_cube",
    "load_matrix",
    "save_matrix",
    "normalize_bands",
    "denormalize_bands",
    "patch_origins",
    "extract_patches",
    "reassemble",
    "cube_to_matrix",
    "matrix_to_cube",
    "denoise_cube",
]


class CubeFormatError(ValueError):
    """Malformed or inconsistent cube file."""


def save_cube(cube, path):
    cube = np.asarray(cube, dtype=np.float64)
    if cube.ndim != 3 or min(cube.shape) < 1:
        raise ValueError(f"cube must be 3-D with positive dims, got {cube.shape}")
    r, c, n = cube.shape
    payload = np.ascontiguousarray(cube.transpose(2, 0, 1), dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(b"%s %d %d %d\n" % (MAGIC, r, c, n))
        fh.write(payload)


def load_cube(path):
    with open(path, "rb") as fh:
        header = fh.readline(256)
        payload = fh.read()
    parts = header.split()
    if not header.endswith(b"\n") or len(parts) != 4 or parts[0] != MAGIC:
        raise CubeFormatError(f"{path}: bad header {header[:40]!r}")
    try:
        r, c, n = (int(p) for p in parts[1:])
    except ValueError as exc:
        raise CubeFormatError(f"{path}: non-integer dimensions") from exc
    if min(r, c, n) < 1:
        raise CubeFormatError(f"{path}: dimensions must be positive")
    if len(payload) != 8 * r * c * n:
        raise CubeFormatError(
            f"{path}: header declares {r * c * n} values, payload holds {len(payload) / 8:g}")
    data = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    if not np.all(np.isfinite(data)):
        raise CubeFormatError(f"{path}: payload contains non-finite values")
    return data.reshape(n, r, c).transpose(1, 2, 0).copy()


def save_matrix(M, path):
    """Store an ``m x n`` matrix as an ``m x 1 x n`` cube."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError("matrix must be 2-D")
    save_cube(M[:, None, :], path)


def load_matrix(path):
    cube = load_cube(path)
    r, c, n = cube.shape
    return cube.reshape(r * c, n)


def normalize_bands(cube):
    """Map each band affinely onto [0, 1].

    Returns the normalized cube and an ``(n, 2)`` array of per-band
    ``(min, max)``. Constant bands map to 0.
    """
    cube = np.asarray(cube, dtype=np.float64)
    lo = cube.min(axis=(0, 1))
    hi = cube.max(axis=(0, 1))
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    out = np.where(span > 0, (cube - lo) / safe, 0.0)
    return out, np.stack([lo, hi], axis=1)


def denormalize_bands(cube, record):
    record = np.asarray(record, dtype=np.float64)
    lo, hi = record[:, 0], record[:, 1]
    return np.asarray(cube, dtype=np.float64) * (hi - lo) + lo


@dataclass
class PatchMatrix:
    matrix: np.ndarray
    origin: tuple


def _axis_origins(length, q, stride):
    starts = list(range(0, length - q + 1, stride))
    if starts[-1] != length - q:
        starts.append(length - q)
    return starts


def patch_origins(shape, q, stride):
    """Top-left corners of a grid of ``q x q`` patches covering ``shape``.

    Origins advance by `stride`; the last one along each axis is clamped
    so the final patch ends flush with the border.
    """
    r, c = shape[:2]
    if not 1 <= q <= min(r, c):
        raise ValueError(f"patch size {q} must lie in [1, {min(r, c)}]")
    if not 1 <= stride <= q:
        raise ValueError(f"stride {stride} must lie in [1, {q}]")
    return [(i, j) for i in _axis_origins(r, q, stride)
            for j in _axis_origins(c, q, stride)]


def extract_patches(cube, q, stride):
    cube = np.asarray(cube, dtype=np.float64)
    n = cube.shape[2]
    return [PatchMatrix(cube[i:i + q, j:j + q, :].reshape(q * q, n).copy(), (i, j))
            for i, j in patch_origins(cube.shape, q, stride)]


def reassemble(patches, r, c, n, q):
    """Average overlapping patches back into an ``r x c x n`` cube."""
    acc = np.zeros((r, c, n))
    count = np.zeros((r, c))
    for p in patches:
        i, j = p.origin
        acc[i:i + q, j:j + q, :] += np.asarray(p.matrix).reshape(q, q, n)
        count[i:i + q, j:j + q] += 1
    if np.any(count == 0):
        raise ValueError(f"{int(np.sum(count == 0))} pixels are not covered by any patch")
    return acc / count[:, :, None]


def cube_to_matrix(cube):
    """Whole-image ``(r*c) x n`` matrix, one row-major flattened band per column."""
    cube = np.asarray(cube, dtype=np.float64)
    r, c, n = cube.shape
    return cube.reshape(r * c, n)


def matrix_to_cube(M, r, c):
    return np.asarray(M).reshape(r, c, -1)


def denoise_cube(cube, config=None, q=None, stride=None, normalize=False,
                 workers=None):
    """Low-rank restoration of a cube.

    With ``q=None`` the whole ``(r*c) x n`` matrix is decomposed once.
    Otherwise overlapping ``q x q`` patches (default stride ``q // 2``) are
    decomposed independently and their low-rank parts averaged back.

    Parameters
    ----------
    cube : array_like
      Noisy cube, shape (rows, cols, bands)
    config : SolverConfig, optional
      Solver settings shared by every patch
    q, stride : int, optional
      Patch edge and step
    normalize : bool
      Rescale each band to [0, 1] before solving and undo it afterwards
    workers : int, optional
      Thread count for patch solves; ``None`` solves sequentially

    Returns
    -------
    restored : ndarray
    diagnostics : list of dict
      One entry per solve with iterations, residual and convergence flag.
    """
    config = SolverConfig() if config is None else config
    cube = np.asarray(cube, dtype=np.float64)
    if cube.ndim != 3:
        raise ValueError("cube must be 3-D (rows, cols, bands)")
    r, c, n = cube.shape
    if normalize:
        work, record = normalize_bands(cube)
    else:
        work = cube

    def solve(M):
        d = decompose(M, config)
        return d.L, {"iterations": d.iterations, "residual": d.final_residual,
                     "converged": d.converged}

    if q is None:
        L, diag = solve(cube_to_matrix(work))
        out, diags = matrix_to_cube(L, r, c), [diag]
    else:
        stride = max(q // 2, 1) if stride is None else stride
        patches = extract_patches(work, q, stride)
        if workers:
            with ThreadPoolExecutor(workers) as pool:
                results = list(pool.map(lambda p: solve(p.matrix), patches))
        else:
            results = [solve(p.matrix) for p in patches]
        solved = [PatchMatrix(L, p.origin) for (L, _), p in zip(results, patches)]
        out = reassemble(solved, r, c, n, q)
        diags = [dict(d, origin=list(p.origin)) for (_, d), p in zip(results, patches)]
    if normalize:
        out = denormalize_bands(out, record)
    return out, diags

