"""Full-reference quality metrics for hyperspectral cubes.

Per-band PSNR and SSIM are averaged over bands (MPSNR, MSSIM); ERGAS is a
global band-mean-normalized RMSE. Cubes are ``(rows, cols, bands)``.
"""

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import ndimage

PSNR_CAP = 99.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
REPORT_SCHEMA = "llsrpca.metrics/1"

__all__ = [
    "PSNR_CAP",
    "MetricReport",
    "psnr",
    "ssim",
    "gaussian_window",
    "ergas",
    "evaluate",
    "write_report",
    "read_report",
    "format_table",
]


def _pair(ref, test):
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {test.shape}")
    return ref, test


def psnr(ref, test, peak=1.0):
    """Peak signal-to-noise ratio in dB.

    `peak` defaults to 1 for normalized data; ``peak=None`` takes the
    maximum of `ref`, which makes the metric asymmetric in its arguments.
    Identical inputs return :data:`PSNR_CAP`.
    """
    ref, test = _pair(ref, test)
    if peak is None:
        peak = float(ref.max())
    if not peak > 0:
        raise ValueError("peak must be positive")
    mse = np.mean((ref - test) ** 2)
    if mse == 0:
        return PSNR_CAP
    return float(min(10.0 * np.log10(peak**2 / mse), PSNR_CAP))


def gaussian_window(size=SSIM_WINDOW, sigma=SSIM_SIGMA):
    """Normalized 2-D Gaussian weights, ``size x size``."""
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x**2) / (2 * sigma**2))
    w = np.outer(g, g)
    return w / w.sum()


def ssim(ref, test, data_range=1.0, window=SSIM_WINDOW, sigma=SSIM_SIGMA,
         k1=SSIM_K1, k2=SSIM_K2):
    """Mean structural similarity over all fully contained windows.

    Local statistics use Gaussian weights; only window positions lying
    entirely inside the band contribute, so no padding values enter.
    """
    ref, test = _pair(ref, test)
    if ref.ndim != 2:
        raise ValueError("ssim expects 2-D bands")
    if min(ref.shape) < window:
        raise ValueError(f"band {ref.shape} smaller than {window}x{window} window")
    w = gaussian_window(window, sigma)
    h = window // 2
    crop = (slice(h, ref.shape[0] - h), slice(h, ref.shape[1] - h))

    def filt(a):
        return ndimage.correlate(a, w, mode="constant")[crop]

    mu_x, mu_y = filt(ref), filt(test)
    sxx = filt(ref * ref) - mu_x**2
    syy = filt(test * test) - mu_y**2
    sxy = filt(ref * test) - mu_x * mu_y
    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2
    num = (2 * mu_x * mu_y + c1) * (2 * sxy + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


def _ergas_terms(ref, test):
    ref, test = _pair(ref, test)
    if ref.ndim == 2:
        ref, test = ref[:, :, None], test[:, :, None]
    means = ref.mean(axis=(0, 1))
    rmse = np.sqrt(np.mean((ref - test) ** 2, axis=(0, 1)))
    keep = means != 0
    return rmse[keep] / means[keep], np.flatnonzero(~keep).tolist()


def ergas(ref, test):
    """``100 * sqrt(mean_b (RMSE_b / mean_b)**2)`` with resolution ratio 1.

    Bands whose reference mean is zero are left out; see
    :func:`evaluate` for the list of excluded bands.
    """
    ratios, _ = _ergas_terms(ref, test)
    if ratios.size == 0:
        return 0.0
    return float(100.0 * np.sqrt(np.mean(ratios**2)))


@dataclass
class MetricReport:
    per_band_psnr: list
    per_band_ssim: list
    mpsnr: float
    mssim: float
    ergas: float
    ergas_excluded_bands: list = field(default_factory=list)
    elapsed_seconds: float = 0.0

    def to_dict(self):
        return {"schema": REPORT_SCHEMA, **asdict(self)}


def evaluate(ref, test, peak=1.0, data_range=1.0):
    """Per-band PSNR/SSIM, their unweighted band means, and ERGAS."""
    t0 = time.perf_counter()
    ref, test = _pair(ref, test)
    if ref.ndim != 3:
        raise ValueError("evaluate expects (rows, cols, bands) cubes")
    n = ref.shape[2]
    p = [psnr(ref[:, :, b], test[:, :, b], peak) for b in range(n)]
    s = [ssim(ref[:, :, b], test[:, :, b], data_range) for b in range(n)]
    _, excluded = _ergas_terms(ref, test)
    return MetricReport(
        per_band_psnr=p,
        per_band_ssim=s,
        mpsnr=float(np.mean(p)),
        mssim=float(np.mean(s)),
        ergas=ergas(ref, test),
        ergas_excluded_bands=excluded,
        elapsed_seconds=time.perf_counter() - t0,
    )


def format_table(report):
    lines = [f"{'band':>6} {'PSNR(dB)':>10} {'SSIM':>8}"]
    for b, (p, s) in enumerate(zip(report.per_band_psnr, report.per_band_ssim)):
        lines.append(f"{b + 1:>6} {p:>10.3f} {s:>8.4f}")
    lines.append("")
    lines.append(f"{'MPSNR(dB)':<10} {report.mpsnr:>10.3f}")
    lines.append(f"{'MSSIM':<10} {report.mssim:>10.4f}")
    lines.append(f"{'ERGAS':<10} {report.ergas:>10.3f}")
    if report.ergas_excluded_bands:
        excl = ", ".join(str(b + 1) for b in report.ergas_excluded_bands)
        lines.append(f"ERGAS excludes zero-mean bands: {excl}")
    return "\n".join(lines) + "\n"


def write_report(report, path_stem):
    """Write ``<stem>.json`` and ``<stem>.txt``; returns both paths."""
    json_path, txt_path = f"{path_stem}.json", f"{path_stem}.txt"
    with open(json_path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    with open(txt_path, "w") as fh:
        fh.write(format_table(report))
    return json_path, txt_path


def read_report(path):
    with open(path) as fh:
        data = json.load(fh)
    if data.pop("schema", None) != REPORT_SCHEMA:
        raise ValueError(f"{path}: not a {REPORT_SCHEMA} report")
    return MetricReport(**data)
