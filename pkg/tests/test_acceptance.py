"""Acceptance suite: one test and one PASS/FAIL summary line per criterion.

Tolerances are the stated targets. A failing criterion here is a real
shortfall of the implementation or of the target itself, never a flaky check.
"""

import os
import time

import numpy as np
import pytest

from llsrpca.cli import run_demo
from llsrpca.hsi import denoise_cube, extract_patches, load_cube, reassemble, save_cube
from llsrpca.metrics import ergas, evaluate, psnr, ssim
from llsrpca.noise import add_gaussian, add_salt_pepper, add_stripes, apply_spec, protocol_one
from llsrpca.operators import (
    l2log_shrink,
    log_penalty_scale,
    logdet_svt,
    scalar_prox_oracle,
)
from llsrpca.solvers import SolverConfig, solve_lls_rpca, solve_rpca_l1
from llsrpca.synthetic import column_corrupted, low_rank_cube

from oracles import ssim_direct


def _support(S):
    return np.flatnonzero(np.linalg.norm(S, axis=0) > 0)


@pytest.fixture(scope="module")
def column_runs():
    runs, t0 = [], time.perf_counter()
    for seed in range(20):
        L0, S0, sup = column_corrupted(rows=40, cols=30, rank=2, n_outliers=3, seed=seed)
        runs.append((L0, S0, sup, solve_lls_rpca(L0 + S0)))
    return runs, time.perf_counter() - t0


@pytest.fixture(scope="module")
def desk_instance():
    clean = low_rank_cube(rows=32, cols=32, bands=16, terms=4, seed=0)
    noisy = apply_spec(clean, protocol_one(seed=1, bands=(12, 15), cols=(3, 6)))
    t0 = time.perf_counter()
    lls, _ = denoise_cube(noisy, SolverConfig(variant="lls_rpca"))
    elapsed = time.perf_counter() - t0
    l1, _ = denoise_cube(noisy, SolverConfig(variant="rpca_l1"))
    return {
        "noisy": evaluate(clean, noisy),
        "lls": evaluate(clean, lls),
        "l1": evaluate(clean, l1),
        "elapsed": elapsed,
    }


def test_criterion_1_operator_oracle(verdict):
    rng = np.random.default_rng(2024)
    a = rng.uniform(0.0, 10.0, 1000)
    tau = rng.uniform(0.0, 5.0, 1000)
    worst_col = worst_sv = worst_vec = 0.0
    for ak, tk in zip(a, tau):
        want = scalar_prox_oracle(ak, tk)
        u = rng.normal(size=5)
        u /= np.linalg.norm(u)
        v = rng.normal(size=4)
        v /= np.linalg.norm(v)
        col = np.linalg.norm(l2log_shrink((ak * u)[:, None], tk))
        sv = np.linalg.svd(logdet_svt(ak * np.outer(u, v), tk), compute_uv=False)[0]
        worst_col = max(worst_col, abs(col - want))
        worst_sv = max(worst_sv, abs(sv - want))
        worst_vec = max(worst_vec, abs(log_penalty_scale(ak, tk) - want))
    worst = max(worst_col, worst_sv, worst_vec)
    ok = verdict(1, "operator-oracle equivalence", worst <= 1e-5,
                 f"max |closed form - oracle| = {worst:.2e} over 1000 pairs "
                 f"(l2log_shrink {worst_col:.1e}, logdet_svt {worst_sv:.1e})")
    assert ok


def test_criterion_2_identity_at_zero(verdict):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        m, n = rng.integers(1, 40, size=2)
        D = rng.normal(size=(m, n)) * rng.uniform(0.01, 100)
        nrm = np.linalg.norm(D)
        worst = max(worst,
                    np.linalg.norm(logdet_svt(D, 0.0) - D) / nrm,
                    np.linalg.norm(l2log_shrink(D, 0.0) - D) / nrm)
    ok = verdict(2, "identity at tau=0", worst <= 1e-10,
                 f"max relative Frobenius error {worst:.2e} on 100 matrices")
    assert ok


def test_criterion_3_exact_recovery(verdict, column_runs):
    runs, elapsed = column_runs
    errors, support_hits, clean_errors = [], 0, []
    for L0, S0, sup, d in runs:
        errors.append(np.linalg.norm(d.L - L0) / np.linalg.norm(L0))
        if np.array_equal(_support(d.S), sup):
            support_hits += 1
            keep = np.setdiff1d(np.arange(L0.shape[1]), sup)
            clean_errors.append(np.linalg.norm((d.L - L0)[:, keep]) / np.linalg.norm(L0[:, keep]))
    recovered = sum(e <= 1e-3 for e in errors)
    ok = recovered == 20 and support_hits == 20 and elapsed < 30
    verdict(3, "exact recovery (L within 1e-3, exact column support)", ok,
            f"L recovered on {recovered}/20 (max err {max(errors):.3f}), "
            f"support exact on {support_hits}/20, {elapsed:.1f}s; "
            f"clean-column error on support-exact instances max {max(clean_errors):.1e} (informational)")
    assert recovered == 20, f"relative L errors: {np.round(errors, 4).tolist()}"
    assert support_hits == 20
    assert elapsed < 30


def test_criterion_4_alm_feasibility(verdict, column_runs):
    runs, _ = column_runs
    cfg = SolverConfig()
    worst, iters, schedule_ok = 0.0, 0, True
    for _, _, _, d in runs:
        worst = max(worst, d.final_residual)
        iters = max(iters, d.iterations)
        schedule_ok &= d.rho_trace == [cfg.rho0 * cfg.kappa**t for t in range(1, d.iterations + 1)]
    ok = verdict(4, "ALM feasibility", worst <= 1e-6 and iters <= 500 and schedule_ok,
                 f"max final residual {worst:.2e}, max iterations {iters}, "
                 f"rho trace exact: {schedule_ok}")
    assert ok


def test_criterion_5_desk_denoising(verdict, desk_instance):
    noisy, lls = desk_instance["noisy"], desk_instance["lls"]
    gain = lls.mpsnr - noisy.mpsnr
    ssim_gain = lls.mssim - noisy.mssim
    ok = verdict(5, "desk-scale protocol 1 denoising",
                 gain >= 5 and ssim_gain >= 0.1 and desk_instance["elapsed"] < 60,
                 f"MPSNR {noisy.mpsnr:.2f} -> {lls.mpsnr:.2f} dB (+{gain:.2f}), "
                 f"MSSIM {noisy.mssim:.3f} -> {lls.mssim:.3f} (+{ssim_gain:.3f}), "
                 f"{desk_instance['elapsed']:.1f}s")
    assert ok


def test_criterion_6_variant_ordering(verdict, desk_instance):
    lls, l1 = desk_instance["lls"], desk_instance["l1"]
    ok = verdict(6, "lls_rpca MPSNR >= rpca_l1 MPSNR", lls.mpsnr >= l1.mpsnr,
                 f"lls_rpca {lls.mpsnr:.2f} dB vs rpca_l1 {l1.mpsnr:.2f} dB")
    assert ok


def test_criterion_7_noise_statistics(verdict):
    base = np.zeros((1000, 100, 10))
    var = (add_gaussian(base, 0.14, seed=11) - base).var()
    var_ok = abs(var / 0.14 - 1) <= 0.03

    band = np.random.default_rng(3).uniform(size=(145, 145, 4))
    sp = add_salt_pepper(band, 0.2, 0.0196, 0.0784, seed=12)
    counts = [int(np.count_nonzero(sp[:, :, b] != band[:, :, b])) for b in range(4)]
    count_ok = counts == [round(0.2 * 145 * 145)] * 4

    cube = np.zeros((145, 145, 224))
    diff = add_stripes(cube, 161, 190, 20, 40, -0.25, 0.25, seed=13) - cube
    bands = np.flatnonzero(np.abs(diff).sum(axis=(0, 1)) > 0)
    stripe_ok = np.array_equal(bands, np.arange(160, 190))
    for b in bands:
        d = diff[:, :, b]
        cols = np.flatnonzero(np.abs(d).sum(axis=0) > 0)
        stripe_ok &= 20 <= cols.size <= 40 and bool(np.all(d[:, cols] == d[0, cols]))
        stripe_ok &= bool(np.all(np.abs(d[0, cols]) < 0.25))

    ok = verdict(7, "noise simulator statistics", var_ok and count_ok and stripe_ok,
                 f"gaussian variance {var:.5f} (target 0.14), salt-pepper counts {counts}, "
                 f"stripes confined to declared bands/columns: {bool(stripe_ok)}")
    assert ok


def test_criterion_8_metric_sanity(verdict):
    rng = np.random.default_rng(8)
    x = rng.uniform(size=(16, 16))
    checks = {
        "psnr cap": psnr(x, x) == 99.0,
        "psnr 20 dB": abs(psnr(np.zeros((10, 10)), np.full((10, 10), 0.1)) - 20.0) < 1e-12,
        "psnr 6.0206 dB": abs(psnr(np.zeros((4, 4)), np.full((4, 4), 0.5)) - 6.0206) < 1e-4,
        "ssim identical": ssim(x, x) == 1.0,
        "ergas identical": ergas(x[:, :, None] + 0.1, x[:, :, None] + 0.1) == 0.0,
        "ergas single band": abs(ergas(np.full((4, 4, 1), 0.5), np.full((4, 4, 1), 0.6)) - 20.0) < 1e-9,
    }
    try:
        ssim(np.zeros((10, 20)), np.zeros((10, 20)))
        checks["ssim small band rejected"] = False
    except ValueError:
        checks["ssim small band rejected"] = True
    oracle_gap = 0.0
    for shape in ((16, 16), (13, 20), (24, 11)):
        ref = rng.uniform(size=shape)
        test = ref + rng.normal(0, 0.1, size=shape)
        oracle_gap = max(oracle_gap, abs(ssim(ref, test) - ssim_direct(ref, test)))
    checks["ssim oracle"] = oracle_gap <= 1e-9
    failed = [k for k, v in checks.items() if not v]
    ok = verdict(8, "metric sanity", not failed,
                 f"{len(checks) - len(failed)}/{len(checks)} checks, "
                 f"max |ssim - direct oracle| = {oracle_gap:.1e}"
                 + (f", failed: {failed}" if failed else ""))
    assert ok


def _demo_bytes(out_dir):
    # reports carry wall-clock timings, so only deterministic artifacts are compared
    names = sorted(f for f in os.listdir(out_dir)
                   if f.endswith((".llsc", ".noise.json")) or f.startswith("summary."))
    return {f: open(os.path.join(out_dir, f), "rb").read() for f in names}


def test_criterion_9_round_trips(verdict, tmp_path):
    rng = np.random.default_rng(9)
    cube = rng.normal(size=(9, 7, 5)) * 1e3
    save_cube(cube, tmp_path / "c.llsc")
    io_ok = load_cube(tmp_path / "c.llsc").tobytes() == cube.tobytes()

    patch_err = 0.0
    for shape, q, stride in (((9, 7, 5), 4, 2), ((20, 20, 3), 6, 5), ((8, 8, 2), 8, 8)):
        c = rng.normal(size=shape)
        patch_err = max(patch_err, np.abs(reassemble(extract_patches(c, q, stride), *shape, q) - c).max())

    a = _demo_bytes_after(tmp_path / "demo_a")
    b = _demo_bytes_after(tmp_path / "demo_b")
    demo_ok = a == b and "summary.json" in a
    ok = verdict(9, "round trips", io_ok and patch_err <= 1e-12 and demo_ok,
                 f"cube I/O bit-exact: {io_ok}, extract/reassemble max error {patch_err:.1e}, "
                 f"demo artifacts identical across runs: {demo_ok} ({len(a)} files)")
    assert ok


def _demo_bytes_after(out_dir):
    run_demo(str(out_dir), seed=0)
    return _demo_bytes(out_dir)
