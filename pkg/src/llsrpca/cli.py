"""Command-line interface: ``llsrpca {decompose,addnoise,denoise,eval,demo}``.

Exit codes: 0 success, 2 bad input, 3 numeric failure, 4 solver did not
converge (outputs are still written).
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .hsi import CubeFormatError, denoise_cube, load_cube, save_cube, save_matrix
from .metrics import evaluate, format_table, write_report
from .noise import NoiseSpec, apply_spec, load_noise_spec, protocol_one, protocol_two, save_noise_spec
from .operators import NumericalError, numerical_rank
from .solvers import SolverConfig, SolverError, decompose
from .synthetic import low_rank_cube

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_NUMERIC = 3
EXIT_NOT_CONVERGED = 4

DIAGNOSTICS_SCHEMA = "llsrpca.diagnostics/1"
SUMMARY_SCHEMA = "llsrpca.demo-summary/1"

_VARIANT_FLAGS = {"lls": "lls_rpca", "l1": "rpca_l1", "l21": "rpca_l21"}


class BadInput(Exception):
    pass


def _write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _solver_args(p):
    g = p.add_argument_group("solver")
    g.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="balancing parameter (default 1/sqrt(max(rows, cols)))")
    g.add_argument("--rho0", type=float, default=1e-2)
    g.add_argument("--kappa", type=float, default=1.2)
    g.add_argument("--tol", type=float, default=1e-7)
    g.add_argument("--max-iter", type=int, default=500)
    g.add_argument("--variant", choices=sorted(_VARIANT_FLAGS), default="lls")


def _config(args):
    try:
        return SolverConfig(lam=args.lam, rho0=args.rho0, kappa=args.kappa, tol=args.tol,
                            max_iter=args.max_iter, variant=_VARIANT_FLAGS[args.variant])
    except ValueError as exc:
        raise BadInput(str(exc)) from exc


def _read_cube(path):
    if not os.path.isfile(path):
        raise BadInput(f"no such file: {path}")
    try:
        return load_cube(path)
    except CubeFormatError as exc:
        raise BadInput(str(exc)) from exc


def cmd_decompose(args):
    config = _config(args)
    cube = _read_cube(args.input)
    X = cube.reshape(-1, cube.shape[2])
    d = decompose(X, config)
    os.makedirs(args.out_dir, exist_ok=True)
    save_matrix(d.L, os.path.join(args.out_dir, "L.llsc"))
    save_matrix(d.S, os.path.join(args.out_dir, "S.llsc"))
    diag = {
        "schema": DIAGNOSTICS_SCHEMA,
        "variant": d.variant,
        "lambda": d.lam,
        "iterations": d.iterations,
        "final_residual": d.final_residual,
        "converged": d.converged,
        "rank_L": numerical_rank(d.L),
        "nonzero_columns_S": int(np.count_nonzero(np.linalg.norm(d.S, axis=0))),
        "final_rho": d.rho_trace[-1],
    }
    _write_json(args.report or os.path.join(args.out_dir, "diagnostics.json"), diag)
    print(f"{d.variant}: {d.iterations} iterations, residual {d.final_residual:.3e}, "
          f"rank(L)={diag['rank_L']}, nonzero S columns={diag['nonzero_columns_S']}")
    return EXIT_OK if d.converged else EXIT_NOT_CONVERGED


def cmd_addnoise(args):
    cube = _read_cube(args.input)
    if not os.path.isfile(args.noise_spec):
        raise BadInput(f"no such file: {args.noise_spec}")
    try:
        spec = load_noise_spec(args.noise_spec)
        if args.seed is not None:
            spec = NoiseSpec(seed=args.seed, components=spec.components)
        noisy = apply_spec(cube, spec)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise BadInput(f"{args.noise_spec}: {exc}") from exc
    save_cube(noisy, args.output)
    return EXIT_OK


def cmd_denoise(args):
    config = _config(args)
    cube = _read_cube(args.input)
    q = None if args.whole_image else args.patch_size
    stride = args.stride if args.stride is not None else (None if q is None else max(q // 2, 1))
    t0 = time.perf_counter()
    try:
        restored, diags = denoise_cube(cube, config, q=q, stride=stride,
                                       normalize=args.normalize, workers=args.workers)
    except ValueError as exc:
        raise BadInput(str(exc)) from exc
    elapsed = time.perf_counter() - t0
    save_cube(restored, args.output)
    converged = all(d["converged"] for d in diags)
    _write_json(args.report or args.output + ".diagnostics.json", {
        "schema": DIAGNOSTICS_SCHEMA,
        "variant": config.variant,
        "mode": "whole-image" if q is None else "patch",
        "patch_size": q,
        "stride": stride,
        "normalize": args.normalize,
        "solves": diags,
        "converged": converged,
        "elapsed_seconds": elapsed,
    })
    print(f"restored {cube.shape} with {len(diags)} solve(s) in {elapsed:.2f} s")
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def cmd_eval(args):
    clean = _read_cube(args.clean)
    test = _read_cube(args.test)
    try:
        report = evaluate(clean, test)
    except ValueError as exc:
        raise BadInput(str(exc)) from exc
    if args.report:
        write_report(report, args.report)
    sys.stdout.write(format_table(report))
    return EXIT_OK


def demo_noise_specs(seed):
    """The two mixed-noise protocols, scaled to the 16-band demo cube."""
    return {
        "protocol1": protocol_one(seed=seed + 1, bands=(12, 15), cols=(3, 6)),
        "protocol2": protocol_two(seed=seed + 2),
    }


def run_demo(out_dir, seed=0, config=None):
    """Clean cube, both protocols, all three variants; returns the summary rows."""
    config = SolverConfig() if config is None else config
    os.makedirs(out_dir, exist_ok=True)
    clean = low_rank_cube(seed=seed)
    save_cube(clean, os.path.join(out_dir, "clean.llsc"))
    rows, timings = [], {}
    for name, spec in demo_noise_specs(seed).items():
        save_noise_spec(spec, os.path.join(out_dir, f"{name}.noise.json"))
        noisy = apply_spec(clean, spec)
        save_cube(noisy, os.path.join(out_dir, f"{name}_noisy.llsc"))
        base = evaluate(clean, noisy)
        write_report(base, os.path.join(out_dir, f"{name}_noisy_report"))
        for flag, variant in _VARIANT_FLAGS.items():
            t0 = time.perf_counter()
            restored, diags = denoise_cube(noisy, config.with_(variant=variant))
            timings[f"{name}/{variant}"] = time.perf_counter() - t0
            save_cube(restored, os.path.join(out_dir, f"{name}_{flag}.llsc"))
            rep = evaluate(clean, restored)
            write_report(rep, os.path.join(out_dir, f"{name}_{flag}_report"))
            rows.append({
                "protocol": name, "variant": variant,
                "noisy_mpsnr": base.mpsnr, "noisy_mssim": base.mssim, "noisy_ergas": base.ergas,
                "mpsnr": rep.mpsnr, "mssim": rep.mssim, "ergas": rep.ergas,
                "iterations": diags[0]["iterations"], "converged": diags[0]["converged"],
            })
    _write_json(os.path.join(out_dir, "summary.json"),
                {"schema": SUMMARY_SCHEMA, "seed": seed, "rows": rows})
    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        fh.write(format_summary(rows))
    _write_json(os.path.join(out_dir, "timings.json"), timings)
    return rows


def format_summary(rows):
    head = f"{'protocol':<10} {'variant':<9} {'MPSNR':>8} {'MSSIM':>7} {'ERGAS':>9}   (noisy MPSNR / MSSIM / ERGAS)"
    lines = [head]
    for r in rows:
        lines.append(f"{r['protocol']:<10} {r['variant']:<9} {r['mpsnr']:>8.3f} {r['mssim']:>7.4f} "
                     f"{r['ergas']:>9.3f}   ({r['noisy_mpsnr']:.3f} / {r['noisy_mssim']:.4f} / "
                     f"{r['noisy_ergas']:.3f})")
    return "\n".join(lines) + "\n"


def cmd_demo(args):
    rows = run_demo(args.out_dir, seed=args.seed, config=_config(args))
    sys.stdout.write(format_summary(rows))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="llsrpca", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="split a matrix file into L and S")
    d.add_argument("input", help="matrix stored as an LLSC cube (rows x 1 x cols)")
    d.add_argument("--out-dir", required=True)
    d.add_argument("--report", help="diagnostics path (default OUT_DIR/diagnostics.json)")
    _solver_args(d)
    d.set_defaults(func=cmd_decompose)

    a = sub.add_parser("addnoise", help="apply a noise spec to a cube")
    a.add_argument("input")
    a.add_argument("--noise-spec", required=True)
    a.add_argument("--seed", type=int, default=None, help="override the spec's seed")
    a.add_argument("-o", "--output", required=True)
    a.set_defaults(func=cmd_addnoise)

    n = sub.add_parser("denoise", help="restore a cube from its low-rank component")
    n.add_argument("input")
    n.add_argument("-o", "--output", required=True)
    n.add_argument("--patch-size", type=int, default=20)
    n.add_argument("--stride", type=int, default=None, help="default: patch size // 2")
    n.add_argument("--whole-image", action="store_true")
    n.add_argument("--normalize", action="store_true",
                   help="rescale bands to [0, 1] before solving")
    n.add_argument("--workers", type=int, default=None)
    n.add_argument("--report", help="diagnostics path (default OUTPUT.diagnostics.json)")
    _solver_args(n)
    n.set_defaults(func=cmd_denoise)

    e = sub.add_parser("eval", help="MPSNR / MSSIM / ERGAS of a restored cube")
    e.add_argument("clean")
    e.add_argument("test")
    e.add_argument("--report", help="output stem; writes STEM.json and STEM.txt")
    e.set_defaults(func=cmd_eval)

    m = sub.add_parser("demo", help="run the desk-scale synthetic experiment")
    m.add_argument("--out-dir", required=True)
    m.add_argument("--seed", type=int, default=0)
    _solver_args(m)
    m.set_defaults(func=cmd_demo)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BadInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (SolverError, NumericalError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
