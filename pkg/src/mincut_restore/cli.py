"""Command-line entry point: mincut, restore, noise, filter, verify, bench.

Every command is deterministic given its flags and seed and emits a
single JSON report (stdout or --report).  Exit codes: 0 success, 2 input
error, 3 verification mismatch, 4 resource limit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .imaging import (
    ColorImage,
    NoiseSpec,
    apply_noise,
    metrics,
    moving_average_3x3,
    moving_median_3x3,
    read_image,
    restore_color,
    write_image,
)
from .ising import EnergyParams, GrayImage, ImageError, build_binary_map_network, eval_U1, eval_U2
from .layers import minimize_U1
from .maxflow import max_flow, min_cut_maximal, solve_gnetwork
from .mnfc import MnfcConfig, run_mnfc
from .netcore import DimacsError, NetworkError, normalize_to_G, parse_dimacs
from .oracle import EnumerationLimitError, brute_min_cut, brute_min_U1, brute_min_U2
from .qnet import minimize_U2

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MISMATCH = 3
EXIT_LIMIT = 4


def _report(command: str, parameters: dict, **extra) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "parameters": parameters,
        **extra,
    }


def _emit(report: dict, path) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _thread_count(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("MINCUT_RESTORE_THREADS")
    return int(env) if env else 1


def _mnfc_config(args, workers: int) -> MnfcConfig:
    return MnfcConfig(
        tile_side=args.tile,
        cell_size=args.cell_size,
        worker_count=workers,
    )


def _params(args) -> EnergyParams:
    return EnergyParams(lam=args.lam, beta=args.beta, scale=args.scale)


def cmd_mincut(args) -> int:
    with open(args.input, "rb") as fh:
        net = parse_dimacs(fh.read())
    g = normalize_to_G(net)
    t0 = time.perf_counter()
    levels = []
    if args.solver == "mnfc":
        workers = _thread_count(args)
        x, stats = run_mnfc(g, _mnfc_config(args, workers), pick="maximal")
        from .netcore import cut_capacity

        value = cut_capacity(g, x)
        levels = [s.to_json() for s in stats]
    else:
        x, value = solve_gnetwork(g, pick="maximal")
    wall = time.perf_counter() - t0
    if args.out:
        with open(args.out, "w") as fh:
            for i, bit in enumerate(x):
                fh.write(f"{i + 1} {bit}\n")
    _emit(
        _report(
            "mincut",
            {"input": args.input, "solver": args.solver, "tile": args.tile},
            cut_value=value,
            levels=levels,
            wall_time=wall,
        ),
        args.report,
    )
    return EXIT_OK


def cmd_restore(args) -> int:
    img = read_image(args.input)
    p = _params(args)
    workers = _thread_count(args)
    cfg = _mnfc_config(args, workers) if args.solver == "mnfc" else None
    t0 = time.perf_counter()
    if isinstance(img, ColorImage):
        if args.model == "binary":
            raise ImageError("binary model needs a grayscale 2-level image")
        restored = restore_color(img, p, which=args.model, solver=args.solver, cfg=cfg)
        initial = final = None
    else:
        if args.model == "binary":
            if not img.is_binary():
                raise ImageError("binary model requires a 2-level image")
            g = build_binary_map_network(img, p)
            if args.solver == "mnfc":
                x, _ = run_mnfc(g, cfg, pick="maximal")
            else:
                x = min_cut_maximal(max_flow(g.to_network()))
            restored = GrayImage(np.array(x, dtype=np.int64).reshape(img.shape), 2)
            initial = eval_U1(img, img, p)
            final = eval_U1(restored, img, p)
        elif args.model == "u1":
            restored, final = minimize_U1(img, p, solver=args.solver, cfg=cfg, workers=workers)
            initial = eval_U1(img, img, p)
        else:
            restored, final = minimize_U2(img, p, solver=args.solver, cfg=cfg)
            initial = eval_U2(img, img, p)
    wall = time.perf_counter() - t0
    if args.out:
        write_image(restored, args.out)
    extra = {}
    if args.truth and not isinstance(img, ColorImage):
        truth = read_image(args.truth)
        extra["metrics_vs_truth"] = metrics(restored, truth)
        extra["metrics_noisy_vs_truth"] = metrics(img, truth)
    _emit(
        _report(
            "restore",
            {
                "input": args.input,
                "model": args.model,
                "solver": args.solver,
                "lambda": args.lam,
                "beta": args.beta,
                "scale": args.scale,
                "lambda_scaled": int(round(args.lam * args.scale)),
                "beta_scaled": int(round(args.beta * args.scale)),
            },
            energy_initial=initial,
            energy_final=final,
            wall_time=wall,
            **extra,
        ),
        args.report,
    )
    return EXIT_OK


def cmd_noise(args) -> int:
    img = read_image(args.input)
    if isinstance(img, ColorImage):
        raise ImageError("noise command expects a grayscale image")
    if args.kind == "bernoulli":
        spec = NoiseSpec("bernoulli_flip", p=args.p, seed=args.seed)
    else:
        rate = args.rate if args.rate is not None else 8.0 / img.levels
        spec = NoiseSpec("exponential_additive", rate=rate, seed=args.seed)
    noisy = apply_noise(img, spec)
    write_image(noisy, args.out)
    _emit(
        _report(
            "noise",
            {"input": args.input, "kind": args.kind, "p": args.p, "rate": spec.rate, "seed": args.seed},
            metrics_vs_input=metrics(noisy, img),
        ),
        args.report,
    )
    return EXIT_OK


def cmd_filter(args) -> int:
    img = read_image(args.input)
    if isinstance(img, ColorImage):
        raise ImageError("filter command expects a grayscale image")
    out = moving_average_3x3(img) if args.kind == "average" else moving_median_3x3(img)
    write_image(out, args.out)
    _emit(
        _report("filter", {"input": args.input, "kind": args.kind}),
        args.report,
    )
    return EXIT_OK


def _verify_small(rng: np.random.Generator) -> list:
    """Small enumeration cross-check suite; returns a list of failure strings."""
    from .netcore import GNetwork, cut_capacity
    from .maxflow import min_cut_minimal

    failures = []
    for trial in range(25):
        n = int(rng.integers(2, 9))
        lam = tuple(int(v) for v in rng.integers(0, 8, size=n))
        ybits = tuple(int(v) for v in rng.integers(0, 2, size=n))
        arcs = []
        for i in range(n):
            for j in range(n):
                if i != j and rng.random() < 0.35:
                    arcs.append((i, j, int(rng.integers(1, 6))))
        g = GNetwork(n, lam, ybits, tuple(arcs))
        value, argmin = brute_min_cut(g)
        fr = max_flow(g.to_network())
        if fr.max_flow_value + g.offset != value:
            failures.append(f"trial {trial}: flow {fr.max_flow_value} != brute {value}")
            continue
        lo = min_cut_minimal(fr)
        hi = min_cut_maximal(fr)
        coord_min = tuple(min(x[i] for x in argmin) for i in range(n))
        coord_max = tuple(max(x[i] for x in argmin) for i in range(n))
        if lo != coord_min or hi != coord_max:
            failures.append(f"trial {trial}: canonical cuts disagree with enumeration")
    for trial in range(10):
        h, w = 2, 2
        levels = 3
        y = GrayImage(rng.integers(0, levels, size=(h, w)), levels)
        p = EnergyParams(
            lam=float(rng.integers(1, 4)), beta=float(rng.integers(1, 3)) / 2, scale=16
        )
        v1, _ = brute_min_U1(y, p)
        x1, got1 = minimize_U1(y, p)
        v2, _ = brute_min_U2(y, p)
        x2, got2 = minimize_U2(y, p)
        if got1 != v1:
            failures.append(f"U1 trial {trial}: {got1} != brute {v1}")
        if got2 != v2:
            failures.append(f"U2 trial {trial}: {got2} != brute {v2}")
    return failures


def cmd_verify(args) -> int:
    rng = np.random.Generator(np.random.PCG64(args.seed))
    failures = _verify_small(rng)
    _emit(
        _report(
            "verify",
            {"suite": args.suite, "seed": args.seed},
            failures=failures,
            passed=not failures,
        ),
        args.report,
    )
    return EXIT_OK if not failures else EXIT_MISMATCH


def cmd_bench(args) -> int:
    with open(args.input, "rb") as fh:
        net = parse_dimacs(fh.read())
    g = normalize_to_G(net)
    workers = _thread_count(args)
    t0 = time.perf_counter()
    x, stats = run_mnfc(g, _mnfc_config(args, workers), pick="maximal")
    wall = time.perf_counter() - t0
    from .netcore import cut_capacity

    _emit(
        _report(
            "bench",
            {"input": args.input, "tile": args.tile, "cell_size": args.cell_size, "threads": workers},
            cut_value=cut_capacity(g, x),
            levels=[s.to_json() for s in stats],
            wall_time=wall,
        ),
        args.report,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mincut-restore",
        description="Min-cut/max-flow engine with exact Ising image restoration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, energy=False, mnfc=True):
        sp.add_argument("--report", default=None, help="write the JSON report here")
        if mnfc:
            sp.add_argument("--threads", type=int, default=None)
            sp.add_argument("--tile", type=int, default=64)
            sp.add_argument("--cell-size", dest="cell_size", type=int, default=256)
        if energy:
            sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
            sp.add_argument("--beta", type=float, default=0.4)
            sp.add_argument("--scale", type=int, default=65536)

    sp = sub.add_parser("mincut", help="solve a DIMACS max-flow instance")
    sp.add_argument("input")
    sp.add_argument("--solver", choices=["baseline", "mnfc"], default="baseline")
    sp.add_argument("--out", default=None, help="write 'node value' lines here")
    common(sp)
    sp.set_defaults(func=cmd_mincut)

    sp = sub.add_parser("restore", help="restore a corrupted image")
    sp.add_argument("input")
    sp.add_argument("--model", choices=["binary", "u1", "u2"], default="u1")
    sp.add_argument("--solver", choices=["baseline", "mnfc"], default="baseline")
    sp.add_argument("--levels", type=int, default=None, help="unused; levels come from the file maxval")
    sp.add_argument("--out", default=None)
    sp.add_argument("--truth", default=None)
    common(sp, energy=True)
    sp.set_defaults(func=cmd_restore)

    sp = sub.add_parser("noise", help="corrupt an image reproducibly")
    sp.add_argument("input")
    sp.add_argument("--kind", choices=["bernoulli", "exponential"], default="bernoulli")
    sp.add_argument("--p", type=float, default=0.3)
    sp.add_argument("--rate", type=float, default=None)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--out", required=True)
    common(sp, mnfc=False)
    sp.set_defaults(func=cmd_noise)

    sp = sub.add_parser("filter", help="3x3 moving average/median comparators")
    sp.add_argument("input")
    sp.add_argument("--kind", choices=["average", "median"], default="average")
    sp.add_argument("--out", required=True)
    common(sp, mnfc=False)
    sp.set_defaults(func=cmd_filter)

    sp = sub.add_parser("verify", help="run enumeration cross-checks")
    sp.add_argument("--suite", choices=["small"], default="small")
    sp.add_argument("--seed", type=int, default=12345)
    common(sp, mnfc=False)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bench", help="MNFC level statistics for an instance")
    sp.add_argument("input")
    common(sp)
    sp.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DimacsError, NetworkError, ImageError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EnumerationLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except OverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
