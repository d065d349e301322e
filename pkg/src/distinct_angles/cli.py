"""Command-line front end.

Exit codes: 0 success or verified, 1 a checked property failed, 2 usage or
input error. Every JSON payload carries a ``manifest``; rerunning with the
same manifest gives byte-identical output apart from its timestamp.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .census import (census_bruteforce, census_pinned_spiral, n_r_d, pinned_bound,
                     translation_class_conventions)
from .configurations import (PointSet, SpiralConfig, best_shell,
                             config_from_dict, config_to_dict, generic_projection, grid,
                             lattice_general_position_report, regular_ngon, rng, spiral_config)
from .errors import DegenerateTriple, DistinctAnglesError, WitnessDiscrepancyTooLarge
from .geometry import DEFAULT_MARGIN, DEFAULT_PRECISION, RationalPoint2, general_position_report, to_decimal
from .subsets import repeated_angle_witness, rgen_threshold, search_distinct_angle_subset

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
MAX_EXACT_INT = 2**53


class UsageError(Exception):
    pass


def _json_int(v: int):
    return v if abs(v) < MAX_EXACT_INT else str(v)


def manifest(args, command: str, parameters: dict, precision_bits: int | None) -> dict:
    return {
        "command": command,
        "parameters": {k: parameters[k] for k in sorted(parameters)},
        "seed": args.seed,
        "precision_bits": precision_bits,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def emit(args, payload: dict, always_stdout: bool = False) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    if always_stdout or not args.output:
        sys.stdout.write(text)


def load_config(path: str, precision_bits: int | None):
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read configuration {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: configuration must be a JSON object")
    if precision_bits is not None:
        doc["precision_bits"] = precision_bits
    return config_from_dict(doc)


def planar_points(config):
    """Points usable by planar predicates; d-dimensional lattices must be projected first."""
    pts = list(config.points)
    if isinstance(pts[0], tuple):
        if len(pts[0]) != 2:
            raise UsageError(f"{len(pts[0])}-dimensional lattice points; run 'gen project' first")
        return [RationalPoint2(*p) for p in pts]
    return pts


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for 'gen {args.kind}'")


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    bits = args.precision_bits or DEFAULT_PRECISION
    if args.kind == "spiral":
        _require(args, "n")
        config = spiral_config(args.n, args.beta, bits)
    elif args.kind == "grid":
        _require(args, "r", "d")
        config = grid(args.r, args.d)
    elif args.kind == "shell":
        _require(args, "r", "d")
        config = best_shell(args.r, args.d)
    elif args.kind == "ngon":
        _require(args, "n")
        config = PointSet("ngon", tuple(regular_ngon(args.n, bits)), {"n": args.n}, bits)
    else:
        _require(args, "input")
        source = load_config(args.input, None)
        if not isinstance(source.points[0], tuple):
            raise UsageError("'gen project' needs a lattice (grid or shell) configuration")
        img, frame = generic_projection(source.points, args.seed, args.max_retries, bits, args.margin)
        params = {"source_kind": source.kind, **source.parameters, "seed": args.seed}
        config = PointSet("projected", tuple(img), params, bits, frame,
                          {"source_points": len(img), "attempt": frame.attempt})
    doc = config_to_dict(config)
    params = {k: getattr(args, k) for k in ("n", "beta", "r", "d", "input", "max_retries")
              if getattr(args, k, None) is not None}
    doc["manifest"] = manifest(args, f"gen {args.kind}", params, doc["precision_bits"])
    emit(args, doc)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = load_config(args.input, args.precision_bits)
    pts = list(config.points)
    if isinstance(pts[0], tuple) and len(pts[0]) > 2:
        rep = lattice_general_position_report(pts)
    else:
        pts = planar_points(config)
        mode = args.mode or ("exact" if isinstance(pts[0], RationalPoint2) else "numeric")
        if mode == "exact" and not isinstance(pts[0], RationalPoint2):
            raise UsageError("exact mode needs rational or integer coordinates")
        rep = general_position_report(pts, mode, args.margin)
    ok = {"both": rep.ok, "collinear": rep.ok_collinearity, "concyclic": rep.ok_concyclicity}[args.check]
    payload = {"report": rep.to_dict(), "check": args.check, "passed": ok}
    payload["manifest"] = manifest(args, "verify",
                                   {"input": args.input, "mode": rep.mode, "margin": args.margin,
                                    "check": args.check}, getattr(config, "precision_bits", None))
    emit(args, payload, always_stdout=True)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_census(args) -> int:
    config = load_config(args.input, args.precision_bits)
    if args.pinned and not isinstance(config, SpiralConfig):
        raise UsageError("--pinned needs a spiral configuration")
    if args.pinned:
        rep = census_pinned_spiral(config, args.tol, strict=args.strict, workers=args.workers)
    else:
        rep = census_bruteforce(planar_points(config), args.mode, args.tol, strict=args.strict,
                                workers=args.workers)
    payload = {"report": rep.to_dict()}
    status = EXIT_OK
    if args.pinned:
        bound = pinned_bound(config.n)
        payload["pinned_bound"] = bound
        payload["bound_ok"] = rep.distinct_count <= bound
        status = EXIT_OK if payload["bound_ok"] else EXIT_FAILED
    payload["manifest"] = manifest(args, "census",
                                   {"input": args.input, "pinned": args.pinned, "mode": rep.mode,
                                    "tol": args.tol, "strict": args.strict}, rep.precision_bits)
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    emit(args, payload, always_stdout=True)
    return status


def cmd_subset(args) -> int:
    config = load_config(args.input, args.precision_bits)
    params = {"input": args.input, "tol": args.tol}
    status = EXIT_OK
    if args.subset is not None:
        if not isinstance(config, SpiralConfig):
            raise UsageError("--subset needs a spiral configuration")
        try:
            idx = sorted({int(v) for v in args.subset.split(",") if v.strip()})
        except ValueError as exc:
            raise UsageError(f"--subset must be comma-separated integers: {exc}") from exc
        params["subset"] = idx
        try:
            w = repeated_angle_witness(config, idx, args.tol)
        except WitnessDiscrepancyTooLarge as exc:
            payload = {"found": True, "error": str(exc)}
            status = EXIT_FAILED
        else:
            payload = {"found": w is not None, "witness": None if w is None else w.to_dict()}
    elif args.threshold_check:
        if not isinstance(config, SpiralConfig):
            raise UsageError("--threshold-check needs a spiral configuration")
        n = config.n
        m = rgen_threshold(n)
        if m > n:
            raise UsageError(f"threshold {m} exceeds n = {n}; no subset of that size exists")
        params["trials"] = args.trials
        gen = rng(args.seed, 0x5B)
        found, worst, missing = 0, None, []
        for trial in range(args.trials):
            subset = sorted(int(v) + 1 for v in gen.choice(n, size=m, replace=False))
            try:
                w = repeated_angle_witness(config, subset, args.tol)
            except WitnessDiscrepancyTooLarge:
                w = None
            if w is None:
                missing.append(subset)
                continue
            found += 1
            if worst is None or w.discrepancy > worst:
                worst = w.discrepancy
        payload = {
            "n": n, "threshold": m, "trials": args.trials, "witnesses_found": found,
            "max_discrepancy": None if worst is None else to_decimal(worst, config.precision_bits),
            "missing": missing,
        }
        status = EXIT_OK if not missing else EXIT_FAILED
    else:
        params.update(search=args.search, budget=args.budget)
        res = search_distinct_angle_subset(planar_points(config), args.search, args.budget, args.tol)
        payload = res.to_dict()
        payload["subset"] = [i + 1 for i in res.subset]
        payload["index_base"] = 1
    payload["manifest"] = manifest(args, "subset", params, getattr(config, "precision_bits", None))
    emit(args, payload, always_stdout=True)
    return status


def cmd_formula(args) -> int:
    if args.name == "n_r_d":
        _require_formula(args, "r", "d")
        value = {"r": args.r, "d": args.d, "n_r_d": _json_int(n_r_d(args.r, args.d))}
        params = {"r": args.r, "d": args.d, "enumerate": args.enumerate}
        if args.enumerate:
            counts = translation_class_conventions(grid(args.r, args.d))
            value["enumerated"] = asdict(counts)
            value["matches"] = counts.ordered == n_r_d(args.r, args.d)
    else:
        _require_formula(args, "n")
        m = rgen_threshold(args.n)
        value = {"n": args.n, "rgen_threshold": m, "pairs": _json_int(math.comb(m, 2)),
                 "required_pairs": _json_int(2 * args.n - 1)}
        params = {"n": args.n}
    value["manifest"] = manifest(args, f"formula {args.name}", params, None)
    emit(args, value, always_stdout=True)
    return EXIT_OK


def _require_formula(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required for 'formula {args.name}'")


# ---------------------------------------------------------------------------


def _positive_float(text: str) -> float:
    v = float(Fraction(text)) if "/" in text else float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the JSON payload here")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    common.add_argument("--precision-bits", type=int, default=None,
                        help=f"working precision (default {DEFAULT_PRECISION}, or the input file's)")

    parser = argparse.ArgumentParser(prog="distinct-angles", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a configuration")
    p.add_argument("kind", choices=["spiral", "grid", "shell", "ngon", "project"])
    p.add_argument("--n", type=int)
    p.add_argument("--beta", help="spiral step; decimal or ratio like 1/20 (default 1/n)")
    p.add_argument("--r", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--input", help="lattice configuration to project")
    p.add_argument("--max-retries", type=int, default=16)
    p.add_argument("--margin", type=_positive_float, default=DEFAULT_MARGIN)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", parents=[common], help="general-position report")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=["exact", "numeric"])
    p.add_argument("--margin", type=_positive_float, default=DEFAULT_MARGIN)
    p.add_argument("--check", choices=["both", "collinear", "concyclic"], default="both",
                   help="which property decides the exit status")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("census", parents=[common], help="distinct-angle census")
    p.add_argument("--input", required=True)
    p.add_argument("--pinned", action="store_true", help="only triples through spiral point 1")
    p.add_argument("--mode", choices=["exact", "numeric"])
    p.add_argument("--tol", type=_positive_float, default=1e-9)
    p.add_argument("--strict", action="store_true",
                   help="fail (exit 1) on a collinear triple instead of skipping and counting it")
    p.add_argument("--csv", help="write one row per angle class here")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("subset", parents=[common], help="repeated-angle witnesses and subset search")
    p.add_argument("--input", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--subset", help="comma-separated 1-based spiral indices")
    g.add_argument("--threshold-check", action="store_true")
    g.add_argument("--search", choices=["greedy", "exhaustive"])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--budget", type=int, default=10**6)
    p.add_argument("--tol", type=_positive_float, default=1e-9)
    p.set_defaults(func=cmd_subset)

    p = sub.add_parser("formula", parents=[common], help="evaluate closed-form counts")
    p.add_argument("name", choices=["n_r_d", "rgen_threshold"])
    p.add_argument("--r", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--enumerate", action="store_true",
                   help="n_r_d: also count translation classes on the grid, both conventions")
    p.set_defaults(func=cmd_formula)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help and on usage errors; report the code instead
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except DegenerateTriple as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (UsageError, DistinctAnglesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
