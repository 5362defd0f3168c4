"""Command line entry points.

Subcommands: ``gen`` writes generator spaces, ``fill`` runs the cover/nerve
pipeline end to end, ``hf1`` profiles the filling function, ``bfrt-check``
stress-tests the small-solution certificate chain on random systems.

Exit codes: 0 success, 2 domain or structural problem, 3 capacity budget
exceeded, 4 I/O failure.  The FILLBOUND_THREADS variable caps worker counts
(the current implementation runs single-threaded and records the setting).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Optional

from . import shapes
from .errors import CapacityError, DomainError, FillboundError, StructuralError
from .filling import amin_upper_bound, hf1_profile
from .fileio import (
    canonical_json,
    chain_to_dict,
    load_chain,
    load_space,
    save_space,
    write_atomic,
)
from .geom import ball_cover, pipeline_fill, skeleton_diameter
from .intlin import IntMatrix, certify_small_solution

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_CAPACITY = 3
EXIT_IO = 4

DEFAULT_TOLERANCE = 1e-9


def _thread_cap() -> Optional[int]:
    raw = os.environ.get("FILLBOUND_THREADS")
    if raw is None:
        return None
    try:
        return max(1, int(raw))
    except ValueError:
        return None


def _emit(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        write_atomic(path, text if text.endswith("\n") else text + "\n")


def cmd_gen(args) -> int:
    shape = args.shape
    if shape == "octahedron":
        space = shapes.octahedron(args.scale)
    elif shape == "tetra_boundary":
        space = shapes.tetra_boundary(args.scale)
    elif shape == "icosphere":
        space = shapes.icosphere(args.level, args.scale)
    elif shape == "prism":
        space = shapes.prism(args.n, args.levels, args.scale)
    elif shape == "disk":
        space = shapes.disk(args.n, args.rings, args.scale)
    else:  # pragma: no cover - argparse restricts choices
        raise DomainError(f"unknown shape {shape}")
    meta = {"shape": shape, "scale": args.scale}
    if args.out:
        save_space(args.out, space, metadata=meta)
    else:
        from .fileio import space_to_dict

        _emit(None, canonical_json(space_to_dict(space, meta)))
    return EXIT_OK


def cmd_fill(args) -> int:
    space = load_space(args.space)
    cycle = load_chain(args.cycle, space)
    report_doc = {
        "command": "fill",
        "space": args.space,
        "cycle": args.cycle,
        "radius": args.radius,
        "threads": _thread_cap(),
    }
    try:
        cover = ball_cover(space, args.radius)
        chain, report = pipeline_fill(space, cover, cycle, rel_tol=args.tolerance)
    except FillboundError as err:
        report_doc["error"] = str(err)
        _emit(args.out, canonical_json(report_doc))
        raise
    report_doc["report"] = report.to_dict()
    if not args.timing:
        # wall-clock noise would break byte-identical reports
        report_doc["report"].pop("timing", None)
    report_doc["filling_chain"] = chain_to_dict(space, chain)
    if args.chain_out:
        write_atomic(
            args.chain_out, canonical_json(chain_to_dict(space, chain)) + "\n"
        )
    _emit(args.out, canonical_json(report_doc))
    return EXIT_OK


def cmd_hf1(args) -> int:
    space = load_space(args.space)
    if args.l_max < 0:
        raise DomainError("l_max must be nonnegative")
    steps = max(1, args.steps)
    grid = [args.l_max * i / steps for i in range(steps + 1)]
    diameter = skeleton_diameter(space)
    at_2d = 2.0 * diameter
    grid.append(at_2d)
    profile = hf1_profile(
        space.complex,
        space.volumes,
        grid,
        cycle_budget=args.cycle_budget,
        rel_tol=args.tolerance,
    )
    hf_at_2d = profile.estimate_at(at_2d)
    amin = amin_upper_bound(hf_at_2d, 4)
    doc = {
        "command": "hf1",
        "space": args.space,
        "estimate_kind": profile.estimate_kind,
        "samples": [[l, e] for l, e in profile.samples],
        "cycle_census": [[l, c] for l, c in profile.cycle_census],
        "fitted_f1": profile.fitted_f1,
        "fitted_f2": profile.fitted_f2,
        "diameter": diameter,
        "hf1_at_2_diameter": hf_at_2d,
        "amin_upper_bound": amin,
        "threads": _thread_cap(),
    }
    _emit(args.out, canonical_json(doc))
    if args.csv:
        lines = ["l,hf_estimate,fitted_line"]
        for l, e in profile.samples:
            fitted = profile.fitted_f1 * l + profile.fitted_f2
            lines.append(
                ",".join(
                    (format(l, ".17g"), format(e, ".17g"), format(fitted, ".17g"))
                )
            )
        write_atomic(args.csv, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_bfrt_check(args) -> int:
    rng = random.Random(args.seed)
    results = []
    violations = 0
    capacity_skips = 0
    for _ in range(args.trials):
        rows = rng.randint(1, args.m_max)
        cols = rng.randint(1, args.n_max)
        a = IntMatrix.from_rows(
            [
                [rng.randint(-args.max_entry, args.max_entry) for _ in range(cols)]
                for _ in range(rows)
            ]
        )
        x0 = [rng.randint(-2, 2) for _ in range(cols)]
        b = a.mul_vec(x0)
        try:
            cert = certify_small_solution(a, b)
        except CapacityError:
            capacity_skips += 1
            continue
        if cert is None or cert.solution is None:
            violations += 1
            continue
        sol_max = max(map(abs, cert.solution), default=0)
        entry = {
            "rank": cert.m,
            "max_entry": cert.max_a,
            "max_rhs": cert.max_b,
            "solution_maxnorm": sol_max,
            "minor_max": cert.minor_max,
            "bound_ceiling": cert.hadamard_bound_ceiling,
            "hadamard_case": cert.hadamard_case,
        }
        ok = cert.check()
        if cert.minor_max is not None:
            ok = ok and sol_max <= cert.minor_max <= cert.hadamard_bound_ceiling
        else:
            ok = ok and sol_max <= cert.hadamard_bound_ceiling
        if not ok:
            violations += 1
            entry["violation"] = True
        results.append(entry)
    tightness = [
        r["solution_maxnorm"] / r["bound_ceiling"]
        for r in results
        if r["bound_ceiling"] > 0
    ]
    doc = {
        "command": "bfrt-check",
        "trials": args.trials,
        "seed": args.seed,
        "violations": violations,
        "capacity_skips": capacity_skips,
        "max_tightness": max(tightness) if tightness else 0.0,
        "mean_tightness": (sum(tightness) / len(tightness)) if tightness else 0.0,
        "instances": results if args.verbose else len(results),
    }
    _emit(args.out, canonical_json(doc))
    return EXIT_OK if violations == 0 else EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fillbound",
        description="Certified homological fillings of integer 1-cycles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument(
            "--seed", type=int, default=0,
            help="random seed (only bfrt-check draws randomness; accepted "
                 "everywhere for interface uniformity)",
        )

    gen = sub.add_parser("gen", help="write a generator space")
    add_seed(gen)
    gen.add_argument(
        "--shape",
        required=True,
        choices=["octahedron", "icosphere", "tetra_boundary", "prism", "disk"],
    )
    gen.add_argument("--scale", type=float, default=1.0)
    gen.add_argument("--level", type=int, default=1, help="icosphere subdivisions")
    gen.add_argument("--n", type=int, default=6, help="polygon order")
    gen.add_argument("--levels", type=int, default=1, help="prism bands")
    gen.add_argument("--rings", type=int, default=3, help="disk rings")
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=cmd_gen)

    fill = sub.add_parser("fill", help="fill a cycle through the cover pipeline")
    add_seed(fill)
    fill.add_argument("--space", required=True)
    fill.add_argument("--cycle", required=True)
    fill.add_argument("--radius", type=float, required=True)
    fill.add_argument("--out", default=None)
    fill.add_argument("--chain-out", default=None)
    fill.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    fill.add_argument(
        "--timing", action="store_true",
        help="include wall-clock stage timings (report is then not byte-stable)",
    )
    fill.set_defaults(func=cmd_fill)

    hf1 = sub.add_parser("hf1", help="profile the filling function")
    add_seed(hf1)
    hf1.add_argument("--space", required=True)
    hf1.add_argument("--l-max", type=float, required=True)
    hf1.add_argument("--steps", type=int, default=8)
    hf1.add_argument("--cycle-budget", type=int, default=200)
    hf1.add_argument("--out", default=None)
    hf1.add_argument("--csv", default=None)
    hf1.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    hf1.set_defaults(func=cmd_hf1)

    bfrt = sub.add_parser("bfrt-check", help="stress-test the coefficient bound")
    bfrt.add_argument("--trials", type=int, default=100)
    bfrt.add_argument("--m-max", type=int, default=3)
    bfrt.add_argument("--n-max", type=int, default=8)
    bfrt.add_argument("--max-entry", type=int, default=3)
    add_seed(bfrt)
    bfrt.add_argument("--out", default=None)
    bfrt.add_argument("--verbose", action="store_true")
    bfrt.set_defaults(func=cmd_bfrt_check)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as err:
        print(f"capacity error: {err}", file=sys.stderr)
        return EXIT_CAPACITY
    except (DomainError, StructuralError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, json.JSONDecodeError) as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
