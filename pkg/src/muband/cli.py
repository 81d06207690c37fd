"""Command-line front end: ``muband <subcommand> ...``.

Exit codes: 0 success (for ``verify``: a segment witnesses the width
bound), 2 comparison hypothesis violated, 3 contradiction certificate with
positive margins, 4 certificate not positive, 64 unreadable scenario, and
the per-error codes of ``muband.errors`` for numeric failures.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import pipelines
from .errors import MubandError
from .scenario import load_scenario

SEED_ENV = "MUBAND_SEED"  # reserved; every solver is deterministic


def _interval(text):
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected 'a,b'") from exc
    return a, b


def _grid(text):
    try:
        return int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("--grid takes a point count") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="directory for CSV tables and summaries")
    common.add_argument("--format", choices=("csv", "table"), default="csv")

    p = argparse.ArgumentParser(prog="muband", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("model", parents=[common], help="tabulate phi, h, scal of a model family")
    m.add_argument("--family", choices=("spherical", "cone", "hyperbolic"), default="spherical")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--kappa", type=float, default=1.0)
    m.add_argument("--sigma", type=float, default=1.0)
    m.add_argument("--interval", type=_interval, help="domain 'a,b'")
    m.add_argument("--grid", type=_grid, default=201)

    pot = sub.add_parser("potential", parents=[common], help="assembled three-segment potential")
    pot.add_argument("--n", type=int, required=True)
    pot.add_argument("--kappa", type=float, default=1.0)
    pot.add_argument("--d", type=float, required=True)
    pot.add_argument("--eps", type=float)
    pot.add_argument("--grid", type=_grid, default=400, help="samples per segment")

    w = sub.add_parser("width", parents=[common], help="band-width bounds")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--kappa", type=float, default=1.0)
    w.add_argument("--d", type=float, required=True)
    w.add_argument("--sigma", type=float)

    for name, text in (
        ("verify", "assemble, certify and decide a partitioned band scenario"),
        ("bubble", "solve a mu-bubble scenario"),
        ("sweep", "parameter sweep scenario"),
    ):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("scenario")
        s.add_argument("--eps", type=float, help="override [solver].eps")
        if name == "sweep":
            s.add_argument("--jobs", type=int, help="worker processes")
    return p


def run(args):
    if args.command == "model":
        interval = args.interval
        if interval is None:
            if args.family == "spherical":
                half = 0.9 * math.pi / (math.sqrt(args.kappa) * args.n)
                interval = (-half, half)
            else:
                interval = (0.1, 2.0)
        return pipelines.run_model(args.n, args.family, interval, args.kappa, args.sigma, args.grid)
    if args.command == "potential":
        return pipelines.run_potential(args.n, args.kappa, args.d, args.eps, points_per_segment=args.grid)
    if args.command == "width":
        return pipelines.run_width(args.n, args.kappa, args.d, args.sigma)
    sc = load_scenario(args.scenario)
    if args.eps is not None:
        sc.solver["eps"] = args.eps
    if args.out is None and "dir" in sc.output:
        args.out = sc.output["dir"]
    return pipelines.run_scenario(sc, getattr(args, "jobs", None))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = run(args)
    except MubandError as exc:
        print(f"muband: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.out:
        report.write(args.out)
        sys.stdout.write(report.summary_text())
    else:
        sys.stdout.write(report.render(args.format))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
