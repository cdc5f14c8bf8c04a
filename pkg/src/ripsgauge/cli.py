"""Command-line entry point: ``ripsgauge analyze|detour|euclid|tower|cone``.

Exit codes: 0 on success, 2 when an input violates a precondition, 3 when a
graph file cannot be parsed.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import ParseError, PreconditionError
from .report import OUT_ENV, RunConfig, run


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p: argparse.ArgumentParser, graph: bool = True) -> None:
    if graph:
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", help="graph file in the 'metricgraph v1' edge-list format")
        src.add_argument("--gen", help="generator spec, e.g. grid_plane:n=40 or random_tree:n=200")
        p.add_argument("--samples", type=int, help="sample budget")
        p.add_argument("--exhaustive", action="store_true", help="enumerate tuples instead of sampling")
        p.add_argument("--resolution", type=float, help="subdivide edges to at most this length")
        p.add_argument("--t-min", type=float, dest="t_min", help="tail cutoff for the slope estimate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./ripsgauge-out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ripsgauge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ripsgauge {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    a = sub.add_parser("analyze", help="Omega profile and hyperbolicity band")
    _common(a)
    a.add_argument("--buckets", type=int, default=32)
    a.add_argument("--geodesics", type=int, default=1,
                   help="shortest paths tried per side (delta is maximized over choices)")
    a.add_argument("--eps-hyperbolic", type=float, default=1 / 32)
    a.add_argument("--eps-tree", type=float, default=1 / 32)
    a.add_argument("--no-plot", dest="plot", action="store_false")

    d = sub.add_parser("detour", help="detour growth profile and band")
    _common(d)
    d.add_argument("--t", type=_floats, dest="t_grid", help="comma-separated t values")
    d.add_argument("--threshold", type=float, default=30.0, dest="detour_threshold")
    d.add_argument("--separation", type=float, default=2.5)

    e = sub.add_parser("euclid", help="brute-force Euclidean thinness constant")
    _common(e, graph=False)
    e.add_argument("--grid", type=int, default=120)
    e.add_argument("--tol", type=float, default=1e-9)

    t = sub.add_parser("tower", help="build a tower space and compare thinness ratios")
    _common(t)
    t.add_argument("--basepoint", type=int, default=0)
    t.add_argument("--levels", type=int, default=4)
    t.add_argument("--spine-step", type=float, default=0.25)

    c = sub.add_parser("cone", help="rescaled four-point defect curve (cone proxy)")
    _common(c)
    c.add_argument("--scales", type=_floats, dest="t_grid", help="comma-separated scales")
    c.add_argument("--band", type=float, default=2.0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if v is not None}
    try:
        config = RunConfig(**fields)
        report = run(config)
    except ParseError as exc:
        print(f"ripsgauge {args.subcommand}: parse error: {exc}", file=sys.stderr)
        return 3
    except (PreconditionError, FileNotFoundError) as exc:
        print(f"ripsgauge {args.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    summary = _summary(report)
    print(json.dumps(summary, sort_keys=True))
    return 0


def _summary(report: dict) -> dict:
    res = report["results"]
    sub = report["subcommand"]
    if sub == "analyze":
        v = res["verdict"]
        return {"band": v["band"], "ratio_sup": v["ratio_sup"], "slope_tail": v["slope_tail"]}
    if sub == "detour":
        return {"band": res["band"],
                "ratios": [e["ratio"] for e in res["profile"]["entries"]]}
    if sub == "euclid":
        return {k: res[k] for k in ("eta0", "sup_found", "argmax_base_angle_cos")}
    if sub == "tower":
        return res["ratio_check"]
    return {"defects": res["curve"]["defects"]}


if __name__ == "__main__":
    sys.exit(main())
