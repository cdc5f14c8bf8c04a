"""Run configurations, report assembly and profile plots.

Every subcommand writes ``report.json`` into the output directory.  Reports
contain no wall-clock data, so the same configuration yields byte-identical
files; elapsed time goes to a separate ``timing.json``.
"""
from __future__ import annotations

import io
import json
import math
import os
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .detour import DETOUR_THRESHOLD, detour_profile, detour_verdict, write_detour_csv
from .errors import BadParams, EmptyProfile
from .euclid import euclid_sup_search, eta0
from .generators import gen_space, parse_gen_spec
from .graphfile import graph_hash, load_graph
from .rips import (
    EPS_LOWER,
    ETA0,
    Sampler,
    Thresholds,
    classify,
    omega_profile,
    write_buckets_csv,
    write_samples_csv,
)
from .space import MetricGraph, all_pairs_distances, subdivide
from .tower import build_tower, rescaled_four_point, save_tower, tower_ratio_check, write_defect_csv

OUT_ENV = "RIPSGAUGE_OUT"
DEFAULT_OUT = "ripsgauge-out"
SUBCOMMANDS = ("analyze", "detour", "euclid", "tower", "cone")


@dataclass
class RunConfig:
    subcommand: str
    input: str | None = None
    gen: str | None = None
    seed: int = 0
    samples: int | None = None
    exhaustive: bool = False
    resolution: float | None = None
    t_min: float | None = None
    t_grid: list[float] | None = None
    buckets: int = 32
    geodesics: int = 1
    eps_hyperbolic: float = EPS_LOWER
    eps_tree: float = EPS_LOWER
    detour_threshold: float = DETOUR_THRESHOLD
    separation: float = 2.5
    grid: int = 120
    tol: float = 1e-9
    basepoint: int = 0
    levels: int = 4
    spine_step: float = 0.25
    band: float = 2.0
    out: str | None = None
    plot: bool = True

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise BadParams(f"unknown subcommand {self.subcommand!r}")
        for name in ("eps_hyperbolic", "eps_tree", "detour_threshold"):
            if not getattr(self, name) > 0:
                raise BadParams(f"threshold {name} must be positive")

    def out_dir(self) -> Path:
        return Path(self.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)

    def echo(self) -> dict:
        data = asdict(self)
        data.pop("out")
        data.pop("plot")
        return data


DEFAULT_SAMPLES = {"analyze": 10_000, "detour": 100, "tower": 2000, "cone": 2000}


def load_space(config: RunConfig) -> tuple[MetricGraph, dict]:
    """The input graph (from file or generator), subdivided if requested."""
    if (config.input is None) == (config.gen is None):
        raise BadParams("give exactly one of --input or --gen")
    if config.input is not None:
        g = load_graph(config.input)
        source = {"input": str(config.input)}
    else:
        kind, params = parse_gen_spec(config.gen)
        g = gen_space(kind, params, seed=config.seed)
        source = {"generator": kind, "params": params}
    if config.resolution is not None:
        g = subdivide(g, config.resolution)
    source.update(vertices=g.vertex_count, edges=len(g.edges), graph_sha256=graph_hash(g))
    return g, source


def _sampler(config: RunConfig) -> Sampler:
    samples = config.samples if config.samples is not None else DEFAULT_SAMPLES[config.subcommand]
    if config.exhaustive:
        return Sampler("exhaustive", config.samples, config.seed)
    return Sampler("random", samples, config.seed)


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return "inf" if math.isinf(v) else v
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(_jsonify(report), indent=2, sort_keys=True) + "\n"


def plot_profile(profile, path, reference_lines: dict | None = None) -> None:
    """Write Omega(t)/t against t as SVG with labelled horizontal reference lines.

    Output is byte-stable: fixed hash salt and no date metadata.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t = np.asarray(profile.t, dtype=float)
    om = np.asarray(profile.omega_hat, dtype=float)
    if len(t) == 0 or len(profile) == 0:
        raise EmptyProfile("nothing to plot")
    if reference_lines is None:
        reference_lines = {"1/32": EPS_LOWER, "eta0": ETA0}
    ratio = np.divide(om, t, out=np.zeros_like(om), where=t > 0)
    with matplotlib.rc_context({"svg.hashsalt": "ripsgauge", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(t, ratio, marker="o", markersize=3, label="sampled Omega(t)/t")
        for k, (name, y) in enumerate(reference_lines.items()):
            ax.axhline(y, linestyle="--", color=f"C{k + 1}", label=f"{name} = {y:.6f}")
        ax.set_xlabel("perimeter t")
        ax.set_ylabel("Omega(t) / t")
        ax.set_ylim(bottom=0)
        ax.legend(loc="best")
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    Path(path).write_text(buf.getvalue())


def _analyze(config: RunConfig, out: Path) -> dict:
    g, source = load_space(config)
    D = all_pairs_distances(g)
    sampler = _sampler(config)
    profile = omega_profile(g, D, sampler, buckets=config.buckets, t_min=config.t_min,
                            geodesics=config.geodesics)
    thresholds = Thresholds(config.eps_hyperbolic, config.eps_tree)
    verdict = classify(profile, thresholds)
    write_samples_csv(profile, out / "samples.csv")
    write_buckets_csv(profile, out / "buckets.csv")
    if config.plot:
        plot_profile(profile, out / "profile.svg")
    coverage = {"triangles": len(profile), "vertices": g.vertex_count}
    return {
        "source": source,
        "results": {"profile": profile.to_dict(), "verdict": verdict.to_dict(),
                    "constants": {"eps_lower": EPS_LOWER, "eta0": ETA0}},
        "coverage": coverage,
    }


def default_t_grid(diameter: float, separation: float, count: int = 4) -> list[float]:
    top = diameter / separation
    return [top * (k + 1) / count for k in range(count)]


def _detour(config: RunConfig, out: Path) -> dict:
    g, source = load_space(config)
    D = all_pairs_distances(g)
    sampler = _sampler(config)
    ts = config.t_grid or default_t_grid(D.diameter, config.separation)
    profile = detour_profile(g, D, ts, sampler, separation=config.separation)
    profile.thresholds["paper"] = config.detour_threshold
    band = detour_verdict(profile)
    write_detour_csv(profile, out / "detour.csv")
    return {
        "source": source,
        "results": {"profile": profile.to_dict(), "band": band},
        "coverage": {"witnesses": [e.candidates for e in profile.entries]},
    }


def _euclid(config: RunConfig, out: Path) -> dict:
    res = euclid_sup_search(resolution=config.grid, tol=config.tol)
    e = eta0()
    return {
        "results": {
            "eta0": e.value,
            "alpha0": e.alpha0,
            "sup_found": res.sup,
            "argmax_angles": list(res.angles),
            "argmax_base_angle_cos": res.base_angle_cos,
            "golden_ratio_conjugate": (math.sqrt(5) - 1) / 2,
            "grid_resolution": res.grid_resolution,
            "tol": res.tol,
        },
        "coverage": {"shape_cells": config.grid * config.grid},
    }


def _tower(config: RunConfig, out: Path) -> dict:
    g, source = load_space(config)
    D = all_pairs_distances(g)
    tower = build_tower(g, config.basepoint, config.levels, config.spine_step, D=D)
    sidecar = save_tower(tower, out / "tower.graph")
    check = tower_ratio_check(tower, _sampler(config))
    return {
        "source": source,
        "results": {
            "tower": {"vertices": tower.graph.vertex_count, "edges": len(tower.graph.edges),
                      "sidecar": json.loads(sidecar.read_text())},
            "ratio_check": check.to_dict(),
        },
        "coverage": {"tower_triangles": check.y_samples, "base_triangles": check.x_samples},
    }


def default_scales(diameter: float, edge: float, count: int = 5) -> list[float]:
    """Evenly spaced scales up to diameter/2, starting at diameter/8 but never
    below two edge lengths (smaller scales see only single edges)."""
    lo = min(max(diameter / 8, 2 * edge), diameter / 2)
    return sorted({float(x) for x in np.linspace(lo, diameter / 2, count)})


def _cone(config: RunConfig, out: Path) -> dict:
    g, source = load_space(config)
    D = all_pairs_distances(g)
    scales = config.t_grid or default_scales(D.diameter, g.max_edge_length)
    curve = rescaled_four_point(g, D, scales, _sampler(config), band=config.band)
    write_defect_csv(curve, out / "defects.csv")
    d = curve.defects
    return {
        "source": source,
        "results": {"curve": curve.to_dict(),
                    "first_over_last": d[0] / d[-1] if d[-1] > 0 else math.inf},
        "coverage": {"quadruples": list(curve.counts)},
    }


_RUNNERS = {"analyze": _analyze, "detour": _detour, "euclid": _euclid,
            "tower": _tower, "cone": _cone}


def run(config: RunConfig) -> dict:
    """Execute one subcommand, write its files, and return the report."""
    out = config.out_dir()
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    body = _RUNNERS[config.subcommand](config, out)
    elapsed = time.perf_counter() - start
    report = {
        "subcommand": config.subcommand,
        "config": config.echo(),
        "seed": config.seed,
        "source": body.get("source"),
        "results": body["results"],
        "provenance": {"tool": "ripsgauge", "version": __version__,
                       "sampler_coverage": body.get("coverage", {}),
                       "timing_file": "timing.json"},
    }
    (out / "report.json").write_text(dumps_report(report))
    (out / "timing.json").write_text(json.dumps({"runtime_seconds": elapsed}) + "\n")
    return report
