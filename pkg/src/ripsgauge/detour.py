"""Detour growth: how long a path from x to y must be to stay at distance >= t
from a point z of the geodesic [x, y].

The empirical G(t) is a min over sampled witnesses, hence an upper bound of
the true infimum.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .errors import EmptyProfile, EndpointInsideBall, NoAdmissibleTriple, ZNotOnGeodesic
from .rips import HYPERBOLIC_CONSISTENT, INCONCLUSIVE, NOT_HYPERBOLIC_CONSISTENT, Sampler
from .space import TOL, DistanceMatrix, MetricGraph, pair_geodesic

DETOUR_THRESHOLD = 30.0


def _ball_filtered(g: MetricGraph, D: DistanceMatrix, z: int, t: float):
    keep = np.flatnonzero(D[z] >= t - TOL)
    sub = g.adjacency[keep][:, keep]
    return keep, sub


def detour_length(g: MetricGraph, D: DistanceMatrix, x: int, y: int, z: int, t: float) -> float:
    """Shortest x-y path avoiding the open ball of radius ``t`` around ``z``.

    Returns ``math.inf`` when the ball separates x from y.
    """
    if not t > 0:
        raise EndpointInsideBall(f"t must be positive, got {t}")
    if z not in pair_geodesic(g, D, x, y).vertices:
        raise ZNotOnGeodesic(f"{z} is not on the canonical geodesic [{x}, {y}]")
    if D[z, x] < t - TOL or D[z, y] < t - TOL:
        raise EndpointInsideBall(f"an endpoint lies within distance {t} of {z}")
    keep, sub = _ball_filtered(g, D, z, t)
    i, j = np.searchsorted(keep, [x, y])
    dist = dijkstra(sub, directed=False, indices=int(i))
    return float(dist[j])


def middle_vertex(g: MetricGraph, D: DistanceMatrix, x: int, y: int) -> int:
    """Vertex of the canonical geodesic [x, y] closest to its midpoint."""
    seq = np.asarray(pair_geodesic(g, D, x, y).vertices)
    half = D[x, y] / 2
    return int(seq[np.argmin(np.abs(D[x, seq] - half))])


@dataclass(frozen=True)
class DetourEntry:
    t: float
    g_hat: float
    witness: tuple[int, int, int] | None
    candidates: int

    @property
    def ratio(self) -> float:
        return self.g_hat / self.t


@dataclass
class DetourProfile:
    entries: list[DetourEntry]
    thresholds: dict = field(default_factory=lambda: {"bonk": math.inf, "paper": DETOUR_THRESHOLD})
    sampler: dict = field(default_factory=dict)
    separation: float = 2.5

    def to_dict(self) -> dict:
        return {
            "entries": [
                {
                    "t": e.t,
                    "g_hat": _jsonable(e.g_hat),
                    "ratio": _jsonable(e.ratio),
                    "witness": list(e.witness) if e.witness else None,
                    "candidates": e.candidates,
                }
                for e in self.entries
            ],
            "thresholds": {k: _jsonable(v) for k, v in self.thresholds.items()},
            "sampler": self.sampler,
            "separation": self.separation,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DetourProfile":
        entries = [
            DetourEntry(
                float(e["t"]),
                float(e["g_hat"]),
                tuple(e["witness"]) if e["witness"] else None,
                int(e["candidates"]),
            )
            for e in data["entries"]
        ]
        th = {k: float(v) for k, v in data["thresholds"].items()}
        return cls(entries, th, dict(data["sampler"]), float(data["separation"]))


def _jsonable(v: float):
    return "inf" if math.isinf(v) else v


def _sample_witnesses(g, D, t, count, separation, rng, max_tries=50):
    n = g.vertex_count
    out = []
    need = separation * t
    for _ in range(count):
        for _ in range(max_tries):
            x = int(rng.integers(n))
            far = np.flatnonzero(D[x] >= need - TOL)
            if len(far):
                y = int(far[rng.integers(len(far))])
                out.append((x, y, middle_vertex(g, D, x, y)))
                break
    return out


def detour_profile(g: MetricGraph, D: DistanceMatrix, ts, sampler: Sampler,
                   separation: float = 2.5) -> DetourProfile:
    """Empirical G(t) for each t in ``ts`` (sorted ascending).

    For every t, ``sampler.samples`` random pairs with d(x, y) >= separation*t
    are drawn (z = middle vertex of [x, y]) into one shared witness pool.
    Each t is then evaluated on every pool triple admissible for it, so the
    entries are non-decreasing in t.
    """
    ts = [float(t) for t in ts]
    if not ts or any(t <= 0 for t in ts) or ts != sorted(ts):
        raise NoAdmissibleTriple("t values must be positive and sorted")
    if separation * ts[-1] > D.diameter + TOL:
        raise NoAdmissibleTriple(
            f"t={ts[-1]} needs pairs at distance {separation * ts[-1]}, diameter is {D.diameter}"
        )
    rng = np.random.default_rng(sampler.seed)
    budget = sampler.samples or 100
    pool: list[tuple[int, int, int]] = []
    for t in ts:
        pool.extend(_sample_witnesses(g, D, t, budget, separation, rng))
    entries = evaluate_pool(g, D, ts, pool, separation)
    return DetourProfile(entries, sampler=sampler.as_dict(), separation=separation)


def evaluate_pool(g: MetricGraph, D: DistanceMatrix, ts, pool, separation: float = 2.5
                  ) -> list[DetourEntry]:
    """Min detour length at each t over the admissible triples of ``pool``."""
    pool = sorted(set(pool))
    entries = []
    for t in ts:
        best, witness, tried = math.inf, None, 0
        for x, y, z in pool:
            if D[x, y] < separation * t - TOL or D[z, x] < t - TOL or D[z, y] < t - TOL:
                continue
            tried += 1
            length = detour_length(g, D, x, y, z, t)
            if witness is None or length < best:
                best, witness = length, (x, y, z)
        if tried == 0:
            raise NoAdmissibleTriple(f"no admissible witness for t={t}")
        entries.append(DetourEntry(float(t), best, witness, tried))
    return entries


def detour_verdict(profile: DetourProfile, threshold: float | None = None, tail: int = 2) -> str:
    """Band from the ``tail`` largest-t entries against the ratio threshold (30).

    All-infinite tails satisfy the criterion vacuously.
    """
    if not profile.entries:
        raise EmptyProfile("detour profile is empty")
    th = profile.thresholds.get("paper", DETOUR_THRESHOLD) if threshold is None else threshold
    if len(profile.entries) < tail:
        return INCONCLUSIVE
    ratios = [e.ratio for e in profile.entries[-tail:]]
    if min(ratios) > th:
        return HYPERBOLIC_CONSISTENT
    return NOT_HYPERBOLIC_CONSISTENT


def write_detour_csv(profile: DetourProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "g_hat", "ratio", "witness_x", "witness_y", "witness_z"])
        for e in profile.entries:
            wx, wy, wz = e.witness if e.witness else ("", "", "")
            w.writerow([repr(e.t), _fmt(e.g_hat), _fmt(e.ratio), wx, wy, wz])


def _fmt(v: float) -> str:
    return "inf" if math.isinf(v) else repr(v)
