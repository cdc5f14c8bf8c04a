"""Rips thinness of geodesic triangles and the empirical scale profile Omega.

For a triangle with sides l1, l2, l3, ``delta`` is the least d such that each
side lies in the closed d-neighborhood of the union of the other two.  On a
graph this is evaluated over side vertices only, so it is exact for the
vertex set and within ``resolution`` of the continuous value.

Omega(t) is the sup of delta over triangles of perimeter <= t.  Everything
here is sampled, so the profile is a lower bound of the true Omega.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyProfile, SamplerBudgetZero, TooFewVertices
from .space import DistanceMatrix, Geodesic, MetricGraph, geodesic_choices, pair_geodesic

EPS_LOWER = 1 / 32
#: Euclidean thinness constant ((sqrt5 - 1)/2)^(5/2) / 2
ETA0 = ((math.sqrt(5.0) - 1.0) / 2.0) ** 2.5 / 2.0

TREE_CONSISTENT = "tree-consistent"
HYPERBOLIC_CONSISTENT = "hyperbolic-consistent"
NOT_HYPERBOLIC_CONSISTENT = "not-hyperbolic-consistent"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Sampler:
    """Which vertex tuples to evaluate.

    ``kind="exhaustive"`` enumerates all combinations of distinct vertices, or
    the first ``samples`` of them in lexicographic order when ``samples`` is
    set.  ``kind="random"`` draws ``samples`` tuples of distinct vertices with
    ``numpy.random.default_rng(seed)``.
    """

    kind: str = "random"
    samples: int | None = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("exhaustive", "random"):
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        if self.kind == "random" and not self.samples:
            raise SamplerBudgetZero("random sampler needs a positive sample budget")
        if self.samples is not None and self.samples <= 0:
            raise SamplerBudgetZero("sample budget must be positive")

    def tuples(self, n: int, k: int) -> np.ndarray:
        """An (m, k) int array of vertex tuples with distinct entries."""
        if n < k:
            return np.empty((0, k), dtype=np.int64)
        if self.kind == "exhaustive":
            it = itertools.combinations(range(n), k)
            if self.samples is not None:
                it = itertools.islice(it, self.samples)
            return np.array(list(it), dtype=np.int64).reshape(-1, k)
        rng = np.random.default_rng(self.seed)
        out = np.empty((self.samples, k), dtype=np.int64)
        for i in range(self.samples):
            out[i] = rng.choice(n, size=k, replace=False)
        return out

    def as_dict(self) -> dict:
        return {"kind": self.kind, "samples": self.samples, "seed": self.seed}


@dataclass(frozen=True)
class Triangle:
    a: int
    b: int
    c: int
    sides: tuple[Geodesic, Geodesic, Geodesic]
    perimeter: float


def make_triangle(g: MetricGraph, D: DistanceMatrix, a: int, b: int, c: int) -> Triangle:
    """Triangle with sides [a,b], [b,c], [c,a].

    Each side is the pair-canonical geodesic, so the side set does not depend
    on the order in which the vertices are given.
    """
    sides = (pair_geodesic(g, D, a, b), pair_geodesic(g, D, b, c), pair_geodesic(g, D, c, a))
    return Triangle(a, b, c, sides, _perimeter(D, a, b, c))


def _perimeter(D: DistanceMatrix, a: int, b: int, c: int) -> float:
    # exactly rounded, so the value does not depend on vertex order
    return math.fsum((D[a, b], D[b, c], D[c, a]))


def sides_delta(D: DistanceMatrix, sides: Sequence[Sequence[int]]) -> float:
    """max over sides of max over side vertices of distance to the other two sides."""
    verts = [np.fromiter(s, dtype=np.int64) for s in sides]
    best = 0.0
    for i in range(3):
        if len(verts[i]) <= 2:
            # endpoints always lie on the other two sides
            continue
        others = np.concatenate([verts[(i + 1) % 3], verts[(i + 2) % 3]])
        inner = verts[i][1:-1]
        val = D[np.ix_(inner, others)].min(axis=1).max()
        best = max(best, float(val))
    return best


def rips_delta(g: MetricGraph, D: DistanceMatrix, tri: Triangle) -> float:
    return sides_delta(D, [s.vertices for s in tri.sides])


def triangle_delta(g: MetricGraph, D: DistanceMatrix, a: int, b: int, c: int,
                   geodesics: int = 1) -> tuple[float, float]:
    """(perimeter, delta) of the canonical triangle on a, b, c.

    With ``geodesics > 1``, up to that many shortest paths are tried for each
    side and the largest delta over all side combinations is returned.
    """
    if geodesics <= 1:
        tri = make_triangle(g, D, a, b, c)
        return tri.perimeter, rips_delta(g, D, tri)
    per = _perimeter(D, a, b, c)
    choices = [geodesic_choices(g, D, x, y, geodesics) for x, y in ((a, b), (b, c), (c, a))]
    best = 0.0
    for sides in itertools.product(*choices):
        best = max(best, sides_delta(D, [s.vertices for s in sides]))
    return per, best


@dataclass
class ScaleProfile:
    """Sampled (perimeter, delta) pairs plus the bucketed running max.

    ``omega_hat(t)`` is the largest sampled delta with perimeter <= t.
    """

    triples: np.ndarray
    perimeters: np.ndarray
    deltas: np.ndarray
    t: np.ndarray
    omega_hat: np.ndarray
    t_min: float
    resolution: float = 0.0
    diameter: float = 0.0
    sampler: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.perimeters)

    def omega_at(self, t: float) -> float:
        mask = self.perimeters <= t + 1e-9
        return float(self.deltas[mask].max()) if mask.any() else 0.0

    def to_dict(self) -> dict:
        return {
            "t": self.t.tolist(),
            "omega_hat": self.omega_hat.tolist(),
            "t_min": self.t_min,
            "resolution": self.resolution,
            "diameter": self.diameter,
            "sampler": self.sampler,
            "samples": [
                [int(a), int(b), int(c), float(p), float(d)]
                for (a, b, c), p, d in zip(self.triples, self.perimeters, self.deltas)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScaleProfile":
        rows = data["samples"]
        triples = np.array([r[:3] for r in rows], dtype=np.int64).reshape(-1, 3)
        return cls(
            triples=triples,
            perimeters=np.array([r[3] for r in rows], dtype=float),
            deltas=np.array([r[4] for r in rows], dtype=float),
            t=np.asarray(data["t"], dtype=float),
            omega_hat=np.asarray(data["omega_hat"], dtype=float),
            t_min=float(data["t_min"]),
            resolution=float(data["resolution"]),
            diameter=float(data["diameter"]),
            sampler=dict(data["sampler"]),
        )


def effective_resolution(g: MetricGraph) -> float:
    """Spacing at which side points are realized: the subdivision resolution,
    or the longest edge for a graph that was never subdivided."""
    return g.resolution if g.resolution > 0 else g.max_edge_length


def bucketize(perimeters: np.ndarray, deltas: np.ndarray, buckets: int) -> tuple[np.ndarray, np.ndarray]:
    top = float(perimeters.max()) if len(perimeters) else 0.0
    if top <= 0:
        return np.array([0.0]), np.array([0.0])
    t = np.linspace(top / buckets, top, buckets)
    order = np.argsort(perimeters, kind="stable")
    run_max = np.maximum.accumulate(deltas[order])
    idx = np.searchsorted(perimeters[order], t + 1e-9, side="right") - 1
    omega = np.where(idx >= 0, run_max[np.clip(idx, 0, None)], 0.0)
    return t, omega


def omega_profile(g: MetricGraph, D: DistanceMatrix, sampler: Sampler, buckets: int = 32,
                  t_min: float | None = None, geodesics: int = 1) -> ScaleProfile:
    """Sample triangles and build the empirical Omega profile.

    ``t_min`` is the tail cutoff used by :func:`classify`.  It defaults to half
    the largest sampled perimeter: below that, bounded-Omega spaces of a few
    hundred vertices are still climbing to their plateau.  ``geodesics``
    is passed to :func:`triangle_delta`.
    """
    triples = sampler.tuples(g.vertex_count, 3)
    if len(triples) == 0:
        raise SamplerBudgetZero("no triangles to sample (fewer than 3 vertices?)")
    per = np.empty(len(triples))
    dl = np.empty(len(triples))
    for i, (a, b, c) in enumerate(triples):
        per[i], dl[i] = triangle_delta(g, D, int(a), int(b), int(c), geodesics)
    t, omega = bucketize(per, dl, buckets)
    return ScaleProfile(
        triples=triples,
        perimeters=per,
        deltas=dl,
        t=t,
        omega_hat=omega,
        t_min=float(per.max()) / 2 if t_min is None else float(t_min),
        resolution=effective_resolution(g),
        diameter=D.diameter,
        sampler=sampler.as_dict(),
    )


def thinness_ratio_sup(profile: ScaleProfile, min_perimeter: float | None = None) -> float:
    """Largest sampled delta/perimeter, ignoring triangles smaller than
    ``10 * resolution`` (and degenerate ones of zero perimeter)."""
    if len(profile) == 0:
        raise EmptyProfile("profile has no samples")
    floor = 10 * profile.resolution if min_perimeter is None else min_perimeter
    keep = (profile.perimeters >= floor) & (profile.perimeters > 0)
    if not keep.any():
        raise EmptyProfile(f"no samples with perimeter >= {floor}")
    return float((profile.deltas[keep] / profile.perimeters[keep]).max())


@dataclass(frozen=True)
class Thresholds:
    """Band thresholds.  ``hyperbolic`` bounds the tail slope, ``tree`` the ratio sup.

    Both best constants are only known to lie in [1/32, eta0]; the bracket is
    carried along for reporting.
    """

    hyperbolic: float = EPS_LOWER
    tree: float = EPS_LOWER
    min_tail_samples: int = 10

    def as_dict(self) -> dict:
        return {
            "hyperbolic": self.hyperbolic,
            "tree": self.tree,
            "min_tail_samples": self.min_tail_samples,
            "eps_H_bracket": [EPS_LOWER, ETA0],
            "eps_T_bracket": [EPS_LOWER, ETA0],
            "note": "the upper bound of both brackets is printed for eps_H twice in the "
                    "source corollary; the second instance is read as eps_T",
        }


@dataclass(frozen=True)
class Verdict:
    """``ratio_tail`` (max omega_hat(t)/t over tail buckets) is informational;
    the band uses ``ratio_sup`` and ``slope_tail`` only."""

    ratio_sup: float
    slope_tail: float
    band: str
    thresholds: Thresholds
    tail_samples: int
    ratio_tail: float = 0.0

    def to_dict(self) -> dict:
        return {
            "ratio_sup": self.ratio_sup,
            "slope_tail": self.slope_tail,
            "ratio_tail": self.ratio_tail,
            "band": self.band,
            "tail_samples": self.tail_samples,
            "thresholds": self.thresholds.as_dict(),
        }


def tail_slope(profile: ScaleProfile) -> tuple[float, int]:
    """Growth rate of omega_hat beyond ``t_min`` and the number of tail samples.

    This is the secant slope (omega_hat(T) - omega_hat(t_min)) / (T - t_min)
    between the cutoff and the largest sampled perimeter T, which discards the
    additive constant a bounded Omega contributes.
    """
    tail = profile.perimeters >= profile.t_min
    n_tail = int(tail.sum())
    if n_tail == 0:
        return 0.0, 0
    top = float(profile.perimeters.max())
    if top - profile.t_min <= 1e-12:
        return 0.0, n_tail
    rise = float(profile.deltas.max()) - profile.omega_at(profile.t_min)
    return max(rise, 0.0) / (top - profile.t_min), n_tail


def classify(profile: ScaleProfile, thresholds: Thresholds | None = None) -> Verdict:
    """Band the profile by the 1/32 thresholds.

    tree-consistent when the ratio sup is below the tree threshold;
    otherwise hyperbolic-consistent when the tail slope is below the
    hyperbolicity threshold, not-hyperbolic-consistent when it is not, and
    inconclusive when fewer than ``min_tail_samples`` triangles reach t_min.
    """
    th = thresholds or Thresholds()
    ratio = thinness_ratio_sup(profile)
    slope, n_tail = tail_slope(profile)
    if ratio < th.tree:
        band = TREE_CONSISTENT
    elif n_tail < th.min_tail_samples:
        band = INCONCLUSIVE
    elif slope < th.hyperbolic:
        band = HYPERBOLIC_CONSISTENT
    else:
        band = NOT_HYPERBOLIC_CONSISTENT
    tail_t = profile.t >= profile.t_min
    ratio_tail = float((profile.omega_hat[tail_t] / profile.t[tail_t]).max()) if tail_t.any() else 0.0
    return Verdict(ratio, slope, band, th, n_tail, ratio_tail)


def four_point_delta(D: DistanceMatrix, sampler: Sampler) -> float:
    """Max over sampled quadruples of half the gap between the two largest pair sums."""
    n = len(D)
    if n < 4:
        raise TooFewVertices("four-point defect needs at least 4 vertices")
    q = sampler.tuples(n, 4)
    return float(four_point_defects(D, q).max(initial=0.0))


def four_point_defects(D: DistanceMatrix, quads: np.ndarray) -> np.ndarray:
    if len(quads) == 0:
        return np.zeros(0)
    w, x, y, z = quads.T
    s = np.stack([D[w, x] + D[y, z], D[w, y] + D[x, z], D[w, z] + D[x, y]], axis=1)
    s.sort(axis=1)
    return (s[:, 2] - s[:, 1]) / 2


def write_samples_csv(profile: ScaleProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["triangle_id", "a", "b", "c", "perimeter", "delta"])
        for i, ((a, b, c), p, d) in enumerate(zip(profile.triples, profile.perimeters, profile.deltas)):
            w.writerow([i, int(a), int(b), int(c), repr(float(p)), repr(float(d))])


def write_buckets_csv(profile: ScaleProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "omega_hat", "omega_hat_over_t"])
        for t, om in zip(profile.t, profile.omega_hat):
            w.writerow([repr(float(t)), repr(float(om)), repr(float(om / t) if t > 0 else 0.0)])
