"""Tower spaces, a finite rescaled four-point proxy for asymptotic cones, and
the tree-path property.

The tower over a pointed graph (X, p) stacks copies X x {i}, i = 1..N, with
the i-th copy scaled by i, and joins the copies of p along a subdivided
vertical spine of unit height per level.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    BadBasepoint,
    BadParams,
    EmptyProfile,
    NotATree,
    ScaleExceedsDiameter,
    ZeroLevels,
)
from .graphfile import graph_hash, save_graph
from .rips import Sampler, four_point_defects, make_triangle, rips_delta, sides_delta
from .space import TOL, DistanceMatrix, MetricGraph, all_pairs_distances, build_graph, pair_geodesic


@dataclass(frozen=True, eq=False)
class TowerSpace:
    base: MetricGraph
    base_distances: DistanceMatrix
    p: int
    levels: int
    spine_step: float
    graph: MetricGraph

    @property
    def steps_per_level(self) -> int:
        return round(1.0 / self.spine_step)

    def vertex(self, x: int, level: int) -> int:
        """Index of (x, level) in the tower graph."""
        return (level - 1) * self.base.vertex_count + x

    @cached_property
    def spine(self) -> tuple[int, ...]:
        """Spine vertices ordered by height, from (p, 1) up to (p, levels)."""
        n, k = self.base.vertex_count, self.steps_per_level
        first = n * self.levels
        chain = []
        for i in range(1, self.levels):
            chain.append(self.vertex(self.p, i))
            start = first + (i - 1) * (k - 1)
            chain.extend(range(start, start + k - 1))
        chain.append(self.vertex(self.p, self.levels))
        return tuple(chain)

    @cached_property
    def _height(self) -> dict[int, float]:
        return {v: 1.0 + s * self.spine_step for s, v in enumerate(self.spine)}

    def locate(self, v: int) -> tuple[int, float]:
        """(base vertex, height) of a tower vertex; spine points report ``p``.

        Level vertices have integer heights.
        """
        if v in self._height:
            return self.p, self._height[v]
        n = self.base.vertex_count
        if not 0 <= v < n * self.levels:
            raise BadParams(f"vertex {v} is not in the tower")
        return v % n, float(v // n + 1)

    def formula_distance(self, u: int, v: int) -> float:
        """The tower metric computed from the base metric, without the graph."""
        x, h = self.locate(u)
        y, k = self.locate(v)
        D = self.base_distances
        if h == k:
            return h * D[x, y]
        return h * D[x, self.p] + k * D[y, self.p] + abs(h - k)

    def _spine_between(self, h: float, k: float) -> list[int]:
        i = round((h - 1.0) / self.spine_step)
        j = round((k - 1.0) / self.spine_step)
        if j >= i:
            return list(self.spine[i:j + 1])
        return list(self.spine[j:i + 1][::-1])

    def geodesic(self, u: int, v: int) -> list[int]:
        """Canonical geodesic assembled from base geodesics and the spine.

        Same-level sides are scaled copies of the base's canonical geodesics;
        other sides pass through the copies of p.  The result for (v, u) is
        the reverse of the result for (u, v).
        """
        if u == v:
            return [u]
        if u > v:
            return self.geodesic(v, u)[::-1]
        x, h = self.locate(u)
        y, k = self.locate(v)
        g, D = self.base, self.base_distances
        if h == k:
            off = (int(h) - 1) * g.vertex_count
            return [off + w for w in pair_geodesic(g, D, x, y).vertices]
        if u in self._height:
            out = [u]
        else:
            off = (int(h) - 1) * g.vertex_count
            out = [off + w for w in pair_geodesic(g, D, x, self.p).vertices]
        out.extend(self._spine_between(h, k)[1:])
        if v not in self._height:
            off = (int(k) - 1) * g.vertex_count
            out.extend(off + w for w in pair_geodesic(g, D, self.p, y).vertices[1:])
        return out


def build_tower(g: MetricGraph, p: int, levels: int, spine_step: float = 0.25,
                D: DistanceMatrix | None = None) -> TowerSpace:
    """Realize the tower over (g, p) as a metric graph."""
    if not (isinstance(p, (int, np.integer)) and 0 <= p < g.vertex_count):
        raise BadBasepoint(f"basepoint {p} is not a vertex of the base graph")
    if levels < 1:
        raise ZeroLevels("the tower needs at least one level")
    k = round(1.0 / spine_step) if spine_step > 0 else 0
    if k < 1 or abs(k * spine_step - 1.0) > TOL:
        raise BadParams(f"spine_step must divide 1, got {spine_step}")
    n = g.vertex_count
    edges = []
    for i in range(1, levels + 1):
        off = (i - 1) * n
        edges.extend((u + off, v + off, i * length) for u, v, length in g.edges)
    nxt = n * levels
    for i in range(1, levels):
        chain = [(i - 1) * n + p] + list(range(nxt, nxt + k - 1)) + [i * n + p]
        nxt += k - 1
        edges.extend((a, b, spine_step) for a, b in zip(chain, chain[1:]))
    graph = build_graph(nxt, edges, resolution=max(levels * _resolution(g), spine_step))
    if D is None:
        D = all_pairs_distances(g)
    return TowerSpace(g, D, int(p), int(levels), float(spine_step), graph)


def _resolution(g: MetricGraph) -> float:
    return g.resolution if g.resolution > 0 else g.max_edge_length


def save_tower(tower: TowerSpace, path) -> Path:
    """Write the tower graph and its JSON sidecar; returns the sidecar path."""
    path = Path(path)
    save_graph(tower.graph, path)
    sidecar = path.with_suffix(path.suffix + ".json")
    meta = {
        "base_hash": graph_hash(tower.base),
        "p": tower.p,
        "levels": tower.levels,
        "spine_step": tower.spine_step,
    }
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return sidecar


@dataclass(frozen=True)
class RatioCheck:
    sup_y: float
    sup_x: float
    y_samples: int
    x_samples: int
    tolerance: float = 0.01

    @property
    def passed(self) -> bool:
        return self.sup_y <= self.sup_x + self.tolerance

    def to_dict(self) -> dict:
        return {
            "sup_y": self.sup_y,
            "sup_x": self.sup_x,
            "y_samples": self.y_samples,
            "x_samples": self.x_samples,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def tower_ratio_check(tower: TowerSpace, sampler: Sampler, tolerance: float = 0.01,
                      DY: DistanceMatrix | None = None) -> RatioCheck:
    """Empirical sup of delta/perimeter over triangles in the tower and in its base.

    The tower is sampled twice: arbitrary vertex triples (mostly cross-level)
    and triples inside one randomly chosen level.  The base sample consists of
    the sampler's own triples plus the base triangle that each tower triangle
    reduces to (vertices off the majority level are moved to p).
    """
    g, D, p = tower.base, tower.base_distances, tower.p
    if DY is None:
        DY = all_pairs_distances(tower.graph)
    ny, n = tower.graph.vertex_count, g.vertex_count
    triples = [tuple(int(v) for v in t) for t in sampler.tuples(ny, 3)]
    rng = np.random.default_rng(sampler.seed + 1)
    for a, b, c in sampler.tuples(n, 3):
        i = int(rng.integers(1, tower.levels + 1))
        triples.append((tower.vertex(int(a), i), tower.vertex(int(b), i), tower.vertex(int(c), i)))
    if not triples:
        raise EmptyProfile("no tower triangles sampled")

    sup_y = 0.0
    projected: set[tuple[int, int, int]] = set()
    for a, b, c in triples:
        sides = [tower.geodesic(a, b), tower.geodesic(b, c), tower.geodesic(c, a)]
        per = DY[a, b] + DY[b, c] + DY[c, a]
        if per > 0:
            sup_y = max(sup_y, float(sides_delta(DY, sides) / per))
        proj = _project(tower, (a, b, c))
        if proj is not None:
            projected.add(proj)

    base_triples = {tuple(sorted(int(v) for v in t)) for t in sampler.tuples(n, 3)} | projected
    sup_x = 0.0
    for a, b, c in sorted(base_triples):
        tri = make_triangle(g, D, a, b, c)
        if tri.perimeter > 0:
            sup_x = max(sup_x, rips_delta(g, D, tri) / tri.perimeter)
    return RatioCheck(sup_y, sup_x, len(triples), len(base_triples), tolerance)


def _project(tower: TowerSpace, tri) -> tuple[int, int, int] | None:
    located = [tower.locate(v) for v in tri]
    heights = [h for _, h in located]
    for h in heights:
        if heights.count(h) >= 2:
            pts = sorted(x if hh == h else tower.p for x, hh in located)
            return tuple(pts) if len(set(pts)) == 3 else None
    return None


@dataclass(frozen=True)
class ConeDefectCurve:
    scales: tuple[float, ...]
    defects: tuple[float, ...]
    raw: tuple[float, ...]
    counts: tuple[int, ...]
    band: float
    sampler: dict

    def to_dict(self) -> dict:
        return {
            "kind": "proxy",
            "scales": list(self.scales),
            "defects": list(self.defects),
            "raw_four_point": list(self.raw),
            "quadruples": list(self.counts),
            "band": self.band,
            "sampler": self.sampler,
        }


def _separated_quadruples(D: DistanceMatrix, lo: float, hi: float, count: int, rng,
                          tries: int) -> np.ndarray:
    n = len(D)
    vals = D.values
    out = []
    for _ in range(tries):
        if len(out) >= count:
            break
        w = int(rng.integers(n))
        ok = (vals[w] >= lo - TOL) & (vals[w] <= hi + TOL)
        quad = [w]
        for _ in range(3):
            cand = np.flatnonzero(ok)
            if not len(cand):
                break
            v = int(cand[rng.integers(len(cand))])
            quad.append(v)
            ok &= (vals[v] >= lo - TOL) & (vals[v] <= hi + TOL)
        if len(quad) == 4:
            out.append(quad)
    return np.array(out, dtype=np.int64).reshape(-1, 4)


def rescaled_four_point(g: MetricGraph, D: DistanceMatrix, scales, sampler: Sampler,
                        band: float = 2.0) -> ConeDefectCurve:
    """Four-point defect of the metric D / d at each scale d.

    At scale d only quadruples whose six pairwise distances lie in
    [d, band * d] are used, so every scale looks at configurations of one
    size.  This is a finite proxy for tree-ness of asymptotic cones.
    """
    scales = [float(s) for s in scales]
    if not scales or any(s <= 0 for s in scales) or any(b <= a for a, b in zip(scales, scales[1:])):
        raise BadParams("scales must be positive and strictly increasing")
    if scales[-1] > D.diameter + TOL:
        raise ScaleExceedsDiameter(f"scale {scales[-1]} exceeds the diameter {D.diameter}")
    budget = sampler.samples or 2000
    rng = np.random.default_rng(sampler.seed)
    defects, raw, counts = [], [], []
    for d in scales:
        quads = _separated_quadruples(D, d, band * d, budget, rng, tries=20 * budget)
        if not len(quads):
            raise ScaleExceedsDiameter(f"no quadruple with pairwise distances in [{d}, {band * d}]")
        m = float(four_point_defects(D, quads).max())
        raw.append(m)
        defects.append(m / d)
        counts.append(len(quads))
    return ConeDefectCurve(tuple(scales), tuple(defects), tuple(raw), tuple(counts), band,
                           sampler.as_dict())


def write_defect_csv(curve: ConeDefectCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "defect"])
        for s, d in zip(curve.scales, curve.defects):
            w.writerow([repr(s), repr(d)])


def _cycle_witness(g: MetricGraph, D: DistanceMatrix) -> dict | None:
    """A walk x -> y that misses a vertex of the canonical geodesic [x, y]."""
    n = g.vertex_count
    parent = [-1] * n
    depth = [0] * n
    seen = [False] * n
    seen[0] = True
    order = [0]
    tree_edges = set()
    for u in order:
        for v in g.neighbors(u)[0]:
            v = int(v)
            if not seen[v]:
                seen[v] = True
                parent[v], depth[v] = u, depth[u] + 1
                tree_edges.add((min(u, v), max(u, v)))
                order.append(v)
    extra = next((u, v) for u, v, _ in g.edges if (u, v) not in tree_edges)
    a, b = extra
    left, right = [a], [b]
    while left[-1] != right[-1]:
        if depth[left[-1]] >= depth[right[-1]]:
            left.append(parent[left[-1]])
        else:
            right.append(parent[right[-1]])
    ring = left + right[-2::-1]
    m = len(ring)
    for i in range(m):
        for j in range(i + 1, m):
            x, y = ring[i], ring[j]
            geo = pair_geodesic(g, D, x, y).vertices
            for walk in (ring[i:j + 1], ring[i::-1] + ring[:j - 1:-1]):
                missing = [v for v in geo if v not in walk]
                if missing:
                    return {"x": x, "y": y, "walk": [int(w) for w in walk], "missing": int(missing[0])}
    return None


def tree_path_property(g: MetricGraph, D: DistanceMatrix, trials: int = 200, seed: int = 0,
                       max_steps: int = 1_000_000) -> bool:
    """Check that random walks from x to y cover the geodesic [x, y].

    Each walk is non-backtracking for a random number of steps, then a simple
    random walk until it hits y.  Raises :class:`NotATree` for graphs with a
    cycle, attaching a walk that skips part of a geodesic when one exists.
    """
    n = g.vertex_count
    if len(g.edges) != n - 1:
        raise NotATree("graph contains a cycle", witness=_cycle_witness(g, D))
    if n < 2:
        return True
    rng = np.random.default_rng(seed)
    nbrs = [g.neighbors(v)[0].tolist() for v in range(n)]
    ok = True
    for _ in range(trials):
        x, y = (int(v) for v in rng.choice(n, size=2, replace=False))
        walk = [x]
        prev = -1
        for _ in range(int(rng.integers(0, n + 1))):
            cur = walk[-1]
            if cur == y:
                break
            options = [w for w in nbrs[cur] if w != prev]
            if not options:
                break
            prev = cur
            walk.append(options[int(rng.integers(len(options)))])
        steps = 0
        while walk[-1] != y:
            steps += 1
            if steps > max_steps:
                raise BadParams("random walk did not reach its target")
            opts = nbrs[walk[-1]]
            walk.append(opts[int(rng.integers(len(opts)))])
        visited = set(walk)
        ok &= all(v in visited for v in pair_geodesic(g, D, x, y).vertices)
    return bool(ok)
