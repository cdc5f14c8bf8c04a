"""Metric graphs: construction, subdivision, exact distances and canonical geodesics.

A :class:`MetricGraph` is the finite stand-in for a geodesic space.  Interior
points of geodesics are realized by subdividing edges, so every quantity
computed on vertices carries an additive error of at most the graph's
``resolution``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import (
    BadVertex,
    DisconnectedGraph,
    NonPositiveLength,
    NonPositiveResolution,
    SelfLoop,
)

#: absolute tolerance for comparing path lengths
TOL = 1e-9


@dataclass(frozen=True)
class MetricGraph:
    """Weighted undirected connected graph with canonical edge list.

    Use :func:`build_graph` to construct one; it validates and canonicalizes.
    """

    vertex_count: int
    edges: tuple[tuple[int, int, float], ...]
    labels: tuple[str | None, ...] | None = None
    resolution: float = 0.0
    coords: tuple[tuple[float, float], ...] | None = None

    @cached_property
    def adjacency(self) -> csr_matrix:
        n = self.vertex_count
        if not self.edges:
            return csr_matrix((n, n))
        arr = np.asarray(self.edges, dtype=float)
        u = arr[:, 0].astype(np.int64)
        v = arr[:, 1].astype(np.int64)
        w = arr[:, 2]
        m = csr_matrix(
            (np.concatenate([w, w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
            shape=(n, n),
        )
        m.sort_indices()
        return m

    def neighbors(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbors of ``v`` in increasing index order, with edge lengths."""
        a = self.adjacency
        lo, hi = a.indptr[v], a.indptr[v + 1]
        return a.indices[lo:hi], a.data[lo:hi]

    def edge_length(self, u: int, v: int) -> float:
        nbrs, lens = self.neighbors(u)
        k = np.searchsorted(nbrs, v)
        if k < len(nbrs) and nbrs[k] == v:
            return float(lens[k])
        raise BadVertex(f"no edge between {u} and {v}")

    @property
    def max_edge_length(self) -> float:
        return max((e[2] for e in self.edges), default=0.0)


def build_graph(vertex_count: int, edges: Iterable[Sequence], labels=None,
                resolution: float = 0.0, coords=None) -> MetricGraph:
    """Validate and canonicalize an edge list into a connected MetricGraph.

    Parallel edges are merged, keeping the shortest length.  ``coords`` is an
    optional planar embedding; it only steers geodesic tie-breaking.
    """
    n = int(vertex_count)
    if n < 1:
        raise BadVertex("vertex_count must be at least 1")
    best: dict[tuple[int, int], float] = {}
    for e in edges:
        u, v, length = int(e[0]), int(e[1]), float(e[2])
        if not (0 <= u < n and 0 <= v < n):
            raise BadVertex(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        if not (length > 0 and math.isfinite(length)):
            raise NonPositiveLength(f"edge ({u}, {v}) has length {length}")
        key = (u, v) if u < v else (v, u)
        if key not in best or length < best[key]:
            best[key] = length
    canon = tuple((u, v, best[(u, v)]) for (u, v) in sorted(best))
    if labels is not None:
        labels = tuple(labels)
        if len(labels) != n:
            raise BadVertex("labels must have one entry per vertex")
    if coords is not None:
        coords = tuple((float(x), float(y)) for x, y in coords)
        if len(coords) != n:
            raise BadVertex("coords must have one entry per vertex")
    g = MetricGraph(n, canon, labels, float(resolution), coords)
    if n > 1:
        ncomp, _ = connected_components(g.adjacency, directed=False)
        if ncomp != 1:
            raise DisconnectedGraph(f"graph has {ncomp} connected components")
    return g


def subdivide(g: MetricGraph, h: float) -> MetricGraph:
    """Split each edge of length L into ceil(L/h) equal segments.

    Original vertices keep their indices; new vertices are appended edge by
    edge in canonical edge order.
    """
    if not (h > 0 and math.isfinite(h)):
        raise NonPositiveResolution(f"resolution must be positive, got {h}")
    n = g.vertex_count
    new_edges = []
    seg_max = 0.0
    for u, v, length in g.edges:
        k = max(1, math.ceil(length / h - 1e-9))
        seg = length / k
        seg_max = max(seg_max, seg)
        chain = [u] + list(range(n, n + k - 1)) + [v]
        n += k - 1
        new_edges.extend((a, b, seg) for a, b in zip(chain, chain[1:]))
    labels = None
    if g.labels is not None:
        labels = g.labels + (None,) * (n - g.vertex_count)
    coords = None
    if g.coords is not None:
        coords = list(g.coords)
        for u, v, length in g.edges:
            k = max(1, math.ceil(length / h - 1e-9))
            (x0, y0), (x1, y1) = g.coords[u], g.coords[v]
            coords.extend((x0 + (x1 - x0) * s / k, y0 + (y1 - y0) * s / k) for s in range(1, k))
    return build_graph(n, new_edges, labels=labels, resolution=seg_max, coords=coords)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Exact all-pairs shortest-path distances of ``graph``.

    Indexing (``D[u, v]``, ``D[rows][:, cols]``...) goes straight to the
    underlying read-only array.
    """

    values: np.ndarray
    graph: MetricGraph = field(repr=False)

    def __getitem__(self, key):
        return self.values[key]

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @cached_property
    def coords(self) -> np.ndarray | None:
        return None if self.graph.coords is None else np.asarray(self.graph.coords)

    @cached_property
    def diameter(self) -> float:
        return float(self.values.max())

    @cached_property
    def next_hop(self) -> np.ndarray:
        """``next_hop[w, v]``: smallest neighbor of ``w`` on a shortest path to ``v``.

        Following it from ``u`` yields the lexicographically smallest shortest
        u-v vertex sequence.
        """
        d = self.values
        n = self.n
        nh = np.full((n, n), -1, dtype=np.int32)
        for w in range(n):
            nbrs, lens = self.graph.neighbors(w)
            row = nh[w]
            target = d[w]
            for x, length in zip(nbrs, lens):
                ok = np.abs(length + d[x] - target) <= TOL
                ok &= row < 0
                row[ok] = x
            row[w] = w
        nh.setflags(write=False)
        return nh


def all_pairs_distances(g: MetricGraph) -> DistanceMatrix:
    d = dijkstra(g.adjacency, directed=False)
    if not np.all(np.isfinite(d)):
        raise DisconnectedGraph("graph is not connected")
    # Dijkstra runs per source, so round-off can break exact symmetry.
    d = np.minimum(d, d.T)
    np.fill_diagonal(d, 0.0)
    d.setflags(write=False)
    return DistanceMatrix(d, g)


@dataclass(frozen=True)
class Geodesic:
    vertices: tuple[int, ...]
    length: float

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def reversed(self) -> "Geodesic":
        return Geodesic(self.vertices[::-1], self.length)


def shortest_path(g: MetricGraph, D: DistanceMatrix, u: int, v: int) -> Geodesic:
    """Canonical geodesic from ``u`` to ``v``.

    Without an embedding this is the lexicographically smallest shortest
    vertex sequence, found by always stepping to the smallest admissible
    neighbor.  When ``g.coords`` is set, each step instead goes to the
    admissible neighbor closest to the straight segment from ``u`` to ``v``
    (ties to the smaller index), so lattice geodesics track the chord.
    """
    n = g.vertex_count
    if not (0 <= u < n and 0 <= v < n):
        raise BadVertex(f"vertex out of range: {u}, {v}")
    if g.coords is not None:
        return _chord_path(g, D, u, v)
    nh = D.next_hop
    seq = [u]
    w = u
    while w != v:
        w = int(nh[w, v])
        seq.append(w)
    return Geodesic(tuple(seq), float(D[u, v]))


def _chord_path(g: MetricGraph, D: DistanceMatrix, u: int, v: int) -> Geodesic:
    xy = D.coords
    d = D.values
    ox, oy = xy[u]
    dx, dy = xy[v, 0] - ox, xy[v, 1] - oy
    seq = [u]
    w = u
    while w != v:
        nbrs, lens = g.neighbors(w)
        ok = np.abs(lens + d[nbrs, v] - d[w, v]) <= TOL
        cand = nbrs[ok]
        if len(cand) > 1:
            dev = np.abs((xy[cand, 0] - ox) * dy - (xy[cand, 1] - oy) * dx)
            cand = cand[dev <= dev.min() + TOL]
        w = int(cand[0])
        seq.append(w)
    return Geodesic(tuple(seq), float(d[u, v]))


def pair_geodesic(g: MetricGraph, D: DistanceMatrix, u: int, v: int) -> Geodesic:
    """Geodesic between ``u`` and ``v`` that depends only on the unordered pair.

    It is the canonical geodesic from ``min(u, v)`` to ``max(u, v)``, reversed
    when ``u > v``.  Triangle sides use this so that a triangle is a function
    of its vertex set.
    """
    if u <= v:
        return shortest_path(g, D, u, v)
    return shortest_path(g, D, v, u).reversed()


def path_length(g: MetricGraph, vertices: Sequence[int]) -> float:
    return float(sum(g.edge_length(a, b) for a, b in zip(vertices, vertices[1:])))


def geodesic_choices(g: MetricGraph, D: DistanceMatrix, u: int, v: int, k: int) -> list[Geodesic]:
    """Up to ``k`` distinct shortest u-v paths, the pair-canonical one first.

    The remaining ones are enumerated depth-first in lexicographic order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    first = pair_geodesic(g, D, u, v)
    out = [first]
    if k == 1 or u == v:
        return out
    d = D.values
    seen = {first.vertices}
    stack = [(u,)]
    while stack and len(out) < k:
        seq = stack.pop()
        w = seq[-1]
        if w == v:
            if seq not in seen:
                seen.add(seq)
                out.append(Geodesic(seq, float(d[u, v])))
            continue
        nbrs, lens = g.neighbors(w)
        ok = np.abs(lens + d[nbrs, v] - d[w, v]) <= TOL
        for x in sorted(nbrs[ok].tolist(), reverse=True):
            stack.append(seq + (x,))
    return out
