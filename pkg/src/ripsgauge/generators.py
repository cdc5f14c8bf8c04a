"""Test spaces: Euclidean-plane lattices, hyperbolic tessellations, trees, cycles."""
from __future__ import annotations

import math

import numpy as np

from .errors import BadParams, UnknownGenerator
from .space import MetricGraph, build_graph


def grid_plane(n: int, octile: bool = True) -> MetricGraph:
    """n x n lattice with unit axis edges and, if ``octile``, sqrt(2) diagonals.

    Vertex ``(i, j)`` has index ``i * n + j`` and planar coordinates ``(i, j)``,
    so canonical geodesics follow the straight chord.
    """
    if n < 1:
        raise BadParams("grid_plane needs n >= 1")
    edges = []
    diag = math.sqrt(2.0)
    for i in range(n):
        for j in range(n):
            v = i * n + j
            if j + 1 < n:
                edges.append((v, v + 1, 1.0))
            if i + 1 < n:
                edges.append((v, v + n, 1.0))
            if octile and i + 1 < n:
                if j + 1 < n:
                    edges.append((v, v + n + 1, diag))
                if j > 0:
                    edges.append((v, v + n - 1, diag))
    coords = [(float(i), float(j)) for i in range(n) for j in range(n)]
    return build_graph(n * n, edges, coords=coords)


def hyperbolic_tessellation(layers: int, order: int = 7) -> MetricGraph:
    """Ball of radius ``layers`` in the 1-skeleton of the triangular tessellation
    where ``order`` triangles meet at each vertex (unit edges).

    Built layer by layer: every vertex of the outer cycle is completed to
    degree ``order``, consecutive cycle vertices sharing one new neighbor.
    ``order=6`` gives the flat triangular lattice; ``order >= 7`` is hyperbolic.
    """
    if layers < 0:
        raise BadParams("layers must be >= 0")
    if order < 6:
        raise BadParams("order must be >= 6")
    edges = []
    if layers == 0:
        return build_graph(1, edges)
    deg = [order]
    ring = list(range(1, order + 1))
    deg.extend([3] * order)
    for k, v in enumerate(ring):
        edges.append((0, v, 1.0))
        edges.append((v, ring[(k + 1) % order], 1.0))
    count = order + 1
    for _ in range(layers - 1):
        m = len(ring)
        new_ring = []
        children = [[] for _ in range(m)]
        for i, v in enumerate(ring):
            need = order - deg[v]
            for _ in range(need - 2):
                new_ring.append(count)
                children[i].append(count)
                count += 1
            shared = count
            count += 1
            new_ring.append(shared)
            children[i].append(shared)
            children[(i + 1) % m].insert(0, shared)
        deg.extend([0] * (count - len(deg)))
        for i, v in enumerate(ring):
            for c in children[i]:
                edges.append((v, c, 1.0))
                deg[v] += 1
                deg[c] += 1
        r = len(new_ring)
        for i, c in enumerate(new_ring):
            edges.append((c, new_ring[(i + 1) % r], 1.0))
            deg[c] += 1
            deg[new_ring[(i + 1) % r]] += 1
        ring = new_ring
    return build_graph(count, edges)


def random_tree(n: int, seed: int = 0, lengths: str = "unit") -> MetricGraph:
    """Uniform random recursive tree: vertex k attaches to a uniform parent < k.

    ``lengths`` is ``"unit"`` or ``"uniform"`` (edge lengths drawn from [0.5, 1.5)).
    """
    if n < 1:
        raise BadParams("random_tree needs n >= 1")
    if lengths not in ("unit", "uniform"):
        raise BadParams(f"unknown lengths mode {lengths!r}")
    rng = np.random.default_rng(seed)
    edges = []
    for k in range(1, n):
        parent = int(rng.integers(0, k))
        length = 1.0 if lengths == "unit" else float(rng.uniform(0.5, 1.5))
        edges.append((parent, k, length))
    return build_graph(n, edges)


def cycle(n: int, length: float = 1.0) -> MetricGraph:
    if n < 3:
        raise BadParams("cycle needs n >= 3")
    return build_graph(n, [(i, (i + 1) % n, length) for i in range(n)])


def path(n: int, length: float = 1.0) -> MetricGraph:
    if n < 1:
        raise BadParams("path needs n >= 1")
    return build_graph(n, [(i, i + 1, length) for i in range(n - 1)])


GENERATORS = {
    "grid_plane": grid_plane,
    "hyperbolic_tessellation": hyperbolic_tessellation,
    "random_tree": random_tree,
    "cycle": cycle,
    "path": path,
}


def gen_space(kind: str, params: dict | None = None, seed: int = 0) -> MetricGraph:
    """Dispatch to a named generator.  ``seed`` is used only by random_tree."""
    if kind not in GENERATORS:
        raise UnknownGenerator(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}")
    params = dict(params or {})
    if kind == "random_tree":
        params.setdefault("seed", seed)
    try:
        return GENERATORS[kind](**params)
    except TypeError as exc:
        raise BadParams(f"bad parameters for {kind}: {exc}") from None


def parse_gen_spec(spec: str) -> tuple[str, dict]:
    """Parse ``kind:key=value,key=value`` (values coerced to int, float or bool)."""
    kind, _, rest = spec.partition(":")
    params: dict = {}
    for item in filter(None, rest.split(",")):
        key, sep, val = item.partition("=")
        if not sep:
            raise BadParams(f"expected key=value in generator spec, got {item!r}")
        params[key.strip()] = _coerce(val.strip())
    return kind.strip(), params


def _coerce(val: str):
    low = val.lower()
    if low in ("true", "yes"):
        return True
    if low in ("false", "no"):
        return False
    for cast in (int, float):
        try:
            return cast(val)
        except ValueError:
            pass
    return val
