"""Text edge-list format.

::

    metricgraph v1 <vertex_count>
    # anything after '#' is a comment
    u v length

Three comment forms are read back so that saving is lossless:
``# resolution <h>``, ``# label <v> <text>`` and ``# coord <v> <x> <y>``.
"""
from __future__ import annotations

import hashlib
from pathlib import Path

from .errors import ParseError
from .space import MetricGraph, build_graph

HEADER = "metricgraph v1"


def dumps_graph(g: MetricGraph) -> str:
    lines = [f"{HEADER} {g.vertex_count}"]
    if g.resolution:
        lines.append(f"# resolution {g.resolution!r}")
    if g.labels is not None:
        lines.extend(f"# label {i} {s}" for i, s in enumerate(g.labels) if s is not None)
    if g.coords is not None:
        lines.extend(f"# coord {i} {x!r} {y!r}" for i, (x, y) in enumerate(g.coords))
    lines.extend(f"{u} {v} {length!r}" for u, v, length in g.edges)
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> MetricGraph:
    n = None
    edges = []
    resolution = 0.0
    labels: dict[int, str] = {}
    coords: dict[int, tuple[float, float]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            body = line[1:].split(None, 2)
            if body[:1] == ["resolution"] and len(body) == 2:
                resolution = _number(body[1], lineno)
            elif body[:1] == ["label"] and len(body) == 3:
                labels[_int(body[1], lineno)] = body[2]
            elif body[:1] == ["coord"] and len(body) == 3:
                xy = body[2].split()
                if len(xy) != 2:
                    raise ParseError("coord comment needs 'v x y'", lineno)
                coords[_int(body[1], lineno)] = (_number(xy[0], lineno), _number(xy[1], lineno))
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 3 or " ".join(parts[:2]) != HEADER:
                raise ParseError(f"expected header '{HEADER} <vertex_count>'", lineno)
            n = _int(parts[2], lineno)
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'u v length', got {line!r}", lineno)
        u, v = _int(parts[0], lineno), _int(parts[1], lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"vertex index out of range 0..{n - 1}", lineno)
        edges.append((u, v, _number(parts[2], lineno)))
    if n is None:
        raise ParseError("missing header", 1)
    label_tuple = None
    if labels:
        label_tuple = tuple(labels.get(i) for i in range(n))
    coord_tuple = None
    if coords:
        if len(coords) != n:
            raise ParseError(f"coords given for {len(coords)} of {n} vertices")
        coord_tuple = tuple(coords[i] for i in range(n))
    return build_graph(n, edges, labels=label_tuple, resolution=resolution, coords=coord_tuple)


def save_graph(g: MetricGraph, path) -> None:
    Path(path).write_text(dumps_graph(g))


def load_graph(path) -> MetricGraph:
    return loads_graph(Path(path).read_text())


def graph_hash(g: MetricGraph) -> str:
    return hashlib.sha256(dumps_graph(g).encode()).hexdigest()


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"not an integer: {tok!r}", lineno) from None


def _number(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", lineno) from None
