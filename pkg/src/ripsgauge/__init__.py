"""Empirical thinness of geodesic triangles in metric graphs.

Measures how the Rips thinness of triangles grows with their perimeter,
estimates detour growth, verifies the Euclidean thinness constant, and builds
tower spaces and rescaled four-point curves.
"""
from .errors import ParseError, PreconditionError, RipsGaugeError
from .space import MetricGraph, all_pairs_distances, build_graph, pair_geodesic, subdivide

__version__ = "0.1.0"

__all__ = [
    "MetricGraph",
    "ParseError",
    "PreconditionError",
    "RipsGaugeError",
    "__version__",
    "all_pairs_distances",
    "build_graph",
    "pair_geodesic",
    "subdivide",
]
