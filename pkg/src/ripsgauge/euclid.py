"""Thinness of triangles in the Euclidean plane.

Closed forms for the optimal isoceles triangle and a brute-force oracle that
computes delta for any planar triangle directly from point-to-segment
distances, then searches the whole shape space for the largest delta/perimeter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SIDE_SAMPLES = 512


@dataclass(frozen=True)
class Eta0:
    value: float
    alpha0: float


def eta0() -> Eta0:
    """((sqrt5 - 1)/2)^(5/2) / 2 and the base angle with cosine (sqrt5 - 1)/2."""
    value = (math.sqrt(5.0) - 1.0) ** 2.5 / 2.0 ** 3.5
    return Eta0(value, math.acos(GOLDEN))


def _check_angle(alpha: float) -> None:
    if not (0.0 < alpha < math.pi / 2):
        raise DomainError(f"base angle must lie in (0, pi/2), got {alpha}")


def isoceles_ratio(alpha: float) -> float:
    """Distance from the base midpoint to the legs, over the perimeter, for an
    isoceles triangle with base angles ``alpha``."""
    _check_angle(alpha)
    return math.sin(alpha) * math.cos(alpha) / (2.0 * (1.0 + math.cos(alpha)))


def isoceles_midpoint_delta(alpha: float, base: float) -> float:
    _check_angle(alpha)
    if not base > 0:
        raise DomainError(f"base must be positive, got {base}")
    return base * math.sin(alpha) / 2.0


def isoceles_triangle(alpha: float, base: float = 1.0) -> np.ndarray:
    """Vertices B1, B2 (the base, on the x axis) and apex B3."""
    h = base * math.tan(alpha) / 2.0
    return np.array([[0.0, 0.0], [base, 0.0], [base / 2.0, h]])


def point_segment_distance(p, a, b) -> float:
    px, py = p
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    den = dx * dx + dy * dy
    if den == 0.0:
        return math.hypot(px - ax, py - ay)
    s = ((px - ax) * dx + (py - ay) * dy) / den
    s = min(1.0, max(0.0, s))
    return math.hypot(px - ax - s * dx, py - ay - s * dy)


def _segment_distances(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    den = d @ d
    if den == 0.0:
        return np.hypot(*(pts - a).T)
    s = np.clip((pts - a) @ d / den, 0.0, 1.0)
    return np.hypot(*(pts - a - s[:, None] * d).T)


def _side_max(p0, p1, q0, q1, r0, r1, tol: float) -> float:
    """max over points on [p0, p1] of the distance to [q0, q1] U [r0, r1]."""
    length = float(np.hypot(*(p1 - p0)))
    if length == 0.0:
        return 0.0
    s = np.linspace(0.0, 1.0, SIDE_SAMPLES)
    pts = p0 + s[:, None] * (p1 - p0)
    vals = np.minimum(_segment_distances(pts, q0, q1), _segment_distances(pts, r0, r1))
    k = int(np.argmax(vals))
    best = float(vals[k])

    def f(t):
        pt = (p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1]))
        return min(point_segment_distance(pt, q0, q1), point_segment_distance(pt, r0, r1))

    lo, hi = s[max(k - 1, 0)], s[min(k + 1, SIDE_SAMPLES - 1)]
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while (hi - lo) * length > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
    return max(best, f1, f2, f(0.5 * (lo + hi)))


def euclid_triangle_delta(tri, tol: float = 1e-9) -> float:
    """Rips delta of the planar triangle with vertices ``tri`` (3 x 2).

    Each side is scanned at 512 points, then the best bracket is refined by
    golden-section search to absolute tolerance ``tol``.
    """
    pts = np.asarray(tri, dtype=float).reshape(3, 2)
    best = 0.0
    for i in range(3):
        a, b, c = pts[i], pts[(i + 1) % 3], pts[(i + 2) % 3]
        best = max(best, _side_max(a, b, b, c, c, a, tol))
    return best


def perimeter(tri) -> float:
    pts = np.asarray(tri, dtype=float).reshape(3, 2)
    return float(sum(np.hypot(*(pts[i] - pts[(i + 1) % 3])) for i in range(3)))


def shape_triangle(alpha: float, beta: float) -> np.ndarray:
    """Triangle with base angles ``alpha`` at (0,0) and ``beta`` at the other
    base vertex, scaled to perimeter 1."""
    gamma = math.pi - alpha - beta
    side = math.sin(beta) / math.sin(gamma)  # |A1 A3| for unit base
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [side * math.cos(alpha), side * math.sin(alpha)]])
    return tri / perimeter(tri)


def shape_ratio(alpha: float, beta: float, tol: float = 1e-9) -> float:
    """delta / perimeter of the shape (alpha, beta); 0 outside the shape space."""
    if alpha <= 0 or beta <= 0 or alpha + beta >= math.pi:
        return 0.0
    return euclid_triangle_delta(shape_triangle(alpha, beta), tol)


def triangle_angles(tri) -> np.ndarray:
    pts = np.asarray(tri, dtype=float).reshape(3, 2)
    out = []
    for i in range(3):
        u = pts[(i + 1) % 3] - pts[i]
        v = pts[(i + 2) % 3] - pts[i]
        cosv = u @ v / (np.linalg.norm(u) * np.linalg.norm(v))
        out.append(math.acos(max(-1.0, min(1.0, cosv))))
    return np.array(out)


@dataclass(frozen=True)
class SupResult:
    sup: float
    alpha: float
    beta: float
    angles: tuple[float, float, float]
    base_angle: float
    grid_resolution: int
    tol: float

    @property
    def base_angle_cos(self) -> float:
        return math.cos(self.base_angle)


def euclid_sup_search(resolution: int = 120, tol: float = 1e-9, refine: bool = True,
                      region=None) -> SupResult:
    """Brute-force sup of delta/perimeter over all planar triangles.

    Shapes are indexed by base angles alpha <= beta with alpha + beta < pi on a
    ``resolution`` x ``resolution`` grid over (0, pi)^2; the best few cells are
    then polished with Nelder-Mead.  ``region(alpha, beta) -> bool`` restricts
    the grid (no refinement is done for restricted searches).
    """
    if resolution < 100 and region is None:
        raise DomainError("shape grid needs at least 100 points per angle")
    grid = (np.arange(resolution) + 0.5) * math.pi / resolution
    cells = []
    for i, a in enumerate(grid):
        for b in grid[i:]:
            if a + b >= math.pi:
                break
            if region is not None and not region(a, b):
                continue
            cells.append((shape_ratio(a, b, tol), a, b))
    if not cells:
        raise DomainError("empty shape region")
    cells.sort(key=lambda c: -c[0])
    best = cells[0]
    if refine and region is None:
        step = math.pi / resolution
        for val, a, b in cells[:4]:
            res = minimize(
                lambda x: -shape_ratio(x[0], x[1], tol),
                x0=[a, b],
                method="Nelder-Mead",
                options={"xatol": 1e-7, "fatol": 1e-12, "initial_simplex": [[a, b], [a + step, b], [a, b + step]]},
            )
            if -res.fun > best[0]:
                best = (-res.fun, float(res.x[0]), float(res.x[1]))
    sup, a, b = best
    angles = triangle_angles(shape_triangle(a, b))
    srt = np.sort(angles)
    # the repeated angle of the (near-)isoceles maximizer
    if srt[1] - srt[0] <= srt[2] - srt[1]:
        base = (srt[0] + srt[1]) / 2
    else:
        base = (srt[1] + srt[2]) / 2
    return SupResult(float(sup), a, b, tuple(float(x) for x in angles), float(base), resolution, tol)
