import heapq
import math

import pytest

from ripsgauge.generators import cycle, grid_plane, hyperbolic_tessellation, path, random_tree
from ripsgauge.space import all_pairs_distances


def heap_dijkstra(n, edges, source, banned=()):
    """Plain textbook Dijkstra, used as an oracle independent of scipy."""
    adj = [[] for _ in range(n)]
    for u, v, w in edges:
        adj[u].append((v, w))
        adj[v].append((u, w))
    dist = [math.inf] * n
    banned = set(banned)
    if source in banned:
        return dist
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adj[u]:
            if v in banned:
                continue
            if d + w < dist[v]:
                dist[v] = d + w
                heapq.heappush(heap, (d + w, v))
    return dist


@pytest.fixture(scope="session")
def grid60():
    g = grid_plane(60)
    return g, all_pairs_distances(g)


@pytest.fixture(scope="session")
def tess7():
    g = hyperbolic_tessellation(7)
    return g, all_pairs_distances(g)


@pytest.fixture(scope="session")
def hex_cycle():
    g = cycle(6)
    return g, all_pairs_distances(g)


@pytest.fixture
def small_tree():
    g = random_tree(80, seed=5)
    return g, all_pairs_distances(g)


@pytest.fixture
def line5():
    g = path(5)
    return g, all_pairs_distances(g)


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
