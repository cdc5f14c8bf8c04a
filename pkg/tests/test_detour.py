import math

import numpy as np
import pytest

from conftest import heap_dijkstra
from ripsgauge.detour import (
    DetourEntry,
    DetourProfile,
    detour_length,
    detour_profile,
    detour_verdict,
    evaluate_pool,
    middle_vertex,
    write_detour_csv,
)
from ripsgauge.errors import EmptyProfile, EndpointInsideBall, NoAdmissibleTriple, ZNotOnGeodesic
from ripsgauge.generators import cycle, grid_plane, hyperbolic_tessellation, path, random_tree
from ripsgauge.rips import HYPERBOLIC_CONSISTENT, INCONCLUSIVE, NOT_HYPERBOLIC_CONSISTENT, Sampler
from ripsgauge.space import all_pairs_distances, pair_geodesic, subdivide


def oracle_detour(g, z, x, y, t):
    dz = heap_dijkstra(g.vertex_count, g.edges, z)
    banned = [v for v in range(g.vertex_count) if dz[v] < t - 1e-9]
    return heap_dijkstra(g.vertex_count, g.edges, x, banned)[y]


def test_grid_half_circle(grid60):
    g, D = grid60
    # x and y on the boundary of the radius-10 ball around z
    x, y, z = 30 * 60 + 20, 30 * 60 + 40, 30 * 60 + 30
    length = detour_length(g, D, x, y, z, 10.0)
    assert length == pytest.approx(oracle_detour(g, z, x, y, 10.0))
    assert 28.0 <= length <= 35.0
    # frozen oracle value: two axis runs of 10 plus ten diagonal steps
    assert length == pytest.approx(20 + 10 * math.sqrt(2))


def test_grid_random_triples_match_oracle():
    g = grid_plane(20)
    D = all_pairs_distances(g)
    rng = np.random.default_rng(4)
    checked = 0
    while checked < 15:
        x, y = (int(v) for v in rng.choice(g.vertex_count, 2, replace=False))
        if D[x, y] < 8:
            continue
        z = middle_vertex(g, D, x, y)
        t = float(rng.uniform(1, min(D[z, x], D[z, y])))
        assert detour_length(g, D, x, y, z, t) == pytest.approx(oracle_detour(g, z, x, y, t))
        checked += 1


def test_tree_detours_are_infinite(small_tree):
    g, D = small_tree
    rng = np.random.default_rng(0)
    for _ in range(30):
        x, y = (int(v) for v in rng.choice(g.vertex_count, 2, replace=False))
        if D[x, y] < 2:
            continue
        z = middle_vertex(g, D, x, y)
        t = min(D[z, x], D[z, y])
        assert detour_length(g, D, x, y, z, t) == math.inf


def test_cycle_detour_goes_around():
    g = cycle(12)
    D = all_pairs_distances(g)
    assert detour_length(g, D, 0, 4, 2, 2.0) == 8.0
    assert detour_length(g, D, 0, 4, 2, 1.0) == 8.0


def test_preconditions(line5):
    g, D = line5
    with pytest.raises(EndpointInsideBall):
        detour_length(g, D, 0, 4, 2, 3.0)
    with pytest.raises(EndpointInsideBall):
        detour_length(g, D, 0, 4, 2, 0.0)
    c = cycle(8)
    Dc = all_pairs_distances(c)
    with pytest.raises(ZNotOnGeodesic):
        detour_length(c, Dc, 0, 2, 5, 1.0)


def test_detour_non_decreasing_in_t():
    g = grid_plane(25)
    D = all_pairs_distances(g)
    x, y = 12 * 25, 12 * 25 + 24
    z = middle_vertex(g, D, x, y)
    lengths = [detour_length(g, D, x, y, z, t) for t in np.linspace(0.5, 12, 24)]
    assert all(b >= a - 1e-9 for a, b in zip(lengths, lengths[1:]))
    for t, length in zip(np.linspace(0.5, 12, 24), lengths):
        assert length >= 2 * t


def test_middle_vertex_on_geodesic(grid60):
    g, D = grid60
    z = middle_vertex(g, D, 0, 59)
    assert z in pair_geodesic(g, D, 0, 59).vertices
    assert D[0, z] == pytest.approx(29.0) or D[0, z] == pytest.approx(30.0)


def test_tree_profile_all_infinite():
    g = random_tree(150, seed=2)
    D = all_pairs_distances(g)
    prof = detour_profile(g, D, [1, 2, 3], Sampler("random", 30, seed=1))
    assert all(e.g_hat == math.inf for e in prof.entries)
    assert detour_verdict(prof) == HYPERBOLIC_CONSISTENT


def test_profile_invariants(tess7):
    g, D = tess7
    prof = detour_profile(g, D, [2, 3, 4, 5], Sampler("random", 40, seed=3))
    finite = [e for e in prof.entries if math.isfinite(e.g_hat)]
    assert finite
    for e in finite:
        assert e.g_hat >= 2 * e.t
        x, y, z = e.witness
        assert detour_length(g, D, x, y, z, e.t) == e.g_hat
    ratios = [e.ratio for e in prof.entries]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))


def test_more_witnesses_never_increase(tess7):
    g, D = tess7
    rng = np.random.default_rng(0)
    pool = []
    for _ in range(60):
        x = int(rng.integers(g.vertex_count))
        far = np.flatnonzero(D[x] >= 10)
        if len(far):
            y = int(far[rng.integers(len(far))])
            pool.append((x, y, middle_vertex(g, D, x, y)))
    small = evaluate_pool(g, D, [2, 3, 4], pool[:20])
    large = evaluate_pool(g, D, [2, 3, 4], pool)
    for a, b in zip(small, large):
        assert b.g_hat <= a.g_hat


def test_no_admissible_triple(line5):
    g, D = line5
    with pytest.raises(NoAdmissibleTriple):
        detour_profile(g, D, [3.0], Sampler("random", 5))
    with pytest.raises(NoAdmissibleTriple):
        detour_profile(g, D, [1.0, 0.5], Sampler("random", 5))


def _prof(ratios):
    return DetourProfile([DetourEntry(float(k + 1), r * (k + 1), (0, 1, 2), 1) for k, r in enumerate(ratios)])


def test_verdict_bands():
    assert detour_verdict(_prof([3.1, 3.2, 3.14])) == NOT_HYPERBOLIC_CONSISTENT
    assert detour_verdict(_prof([20, 31, 40])) == HYPERBOLIC_CONSISTENT
    assert detour_verdict(_prof([50, 29, 40])) == NOT_HYPERBOLIC_CONSISTENT
    assert detour_verdict(_prof([math.inf, math.inf])) == HYPERBOLIC_CONSISTENT
    assert detour_verdict(_prof([3.0])) == INCONCLUSIVE
    assert detour_verdict(_prof([20, 31, 40]), threshold=35) == NOT_HYPERBOLIC_CONSISTENT
    with pytest.raises(EmptyProfile):
        detour_verdict(_prof([]))


def test_csv_and_round_trip(tmp_path):
    prof = _prof([3.0, math.inf])
    write_detour_csv(prof, tmp_path / "d.csv")
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert lines[0] == "t,g_hat,ratio,witness_x,witness_y,witness_z"
    assert lines[2].split(",")[1:3] == ["inf", "inf"]
    again = DetourProfile.from_dict(prof.to_dict())
    assert detour_verdict(again) == detour_verdict(prof)
    assert again.entries == prof.entries


def test_subdivided_cycle_detour():
    g = subdivide(cycle(8), 0.5)
    D = all_pairs_distances(g)
    z = middle_vertex(g, D, 0, 4)
    assert detour_length(g, D, 0, 4, z, 1.5) == 4.0
