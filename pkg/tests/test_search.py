from itertools import combinations

import pytest

from extratight.complex import certify_extremal, dual_graph, hs_bound
from extratight.divisibility import tour_feasible
from extratight.hypergraph import DGraph, complete
from extratight.search import (
    SearchBudget, find_euler_tour, find_euler_trail, johnson_longest_induced_path, max_diameter_complex,
)
from extratight.trails import VertexSeq, edge_set, validate

import oracles


def test_five_clique_has_a_tour():
    res = find_euler_tour(complete(5, 2))
    assert res.status == "found"
    assert validate(res.witness, complete(5, 2)).valid and len(edge_set(res.witness)) == 10


@pytest.mark.parametrize("n", [4, 6, 7, 8])
def test_no_tour_when_degrees_fail(n):
    G = complete(n, 2)
    assert find_euler_tour(G).status == "none"
    # the answer does not depend on the degree pre-check
    assert find_euler_tour(G, use_precheck=False).status == "none"
    assert not tour_feasible(G)


def test_nine_clique_has_no_tour():
    # degrees pass (8 = 2*4) but exhaustion finds nothing; an independent search agrees
    res = find_euler_tour(complete(9, 2), SearchBudget(max_seconds=120))
    assert res.status == "none"
    assert oracles.pair_tour(9) is None


def test_thirteen_clique_tour_first_found():
    res = find_euler_tour(complete(13, 2), SearchBudget(max_seconds=60, mode="first"))
    assert res.status == "found"
    assert validate(res.witness, complete(13, 2)).valid and len(edge_set(res.witness)) == 78


def test_tour_on_a_non_complete_host():
    # the edge set of a 7-cycle, d=2, is its own tour host
    G = DGraph(7, 2, frozenset(edge_set(VertexSeq.cycle(range(1, 8), 2))))
    res = find_euler_tour(G)
    assert res.status == "found" and set(edge_set(res.witness)) == set(G.edges)


def test_node_budget_gives_timeout():
    res = find_euler_tour(complete(13, 2), SearchBudget(max_nodes=5))
    assert res.status == "timeout"


def test_trail_after_cutting_a_path_recombines_into_tour():
    K5 = complete(5, 2)
    path = VertexSeq.open((1, 2, 3, 4), 2)
    G = K5.minus(edge_set(path)).plus([(1, 2), (3, 4)])
    res = find_euler_trail(G, (2, 1), (4, 3))
    assert res.status == "found"
    T = res.witness
    assert T.entries[:2] == (2, 1) and T.entries[-2:] == (4, 3)
    assert validate(T, G).valid and set(edge_set(T)) == set(G.edges)
    # the cut-out path (1,2,3,4) sits on the four end labels, so reading the
    # trail cyclically puts it back
    tour = VertexSeq.cycle(T.entries, 2)
    assert validate(tour, K5).valid and len(edge_set(tour)) == 10


def test_trail_with_bad_residues_is_none_instantly():
    res = find_euler_trail(complete(5, 2), (1, 2), (3, 4))
    assert res.status == "none" and res.nodes_expanded == 0


@pytest.mark.parametrize("d", [2, 3])
def test_path_is_its_own_euler_trail(d):
    P = VertexSeq.open(range(1, 3 * d + 2), d)
    G = DGraph(3 * d + 1, d, frozenset(edge_set(P)))
    res = find_euler_trail(G, P.entries[:d], P.entries[-d:])
    assert res.status == "found" and set(edge_set(res.witness)) == set(G.edges)


def brute_longest_induced_path(n, k):
    verts = list(combinations(range(1, n + 1), k))
    adj = {u: {v for v in verts if len(set(u) & set(v)) == k - 1} for u in verts}
    best = 0

    def grow(path, blocked):
        nonlocal best
        best = max(best, len(path) - 1)
        for w in adj[path[-1]]:
            if w not in blocked:
                grow(path + [w], blocked | adj[path[-1]] | {path[-1]})

    for v in verts:
        grow([v], set())
    return best


def test_johnson_matches_brute_force_on_five_points():
    res = johnson_longest_induced_path(5, 3)
    assert res.value == 3 == brute_longest_induced_path(5, 3)


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (6, 2), (7, 2), (6, 3), (5, 4), (6, 4), (7, 5)])
def test_johnson_matches_brute_force(n, k):
    assert johnson_longest_induced_path(n, k).value == brute_longest_induced_path(n, k)


@pytest.mark.parametrize("n,k,length", [(5, 3, 3), (6, 3, 5), (7, 3, 9), (6, 2, 4)])
def test_johnson_lengths(n, k, length):
    res = johnson_longest_induced_path(n, k, SearchBudget(max_seconds=600))
    assert res.value == length
    path = res.witness
    assert len(path) == length + 1
    for i, u in enumerate(path):
        for j in range(i + 1, len(path)):
            assert (len(set(u) & set(path[j])) == k - 1) == (j == i + 1)


@pytest.mark.parametrize("n,length", [(5, 3), (6, 5), (7, 9)])
def test_max_diameter_complexes(n, length):
    res = max_diameter_complex(n, 2)
    F = res.witness
    assert res.value == length and dual_graph(F).kind == "path"
    kind, diam = oracles.dual_shape(F.facets, 2)
    assert kind == "path" and diam == length
    assert certify_extremal(F).extremal == (length == hs_bound(n, 2))


def test_nine_point_complex_reaches_volume_bound():
    res = max_diameter_complex(9, 2, SearchBudget(max_seconds=120))
    assert res.status == "found" and res.value == 16 == hs_bound(9, 2)
