import json
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from extratight.hypergraph import (
    DGraph, GraphFormatError, ParameterError, complete, degree_profile, dump_graph, link, load_graph,
)


@pytest.mark.parametrize("n,d,m", [(5, 2, 10), (4, 3, 4), (6, 3, 20)])
def test_complete_edge_count(n, d, m):
    assert len(complete(n, d)) == m


@pytest.mark.parametrize("n,d", [(3, 4), (5, 0)])
def test_complete_rejects_bad_parameters(n, d):
    with pytest.raises(ParameterError):
        complete(n, d)


def test_link_of_vertex_in_k5():
    L = link(complete(5, 2), {1})
    assert L.d == 1 and sorted(L.edges) == [(2,), (3,), (4,), (5,)]


def test_link_of_pair_in_k4_triples():
    assert sorted(link(complete(4, 3), {1, 2}).edges) == [(3,), (4,)]


def test_link_of_empty_graph():
    assert len(link(DGraph(5, 2, frozenset()), {1})) == 0


def test_link_rejects_oversized_set():
    with pytest.raises(ParameterError):
        link(complete(5, 2), {1, 2, 3})


@pytest.mark.parametrize("G,i,expected", [
    (complete(5, 2), 1, (4, 4)),
    (complete(6, 3), 2, (4, 4)),
    (complete(5, 2).minus([(1, 2)]), 1, (3, 4)),
])
def test_degree_profile(G, i, expected):
    assert degree_profile(G, i) == expected


def test_edges_must_be_valid():
    with pytest.raises((GraphFormatError, ParameterError)):
        DGraph.from_edges(4, 2, [(1, 5)])
    with pytest.raises((GraphFormatError, ParameterError)):
        DGraph.from_edges(4, 2, [(1, 1)])


def test_json_round_trip(tmp_path):
    G = complete(6, 3).minus([(1, 2, 3)])
    path = tmp_path / "g.json"
    dump_graph(G, path)
    data = json.loads(path.read_text())
    assert all(list(e) == sorted(e) for e in data["edges"])
    assert load_graph(path) == G


def test_loader_rejects_unsorted_or_duplicate_edges(tmp_path):
    for edges in ([[2, 1]], [[1, 2], [1, 2]], [[1, 2, 3]]):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"n": 4, "d": 2, "edges": edges}))
        with pytest.raises(GraphFormatError):
            load_graph(p)


graphs = st.integers(3, 7).flatmap(
    lambda n: st.integers(1, n - 1).flatmap(
        lambda d: st.sets(st.sampled_from(list(combinations(range(1, n + 1), d)))).map(
            lambda es: DGraph.from_edges(n, d, es))))


@given(graphs)
def test_handshake(G):
    assert sum(G.vertex_degrees().values()) == G.d * len(G)


@given(graphs)
def test_link_of_empty_set_is_identity(G):
    assert link(G, ()).edges == G.edges


@given(graphs, st.data())
def test_link_composes(G, data):
    verts = list(G.vertices)
    S = data.draw(st.sets(st.sampled_from(verts), max_size=G.d))
    rest = [v for v in verts if v not in S]
    T = data.draw(st.sets(st.sampled_from(rest), max_size=G.d - len(S))) if rest else set()
    inner = link(G, S)
    assert link(inner, T).edges == link(G, S | T).edges
