import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from extratight.complex import dual_graph, shadow
from extratight.hypergraph import DGraph, complete
from extratight.trails import (
    InvalidSequenceError, SequenceFormatError, VertexSeq, covered_edges, edge_set, ends, facets_of,
    is_straight, predicted_degrees, trail_degrees, validate,
)

import oracles


def test_open_five_vertex_coverage_in_window_order():
    got = [e for _, _, e in covered_edges(VertexSeq.open((1, 2, 3, 4, 5), 2))]
    assert got == [(1, 3), (1, 2), (2, 4), (2, 3), (3, 5), (3, 4), (4, 5)]


def test_closed_five_cycle_covers_every_pair():
    got = covered_edges(VertexSeq.cycle((1, 2, 3, 4, 5), 2))
    assert len(got) == 10 and {e for *_, e in got} == set(complete(5, 2).edges)


def test_repeat_inside_window_is_rejected():
    with pytest.raises(InvalidSequenceError, match="position 1"):
        covered_edges(VertexSeq.open((1, 2, 1, 3), 2))


def test_validate_k5_tour():
    r = validate(VertexSeq.cycle((1, 2, 3, 4, 5), 2), complete(5, 2))
    assert r.valid and len(r.edges) == 10


def test_validate_reports_all_duplicates():
    seq = VertexSeq.open((1, 2, 3, 4, 1, 5), 2)
    r = validate(seq, complete(5, 2))
    ref = oracles.covered_sets([1, 2, 3, 4, 1, 5], 2, False)
    dup_ref = {tuple(sorted(s)) for s in ref if ref.count(s) > 1}
    assert not r.valid
    assert {e for e, _ in r.duplicates} == dup_ref == {(1, 3)}
    assert not r.missing_from_host


def test_validate_against_empty_host_misses_everything():
    seq = VertexSeq.open((1, 2, 3, 4), 2)
    r = validate(seq, DGraph(4, 2, frozenset()))
    assert not r.valid and len(r.missing_from_host) == len(r.covered)


def test_ends():
    assert ends(VertexSeq.open((1, 2, 3, 4, 5), 2)) == ((1, 2), (4, 5))
    assert ends(VertexSeq.open(range(1, 7), 3)) == ((1, 2, 3), (4, 5, 6))
    with pytest.raises(ValueError):
        ends(VertexSeq.cycle((1, 2, 3, 4, 5), 2))


def test_degrees_of_short_paths_and_cycles():
    assert trail_degrees(VertexSeq.open(range(1, 7), 2)) == {1: 2, 2: 3, 3: 4, 4: 4, 5: 3, 6: 2}
    assert set(trail_degrees(VertexSeq.cycle(range(1, 8), 3)).values()) == {9}
    deg = trail_degrees(VertexSeq.open(range(1, 9), 3))
    assert [deg[v] for v in range(1, 9)] == [3, 5, 7, 9, 9, 7, 5, 3]


def test_predicted_degrees_skip_when_ends_collide():
    assert predicted_degrees(VertexSeq.open((1, 2, 3, 1), 2)) is None


def test_straightness():
    assert is_straight(VertexSeq.open((1, 2, 3, 4, 5), 2))
    assert not is_straight(VertexSeq.open((1, 2, 3, 1, 4, 5), 2))
    for d in (2, 3, 4):
        assert is_straight(VertexSeq.open(range(1, d + 2), d))


def test_facets():
    assert facets_of(VertexSeq.open((1, 2, 3, 4, 5), 2)).sorted_facets() == [(1, 2, 3), (2, 3, 4), (3, 4, 5)]
    C = facets_of(VertexSeq.cycle((1, 2, 3, 4, 5), 2))
    assert len(C) == 5 and dual_graph(C).kind == "cycle"
    assert len(facets_of(VertexSeq.open(range(1, 5), 3))) == 1


def test_text_round_trip():
    seq = VertexSeq.cycle((1, 2, 3, 4, 5), 2)
    assert VertexSeq.from_text(seq.to_text()) == seq
    for bad in ("2 5 open\n1 2 3", "x 3 open\n1 2 3", "2 3 sideways\n1 2 3", ""):
        with pytest.raises(SequenceFormatError):
            VertexSeq.from_text(bad)


def test_closed_sequences_need_length_d_plus_3():
    with pytest.raises(ValueError):
        VertexSeq.cycle((1, 2, 3, 4), 2)


def random_walk_seq(rng, n, d, k):
    seq = rng.sample(range(1, n + 1), d)
    while len(seq) < k:
        seq.append(rng.choice([v for v in range(1, n + 1) if v not in seq[-d:]]))
    return seq


seqs = st.tuples(st.integers(2, 3), st.integers(0, 2**32), st.integers(0, 12)).map(
    lambda a: (a[0], random_walk_seq(random.Random(a[1]), 9, a[0], a[0] + a[2])))


@given(seqs)
def test_coverage_matches_window_oracle(arg):
    d, entries = arg
    got = [frozenset(e) for *_, e in covered_edges(VertexSeq.open(entries, d))]
    assert got == oracles.covered_sets(entries, d, False)
    assert len(got) == (len(entries) - d) * d + 1


@given(seqs)
def test_validity_matches_oracle_and_shadow(arg):
    d, entries = arg
    seq = VertexSeq.open(entries, d)
    valid = validate(seq, complete(9, d)).valid
    assert valid == oracles.is_extra_tight(entries, d, False)
    if valid and len(entries) > d:
        assert edge_set(seq) == set(shadow(facets_of(seq)).edges)
        assert sum(trail_degrees(seq).values()) == d * len(edge_set(seq))
        rev = seq.reversed()
        assert validate(rev, complete(9, d)).valid and edge_set(rev) == edge_set(seq)
        a, b = ends(seq)
        assert ends(rev) == (tuple(reversed(b)), tuple(reversed(a)))


@given(seqs)
def test_predicted_degrees_agree_with_enumeration(arg):
    d, entries = arg
    seq = VertexSeq.open(entries, d)
    pred = predicted_degrees(seq)
    if pred is not None and oracles.is_extra_tight(entries, d, False):
        assert pred == oracles.degrees(oracles.covered_sets(entries, d, False))
