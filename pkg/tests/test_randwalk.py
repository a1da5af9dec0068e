import random
from collections import Counter
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from extratight.hypergraph import DGraph, complete
from extratight.randwalk import (
    InfeasibleDecomposition, RejectionLimit, cliques, connect_packing, fractional_decomposition,
    greedy_approx_decomposition, sample_path, sample_paths, start_walk, stationarity_check, transition,
    walk_step,
)
from extratight.trails import VertexSeq, edge_set, validate

import oracles


def k12_minus_matching():
    return complete(12, 2).minus([(2 * i - 1, 2 * i) for i in range(1, 7)])


# --- fractional decompositions ---------------------------------------------

def test_k5_uniform_thirds():
    x = fractional_decomposition(complete(5, 2))
    assert len(x.weights) == 10 and all(abs(w - 1 / 3) < 1e-15 for w in x.weights.values())


@pytest.mark.parametrize("n,d", [(6, 2), (9, 2), (30, 2), (7, 3), (9, 3)])
def test_complete_hosts_closed_form(n, d):
    G = complete(n, d)
    x = fractional_decomposition(G)
    assert x.method == "closed-form"
    assert all(abs(w - 1 / (n - d)) < 1e-15 for w in x.weights.values())
    assert x.max_residual(G) <= 1e-9


def test_normality_only_for_large_complete_hosts():
    assert fractional_decomposition(complete(30, 2)).is_normal(0.9)
    assert not fractional_decomposition(complete(5, 2)).is_normal(0.9)


def test_k12_minus_matching_sums_to_one():
    G = k12_minus_matching()
    x = fractional_decomposition(G)
    assert x.max_residual(G) <= 1e-9
    assert all(w >= 0 for w in x.weights.values())


def test_edge_in_no_clique_is_infeasible():
    G = DGraph.from_edges(4, 2, [(1, 2), (2, 3), (1, 3), (3, 4)])
    with pytest.raises(InfeasibleDecomposition):
        fractional_decomposition(G)


@given(st.integers(0, 2**32))
def test_random_dense_hosts_sum_to_one(seed):
    rng = random.Random(seed)
    n = rng.randint(7, 10)
    drop = rng.sample(list(combinations(range(1, n + 1), 2)), rng.randint(0, n // 2))
    G = complete(n, 2).minus(drop)
    try:
        x = fractional_decomposition(G)
    except InfeasibleDecomposition:
        return
    assert x.max_residual(G) <= 1e-9 and min(x.weights.values(), default=0) >= 0
    assert set(x.weights) <= set(cliques(G))


# --- walk ------------------------------------------------------------------

def test_k5_transitions_are_thirds():
    x = fractional_decomposition(complete(5, 2))
    for Z in permutations(range(1, 6), 2):
        verts, p = transition(x, Z, 5)
        assert sorted(verts) == sorted(set(range(1, 6)) - set(Z))
        assert np.allclose(p, 1 / 3)


def test_transitions_sum_to_one_exactly_on_complete_hosts():
    for n, d in [(6, 2), (7, 3)]:
        # uniform weights 1/(n-d) on n-d admissible next vertices
        assert sum(Fraction(1, n - d) for _ in range(n - d)) == 1


def test_walk_is_replayable():
    G = complete(8, 2)
    x = fractional_decomposition(G)

    def run(seed):
        s = start_walk(G, seed)
        for _ in range(50):
            s = walk_step(s, x, G)
        return s.history

    assert run(3) == run(3)
    h = run(3)
    assert all(h[i] != h[i + 1] and h[i] != h[i + 2] for i in range(len(h) - 2))


def test_initial_window_is_uniform():
    G = complete(5, 2)
    counts = Counter(start_walk(G, s).current for s in range(20000))
    assert len(counts) == 20
    p = 1 / 20
    assert max(abs(c / 20000 - p) for c in counts.values()) < 4 * (p * (1 - p) / 20000) ** 0.5


def test_stationarity_small():
    G = complete(6, 2)
    x = fractional_decomposition(G)
    assert stationarity_check(G, x, 200_000, seed=11).ok
    assert stationarity_check(G, x, 200_000, seed=11, offsets=(0, 2)).ok


def test_single_triangle_marginal_stays_uniform():
    # the walk on one triangle is a rotation, so time averages are useless;
    # push every starting ordering forward and check the marginal instead
    G = complete(3, 2)
    x = fractional_decomposition(G)
    for steps in range(1, 6):
        ends = []
        for Z in permutations(range(1, 4), 2):
            state = Z
            for _ in range(steps):
                verts, p = transition(x, state, 3)
                assert len(verts) == 1 and p[0] == 1
                state = (state[1], int(verts[0]))
            ends.append(state)
        assert sorted(ends) == sorted(permutations(range(1, 4), 2))


def test_stationarity_is_deterministic():
    G = complete(6, 2)
    x = fractional_decomposition(G)
    a = stationarity_check(G, x, 10_000, seed=5).to_json()
    b = stationarity_check(G, x, 10_000, seed=5).to_json()
    assert a == b


# --- path sampling ---------------------------------------------------------

def test_sampled_paths_validate():
    G = complete(20, 2)
    x = fractional_decomposition(G)
    for seed in range(20):
        P = sample_path(G, x, 6, seed)
        assert len(P) == 6 and validate(P, G).valid


def test_acceptance_rate_on_k30():
    G = complete(30, 2)
    got = sample_paths(G, fractional_decomposition(G), 8, 20_000, seed=1)
    assert got.acceptance > 0.5


def test_rejection_cap():
    G = complete(5, 2)
    with pytest.raises(RejectionLimit):
        sample_path(G, fractional_decomposition(G), 6, 0, max_tries=2000)


def test_edge_hits_are_roughly_uniform():
    n, d, t = 12, 2, 5
    G = complete(n, d)
    got = sample_paths(G, fractional_decomposition(G), t, 100_000, seed=4)
    hits = Counter()
    for row in got.paths:
        hits.update(tuple(sorted(s)) for s in oracles.covered_sets([int(v) for v in row], d, False))
    expected = ((t - d) * d + 1) / len(G)
    freqs = np.array([hits[e] / len(got.paths) for e in G.edges])
    assert np.abs(freqs - expected).max() < 0.1 * expected


def test_no_path_is_over_represented():
    n, t = 7, 5
    G = complete(n, 2)
    got = sample_paths(G, fractional_decomposition(G), t, 1_000_000, seed=2)
    counts = Counter(map(tuple, got.paths.tolist()))
    assert max(counts.values()) <= 10 * len(got.paths) / len(counts)


# --- greedy packing --------------------------------------------------------

def test_greedy_packing_on_k30():
    G = complete(30, 2)
    pack = greedy_approx_decomposition(G, 10, gamma=0.25, seed=0)
    seen = set()
    for p in pack.paths:
        es = edge_set(p)
        assert len(p) == 10 and validate(p, G).valid and not es & seen
        seen |= es
    assert len(seen) + len(pack.leftover) == len(G)
    assert not seen & set(pack.leftover.edges)
    assert pack.max_codegree() <= 0.25 * 30
    assert max(pack.end_counts.values()) <= pack.end_cap == 7


def test_greedy_is_seed_deterministic():
    G = complete(16, 2)
    a = greedy_approx_decomposition(G, 6, seed=3)
    b = greedy_approx_decomposition(G, 6, seed=3)
    assert [p.entries for p in a.paths] == [p.entries for p in b.paths]


# --- connecting ------------------------------------------------------------

def test_connect_two_paths():
    G = complete(30, 2)
    P1, P2 = VertexSeq.open((1, 2, 3, 4), 2), VertexSeq.open((5, 6, 7, 8), 2)
    reserve = G.minus(edge_set(P1) | edge_set(P2))
    T = connect_packing([P1, P2], reserve, range(11, 31))
    assert validate(T, G).valid
    es = edge_set(T)
    assert edge_set(P1) <= es and edge_set(P2) <= es
    assert es - edge_set(P1) - edge_set(P2) <= set(reserve.edges)
    assert set(T.entries[:2]) | set(T.entries[-2:]) <= set(range(11, 31))


def test_connect_nothing():
    T = connect_packing([], complete(30, 2), range(11, 31))
    assert len(T) == 4 and validate(T, complete(30, 2)).valid
