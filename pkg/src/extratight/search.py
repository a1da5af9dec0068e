"""Exhaustive and budgeted searches.

Euler tours and trails by depth-first search over vertex sequences, and
the longest induced path in the Johnson graph J(n, k) (equivalently the
largest dual-path diameter of a pure (k-1)-complex on [n]) by
branch-and-bound.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Optional, Sequence

from .complex import FacetFamily, diameter, dual_graph, hs_bound
from .divisibility import FeasibilityReport, tour_feasible, trail_feasible
from .hypergraph import DGraph, Edge, ParameterError, as_edge
from .surgery import appended_edges
from .trails import VertexSeq, validate

MODES = ("exhaustive", "first")


@dataclass(frozen=True)
class SearchBudget:
    max_seconds: Optional[float] = None
    max_nodes: Optional[int] = None
    mode: str = "exhaustive"

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass
class SearchResult:
    status: str  # "found" | "none" | "timeout"
    witness: Optional[object] = None
    nodes_expanded: int = 0
    seconds: float = 0.0
    value: Optional[int] = None
    reason: str = ""
    precheck: Optional[FeasibilityReport] = None

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, VertexSeq):
            w = {"d": w.d, "entries": list(w.entries), "closed": w.closed}
        elif isinstance(w, FacetFamily):
            w = w.to_json()
        elif w is not None:
            w = [list(x) for x in w]
        return {
            "status": self.status,
            "witness": w,
            "value": self.value,
            "nodes_expanded": self.nodes_expanded,
            "seconds": round(self.seconds, 6),
            "reason": self.reason,
        }


class _Timeout(Exception):
    pass


class _Clock:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.t0 = time.perf_counter()
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        b = self.budget
        if b.max_nodes is not None and self.nodes > b.max_nodes:
            raise _Timeout
        if b.max_seconds is not None and self.nodes & 1023 == 0:
            if time.perf_counter() - self.t0 > b.max_seconds:
                raise _Timeout

    @property
    def seconds(self) -> float:
        return time.perf_counter() - self.t0


# --------------------------------------------------------------------------
# Euler tours and trails


def _occurrences(deg: dict[int, int], fixed: dict[int, int], d: int) -> Optional[dict[int, int]]:
    """Free occurrences per vertex: (deg - contribution of fixed end entries) / d^2."""
    m = d * d
    occ = {}
    for v, x in deg.items():
        rest = x - fixed.get(v, 0)
        if rest < 0 or rest % m:
            return None
        occ[v] = rest // m
    return occ


def find_euler_tour(
    G: DGraph, budget: SearchBudget = SearchBudget(), use_precheck: bool = True
) -> SearchResult:
    """Search for a closed extra-tight sequence covering every edge of G once.

    The first entry is fixed to the smallest non-isolated vertex (rotation)
    and reversal is broken by requiring v_2 < v_k.  When G is complete on
    its support, labels must instead make their first appearance in
    increasing order, which subsumes both.  Each vertex occurs
    exactly deg(v)/d^2 times, which bounds the branching.
    """
    clock = _Clock(budget)
    d, m = G.d, len(G)
    if m == 0:
        return SearchResult("none", reason="empty graph", seconds=clock.seconds)
    if m % d:
        return SearchResult("none", reason=f"|G| = {m} is not a multiple of d", seconds=clock.seconds)
    k = m // d
    report = tour_feasible(G)
    if k < d + 3:
        # at most C(d+2, d) distinct d-sets fit into d+2 labels, fewer than k*d
        return SearchResult("none", reason=f"tour length k = {k} < d+3 always repeats a d-set",
                            seconds=clock.seconds, precheck=report)
    deg = G.vertex_degrees()
    if use_precheck and not report.feasible:
        return SearchResult("none", reason=report.reason, seconds=clock.seconds, precheck=report)
    occ = _occurrences(deg, {}, d) if report.feasible else {v: x // (d * d) for v, x in deg.items()}
    if occ is None or sum(occ.values()) != k:
        # without the precheck the occurrence counts are only upper bounds
        occ = {v: x // (d * d) for v, x in deg.items()}
    first = min(v for v, x in deg.items() if x)
    edges = G.edges
    seq = [first]
    occ[first] -= 1
    used: set[Edge] = set()
    labels = sorted(v for v in deg if deg[v])
    # on a complete host any relabelling of a tour is a tour, so new labels
    # may be required to appear in increasing order
    canonical = len(edges) == comb(len(labels), d)
    fresh = [1]  # index into labels of the next unseen label

    def closing_ok() -> bool:
        if not canonical and seq[1] >= seq[-1]:
            return False
        extra: list[Edge] = []
        tail = seq[-d:] + seq[:d]
        for s in range(d):
            window = tail[s : s + d + 1]
            if len(set(window)) != d + 1:
                return False
            for sig in range(1, d + 1):
                e = as_edge(window[:sig] + window[sig + 1 :])
                if e not in edges or e in used or e in extra:
                    return False
                extra.append(e)
        return True

    def dfs() -> bool:
        clock.tick()
        if len(seq) == k:
            return closing_ok()
        for v in labels:
            if occ[v] == 0 or v in seq[-d:]:
                continue
            is_new = canonical and fresh[0] < len(labels) and v >= labels[fresh[0]]
            if is_new and v != labels[fresh[0]]:
                break
            # a tour has no terminal set: only completed windows count
            added = []
            if len(seq) >= d:
                window = seq[-d:] + [v]
                added = [as_edge(window[:s] + window[s + 1 :]) for s in range(d + 1) if s]
            if any(e not in edges or e in used for e in added) or len(set(added)) != len(added):
                continue
            seq.append(v)
            occ[v] -= 1
            used.update(added)
            fresh[0] += is_new
            if dfs():
                return True
            fresh[0] -= is_new
            seq.pop()
            occ[v] += 1
            used.difference_update(added)
        return False

    try:
        found = dfs()
    except _Timeout:
        return SearchResult("timeout", nodes_expanded=clock.nodes, seconds=clock.seconds, precheck=report)
    if not found:
        return SearchResult("none", nodes_expanded=clock.nodes, seconds=clock.seconds,
                            reason="search space exhausted", precheck=report)
    tour = VertexSeq.cycle(seq, d)
    assert validate(tour, G).valid and len(validate(tour, G).edges) == m
    return SearchResult("found", tour, clock.nodes, clock.seconds, k, precheck=report)


def find_euler_trail(
    G: DGraph,
    start: Sequence[int],
    finish: Sequence[int],
    budget: SearchBudget = SearchBudget(),
    use_precheck: bool = True,
) -> SearchResult:
    """Search for an open extra-tight trail covering G exactly once.

    ``start`` are the first d entries and ``finish`` the last d entries in
    trail order.
    """
    clock = _Clock(budget)
    d, m = G.d, len(G)
    start, finish = tuple(start), tuple(finish)
    report = trail_feasible(G, start, finish)
    if (m - 1) % d:
        return SearchResult("none", reason=f"|G| - 1 = {m - 1} is not a multiple of d",
                            seconds=clock.seconds, precheck=report)
    k = (m - 1) // d + d
    if k < 2 * d:
        return SearchResult("none", reason="too few edges for disjoint ends", seconds=clock.seconds,
                            precheck=report)
    if use_precheck and not report.feasible:
        return SearchResult("none", reason=report.reason, seconds=clock.seconds, precheck=report)
    deg = G.vertex_degrees()
    fixed: dict[int, int] = {}
    for i, v in enumerate(start, start=1):
        fixed[v] = fixed.get(v, 0) + i * (d - 1) + 1
    for i, v in enumerate(reversed(finish), start=1):
        fixed[v] = fixed.get(v, 0) + i * (d - 1) + 1
    occ = _occurrences(deg, fixed, d)
    if occ is None:
        occ = {v: max(x - fixed.get(v, 0), 0) // (d * d) for v, x in deg.items()}
    edges = G.edges
    seq = list(start)
    used: set[Edge] = set()
    labels = sorted(v for v in deg if deg[v])
    free = k - 2 * d

    def push(v: int) -> Optional[list[Edge]]:
        if v in seq[-d:]:
            return None
        added = appended_edges(seq, v, d)
        if any(e not in edges or e in used for e in added) or len(set(added)) != len(added):
            return None
        return added

    def finish_ok() -> bool:
        added_all: list[Edge] = []
        pushed = 0
        ok = True
        for v in finish:
            added = push(v)
            if added is None or set(added) & set(added_all):
                ok = False
                break
            seq.append(v)
            used.update(added)
            added_all.extend(added)
            pushed += 1
        del seq[len(seq) - pushed :]
        used.difference_update(added_all)
        return ok

    def dfs(placed: int) -> bool:
        clock.tick()
        if placed == free:
            return finish_ok()
        for v in labels:
            if occ[v] == 0:
                continue
            added = push(v)
            if added is None:
                continue
            seq.append(v)
            occ[v] -= 1
            used.update(added)
            if dfs(placed + 1):
                return True
            seq.pop()
            occ[v] += 1
            used.difference_update(added)
        return False

    try:
        found = dfs(0)
    except _Timeout:
        return SearchResult("timeout", nodes_expanded=clock.nodes, seconds=clock.seconds, precheck=report)
    if not found:
        return SearchResult("none", nodes_expanded=clock.nodes, seconds=clock.seconds,
                            reason="search space exhausted", precheck=report)
    trail = VertexSeq.open((*seq, *finish), d)
    rep = validate(trail, G)
    assert rep.valid and len(rep.edges) == m
    return SearchResult("found", trail, clock.nodes, clock.seconds, k, precheck=report)


# --------------------------------------------------------------------------
# Johnson graph


@dataclass
class _Johnson:
    n: int
    k: int
    verts: list[Edge] = field(default_factory=list)
    index: dict[Edge, int] = field(default_factory=dict)
    nbr: list[int] = field(default_factory=list)
    ridges: list[int] = field(default_factory=list)  # ridge -> mask of vertices containing it
    ridge_of: list[list[int]] = field(default_factory=list)

    @classmethod
    def build(cls, n: int, k: int) -> "_Johnson":
        J = cls(n, k)
        J.verts = list(combinations(range(1, n + 1), k))
        J.index = {v: i for i, v in enumerate(J.verts)}
        ridge_ids = {r: i for i, r in enumerate(combinations(range(1, n + 1), k - 1))}
        J.ridges = [0] * len(ridge_ids)
        J.ridge_of = []
        for i, v in enumerate(J.verts):
            rs = [ridge_ids[r] for r in combinations(v, k - 1)]
            J.ridge_of.append(rs)
            for r in rs:
                J.ridges[r] |= 1 << i
        J.nbr = []
        for i, rs in enumerate(J.ridge_of):
            mask = 0
            for r in rs:
                mask |= J.ridges[r]
            J.nbr.append(mask & ~(1 << i))
        return J


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def johnson_longest_induced_path(
    n: int, k: int, budget: SearchBudget = SearchBudget(), target: Optional[int] = None
) -> SearchResult:
    """Longest induced path (counted in edges) of J(n, k) by branch-and-bound.

    The first two vertices are fixed to {1..k} and {1..k-1, k+1}.  A path
    of m vertices uses m(k-1)+1 distinct (k-1)-sets, and every further
    vertex needs k-1 fresh (k-1)-sets that still sit inside an eligible
    vertex; this gives the pruning bound.  The search stops early once a
    path reaches the volume bound.  In "first" mode it returns the first
    path of at least ``target`` edges (default: the volume bound).
    """
    if not 2 <= k <= n - 1:
        raise ParameterError(f"need 2 <= k <= n-1, got n={n}, k={k}")
    clock = _Clock(budget)
    J = _Johnson.build(n, k)
    N = len(J.verts)
    full = (1 << N) - 1
    ceiling = hs_bound(n, k - 1) if 2 <= k - 1 < n else comb(n, k) - 1
    goal = ceiling if target is None else min(target, ceiling)
    a = J.index[tuple(range(1, k + 1))]
    b = J.index[tuple(range(1, k)) + (k + 1,)]
    best: list[int] = [a, b]
    path = [a, b]
    ridge_used = [0] * len(J.ridges)
    for v in path:
        for r in J.ridge_of[v]:
            ridge_used[r] += 1

    def bound(blocked: int, inpath: int) -> int:
        eligible = full & ~blocked & ~inpath
        usable = 0
        for r, mask in enumerate(J.ridges):
            if not ridge_used[r] and mask & eligible:
                usable += 1
        return usable // (k - 1)

    class _Done(Exception):
        pass

    def dfs(blocked: int, inpath: int) -> None:
        # blocked: closed neighbourhoods of every path vertex but the last
        nonlocal best
        clock.tick()
        if len(path) > len(best):
            best = list(path)
            if len(best) - 1 >= goal:
                raise _Done
        last = path[-1]
        cand = J.nbr[last] & ~blocked & ~inpath
        if not cand:
            return
        if len(path) - 1 + bound(blocked, inpath) <= len(best) - 1:
            return
        child_blocked = blocked | J.nbr[last] | (1 << last)
        for c in _bits(cand):
            path.append(c)
            for r in J.ridge_of[c]:
                ridge_used[r] += 1
            dfs(child_blocked, inpath | (1 << c))
            for r in J.ridge_of[c]:
                ridge_used[r] -= 1
            path.pop()

    status = "found"
    try:
        dfs(J.nbr[a] | (1 << a), (1 << a) | (1 << b))
    except _Done:
        pass
    except _Timeout:
        status = "timeout"
    witness = [J.verts[i] for i in best]
    return SearchResult(status, witness, clock.nodes, clock.seconds, len(best) - 1,
                        reason=f"volume bound {ceiling}")


def max_diameter_complex(n: int, d: int, budget: SearchBudget = SearchBudget()) -> SearchResult:
    """A pure d-complex on [n] with dual-path diameter as large as possible.

    Its facets are the vertices of a longest induced path of J(n, d+1).
    """
    res = johnson_longest_induced_path(n, d + 1, budget)
    F = FacetFamily.from_facets(n, d, res.witness)
    dual = dual_graph(F)
    assert dual.kind == "path" and diameter(F) == res.value
    return SearchResult(res.status, F, res.nodes_expanded, res.seconds, res.value, res.reason)
