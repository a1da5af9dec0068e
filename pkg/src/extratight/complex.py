"""Facet families of simplicial d-complexes: shadow, dual graph, diameter."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterable, Optional

from .hypergraph import DGraph, Edge, GraphFormatError, ParameterError, as_edge


@dataclass(frozen=True)
class FacetFamily:
    """A (d+1)-graph on [n], read as the facets of a d-complex."""

    n: int
    d: int
    facets: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        facets = frozenset(as_edge(f) for f in self.facets)
        for f in facets:
            if len(f) != self.d + 1 or len(set(f)) != self.d + 1:
                raise GraphFormatError(f"facet {f} is not a {self.d + 1}-set")
            if f[0] < 1 or f[-1] > self.n:
                raise GraphFormatError(f"facet {f} leaves the vertex range 1..{self.n}")
        object.__setattr__(self, "facets", facets)

    @classmethod
    def from_facets(cls, n: int, d: int, facets: Iterable[Iterable[int]]) -> "FacetFamily":
        raw = [as_edge(f) for f in facets]
        if len(set(raw)) != len(raw):
            raise GraphFormatError("duplicate facets")
        return cls(n, d, frozenset(raw))

    def __len__(self) -> int:
        return len(self.facets)

    def __contains__(self, facet: object) -> bool:
        return isinstance(facet, Iterable) and as_edge(facet) in self.facets

    def sorted_facets(self) -> list[Edge]:
        return sorted(self.facets)

    def without(self, facet: Iterable[int]) -> "FacetFamily":
        f = as_edge(facet)
        if f not in self.facets:
            raise KeyError(f"{f} is not a facet")
        return FacetFamily(self.n, self.d, self.facets - {f})

    def as_graph(self) -> DGraph:
        return DGraph(self.n, self.d + 1, self.facets)

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "facets": [list(f) for f in self.sorted_facets()]}

    @classmethod
    def from_json(cls, data: dict) -> "FacetFamily":
        try:
            n, d = int(data["n"]), int(data["d"])
            facets = data["facets"] if "facets" in data else data["edges"]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"malformed facet document: {exc}") from exc
        for f in facets:
            if list(f) != sorted(f):
                raise GraphFormatError(f"facet {f} is not sorted ascending")
        return cls.from_facets(n, d, facets)


def load_facets(path: str | Path) -> FacetFamily:
    with open(path) as fh:
        return FacetFamily.from_json(json.load(fh))


def shadow(F: FacetFamily) -> DGraph:
    """All d-sets contained in some facet."""
    ridges = {r for f in F.facets for r in combinations(f, F.d)}
    return DGraph(F.n, F.d, frozenset(ridges))


@dataclass
class DualGraph:
    facets: list[Edge]
    adjacency: list[list[int]]

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    @property
    def connected(self) -> bool:
        if not self.facets:
            return True
        return len(_bfs(self.adjacency, 0)) == len(self.facets)

    @property
    def kind(self) -> str:
        """'path', 'cycle', 'other' or 'empty'."""
        m = len(self.facets)
        if m == 0:
            return "empty"
        if not self.connected:
            return "other"
        degs = self.degrees()
        if self.num_edges == m - 1 and max(degs) <= 2:
            return "path"
        if m >= 3 and all(x == 2 for x in degs):
            return "cycle"
        return "other"

    def path_order(self) -> list[Edge]:
        """Facets in path order, starting from the smaller endpoint."""
        if self.kind != "path":
            raise ValueError(f"dual graph is a {self.kind}, not a path")
        if len(self.facets) == 1:
            return list(self.facets)
        start = min(i for i, a in enumerate(self.adjacency) if len(a) == 1)
        order, prev, cur = [start], -1, start
        while True:
            nxt = [j for j in self.adjacency[cur] if j != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            order.append(cur)
        return [self.facets[i] for i in order]


def dual_graph(F: FacetFamily) -> DualGraph:
    """Facets are adjacent iff they share a ridge (a d-set)."""
    facets = F.sorted_facets()
    by_ridge: dict[Edge, list[int]] = {}
    for idx, f in enumerate(facets):
        for r in combinations(f, F.d):
            by_ridge.setdefault(r, []).append(idx)
    adjacency: list[set[int]] = [set() for _ in facets]
    for members in by_ridge.values():
        for a, b in combinations(members, 2):
            adjacency[a].add(b)
            adjacency[b].add(a)
    return DualGraph(facets, [sorted(a) for a in adjacency])


def _bfs(adjacency: list[list[int]], source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adjacency[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def diameter(F: FacetFamily) -> Optional[int]:
    """Largest shortest-path distance in the dual graph; None if disconnected or empty."""
    dual = dual_graph(F)
    m = len(dual.facets)
    if m == 0:
        return None
    best = 0
    for s in range(m):
        dist = _bfs(dual.adjacency, s)
        if len(dist) < m:
            return None
        best = max(best, max(dist.values()))
    return best


def hs_bound(n: int, d: int) -> int:
    """floor(C(n,d)/d - (d+1)/d), the volume upper bound on the diameter."""
    if not 2 <= d < n:
        raise ParameterError(f"need 2 <= d < n, got n={n}, d={d}")
    return (comb(n, d) - d - 1) // d


@dataclass
class ExtremalCertificate:
    kind: str
    facets: int
    shadow_size: int
    shadow_identity: bool
    diameter: Optional[int]
    bound: Optional[int]
    missing: list[Edge]
    extremal: bool

    def to_json(self) -> dict:
        return {
            "extremal": self.extremal,
            "diameter": self.diameter,
            "bound": self.bound,
            "missing": [list(e) for e in self.missing],
            "kind": self.kind,
            "facets": self.facets,
            "shadow_size": self.shadow_size,
            "shadow_identity": self.shadow_identity,
        }


def certify_extremal(F: FacetFamily) -> ExtremalCertificate:
    """Check the shadow-counting identities and whether F attains hs_bound.

    A dual path attains the bound iff at most d-1 of the d-subsets of [n]
    are missing from the shadow.  Dual cycles only get their identity
    |shadow| = |F|*d checked; they are never reported extremal.
    """
    dual = dual_graph(F)
    kind = dual.kind
    sh = shadow(F)
    m = len(F)
    if kind == "path":
        identity = len(sh) == m * F.d + 1
    elif kind == "cycle":
        identity = len(sh) == m * F.d
    else:
        identity = False
    bound = hs_bound(F.n, F.d) if 2 <= F.d < F.n else None
    missing = [e for e in combinations(range(1, F.n + 1), F.d) if e not in sh.edges]
    diam = diameter(F)
    extremal = (
        kind == "path"
        and identity
        and len(missing) <= F.d - 1
        and bound is not None
        and diam == bound
    )
    return ExtremalCertificate(kind, m, len(sh), identity, diam, bound, missing, extremal)
