"""Uniform hypergraphs on the vertex set 1..n.

Edges are stored as sorted tuples so that membership is a set lookup and
iteration order is lexicographic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterable, Iterator


class ParameterError(ValueError):
    """Raised for out-of-range sizes, uniformities or levels."""


class GraphFormatError(ValueError):
    """Raised when a serialized graph violates the edge invariants."""


Edge = tuple[int, ...]


def as_edge(vertices: Iterable[int]) -> Edge:
    return tuple(sorted(vertices))


@dataclass(frozen=True)
class DGraph:
    """A d-uniform hypergraph on vertices 1..n."""

    n: int
    d: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.d < 0 or self.n < 0:
            raise ParameterError(f"need n, d >= 0, got n={self.n}, d={self.d}")
        edges = frozenset(as_edge(e) for e in self.edges)
        for e in edges:
            if len(e) != self.d or len(set(e)) != self.d:
                raise GraphFormatError(f"edge {e} is not a {self.d}-set")
            if e and (e[0] < 1 or e[-1] > self.n):
                raise GraphFormatError(f"edge {e} leaves the vertex range 1..{self.n}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, n: int, d: int, edges: Iterable[Iterable[int]]) -> "DGraph":
        raw = [as_edge(e) for e in edges]
        if len(set(raw)) != len(raw):
            raise GraphFormatError("duplicate edges")
        return cls(n, d, frozenset(raw))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, edge: object) -> bool:
        if not isinstance(edge, Iterable):
            return False
        return as_edge(edge) in self.edges

    def __iter__(self) -> Iterator[Edge]:
        return iter(sorted(self.edges))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def degree(self, S: Iterable[int]) -> int:
        """Number of edges containing the vertex set ``S``."""
        S = set(S)
        return sum(1 for e in self.edges if S.issubset(e))

    def vertex_degrees(self) -> dict[int, int]:
        deg = dict.fromkeys(self.vertices, 0)
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    def degree_counts(self, i: int) -> dict[Edge, int]:
        """Degrees of every i-subset of [n] (zeros included)."""
        counts = dict.fromkeys(combinations(self.vertices, i), 0)
        for e in self.edges:
            for S in combinations(e, i):
                counts[S] += 1
        return counts

    def minus(self, other: Iterable[Iterable[int]]) -> "DGraph":
        drop = {as_edge(e) for e in other}
        return DGraph(self.n, self.d, self.edges - drop)

    def plus(self, other: Iterable[Iterable[int]]) -> "DGraph":
        return DGraph(self.n, self.d, self.edges | {as_edge(e) for e in other})

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json(cls, data: dict) -> "DGraph":
        try:
            n, d, edges = int(data["n"]), int(data["d"]), data["edges"]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"malformed graph document: {exc}") from exc
        for e in edges:
            if list(e) != sorted(e):
                raise GraphFormatError(f"edge {e} is not sorted ascending")
        return cls.from_edges(n, d, edges)


def complete(n: int, d: int) -> DGraph:
    """The complete d-graph on [n]."""
    if d < 1 or d > n:
        raise ParameterError(f"complete graph needs 1 <= d <= n, got n={n}, d={d}")
    return DGraph(n, d, frozenset(combinations(range(1, n + 1), d)))


def link(G: DGraph, S: Iterable[int]) -> DGraph:
    """The link graph G(S) of uniformity d - |S|.

    Vertices keep their labels; the returned graph still lives on [n] but no
    edge touches S.
    """
    S = set(S)
    if len(S) > G.d:
        raise ParameterError(f"|S| = {len(S)} exceeds uniformity {G.d}")
    if any(v < 1 or v > G.n for v in S):
        raise ParameterError(f"S = {sorted(S)} is not a subset of [{G.n}]")
    rest = (tuple(v for v in e if v not in S) for e in G.edges if S.issubset(e))
    return DGraph(G.n, G.d - len(S), frozenset(rest))


def degree_profile(G: DGraph, i: int) -> tuple[int, int]:
    """(min, max) of |G(S)| over all i-subsets S of [n]."""
    if not 0 <= i <= G.d - 1:
        raise ParameterError(f"level i must lie in [0, {G.d - 1}], got {i}")
    if comb(G.n, i) == 0:
        raise ParameterError(f"no {i}-subsets of [{G.n}]")
    values = G.degree_counts(i).values()
    return min(values), max(values)


def min_codegree(G: DGraph) -> int:
    return degree_profile(G, G.d - 1)[0]


def max_codegree(G: DGraph) -> int:
    return degree_profile(G, G.d - 1)[1]


def load_graph(path: str | Path) -> DGraph:
    with open(path) as fh:
        return DGraph.from_json(json.load(fh))


def dump_graph(G: DGraph, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(G.to_json(), fh)
