"""Divisibility vectors and the degree congruences for tours and trails."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import comb, gcd
from typing import Sequence

from .hypergraph import DGraph, ParameterError
from .trails import VertexSeq, edge_set


@dataclass(frozen=True)
class DivVector:
    g: tuple[int, ...]

    def __getitem__(self, i: int) -> int:
        return self.g[i]

    def __len__(self) -> int:
        return len(self.g)


def _gcd_nonzero(values) -> int:
    # zeros are ignored; an all-zero class gives 0
    return reduce(gcd, (v for v in values if v), 0)


def div_vector(F: DGraph) -> DivVector:
    """g_i = gcd of |F(S)| over all i-subsets S, for i = 0..d-1."""
    if not F.edges:
        raise ValueError("divisibility vector of an empty graph is undefined")
    return DivVector(tuple(_gcd_nonzero(F.degree_counts(i).values()) for i in range(F.d)))


def _divides(g: int, value: int) -> bool:
    return value == 0 if g == 0 else value % g == 0


def is_divisible(G: DGraph, F: DGraph) -> bool:
    """Whether Deg(F)_i divides |G(S)| for every level i and every i-set S."""
    if G.d != F.d:
        raise ParameterError(f"uniformity mismatch: {G.d} vs {F.d}")
    vec = div_vector(F)
    for i in range(G.d):
        g = vec[i]
        if g == 0:
            continue
        if any(not _divides(g, c) for c in G.degree_counts(i).values()):
            return False
    return True


@dataclass
class ResidueRow:
    degree: int
    residue: int
    target: int

    @property
    def ok(self) -> bool:
        return self.residue == self.target


@dataclass
class FeasibilityReport:
    feasible: bool
    modulus: int
    table: dict[int, ResidueRow]
    reason: str = ""

    def __bool__(self) -> bool:
        return self.feasible

    @property
    def witness(self) -> list[int]:
        """Vertices whose residue misses its target."""
        return [v for v, row in self.table.items() if not row.ok]

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "modulus": self.modulus,
            "reason": self.reason,
            "table": {str(v): [r.degree, r.residue, r.target] for v, r in self.table.items()},
        }


def _residue_table(G: DGraph, targets: dict[int, int]) -> dict[int, ResidueRow]:
    m = G.d * G.d
    deg = G.vertex_degrees()
    return {v: ResidueRow(deg[v], deg[v] % m, targets.get(v, 0) % m) for v in G.vertices}


def tour_feasible(G: DGraph) -> FeasibilityReport:
    """Every vertex degree divisible by d^2."""
    table = _residue_table(G, {})
    bad = [v for v, row in table.items() if not row.ok]
    reason = f"degrees of {bad} not divisible by {G.d ** 2}" if bad else ""
    return FeasibilityReport(not bad, G.d * G.d, table, reason)


def end_targets(start: Sequence[int], finish: Sequence[int], d: int) -> dict[int, int]:
    """Target residues for a trail that begins with ``start`` and ends with ``finish``.

    The i-th entry from either end (i = 1..d) must have degree i(d-1)+1
    modulo d^2; ``finish`` is given in trail order, so its last entry is
    the one at distance 1.
    """
    targets = {}
    for i, v in enumerate(start, start=1):
        targets[v] = i * (d - 1) + 1
    for i, v in enumerate(reversed(tuple(finish)), start=1):
        targets[v] = i * (d - 1) + 1
    return targets


def trail_feasible(G: DGraph, start: Sequence[int], finish: Sequence[int]) -> FeasibilityReport:
    """Degree congruences for an Euler trail with the given end tuples."""
    d = G.d
    start, finish = tuple(start), tuple(finish)
    if len(start) != d or len(finish) != d:
        raise ParameterError(f"end tuples must have length {d}")
    if len(set(start)) != d or len(set(finish)) != d:
        raise ParameterError("end tuples must consist of distinct vertices")
    if set(start) & set(finish):
        raise ParameterError(f"end tuples {start} and {finish} are not disjoint")
    for e in (start, finish):
        if tuple(sorted(e)) not in G.edges:
            raise ParameterError(f"end {e} is not an edge of the graph")
    table = _residue_table(G, end_targets(start, finish, d))
    bad = [v for v, row in table.items() if not row.ok]
    reason = f"residues of {bad} miss their targets" if bad else ""
    return FeasibilityReport(not bad, d * d, table, reason)


def compute_s(n: int, d: int) -> int:
    """The s in [0, d-1] with n*C(n-1, d-1) = d(s+1) mod d^2."""
    if not 2 <= d < n:
        raise ParameterError(f"need 2 <= d < n, got n={n}, d={d}")
    total = n * comb(n - 1, d - 1)
    for s in range(d):
        if (total - d * (s + 1)) % (d * d) == 0:
            return s
    raise AssertionError("handshake divisibility violated")  # d | n*C(n-1,d-1) always


def extra_tight_cycle(f: int, d: int) -> DGraph:
    """Edge set of the extra-tight cycle on (1, ..., f)."""
    return DGraph(f, d, frozenset(edge_set(VertexSeq.cycle(range(1, f + 1), d))))


def extra_tight_path(order: int, d: int) -> DGraph:
    """Edge set of the extra-tight path on (1, ..., order)."""
    return DGraph(order, d, frozenset(edge_set(VertexSeq.open(range(1, order + 1), d))))
