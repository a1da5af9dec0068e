"""Extra-tight trails and tours.

For a vertex sequence v_1..v_k and a window start i, the covered sets are
e(i, s) = {v_i, ..., v_{i+d}} minus v_{i+s} for s = 1..d.  An open trail
covers the windows i = 1..k-d plus the final d-set e(k-d+1, d); a closed
tour covers i = 1..k with indices read modulo k.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .complex import FacetFamily
from .hypergraph import DGraph, Edge, ParameterError, complete


class InvalidSequenceError(ValueError):
    """A window of d+1 consecutive entries repeats a vertex."""


class SequenceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class VertexSeq:
    d: int
    entries: tuple[int, ...]
    closed: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(int(v) for v in self.entries))
        k = len(self.entries)
        if self.d < 1:
            raise ParameterError(f"uniformity must be >= 1, got {self.d}")
        if self.closed and k < self.d + 3:
            raise ParameterError(f"closed sequences need k >= d+3 = {self.d + 3}, got {k}")
        if not self.closed and 0 < k < self.d:
            raise ParameterError(f"open sequences need k >= d = {self.d} (or k = 0), got {k}")

    @classmethod
    def open(cls, entries: Iterable[int], d: int) -> "VertexSeq":
        return cls(d, tuple(entries), False)

    @classmethod
    def cycle(cls, entries: Iterable[int], d: int) -> "VertexSeq":
        return cls(d, tuple(entries), True)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def k(self) -> int:
        return len(self.entries)

    def reversed(self) -> "VertexSeq":
        return VertexSeq(self.d, self.entries[::-1], self.closed)

    def to_text(self) -> str:
        kind = "closed" if self.closed else "open"
        return f"{self.d} {self.k} {kind}\n{' '.join(map(str, self.entries))}\n"

    @classmethod
    def from_text(cls, text: str) -> "VertexSeq":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise SequenceFormatError("empty sequence file")
        head = lines[0].split()
        if len(head) != 3 or head[2] not in ("open", "closed"):
            raise SequenceFormatError(f"bad header {lines[0]!r}; expected 'd k open|closed'")
        try:
            d, k = int(head[0]), int(head[1])
            entries = [int(tok) for ln in lines[1:] for tok in ln.split()]
        except ValueError as exc:
            raise SequenceFormatError(str(exc)) from exc
        if len(entries) != k:
            raise SequenceFormatError(f"header announces {k} entries, found {len(entries)}")
        try:
            return cls(d, tuple(entries), head[2] == "closed")
        except ParameterError as exc:
            raise SequenceFormatError(str(exc)) from exc


def _windows(seq: VertexSeq) -> list[int]:
    if seq.closed:
        return list(range(seq.k))
    return list(range(max(seq.k - seq.d, 0)))


def _window(seq: VertexSeq, start: int) -> tuple[int, ...]:
    k, ent = seq.k, seq.entries
    if seq.closed:
        return tuple(ent[(start + j) % k] for j in range(seq.d + 1))
    return ent[start : start + seq.d + 1]


def bad_windows(seq: VertexSeq) -> list[tuple[int, tuple[int, ...]]]:
    """(1-based start, window) for every window of d+1 entries with a repeat."""
    bad = []
    for s in _windows(seq):
        w = _window(seq, s)
        if len(set(w)) != len(w):
            bad.append((s + 1, w))
    if not seq.closed and seq.k == seq.d and len(set(seq.entries)) != seq.d:
        bad.append((1, seq.entries))
    return bad


def _enumerate(seq: VertexSeq) -> list[tuple[int, int, Edge]]:
    out = []
    d = seq.d
    for s in _windows(seq):
        w = _window(seq, s)
        for sigma in range(1, d + 1):
            out.append((s + 1, sigma, tuple(sorted(w[:sigma] + w[sigma + 1 :]))))
    if not seq.closed and seq.k >= d:
        out.append((seq.k - d + 1, d, tuple(sorted(seq.entries[seq.k - d :]))))
    return out


def covered_edges(seq: VertexSeq) -> list[tuple[int, int, Edge]]:
    """All (iota, sigma, edge) in (iota, sigma) order; 1-based indices."""
    bad = bad_windows(seq)
    if bad:
        start, w = bad[0]
        raise InvalidSequenceError(f"window starting at position {start} repeats a vertex: {w}")
    return _enumerate(seq)


def edge_set(seq: VertexSeq) -> set[Edge]:
    return {e for _, _, e in covered_edges(seq)}


@dataclass
class CoverageReport:
    covered: list[tuple[int, int, Edge]]
    duplicates: list[tuple[Edge, list[tuple[int, int]]]] = field(default_factory=list)
    missing_from_host: list[tuple[int, int, Edge]] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.duplicates and not self.missing_from_host

    @property
    def edges(self) -> set[Edge]:
        return {e for _, _, e in self.covered}

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "covered": [[i, s, list(e)] for i, s, e in self.covered],
            "duplicates": [
                {"edge": list(e), "positions": [list(p) for p in where]}
                for e, where in self.duplicates
            ],
            "missing_from_host": [[i, s, list(e)] for i, s, e in self.missing_from_host],
        }


def validate(seq: VertexSeq, host: DGraph) -> CoverageReport:
    """Every covered set must be a distinct edge of ``host``.

    Sets that collapse below size d (a repeated vertex inside a window)
    can never be host edges, so they land in ``missing_from_host``.
    """
    if host.d != seq.d:
        raise ParameterError(f"host uniformity {host.d} differs from sequence uniformity {seq.d}")
    covered = _enumerate(seq)
    positions: dict[Edge, list[tuple[int, int]]] = {}
    for i, s, e in covered:
        positions.setdefault(e, []).append((i, s))
    dups = [(e, where) for e, where in positions.items() if len(where) > 1]
    dups.sort(key=lambda item: item[1][0])
    missing = [(i, s, e) for i, s, e in covered if len(set(e)) != seq.d or e not in host.edges]
    return CoverageReport(covered, dups, missing)


def ends(seq: VertexSeq) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if seq.closed:
        raise ValueError("a closed tour has no ends")
    if seq.k < seq.d:
        raise ValueError("sequence shorter than d has no ends")
    return seq.entries[: seq.d], seq.entries[seq.k - seq.d :]


def trail_degrees(seq: VertexSeq) -> dict[int, int]:
    """How many covered sets contain each label (raw enumeration count)."""
    counts: Counter[int] = Counter()
    for _, _, e in covered_edges(seq):
        counts.update(e)
    return dict(sorted(counts.items()))


def predicted_degrees(seq: VertexSeq) -> Optional[dict[int, int]]:
    """Degrees from the closed-form position rule, or None outside its hypotheses.

    Every interior (or tour) occurrence contributes d^2; the entry at
    distance i in [d] from either end of a trail contributes i(d-1)+1.
    Requires k >= d+3 for tours and, for trails, k >= 2d with the 2d end
    entries pairwise distinct.
    """
    d, k = seq.d, seq.k
    out: Counter[int] = Counter()
    if seq.closed:
        if k < d + 3:
            return None
        for v in seq.entries:
            out[v] += d * d
        return dict(sorted(out.items()))
    if k < 2 * d:
        return None
    end_labels = seq.entries[:d] + seq.entries[k - d :]
    if len(set(end_labels)) != 2 * d:
        return None
    for pos, v in enumerate(seq.entries, start=1):
        i = min(pos, k + 1 - pos)
        out[v] += i * (d - 1) + 1 if i <= d else d * d
    return dict(sorted(out.items()))


def is_straight(seq: VertexSeq) -> bool:
    """True iff the open sequence is an extra-tight trail of K_n, n = max entry."""
    if seq.closed:
        raise ValueError("straightness is defined for open sequences")
    if seq.k == 0:
        return True
    n = max(seq.entries)
    if min(seq.entries) < 1 or n < seq.d:
        return False
    return validate(seq, complete(n, seq.d)).valid


def facets_of(seq: VertexSeq) -> FacetFamily:
    """The windows of d+1 consecutive entries as a facet family."""
    bad = bad_windows(seq)
    if bad:
        start, w = bad[0]
        raise InvalidSequenceError(f"window starting at position {start} repeats a vertex: {w}")
    n = max(seq.entries) if seq.entries else 0
    facets = {tuple(sorted(_window(seq, s))) for s in _windows(seq)}
    return FacetFamily(n, seq.d, frozenset(facets))


def load_sequence(path) -> VertexSeq:
    with open(path) as fh:
        return VertexSeq.from_text(fh.read())


def report_json(report: CoverageReport) -> str:
    return json.dumps(report.to_json())
