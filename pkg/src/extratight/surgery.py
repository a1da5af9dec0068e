"""Constructive surgery on trails and complexes.

Gluing trails through connector vertices, turns on straight complexes,
absorbing a cycle into a trail (with the two exchanged edge families),
label swaps and switcher verification, the degree-fixing digraph and the
turn plan that combines them.
"""

from __future__ import annotations

import logging
from bisect import bisect
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .complex import FacetFamily, dual_graph, shadow
from .divisibility import compute_s, trail_feasible, FeasibilityReport
from .hypergraph import DGraph, Edge, ParameterError, as_edge, complete
from .trails import VertexSeq, edge_set, ends, validate

log = logging.getLogger(__name__)


class InfeasibleError(RuntimeError):
    """A constructive step found no admissible choice."""

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message)
        self.step = step


class PreconditionError(ValueError):
    """The input violates a stated precondition."""


# --------------------------------------------------------------------------
# incremental trail extension


def appended_edges(prefix: Sequence[int], v: int, d: int) -> list[Edge]:
    """Covered sets that appear when ``v`` is appended to an open trail ``prefix``.

    Appending adds exactly d sets once the prefix has d entries: the d-1
    sets of the newly completed window that skip an interior entry, and the
    new terminal d-set.  The window's first d entries were already the old
    terminal set.
    """
    m = len(prefix)
    if m + 1 < d:
        return []
    if m + 1 == d:
        return [as_edge((*prefix, v))]
    window = (*prefix[m - d :], v)
    out = [as_edge(window[:s] + window[s + 1 :]) for s in range(1, d)]
    out.append(as_edge(window[1:]))
    return out


# --------------------------------------------------------------------------
# gluing


def glue(
    A: VertexSeq,
    B: VertexSeq,
    G: DGraph,
    U: Iterable[int],
    max_nodes: int = 200_000,
) -> VertexSeq:
    """Join A and B through 2d distinct connector vertices taken from U.

    Connectors are chosen lowest-first with backtracking.  Every new
    covered set must be an edge of G not covered by A or B.
    """
    d = G.d
    if A.d != d or B.d != d or A.closed or B.closed:
        raise PreconditionError("A and B must be open sequences of the host's uniformity")
    a_edges = _valid_edges(A, G, "A")
    b_edges = _valid_edges(B, G, "B")
    if a_edges & b_edges:
        raise PreconditionError(f"A and B share edges: {sorted(a_edges & b_edges)[:5]}")
    U = sorted(set(U))
    blocked = set(A.entries[-d:]) | set(B.entries[:d])
    pool = [u for u in U if u not in blocked]
    b_head = B.entries[:d]
    b_first = as_edge(b_head) if len(B) else None
    taken = a_edges | b_edges
    seq = list(A.entries)
    chosen: list[int] = []
    new: set[Edge] = set()
    nodes = 0
    deepest = 0

    def fits(prefix: list[int], v: int, extra_ok: Optional[Edge] = None) -> Optional[list[Edge]]:
        if v in prefix[len(prefix) - d :]:
            return None
        added = appended_edges(prefix, v, d)
        for e in added:
            if e == extra_ok:
                continue
            if e not in G.edges or e in taken or e in new:
                return None
        if len(set(added)) != len(added):
            return None
        return [e for e in added if e != extra_ok]

    def close_with_b() -> bool:
        prefix = list(seq)
        added: list[Edge] = []
        for j, b in enumerate(b_head):
            got = fits(prefix, b, b_first if j == d - 1 else None)
            if got is None or set(got) & set(added):
                return False
            added.extend(got)
            prefix.append(b)
        return True

    def extend(level: int) -> bool:
        nonlocal nodes, deepest
        deepest = max(deepest, level)
        if level == 2 * d:
            return not b_head or close_with_b()
        for v in pool:
            if v in chosen:
                continue
            nodes += 1
            if nodes > max_nodes:
                raise InfeasibleError(f"glue exceeded {max_nodes} nodes at connector {deepest + 1}", deepest + 1)
            got = fits(seq, v)
            if got is None:
                continue
            seq.append(v)
            chosen.append(v)
            new.update(got)
            if extend(level + 1):
                return True
            seq.pop()
            chosen.pop()
            new.difference_update(got)
        return False

    if not extend(0):
        raise InfeasibleError(f"no admissible connector at step {deepest + 1} of {2 * d}", deepest + 1)
    out = VertexSeq.open((*seq, *B.entries), d)
    report = validate(out, G)
    assert report.valid, report.to_json()
    return out


def _valid_edges(S: VertexSeq, G: DGraph, name: str) -> set[Edge]:
    if len(S) == 0:
        return set()
    report = validate(S, G)
    if not report.valid:
        raise PreconditionError(f"{name} is not an extra-tight trail in the host")
    return report.edges


# --------------------------------------------------------------------------
# turns


def turn_sets(run: Sequence[int], d: int) -> tuple[list[Edge], list[Edge]]:
    """(gained, lost) d-sets of the turn on the straight run v_1..v_{2d+4}.

    The facet {v_{d+3},...,v_{2d+3}} is traded for {v_{d+2},v_{d+4},...,v_{2d+3}};
    the d-1 sets skipping v_i, i in d+4..2d+2, change owner from v_{d+3} to v_{d+2}.
    """
    v = (None, *run)  # 1-based
    core = [v[j] for j in range(d + 4, 2 * d + 4)]
    gained, lost = [], []
    for i in range(d + 4, 2 * d + 3):
        rest = [x for x in core if x != v[i]]
        gained.append(as_edge([v[d + 2], *rest]))
        lost.append(as_edge([v[d + 3], *rest]))
    return gained, lost


def apply_turn(F: FacetFamily, run: Sequence[int]) -> tuple[FacetFamily, dict[int, int]]:
    """Replace one facet of a straight stretch so that the dual stays a path.

    Returns the new family and the change of every vertex's shadow degree
    (new minus old), which is +(d-1) at v_{d+2}, -(d-1) at v_{d+3}, 0 else.
    """
    d = F.d
    run = tuple(run)
    if len(run) != 2 * d + 4:
        raise PreconditionError(f"a turn needs 2d+4 = {2 * d + 4} vertices, got {len(run)}")
    dual = dual_graph(F)
    if dual.kind != "path":
        raise PreconditionError(f"dual graph is a {dual.kind}, not a path")
    stretch = [as_edge(run[i : i + d + 1]) for i in range(d + 4)]
    order = dual.path_order()
    index = {f: i for i, f in enumerate(order)}
    missing = [f for f in stretch if f not in index]
    if missing:
        raise PreconditionError(f"facet {missing[0]} of the run is not in the family")
    pos = [index[f] for f in stretch]
    step = pos[1] - pos[0]
    if abs(step) != 1 or any(b - a != step for a, b in zip(pos, pos[1:])):
        raise PreconditionError("run facets are not consecutive on the dual path")
    gained, lost = turn_sets(run, d)
    present = shadow(F).edges
    for e in gained:
        if e in present:
            raise PreconditionError(f"d-set {e} already belongs to the complex", )
    if run[d + 1] == run[2 * d + 2]:
        raise PreconditionError("v_{d+2} and v_{2d+3} coincide; the new facet is degenerate")
    old = as_edge(run[d + 2 : 2 * d + 3])
    new = as_edge((run[d + 1], *run[d + 3 : 2 * d + 3]))
    F2 = FacetFamily(F.n, d, (F.facets - {old}) | {new})
    before = Counter(v for e in present for v in e)
    after = Counter(v for e in shadow(F2).edges for v in e)
    delta = {v: after[v] - before[v] for v in range(1, F.n + 1)}
    return F2, delta


# --------------------------------------------------------------------------
# cycle insertion and switchers


@dataclass(frozen=True)
class ExchangePair:
    E1: frozenset[Edge]
    E2: frozenset[Edge]
    anchors: tuple[tuple[int, ...], int, int] = ((), 0, 0)

    def to_json(self) -> dict:
        us, w0, wd = self.anchors
        return {
            "E1": [list(e) for e in sorted(self.E1)],
            "E2": [list(e) for e in sorted(self.E2)],
            "anchors": {"u": list(us), "w0": w0, "wd": wd},
        }


def exchange_pair(us: Sequence[int], w0: int, wd: int) -> ExchangePair:
    """E1/E2 for anchors u_0..u_d and w_0, w_d.

    E1 are the sets newly covered once the cycle is spliced in, E2 the sets
    of trail and cycle that skip one of u_1..u_{d-1} and get lost.
    """
    us = tuple(us)
    d = len(us) - 1
    if d < 1:
        raise ParameterError("need anchors u_0..u_d with d >= 1")
    mids = us[1:d]
    E1, E2 = set(), set()
    for i in range(d - 1):
        rest = mids[:i] + mids[i + 1 :]
        E1.add(as_edge((us[0], *rest, wd)))
        E1.add(as_edge((w0, *rest, us[d])))
        E2.add(as_edge((w0, *rest, wd)))
        E2.add(as_edge((us[0], *rest, us[d])))
    return ExchangePair(frozenset(E1), frozenset(E2), (us, w0, wd))


def insert_cycle(trail: VertexSeq, cycle: VertexSeq, at: int) -> tuple[VertexSeq, ExchangePair]:
    """Splice ``cycle`` into ``trail`` at the run (w_0, u_1..u_{d-1}, w_d).

    ``at`` is the 0-based index of w_0 in the trail.  The cycle must contain
    u_1..u_{d-1} consecutively; it is rotated to (u_0, u_1, ..., u_d, c_1, ..., c_k)
    and the trail becomes (..., w_0, u_1..u_{d-1}, u_d, c_1..c_k, u_0, u_1..u_{d-1}, w_d, ...).
    """
    d = trail.d
    if cycle.d != d or trail.closed or not cycle.closed:
        raise PreconditionError("need an open trail and a closed cycle of equal uniformity")
    t = trail.entries
    if not 0 <= at or at + d >= len(t):
        raise PreconditionError(f"run of length {d + 1} at index {at} leaves the trail")
    w0, mids, wd = t[at], t[at + 1 : at + d], t[at + d]
    c = cycle.entries
    k = len(c)
    start = None
    for j in range(k):
        if tuple(c[(j + 1 + i) % k] for i in range(d - 1)) == mids:
            start = j
            break
    if start is None:
        raise PreconditionError(f"cycle does not contain the run {mids} consecutively")
    rot = tuple(c[(start + i) % k] for i in range(k))
    us = rot[: d + 1]
    new = t[: at + d] + rot[d:] + rot[:d] + t[at + d :]
    return VertexSeq.open(new, d), exchange_pair(us, w0, wd)


def swap_labels(seq: VertexSeq, a: int, b: int) -> VertexSeq:
    swap = {a: b, b: a}
    return VertexSeq(seq.d, tuple(swap.get(v, v) for v in seq.entries), seq.closed)


@dataclass
class SwitcherCertificate:
    clauses: dict[str, bool]
    details: dict[str, list] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.clauses.values())

    def __bool__(self) -> bool:
        return self.ok

    @property
    def failed(self) -> list[str]:
        return [name for name, good in self.clauses.items() if not good]

    def to_json(self) -> dict:
        return {"ok": self.ok, "clauses": self.clauses, "failed": self.failed,
                "details": {k: [list(e) for e in v] for k, v in self.details.items()}}


def verify_switcher(T1: VertexSeq, T2: VertexSeq, X: ExchangePair) -> SwitcherCertificate:
    """Check that (T1, T2) is an (E1, E2)-switcher by full enumeration."""
    n = max((*T1.entries, *T2.entries, 1))
    host = complete(max(n, T1.d), T1.d)
    r1, r2 = validate(T1, host), validate(T2, host)
    both_valid = r1.valid and r2.valid and not T1.closed and not T2.closed
    s1, s2 = r1.edges, r2.edges
    only1, only2 = s1 - s2, s2 - s1
    verts = {v for e in X.E1 | X.E2 for v in e}
    inside = sorted(e for e in s1 - X.E1 if set(e) <= verts)
    clauses = {
        "valid_trails": both_valid,
        "t1_minus_t2": only1 == set(X.E1),
        "t2_minus_t1": only2 == set(X.E2),
        "same_ends": both_valid and len(T1) >= T1.d and len(T2) >= T2.d and ends(T1) == ends(T2),
        "independent": not inside,
    }
    details = {"t1_minus_t2": sorted(only1), "t2_minus_t1": sorted(only2), "inside": inside}
    return SwitcherCertificate(clauses, details)


def small_switcher(
    u0: int, u2: int, w0: int, w2: int, x1: int, x2: int, x3: int, u1: Optional[int] = None
) -> tuple[VertexSeq, VertexSeq, ExchangePair]:
    """The explicit d = 2 switcher on seven labels.

    T1 = (x1, w2, u0, x2, x3, w0, u2, x1); T2 swaps u0 and w0.
    """
    T1 = VertexSeq.open((x1, w2, u0, x2, x3, w0, u2, x1), 2)
    T2 = swap_labels(T1, u0, w0)
    us = (u0, u1 if u1 is not None else 0, u2)
    X = ExchangePair(
        frozenset({as_edge((u0, w2)), as_edge((w0, u2))}),
        frozenset({as_edge((w0, w2)), as_edge((u0, u2))}),
        (us, w0, w2),
    )
    return T1, T2, X


# --------------------------------------------------------------------------
# degree fixing


@dataclass
class FixDigraph:
    arcs: list[tuple[int, int]]
    bound: int

    def out_degree(self) -> Counter:
        return Counter(a for a, _ in self.arcs)

    def in_degree(self) -> Counter:
        return Counter(b for _, b in self.arcs)

    def load(self, v: int) -> int:
        return sum((a == v) + (b == v) for a, b in self.arcs)

    def to_json(self) -> dict:
        return {"arcs": [list(a) for a in self.arcs], "bound": self.bound}


def residue_targets(n: int, d: int, start: Sequence[int], finish: Sequence[int]) -> dict[int, int]:
    """Residue targets: i(d-1)+1 at the i-th vertex from either end, else 0."""
    targets = dict.fromkeys(range(1, n + 1), 0)
    for i, v in enumerate(start, start=1):
        targets[v] = i * (d - 1) + 1
    for i, v in enumerate(reversed(tuple(finish)), start=1):
        targets[v] = i * (d - 1) + 1
    return targets


def fix_digraph(
    G: DGraph,
    M: Iterable[Iterable[int]] = (),
    start: Optional[Sequence[int]] = None,
    finish: Optional[Sequence[int]] = None,
    method: str = "sweep",
) -> FixDigraph:
    """A digraph D with deg_G(v) + (out(v) - in(v))(d-1) = target(v) mod d^2.

    ``G`` is the graph after the matching M was removed.  ``start`` defaults
    to (1..d) and ``finish`` (in trail order) to (n-d+1..n).

    method="sweep" walks v = 1..n-1, fixing v with a arcs (v, u), (u, v+1);
    the last vertex closes by the handshake count.  Helper vertices u are
    chosen lowest-first, preferring vertices that are lightly loaded, not
    yet joined to v or v+1, and outside the ends and M; those preferences
    are relaxed only when nothing else is left.  method="direct" routes the
    required net flow straight from surplus to deficit vertices, which needs
    far fewer arcs.
    """
    n, d = G.n, G.d
    mod = d * d
    start = tuple(start) if start is not None else tuple(range(1, d + 1))
    finish = tuple(finish) if finish is not None else tuple(range(n - d + 1, n + 1))
    M = [as_edge(e) for e in M]
    if sum(G.vertex_degrees().values()) % mod != d % mod:
        raise PreconditionError(f"sum of degrees is not = d mod d^2 (d={d}); remove the matching first")
    targets = residue_targets(n, d, start, finish)
    deg = G.vertex_degrees()
    inv = pow(d - 1, -1, mod) if d > 1 else 0
    bound = 5 * d * d
    forbidden_pairs: set[Edge] = set(M) | {as_edge(start[:2]), as_edge(finish[-2:])} if d == 2 else set()
    avoid = set(start) | set(finish) | {v for e in M for v in e}

    arcs: list[tuple[int, int]] = []
    load: Counter[int] = Counter()
    net: Counter[int] = Counter()
    pairs: Counter[Edge] = Counter()

    def add(a: int, b: int) -> None:
        arcs.append((a, b))
        load[a] += 1
        load[b] += 1
        net[a] += 1
        net[b] -= 1
        pairs[as_edge((a, b))] += 1

    def pair_ok(a: int, b: int) -> bool:
        return a != b and as_edge((a, b)) not in forbidden_pairs

    if method == "sweep":
        for v in range(1, n):
            need = (targets[v] - deg[v] - net[v] * (d - 1)) * inv % mod
            for _ in range(need):
                best = None
                for u in range(1, n + 1):
                    if u in (v, v + 1) or not (pair_ok(v, u) and pair_ok(u, v + 1)):
                        continue
                    if load[u] + 2 > bound:
                        continue
                    repeat = pairs[as_edge((v, u))] + pairs[as_edge((u, v + 1))]
                    key = (repeat, load[u] >= 3 * mod - 1, u in avoid, u)
                    if best is None or key < best[0]:
                        best = (key, u)
                if best is None:
                    raise InfeasibleError(f"no helper vertex for v={v}", v)
                add(v, best[1])
                add(best[1], v + 1)
    elif method == "direct":
        want = {v: (targets[v] - deg[v]) * inv % mod for v in range(1, n + 1)}
        want = {v: w - mod if w > mod // 2 else w for v, w in want.items()}
        excess = sum(want.values())
        order = sorted(want, key=lambda v: (-want[v], v)) if excess > 0 else sorted(want, key=lambda v: (want[v], v))
        i = 0
        while excess != 0:
            v = order[i % n]
            step = mod if excess < 0 else -mod
            want[v] += step
            excess += step
            i += 1
        surplus = [v for v in sorted(want) for _ in range(max(want[v], 0))]
        deficit = [v for v in sorted(want) for _ in range(max(-want[v], 0))]
        while surplus:
            a = surplus.pop(0)
            choice = next((b for b in deficit if pair_ok(a, b) and not pairs[as_edge((a, b))]), None)
            if choice is not None:
                deficit.remove(choice)
                add(a, choice)
                continue
            b = deficit.pop(0)
            mid = next(
                (x for x in range(1, n + 1)
                 if x not in (a, b) and pair_ok(a, x) and pair_ok(x, b)
                 and not pairs[as_edge((a, x))] and not pairs[as_edge((x, b))]
                 and load[x] + 2 <= bound),
                None,
            )
            if mid is None:
                raise InfeasibleError(f"cannot route a unit of flow from {a} to {b}", a)
            add(a, mid)
            add(mid, b)
    else:
        raise ParameterError(f"unknown method {method!r}")
    over = [v for v in range(1, n + 1) if load[v] > bound]
    if over:
        raise InfeasibleError(f"vertices {over} exceed the arc cap {bound}", over[0])
    return FixDigraph(arcs, bound)


# --------------------------------------------------------------------------
# the turn plan


@dataclass
class TurnPlan:
    n: int
    d: int
    sequence: tuple[int, ...]
    complex: FacetFamily
    residual: DGraph
    matching: list[Edge]
    ends: tuple[tuple[int, ...], tuple[int, ...]]
    digraph: FixDigraph
    residues: FeasibilityReport
    log: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "sequence": list(self.sequence),
            "facets": [list(f) for f in self.complex.sorted_facets()],
            "residual_edges": len(self.residual),
            "matching": [list(e) for e in self.matching],
            "ends": [list(self.ends[0]), list(self.ends[1])],
            "digraph": self.digraph.to_json(),
            "residues_ok": self.residues.feasible,
            "log": self.log,
        }


def choose_matching(n: int, d: int, s: int) -> list[Edge]:
    """s disjoint d-sets avoiding 1..d and n-d+1..n, lowest first."""
    pool = list(range(d + 1, n - d + 1))
    if s * d > len(pool):
        raise InfeasibleError(f"n={n} too small for a matching of size {s}")
    return [tuple(pool[i * d : (i + 1) * d]) for i in range(s)]


def _fill_sequence(
    n: int,
    d: int,
    arcs: Sequence[tuple[int, int]],
    G: DGraph,
    start: tuple[int, ...],
    finish: tuple[int, ...],
    cap: int,
    max_backtracks: int,
    order: str,
) -> tuple[tuple[int, ...], int]:
    """Fill the free entries of the turn sequence left to right with backtracking."""
    block = 2 * d + 4
    length = d + block * len(arcs)
    seq: list[Optional[int]] = [None] * length
    seq[:d] = start
    for i, (a, b) in enumerate(arcs):
        base = d + i * block
        # head of the arc receives the extra d-1 shadow degree
        seq[base + d + 1] = b
        seq[base + d + 2] = a
    fixed = [v is not None for v in seq]

    constraints: list[tuple[str, tuple[int, ...]]] = []
    for i in range(length - d):
        for sig in range(1, d + 1):
            constraints.append(("s", tuple(p for p in range(i, i + d + 1) if p != i + sig)))
    constraints.append(("s", tuple(range(length - d, length))))
    for i in range(len(arcs)):
        base = d + i * block
        core = [base + j - 1 for j in range(d + 4, 2 * d + 4)]
        for j in range(d + 4, 2 * d + 3):
            skip = base + j - 1
            constraints.append(("t", (base + d + 1, *[p for p in core if p != skip])))

    trigger: dict[int, list[tuple[int, ...]]] = {}
    pre_fixed = []
    for _, pos in constraints:
        open_pos = [p for p in pos if not fixed[p]]
        if open_pos:
            trigger.setdefault(max(open_pos), []).append(pos)
        else:
            pre_fixed.append(pos)

    allowed_edges = G.edges - {finish}
    used: set[Edge] = set()
    for pos in pre_fixed:
        e = as_edge(seq[p] for p in pos)
        if len(set(e)) != d or e not in allowed_edges or e in used:
            raise InfeasibleError(f"fixed d-set {e} is invalid or repeated")
        used.add(e)

    free = [p for p in range(length) if not fixed[p]]
    domain = [v for v in range(1, n + 1) if v not in finish]
    counts: Counter[int] = Counter(v for v in seq if v is not None)
    fixed_at: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for q in range(length):
        if fixed[q]:
            fixed_at[seq[q]].append(q)
    spare: Counter[int] = Counter()
    for e in allowed_edges - used:
        spare.update(e)
    if any(c > cap for c in counts.values()):
        raise InfeasibleError("turn vertices alone exceed the occurrence cap")

    def attempt(p: int, v: int) -> Optional[list[Edge]]:
        # a repeat within 2d positions always duplicates a d-set for d = 2
        # and is avoided as a heuristic for larger d
        for q in range(max(0, p - 2 * d), min(length, p + 2 * d + 1)):
            if q != p and seq[q] == v:
                return None
        if counts[v] >= cap:
            return None
        seq[p] = v
        added: list[Edge] = []
        for pos in trigger.get(p, ()):
            e = as_edge(seq[q] for q in pos)
            if len(set(e)) != d or e not in allowed_edges or e in used or e in added:
                seq[p] = None
                return None
            added.append(e)
        return added

    stack: list[tuple[int, int, list[Edge]]] = []  # (index into order, vertex, edges)
    order_at: dict[int, list[int]] = {}
    idx, nxt, backtracks = 0, 0, 0
    while idx < len(free):
        p = free[idx]
        placed = False
        if nxt == 0:
            # every later fixed occurrence of v will need d^2 unused edges at v;
            # rank by what is left after that reservation, then lowest label
            slack = {v: spare[v] - d * d * (len(fixed_at[v]) - bisect(fixed_at[v], p)) for v in domain}
            keep = [v for v in domain if slack[v] >= d * d]
            order_at[idx] = keep if order == "lowest" else sorted(keep, key=lambda v: (-slack[v], v))
        ranked = order_at[idx]
        for j in range(nxt, len(ranked)):
            v = ranked[j]
            added = attempt(p, v)
            if added is None:
                continue
            used.update(added)
            for e in added:
                spare.subtract(e)
            counts[v] += 1
            stack.append((j, v, added))
            placed = True
            break
        if placed:
            idx, nxt = idx + 1, 0
            continue
        backtracks += 1
        if backtracks > max_backtracks or not stack:
            raise InfeasibleError(f"sequence fill dead-ended at position {p} after {backtracks} backtracks", p)
        seq[p] = None
        idx -= 1
        j, v, added = stack.pop()
        used.difference_update(added)
        for e in added:
            spare.update(e)
        counts[v] -= 1
        seq[free[idx]] = None
        nxt = j + 1
    return tuple(int(v) for v in seq), backtracks


def plan_turn_sequence(
    n: int,
    d: int,
    method: str = "direct",
    occurrence_cap: Optional[int] = None,
    max_backtracks: int = 20_000,
    order: str = "auto",
) -> TurnPlan:
    """Build the short complex with turns and its residual graph.

    The vertex sequence is (1..d) followed by one block of 2d+4 entries per
    digraph arc.  Entries d+2 and d+3 of a block carry the arc (head, then
    tail); all other entries are filled left to right with backtracking.
    Candidates must leave d^2 unused edges for each later fixed occurrence
    of the same vertex; order="slack" ranks them by that margin,
    order="lowest" by label, and order="auto" tries both.  Every d-set of the straight complex and every set gained
    by a turn must be a distinct edge of K_n minus M and minus the final
    end set.  After the turns are applied, the residual graph (uncovered
    d-sets plus the last window's d-set) satisfies the trail congruences
    with ends (last d entries) and (n-d+1..n).
    """
    if not 2 <= d < n:
        raise ParameterError(f"need 2 <= d < n, got n={n}, d={d}")
    cap = occurrence_cap if occurrence_cap is not None else 24 * d**3
    lines: list[str] = []
    s = compute_s(n, d)
    M = choose_matching(n, d, s)
    G = complete(n, d).minus(M)
    start = tuple(range(1, d + 1))
    finish = tuple(range(n - d + 1, n + 1))
    D = fix_digraph(G, M, start, finish, method=method)
    lines.append(f"s={s} matching={M} arcs={len(D.arcs)}")

    block = 2 * d + 4
    orders = ("slack", "lowest") if order == "auto" else (order,)
    failure: Optional[InfeasibleError] = None
    for attempt_order in orders:
        try:
            full, backtracks = _fill_sequence(n, d, D.arcs, G, start, finish, cap, max_backtracks, attempt_order)
            break
        except InfeasibleError as exc:
            lines.append(f"fill with {attempt_order} order failed: {exc}")
            failure = exc
    else:
        assert failure is not None
        raise failure
    length = len(full)
    lines.append(f"sequence length {length}, {backtracks} backtracks ({attempt_order} order)")

    C = FacetFamily(n, d, frozenset(as_edge(full[i : i + d + 1]) for i in range(length - d)))
    for i in range(len(D.arcs)):
        base = d + i * block
        run = full[base : base + block]
        C, delta = apply_turn(C, run)
        moved = {v: x for v, x in delta.items() if x}
        lines.append(f"turn {i + 1}: run {run} shadow change {moved}")
    covered = shadow(C).edges
    tail = as_edge(full[-d:])
    residual = DGraph(n, d, (G.edges - covered) | {tail})
    end_a = full[-d:]
    residues = trail_feasible(residual, end_a, finish)
    lines.append(f"residual {len(residual)} edges, congruences {'hold' if residues.feasible else 'FAIL'}")
    for line in lines:
        log.info(line)
    return TurnPlan(n, d, full, C, residual, M, (end_a, finish), D, residues, lines)
