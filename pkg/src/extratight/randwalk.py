"""Fractional clique decompositions, the clique-weighted walk, path sampling
and a greedy approximate path decomposition.

The walk moves from the ordered d-tuple Z = (Y_{i-d+1}, ..., Y_i) to a new
vertex v with probability x(Z + v), where x is a fractional
K_{d+1}-decomposition.  Starting from a uniform ordered d-tuple every
window is again uniform over the ordered d-tuples of edges.
"""

from __future__ import annotations

import logging
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import comb, sqrt
from typing import Iterable, Optional, Sequence

import numpy as np

from .hypergraph import DGraph, Edge, ParameterError, as_edge
from .surgery import glue
from .trails import VertexSeq, edge_set, validate

log = logging.getLogger(__name__)

SUM_TOL = 1e-9


class InfeasibleDecomposition(ValueError):
    pass


class RejectionLimit(RuntimeError):
    pass


# --------------------------------------------------------------------------
# fractional decompositions


def cliques(G: DGraph) -> list[Edge]:
    """All (d+1)-sets whose d-subsets are all edges of G."""
    d = G.d
    found = set()
    for e in G.edges:
        for v in range(1, G.n + 1):
            if v in e:
                continue
            S = as_edge((*e, v))
            if S not in found and all(r in G.edges for r in combinations(S, d)):
                found.add(S)
    return sorted(found)


@dataclass
class FractionalDecomp:
    n: int
    d: int
    weights: dict[Edge, float]
    mu: float = 0.9
    method: str = ""
    residual: float = 0.0
    sweeps: int = 0

    def edge_sums(self, G: DGraph) -> dict[Edge, float]:
        sums = dict.fromkeys(G.edges, 0.0)
        for S, w in self.weights.items():
            for e in combinations(S, self.d):
                sums[e] += w
        return sums

    def max_residual(self, G: DGraph) -> float:
        return max((abs(s - 1.0) for s in self.edge_sums(G).values()), default=0.0)

    def is_normal(self, mu: Optional[float] = None) -> bool:
        mu = self.mu if mu is None else mu
        lo, hi = mu / self.n, 1.0 / (mu * self.n)
        return all(lo <= w <= hi for w in self.weights.values() if w > 0)

    def weight(self, S: Iterable[int]) -> float:
        return self.weights.get(as_edge(S), 0.0)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "mu": self.mu,
            "method": self.method,
            "residual": self.residual,
            "normal": self.is_normal(),
            "cliques": [{"clique": list(S), "weight": w} for S, w in sorted(self.weights.items())],
        }


def fractional_decomposition(
    G: DGraph, mu: float = 0.9, max_sweeps: int = 10_000, tol: float = SUM_TOL
) -> FractionalDecomp:
    """Clique weights with unit sum over every edge.

    Complete hosts get the closed form 1/(n-d).  Otherwise weights start at
    1/kappa (kappa = mean number of cliques per edge) and are rescaled edge
    by edge until every sum is within ``tol`` of 1; if that fails, a linear
    program decides feasibility.
    """
    n, d = G.n, G.d
    if not G.edges:
        raise InfeasibleDecomposition("empty host")
    if len(G) == comb(n, d):
        if n == d:
            raise InfeasibleDecomposition("K_d has no (d+1)-clique")
        w = 1.0 / (n - d)
        x = FractionalDecomp(n, d, {S: w for S in combinations(range(1, n + 1), d + 1)}, mu, "closed-form")
        x.residual = x.max_residual(G)
        return x
    K = cliques(G)
    edges = sorted(G.edges)
    eidx = {e: i for i, e in enumerate(edges)}
    members = [[eidx[r] for r in combinations(S, d)] for S in K]
    by_edge: list[list[int]] = [[] for _ in edges]
    for j, rs in enumerate(members):
        for i in rs:
            by_edge[i].append(j)
    bare = [edges[i] for i, js in enumerate(by_edge) if not js]
    if bare:
        raise InfeasibleDecomposition(f"edges in no clique: {bare[:5]}")
    kappa = sum(len(js) for js in by_edge) / len(edges)
    w = np.full(len(K), 1.0 / kappa)
    incidence = np.zeros((len(edges), len(K)))
    for j, rs in enumerate(members):
        incidence[rs, j] = 1.0
    residual, sweeps = np.inf, 0
    for sweeps in range(1, max_sweeps + 1):
        for i, js in enumerate(by_edge):
            s = w[js].sum()
            if s > 0:
                w[js] /= s
        residual = float(np.abs(incidence @ w - 1.0).max())
        if residual < tol:
            break
    method = "scaling"
    if residual >= tol:
        from scipy.optimize import linprog

        res = linprog(np.zeros(len(K)), A_eq=incidence, b_eq=np.ones(len(edges)),
                      bounds=(0, 1), method="highs")
        if res.status != 0:
            raise InfeasibleDecomposition(f"no fractional decomposition (scaling residual {residual:.3g})")
        w = res.x
        residual = float(np.abs(incidence @ w - 1.0).max())
        method = "lp"
    x = FractionalDecomp(n, d, {S: float(v) for S, v in zip(K, w) if v > 0}, mu, method, residual, sweeps)
    return x


# --------------------------------------------------------------------------
# the walk


@dataclass
class WalkState:
    history: tuple[int, ...]
    rng: np.random.Generator = field(repr=False)
    seed: Optional[int] = None
    d: int = 2

    @property
    def current(self) -> tuple[int, ...]:
        return self.history[-self.d :]


def start_walk(G: DGraph, seed: int) -> WalkState:
    """Initial ordered d-tuple, uniform among ordered d-tuples whose set is an edge."""
    rng = np.random.default_rng(seed)
    edges = sorted(G.edges)
    e = edges[rng.integers(len(edges))]
    order = rng.permutation(G.d)
    return WalkState(tuple(int(e[i]) for i in order), rng, seed, G.d)


def transition(x: FractionalDecomp, Z: Sequence[int], n: int) -> tuple[np.ndarray, np.ndarray]:
    """(vertices, probabilities) for the next step from the window Z."""
    zs = set(Z)
    verts = np.array([v for v in range(1, n + 1) if v not in zs])
    p = np.array([x.weight((*Z, v)) for v in verts])
    total = p.sum()
    if total <= 0:
        raise InfeasibleDecomposition(f"window {tuple(Z)} lies in no weighted clique")
    keep = p > 0
    return verts[keep], p[keep] / total


def walk_step(state: WalkState, x: FractionalDecomp, G: DGraph) -> WalkState:
    verts, p = transition(x, state.current, G.n)
    v = int(verts[np.searchsorted(np.cumsum(p), state.rng.random(), side="right").clip(max=len(p) - 1)])
    return WalkState((*state.history, v), state.rng, state.seed, state.d)


class _Chain:
    """Transition table over ordered d-tuples for vectorized sampling."""

    def __init__(self, G: DGraph, x: FractionalDecomp):
        n, d = G.n, G.d
        self.n, self.d = n, d
        self.states = [s for e in sorted(G.edges) for s in permutations(e)]
        self.index = {s: i for i, s in enumerate(self.states)}
        S = len(self.states)
        self.cum = np.zeros((S, n))
        self.succ = np.zeros((S, n), dtype=np.int64)
        for i, s in enumerate(self.states):
            row = np.zeros(n)
            for v in range(1, n + 1):
                if v in s:
                    continue
                w = x.weight((*s, v))
                if w > 0:
                    row[v - 1] = w
                    self.succ[i, v - 1] = self.index[(*s[1:], v)]
            total = row.sum()
            if total <= 0:
                raise InfeasibleDecomposition(f"state {s} has no successor")
            c = np.cumsum(row / total)
            last = int(np.flatnonzero(row)[-1])
            c[last:] = 1.0
            self.cum[i] = c

    def step(self, state: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        v = (self.cum[state] <= u[:, None]).sum(axis=1)
        return self.succ[state, v], v + 1


@dataclass
class StationarityReport:
    steps: int
    windows: int
    offsets: tuple[int, ...]
    p: float
    max_deviation: float
    tolerance: float
    frequencies: dict[tuple[int, ...], float]
    seed: int

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "seed": self.seed,
            "steps": self.steps,
            "windows": self.windows,
            "offsets": list(self.offsets),
            "expected": self.p,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "frequencies": {" ".join(map(str, k)): f for k, f in sorted(self.frequencies.items())},
        }


def stationarity_check(
    G: DGraph, x: FractionalDecomp, steps: int, seed: int, offsets: Optional[Sequence[int]] = None
) -> StationarityReport:
    """Empirical window frequencies against the uniform value 1/|ordered edges|.

    ``offsets`` picks positions i + j for j in offsets out of the d+1
    consecutive ones (default 0..d-1, the walk state itself).  The flag uses
    4 binomial standard errors.  This is a time average along one trajectory,
    so it only says something when the chain is ergodic (not for n = d+1).
    """
    d = G.d
    offsets = tuple(range(d)) if offsets is None else tuple(offsets)
    if len(offsets) != d or offsets[0] != 0 or list(offsets) != sorted(set(offsets)) or offsets[-1] > d:
        raise ParameterError(f"offsets must be d increasing values in 0..d starting at 0, got {offsets}")
    chain = _Chain(G, x)
    rng = np.random.default_rng(seed)
    state = np.array([rng.integers(len(chain.states))])
    span = offsets[-1]
    total = steps + d
    trace = np.empty(total, dtype=np.int64)
    trace[:d] = chain.states[int(state[0])]
    u = rng.random(steps).tolist()
    cur = int(state[0])
    cum, succ = chain.cum.tolist(), chain.succ.tolist()
    out = [0] * steps
    for i in range(steps):
        v = bisect_right(cum[cur], u[i])
        cur = succ[cur][v]
        out[i] = v + 1
    trace[d:] = out
    windows = total - span
    cols = np.stack([trace[j : j + windows] for j in offsets], axis=1)
    keys, counts = np.unique(cols, axis=0, return_counts=True)
    freq = {tuple(int(a) for a in k): c / windows for k, c in zip(keys, counts)}
    targets = chain.states
    p = 1.0 / len(targets)
    dev = max(abs(freq.get(s, 0.0) - p) for s in targets)
    stray = [k for k in freq if k not in chain.index]
    if stray:
        dev = max(dev, max(freq[k] for k in stray))
    tol = 4 * sqrt(p * (1 - p) / windows)
    return StationarityReport(steps, windows, offsets, p, float(dev), tol, freq, seed)


# --------------------------------------------------------------------------
# path sampling


@dataclass
class PathSample:
    paths: np.ndarray  # accepted rows, shape (m, t)
    tried: int

    @property
    def acceptance(self) -> float:
        return len(self.paths) / self.tried if self.tried else 0.0


def sample_paths(G: DGraph, x: FractionalDecomp, t: int, size: int, seed: int) -> PathSample:
    """Run ``size`` independent t-vertex walks and keep those with distinct vertices."""
    d = G.d
    if t < d:
        raise ParameterError(f"path order t={t} must be at least d={d}")
    chain = _Chain(G, x)
    rng = np.random.default_rng(seed)
    state = rng.integers(len(chain.states), size=size)
    walks = np.empty((size, t), dtype=np.int64)
    walks[:, :d] = np.array(chain.states)[state]
    for j in range(d, t):
        state, v = chain.step(state, rng.random(size))
        walks[:, j] = v
    srt = np.sort(walks, axis=1)
    distinct = (np.diff(srt, axis=1) != 0).all(axis=1)
    return PathSample(walks[distinct], size)


def sample_path(
    G: DGraph, x: FractionalDecomp, t: int, seed: int, max_tries: int = 100_000, batch: int = 256
) -> VertexSeq:
    """One walk of t vertices conditioned on all vertices being distinct."""
    rng = np.random.default_rng(seed)
    tried = 0
    while tried < max_tries:
        m = min(batch, max_tries - tried)
        got = sample_paths(G, x, t, m, int(rng.integers(2**63)))
        tried += m
        if len(got.paths):
            path = VertexSeq.open((int(v) for v in got.paths[0]), G.d)
            assert validate(path, G).valid
            return path
    raise RejectionLimit(f"no path of order {t} with distinct vertices in {max_tries} walks")


# --------------------------------------------------------------------------
# greedy approximate decomposition


@dataclass
class Packing:
    paths: list[VertexSeq]
    leftover: DGraph
    end_counts: Counter
    end_cap: int
    seed: int

    @property
    def covered(self) -> int:
        return sum(len(edge_set(p)) for p in self.paths)

    def max_codegree(self) -> int:
        """Largest number of leftover edges through a (d-1)-set."""
        d = self.leftover.d
        c: Counter = Counter()
        for e in self.leftover.edges:
            c.update(combinations(e, d - 1))
        return max(c.values(), default=0)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "paths": len(self.paths),
            "covered": self.covered,
            "leftover": len(self.leftover),
            "leftover_max_codegree": self.max_codegree(),
            "max_end_count": max(self.end_counts.values(), default=0),
            "end_cap": self.end_cap,
        }


def _end_sets(path: Sequence[int], d: int) -> list[Edge]:
    a, b = path[:d], path[-d:]
    return [as_edge(r) for e in (a, b) for r in combinations(e, d - 1)]


def greedy_approx_decomposition(
    G: DGraph,
    t: int,
    gamma: float = 0.25,
    seed: int = 0,
    patience: int = 200,
    rounds: int = 1000,
    search_nodes: int = 3000,
) -> Packing:
    """Pack edge-disjoint extra-tight paths of order t.

    Greedy phase: each path starts at a random edge (weighted by leftover
    degree) and is extended by the admissible vertex with the most leftover
    edges; after ``patience`` consecutive failures the phase ends.
    Repair phase: up to ``rounds`` times, two random paths are taken out and
    the freed edges are repacked by a bounded depth-first search
    (``search_nodes`` expansions per path).  A repair is kept when it packs
    at least as many paths and does not worsen (max leftover degree, sum of
    squared leftover degrees); the phase stops once the max leftover
    (d-1)-degree is at most gamma*n.  No (d-1)-set is allowed at more than
    gamma*n path ends.
    """
    n, d = G.n, G.d
    if t < 2 * d:
        raise ParameterError(f"path order t={t} must be at least 2d={2 * d}")
    rng = np.random.default_rng(seed)
    cap = max(1, int(gamma * n))
    state = _PackState(G, cap)
    failures = 0
    while failures < patience and state.free:
        pool = sorted(state.free)
        weights = np.array([sum(state.deg[v] for v in e) for e in pool], dtype=float)
        e = pool[rng.choice(len(pool), p=weights / weights.sum())]
        path = list(e)
        rng.shuffle(path)
        added: list[Edge] = [as_edge(path)]
        while len(path) < t:
            options = []
            for v in range(1, n + 1):
                if v in path:
                    continue
                new = _appended(path, v, d)
                if all(s in state.free and s not in added for s in new):
                    options.append((state.deg[v], rng.random(), v, new))
            if not options:
                break
            _, _, v, new = max(options)
            path.append(v)
            added.extend(new)
        if len(path) < t or not state.fits_ends(path):
            failures += 1
            continue
        failures = 0
        state.add(path)
    target = gamma * n
    for _ in range(rounds):
        if len(state.paths) < 2 or state.codegree_max() <= target:
            break
        state.repair(rng, t, search_nodes)
    paths = [VertexSeq.open(p, d) for p in state.paths]
    return Packing(paths, DGraph(n, d, frozenset(state.free)), +state.ends, cap, seed)


class _PackState:
    """Paths, free edges, leftover (d-1)-degrees and end counts, kept in sync."""

    def __init__(self, G: DGraph, cap: int):
        self.n, self.d, self.cap = G.n, G.d, cap
        self.free: set[Edge] = set(G.edges)
        self.deg: Counter = Counter()  # leftover vertex degree (search ordering)
        self.co: Counter = Counter()  # leftover (d-1)-degree
        for e in self.free:
            self.deg.update(e)
            self.co.update(combinations(e, self.d - 1))
        self.ends: Counter = Counter()
        self.paths: list[list[int]] = []

    def fits_ends(self, path: Sequence[int]) -> bool:
        return all(self.ends[r] < self.cap for r in _end_sets(path, self.d))

    def _take(self, edges: Iterable[Edge], sign: int) -> None:
        for s in edges:
            if sign > 0:
                self.free.discard(s)
            else:
                self.free.add(s)
            for v in s:
                self.deg[v] -= sign
            for r in combinations(s, self.d - 1):
                self.co[r] -= sign

    def add(self, path: list[int]) -> None:
        self._take(edge_set(VertexSeq.open(path, self.d)), +1)
        self.ends.update(_end_sets(path, self.d))
        self.paths.append(path)

    def remove(self, i: int) -> list[int]:
        path = self.paths.pop(i)
        self._take(edge_set(VertexSeq.open(path, self.d)), -1)
        self.ends.subtract(_end_sets(path, self.d))
        return path

    def codegree_max(self) -> int:
        return max(self.co.values(), default=0)

    def score(self) -> tuple[int, int]:
        return self.codegree_max(), sum(x * x for x in self.co.values())

    def repair(self, rng: np.random.Generator, t: int, budget: int) -> bool:
        before, count = self.score(), len(self.paths)
        picks = sorted(rng.choice(len(self.paths), size=2, replace=False).tolist(), reverse=True)
        removed = [self.remove(i) for i in picks]
        fresh = []
        while True:
            got = _search_path(self.free, self.deg, self.ends, self.cap, self.n, self.d, t, budget)
            if got is None:
                break
            self.add(got[0])
            fresh.append(got[0])
        if len(self.paths) >= count and self.score() <= before:
            return True
        for _ in fresh:
            self.remove(len(self.paths) - 1)
        for path in removed:
            self.add(path)
        return False


def _appended(path: list[int], v: int, d: int) -> list[Edge]:
    window = (*path[-d:], v)
    return [as_edge(window[:s] + window[s + 1 :]) for s in range(1, d)] + [as_edge(window[1:])]


def _search_path(free, deg, ends, cap, n, d, t, budget):
    """A path of order t inside ``free`` by depth-first search, busiest vertices first."""
    nodes = 0
    starts = sorted(free, key=lambda e: (-sum(deg[v] for v in e), e))

    def fits(path):
        return all(ends[r] < cap for r in _end_sets(path, d))

    def extend(path, added):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            return None
        if len(path) == t:
            return (list(path), list(added)) if fits(path) else None
        for v in sorted(range(1, n + 1), key=lambda u: (-deg[u], u)):
            if v in path:
                continue
            new = _appended(path, v, d)
            if all(s in free and s not in added for s in new) and len(set(new)) == len(new):
                path.append(v)
                added.extend(new)
                got = extend(path, added)
                if got is not None:
                    return got
                path.pop()
                del added[len(added) - len(new) :]
        return None

    for e in starts:
        for order in permutations(e):
            got = extend(list(order), [e])
            if got is not None:
                return got
            if nodes > budget:
                return None
    return None


def connect_packing(packing: Sequence[VertexSeq], reserve: DGraph, U: Iterable[int]) -> VertexSeq:
    """Join the paths into one trail through connectors in U, using reserve edges.

    The result starts and ends with 2d connector vertices from U.
    """
    U = sorted(set(U))
    d = reserve.d
    covered: set[Edge] = set()
    for p in packing:
        es = edge_set(p)
        if es & reserve.edges:
            raise ValueError("packing paths must be edge-disjoint from the reserve")
        if es & covered:
            raise ValueError("packing paths must be pairwise edge-disjoint")
        covered |= es
    empty = VertexSeq.open((), d)
    if not packing:
        return glue(empty, empty, reserve, U)

    def host(*parts: VertexSeq) -> DGraph:
        es = set(reserve.edges)
        for part in parts:
            es |= edge_set(part) if len(part) else set()
        return DGraph(reserve.n, d, frozenset(es))

    trail = glue(empty, packing[0], host(packing[0]), U)
    for p in packing[1:]:
        trail = glue(trail, p, host(trail, p), U)
    return glue(trail, empty, host(trail), U)
