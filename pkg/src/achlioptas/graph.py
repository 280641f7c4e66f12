"""Simple undirected graphs and the structural algorithms the strategies lean on.

Vertices are the integers ``0..n-1``.  Vertex sets are plain Python sets (or any
iterable of ints); nothing here needs a dedicated set type.
"""
from __future__ import annotations

import hashlib
import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

DEFAULT_SUBSET_BUDGET = 10**6


class Graph:
    """Mutable simple graph backed by per-vertex neighbor sets."""

    __slots__ = ("n", "adj", "edge_count")

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("n must be non-negative")
        self.n = n
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.edge_count = 0

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        g = cls(n)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.from_edges(n, itertools.combinations(range(n), 2))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((i, i + 1) for i in range(n - 1)))

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range [0, {self.n})")

    def add_edge(self, u: int, v: int) -> bool:
        """Insert ``{u, v}``; return False for loops and duplicates."""
        self._check(u)
        self._check(v)
        if u == v or v in self.adj[u]:
            return False
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.edge_count += 1
        return True

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def degrees(self) -> list[int]:
        return [len(a) for a in self.adj]

    def min_degree(self) -> int:
        return min((len(a) for a in self.adj), default=0)

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, nbrs in enumerate(self.adj):
            for v in nbrs:
                if u < v:
                    yield u, v

    def copy(self) -> "Graph":
        g = Graph(self.n)
        g.adj = [set(a) for a in self.adj]
        g.edge_count = self.edge_count
        return g

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Graph on the same labels keeping only edges inside ``vertices``."""
        keep = set(vertices)
        g = Graph(self.n)
        for u in keep:
            nb = self.adj[u] & keep
            g.adj[u] = nb
            g.edge_count += len(nb)
        g.edge_count //= 2
        return g

    def relabeled(self, vertices: list[int]) -> "Graph":
        """Induced subgraph on ``vertices`` with labels ``0..len-1`` in list order."""
        index = {v: i for i, v in enumerate(vertices)}
        g = Graph(len(vertices))
        for i, v in enumerate(vertices):
            for w in self.adj[v]:
                j = index.get(w)
                if j is not None and i < j:
                    g.add_edge(i, j)
        return g

    def fingerprint(self) -> str:
        h = hashlib.sha256(str(self.n).encode())
        for u, v in sorted(self.edges()):
            h.update(f"{u},{v};".encode())
        return h.hexdigest()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"

    # plain-text edge list: header "n m", then one "u v" per line
    def to_edgelist(self) -> str:
        lines = [f"{self.n} {self.edge_count}"]
        lines.extend(f"{u} {v}" for u, v in sorted(self.edges()))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str) -> "Graph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not rows or len(rows[0]) != 2:
            raise ValueError("edge list must start with a 'n m' header")
        n, m = int(rows[0][0]), int(rows[0][1])
        g = cls.from_edges(n, ((int(a), int(b)) for a, b in rows[1:]))
        if g.edge_count != m:
            raise ValueError(f"header declares {m} edges, found {g.edge_count} distinct")
        return g


def gnp(n: int, p: float, rng: random.Random) -> Graph:
    """Binomial random graph; geometric skipping keeps sparse cases linear."""
    g = Graph(n)
    if p <= 0:
        return g
    if p >= 1:
        return Graph.complete(n)
    log_q = math.log1p(-p)
    v, w = 1, -1
    while v < n:
        w += 1 + int(math.log(1.0 - rng.random()) / log_q)
        while w >= v and v < n:
            w -= v
            v += 1
        if v < n:
            g.add_edge(v, w)
    return g


def peel_core(g: Graph, D: int, within: Iterable[int] | None = None,
              rng: random.Random | None = None) -> set[int]:
    """Vertices of the ``D``-core, optionally of the subgraph induced on ``within``.

    The core does not depend on deletion order; ``rng`` randomises the order
    anyway so tests can check that.
    """
    if D < 1:
        raise ValueError("D must be >= 1")
    alive = set(range(g.n)) if within is None else set(within)
    deg = {v: len(g.adj[v] & alive) if within is not None else len(g.adj[v]) for v in alive}
    doomed = [v for v in alive if deg[v] < D]
    queued = set(doomed)
    while doomed:
        if rng is None:
            v = doomed.pop()
        else:
            i = rng.randrange(len(doomed))
            doomed[i], doomed[-1] = doomed[-1], doomed[i]
            v = doomed.pop()
        alive.discard(v)
        for w in g.adj[v]:
            if w in alive:
                deg[w] -= 1
                if deg[w] < D and w not in queued:
                    queued.add(w)
                    doomed.append(w)
    return alive


def edge_boundary(g: Graph, S: Iterable[int]) -> int:
    """Number of edges with exactly one endpoint in ``S``."""
    S = set(S)
    return sum(len(g.adj[v] - S) for v in S)


def external_neighbors(g: Graph, S: Iterable[int], within: set[int] | None = None) -> set[int]:
    S = set(S)
    out: set[int] = set()
    for v in S:
        out |= g.adj[v]
    out -= S
    if within is not None:
        out &= within
    return out


@dataclass
class ExpansionReport:
    mode: str                      # "exhaustive" | "sampled"
    violations: list[tuple[tuple[int, ...], int]] = field(default_factory=list)
    sets_checked: int = 0
    factor: Fraction = Fraction(0)
    strict: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations


def _subset_count(size: int, s_max: int) -> int:
    return sum(math.comb(size, s) for s in range(1, min(s_max, size) + 1))


def _subsets(pool: list[int], s_max: int, samples: int | None,
             rng: random.Random | None, budget: int) -> tuple[str, Iterator[tuple[int, ...]]]:
    if samples is None:
        total = _subset_count(len(pool), s_max)
        if total > budget:
            raise ValueError(
                f"exhaustive check needs {total} subsets (budget {budget}); "
                "pass samples=N for sampled mode")
        it = itertools.chain.from_iterable(
            itertools.combinations(pool, s) for s in range(1, min(s_max, len(pool)) + 1))
        return "exhaustive", it
    rng = rng or random.Random(0)
    top = min(s_max, len(pool))

    def draw() -> Iterator[tuple[int, ...]]:
        # size first, then a uniform subset of that size
        for _ in range(samples if top else 0):
            yield tuple(sorted(rng.sample(pool, rng.randint(1, top))))
    return "sampled", draw()


def _violates(count: int, size: int, factor: Fraction, strict: bool) -> bool:
    # strict: need count > factor*size; otherwise need count >= factor*size
    return count <= factor * size if strict else count < factor * size


def check_vertex_expansion(g: Graph, within: Iterable[int], s_max: int, factor,
                           samples: int | None = None, strict: bool = False,
                           rng: random.Random | None = None,
                           budget: int = DEFAULT_SUBSET_BUDGET) -> ExpansionReport:
    """Flag sets S inside ``within`` with too few neighbours in ``within - S``.

    ``samples=None`` enumerates every nonempty S with ``|S| <= s_max``;
    otherwise ``samples`` random sets are drawn.  With ``strict`` the
    requirement is "strictly more than factor*|S|" rather than "at least".
    """
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    factor = Fraction(factor)
    if factor <= 0:
        raise ValueError("factor must be positive")
    pool = sorted(set(within))
    ws = set(pool)
    mode, sets = _subsets(pool, s_max, samples, rng, budget)
    rep = ExpansionReport(mode=mode, factor=factor, strict=strict)
    adj = g.adj
    for S in sets:
        rep.sets_checked += 1
        if len(S) == 1:
            count = len(adj[S[0]] & ws)
        else:
            count = len(external_neighbors(g, S, ws))
        if _violates(count, len(S), factor, strict):
            rep.violations.append((S, count))
    return rep


def check_bipartite_expansion(g: Graph, U: Iterable[int], W: Iterable[int], s_max: int,
                              factor, samples: int | None = None,
                              rng: random.Random | None = None,
                              budget: int = DEFAULT_SUBSET_BUDGET) -> ExpansionReport:
    """Flag sets S inside ``W`` whose neighbourhood in ``U`` has at most factor*|S| vertices."""
    U, W = set(U), set(W)
    if U & W:
        raise ValueError("U and W must be disjoint")
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    factor = Fraction(factor)
    mode, sets = _subsets(sorted(W), s_max, samples, rng, budget)
    rep = ExpansionReport(mode=mode, factor=factor, strict=True)
    for S in sets:
        rep.sets_checked += 1
        nb: set[int] = set()
        for v in S:
            nb |= g.adj[v]
        count = len(nb & U)
        if count <= factor * len(S):
            rep.violations.append((S, count))
    return rep


def bfs_distances(g: Graph, source: int, restrict: set[int] | None = None) -> dict[int, int]:
    dist = {source: 0}
    q = deque([source])
    while q:
        u = q.popleft()
        du = dist[u] + 1
        for w in g.adj[u]:
            if w not in dist and (restrict is None or w in restrict):
                dist[w] = du
                q.append(w)
    return dist


def connected(g: Graph, within: Iterable[int] | None = None) -> bool:
    verts = set(range(g.n)) if within is None else set(within)
    if len(verts) <= 1:
        return True
    start = next(iter(verts))
    return len(bfs_distances(g, start, verts)) == len(verts)


def components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    out = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = list(bfs_distances(g, s))
        for v in comp:
            seen[v] = True
        out.append(sorted(comp))
    return out


def shortest_path(g: Graph, u: int, v: int, restrict: Iterable[int] | None = None) -> list[int] | None:
    """A shortest u-v path using only vertices of ``restrict`` (both ends included)."""
    allowed = None if restrict is None else (restrict if isinstance(restrict, (set, frozenset)) else set(restrict))
    if allowed is not None and (u not in allowed or v not in allowed):
        return None
    if u == v:
        return [u]
    parent = {u: u}
    q = deque([u])
    while q:
        x = q.popleft()
        for w in g.adj[x]:
            if w in parent or (allowed is not None and w not in allowed):
                continue
            parent[w] = x
            if w == v:
                path = [v]
                while path[-1] != u:
                    path.append(parent[path[-1]])
                return path[::-1]
            q.append(w)
    return None


def diameter_within(g: Graph, S: Iterable[int]) -> float:
    """Largest distance in the subgraph induced on ``S``; ``inf`` if it is disconnected."""
    verts = set(S)
    best = 0
    for s in verts:
        dist = bfs_distances(g, s, verts)
        if len(dist) < len(verts):
            return math.inf
        best = max(best, max(dist.values()))
    return best
