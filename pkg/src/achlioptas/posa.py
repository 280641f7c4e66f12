"""Rotation-extension machinery for long paths and Hamilton cycles.

A path obtained from a base path ``P`` by elementary rotations (the start
``P[0]`` stays fixed, the far end moves) is stored as a list of *segments*:
runs ``(a, b)`` of indices into ``P``, walked from ``a`` to ``b``.  Each
rotation reverses a suffix, so a path ``k`` rotations deep has at most about
``2k`` segments, and successor lookups cost ``O(k)`` instead of ``O(n)``.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Callable

from .graph import Graph, connected

Segs = tuple[tuple[int, int], ...]


def _step(a: int, b: int) -> int:
    return 1 if b >= a else -1


def _canonical(segs: list[tuple[int, int]]) -> Segs:
    """Merge neighbouring runs so equal index sequences get equal encodings."""
    out: list[tuple[int, int]] = []
    for a, b in segs:
        if out:
            pa, pb = out[-1]
            s = _step(pa, pb) if pa != pb else (a - pb)
            if abs(s) == 1 and a == pb + s and (a == b or _step(a, b) == s):
                out[-1] = (pa, b)
                continue
        out.append((a, b))
    return tuple(out)


def _successor(segs: Segs, i: int) -> int | None:
    """Index that follows ``i`` in the encoded path, None if ``i`` is the end."""
    for k, (a, b) in enumerate(segs):
        if a <= i <= b or b <= i <= a:
            if i != b:
                return i + _step(a, b)
            return segs[k + 1][0] if k + 1 < len(segs) else None
    raise KeyError(i)


def _rotate(segs: Segs, i: int) -> Segs:
    """Add the chord (P[i], end) and drop the edge from P[i] to its successor."""
    for k, (a, b) in enumerate(segs):
        if a <= i <= b or b <= i <= a:
            break
    if i == b:
        prefix, suffix = list(segs[:k + 1]), list(segs[k + 1:])
    else:
        s = _step(a, b)
        prefix = list(segs[:k]) + [(a, i)]
        suffix = [(i + s, b)] + list(segs[k + 1:])
    return _canonical(prefix + [(d, c) for c, d in reversed(suffix)])


def _expand(base: list[int], segs: Segs) -> list[int]:
    out: list[int] = []
    for a, b in segs:
        if a <= b:
            out.extend(base[a:b + 1])
        else:
            out.extend(reversed(base[b:a + 1]))
    return out


class RotationClosure:
    """Endpoints reachable from ``path`` by elementary rotations with ``path[0]`` fixed.

    The default search keeps one representative path per endpoint, which is
    cheap and enough for the containment property of longest paths.  With
    ``exact=True`` every distinct rotated path is a search state, which finds
    every reachable endpoint but can blow up; ``state_cap`` bounds it.

    ``stop(y)`` is called on every newly found endpoint; returning True ends
    the search early and leaves ``y`` in :attr:`found`.
    """

    def __init__(self, g: Graph, path: list[int], *, exact: bool = False,
                 stop: Callable[[int], bool] | None = None, state_cap: int = 200_000,
                 validate: bool = False):
        if not path:
            raise ValueError("empty path")
        if validate:
            check_path(g, path)
        self.graph = g
        self.base = list(path)
        self.x0 = self.base[0]
        self.pos = {v: i for i, v in enumerate(self.base)}
        self.segs: dict[int, Segs] = {}
        self.parent: dict[int, tuple[int, int] | None] = {}
        self.endpoints: list[int] = []
        self.found: int | None = None
        self.exact = exact
        self.states = 0
        start: Segs = ((0, len(self.base) - 1),)
        if exact:
            self._search_exact(start, stop, state_cap)
        else:
            self._search_keyed(start, stop)

    def _record(self, y: int, segs: Segs, parent) -> None:
        self.segs[y] = segs
        self.parent[y] = parent
        self.endpoints.append(y)

    def _search_keyed(self, start: Segs, stop) -> None:
        base, pos, adj = self.base, self.pos, self.graph.adj
        end = base[-1]
        self._record(end, start, None)
        self.states = 1
        if stop is not None and stop(end):
            self.found = end
            return
        if len(base) < 3:
            return
        queue = deque([end])
        while queue:
            e = queue.popleft()
            segs = self.segs[e]
            for w in adj[e]:
                i = pos.get(w)
                if i is None:
                    continue
                j = _successor(segs, i)
                if j is None:
                    continue
                y = base[j]
                if y == e or y in self.segs:
                    continue
                self._record(y, _rotate(segs, i), (e, w))
                self.states += 1
                if stop is not None and stop(y):
                    self.found = y
                    return
                queue.append(y)

    def _search_exact(self, start: Segs, stop, cap: int) -> None:
        base, pos, adj = self.base, self.pos, self.graph.adj
        seen = {start}
        self._record(base[-1], start, None)
        if stop is not None and stop(base[-1]):
            self.found = base[-1]
            return
        queue = deque([start])
        while queue:
            segs = queue.popleft()
            e = base[segs[-1][1]]
            for w in adj[e]:
                i = pos.get(w)
                if i is None:
                    continue
                j = _successor(segs, i)
                if j is None or base[j] == e:
                    continue
                nxt = _rotate(segs, i)
                if nxt in seen:
                    continue
                seen.add(nxt)
                if len(seen) > cap:
                    raise RuntimeError(f"exact rotation closure exceeded {cap} states")
                y = base[j]
                if y not in self.segs:
                    self._record(y, nxt, (e, w))
                    if stop is not None and stop(y):
                        self.found = y
                        self.states = len(seen)
                        return
                queue.append(nxt)
        self.states = len(seen)

    @property
    def R(self) -> set[int]:
        return set(self.endpoints)

    @property
    def R_minus(self) -> set[int]:
        return {self.base[self.pos[y] - 1] for y in self.endpoints if self.pos[y] > 0}

    @property
    def R_plus(self) -> set[int]:
        h = len(self.base) - 1
        return {self.base[self.pos[y] + 1] for y in self.endpoints if self.pos[y] < h}

    def path_to(self, y: int) -> list[int]:
        """A rotated path from ``x0`` to ``y`` with the same vertex set as the base."""
        return _expand(self.base, self.segs[y])


def check_path(g: Graph, path: list[int]) -> None:
    if len(set(path)) != len(path):
        raise ValueError("path repeats a vertex")
    for a, b in zip(path, path[1:]):
        if b not in g.adj[a]:
            raise ValueError(f"({a}, {b}) is not an edge")


def is_cycle(g: Graph, cycle: list[int]) -> bool:
    if len(cycle) < 3 or len(set(cycle)) != len(cycle):
        return False
    return all(b in g.adj[a] for a, b in zip(cycle, cycle[1:] + cycle[:1]))


def rotation_closure(g: Graph, path: list[int], exact: bool = False) -> RotationClosure:
    return RotationClosure(g, path, exact=exact, validate=True)


def posa_containment_check(g: Graph, closure: RotationClosure) -> bool:
    """Whether every neighbour of R outside R sits next to R on the base path."""
    R = set(closure.endpoints)
    pos, base = closure.pos, closure.base
    h = len(base) - 1
    allowed = set()
    for y in R:
        i = pos[y]
        if i > 0:
            allowed.add(base[i - 1])
        if i < h:
            allowed.add(base[i + 1])
    for y in R:
        for w in g.adj[y]:
            if w not in R and w not in allowed:
                return False
    return True


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def booster_pairs(g: Graph, path: list[int], r_cap: int | None = None,
                  rng: random.Random | None = None, exact: bool = False) -> set[tuple[int, int]]:
    """Non-edges that close a cycle through all of ``path`` (double rotations).

    Pairs ``(x0, v)`` for every rotation endpoint ``v``, plus ``(y, z)`` for up
    to ``r_cap`` endpoints ``y`` and every ``z`` reachable when ``y`` is held
    fixed instead.  ``r_cap=None`` uses every endpoint.
    """
    adj = g.adj
    outer = RotationClosure(g, path, exact=exact, validate=True)
    x0 = outer.x0
    pairs = {_pair(x0, v) for v in outer.endpoints if v != x0 and v not in adj[x0]}
    ys = list(outer.endpoints)
    if r_cap is not None and r_cap < len(ys):
        ys = rng.sample(ys, r_cap) if rng is not None else ys[:r_cap]
    for y in ys:
        inner = RotationClosure(g, outer.path_to(y)[::-1], exact=exact)
        pairs.update(_pair(y, z) for z in inner.endpoints if z != y and z not in adj[y])
    return pairs


class BoosterIndex:
    """Lazy membership test for the boosters of one path.

    Equivalent to materialising :func:`booster_pairs` (plus, optionally,
    the pairs that extend the path off an endpoint), but the closure for a
    fixed endpoint ``y`` is only built when a candidate touches ``y``.
    """

    def __init__(self, g: Graph, path: list[int], r_cap: int | None = None,
                 rng: random.Random | None = None, extensions: bool = True):
        self.graph = g
        self.path = list(path)
        self.on_path = set(path)
        self.outer = RotationClosure(g, path)
        self.R = set(self.outer.endpoints)
        ys = list(self.outer.endpoints)
        if r_cap is not None and r_cap < len(ys):
            ys = rng.sample(ys, r_cap) if rng is not None else ys[:r_cap]
        self.fixed = set(ys)
        self.extensions = extensions
        self._inner: dict[int, RotationClosure] = {}
        self.closures_built = 1

    def _inner_closure(self, y: int) -> RotationClosure:
        c = self._inner.get(y)
        if c is None:
            c = RotationClosure(self.graph, self.outer.path_to(y)[::-1])
            self._inner[y] = c
            self.closures_built += 1
        return c

    def _one_way(self, a: int, b: int):
        if a not in self.R:
            return None
        if b not in self.on_path:
            return (self.outer.path_to(a) + [b], False) if self.extensions else None
        if b == self.outer.x0:
            return self.outer.path_to(a), True
        if a in self.fixed:
            inner = self._inner_closure(a)
            if b in inner.segs:
                return inner.path_to(b), True
        return None

    def realize(self, a: int, b: int):
        """``(vertices, is_cycle)`` obtained by adding ``{a, b}``, or None if not a booster."""
        if a == b or b in self.graph.adj[a]:
            return None
        return self._one_way(a, b) or self._one_way(b, a)

    def __contains__(self, pair) -> bool:
        a, b = pair
        return self.realize(a, b) is not None


@dataclass
class PosaResult:
    vertices: list[int]
    is_cycle: bool
    stuck: bool = False        # a cycle spans its whole component, cannot grow

    @property
    def length(self) -> int:
        return len(self.vertices) - (0 if self.is_cycle else 1)


GREEDY_RULES = ("fewest", "most", "random")


def _greedy_extend(g: Graph, path: list[int], on: set[int], rng: random.Random | None,
                   rule: str = "fewest") -> None:
    """Walk off the tail until stuck.

    ``fewest`` steps to the free neighbour with fewest free neighbours of its
    own (Warnsdorff), ``most`` to the one with most, ``random`` to any.
    Ties are broken by ``rng`` when given.
    """
    adj = g.adj
    while True:
        free = [w for w in adj[path[-1]] if w not in on]
        if not free:
            return
        if len(free) == 1:
            w = free[0]
        elif rule == "random":
            w = rng.choice(free) if rng is not None else free[0]
        else:
            sign = 1 if rule == "fewest" else -1
            best, choice = None, []
            for c in free:
                k = sign * sum(1 for x in adj[c] if x not in on)
                if best is None or k < best:
                    best, choice = k, [c]
                elif k == best:
                    choice.append(c)
            w = choice[0] if rng is None or len(choice) == 1 else rng.choice(choice)
        path.append(w)
        on.add(w)


def open_cycle(g: Graph, cycle: list[int], on: set[int] | None = None,
               rng: random.Random | None = None) -> list[int] | None:
    """Open ``cycle`` at a vertex with an outside neighbour, giving a path one longer.

    None if no cycle vertex has a neighbour off the cycle.
    """
    adj = g.adj
    if on is None:
        on = set(cycle)
    options = []
    for j, c in enumerate(cycle):
        for u in adj[c]:
            if u not in on:
                options.append((j, u))
                break
        if options and rng is None:
            break
    if not options:
        return None
    j, u = options[0] if rng is None else rng.choice(options)
    return [u] + cycle[j:] + cycle[:j]


def extend_or_close(g: Graph, path: list[int], *, rng: random.Random | None = None,
                    exact: bool = False, double_cap: int | None = 32,
                    rule: str = "most") -> PosaResult:
    """Grow ``path`` by rotations and extensions until it is stuck or Hamiltonian.

    Stuck means: no endpoint reachable by rotations (from either end, and
    after switching the fixed end at up to ``double_cap`` endpoints) has an
    off-path neighbour or closes a cycle.  A cycle through fewer than ``n``
    vertices is opened at a vertex with an outside neighbour, which gives a
    longer path; if none exists the result carries ``stuck=True``.
    ``rule`` is the greedy step used between rotations (see GREEDY_RULES).
    """
    if rule not in GREEDY_RULES:
        raise ValueError(f"unknown rule {rule!r}")
    n = g.n
    adj = g.adj
    check_path(g, path)
    path = list(path)
    if n == 1:
        return PosaResult(path, False)
    on = set(path)

    while True:
        _greedy_extend(g, path, on, rng, rule)
        path.reverse()
        _greedy_extend(g, path, on, rng, rule)
        if len(path) == n and len(path) >= 3 and path[0] in adj[path[-1]]:
            return PosaResult(path, True)

        outcome = None
        # one fixed end at a time: look for an endpoint with a free neighbour or
        # an endpoint adjacent to the fixed start
        for candidate in (path, path[::-1]):
            x0 = candidate[0]

            def good(y, x0=x0):
                return (x0 in adj[y] and len(candidate) >= 3) or any(w not in on for w in adj[y])

            clo = RotationClosure(g, candidate, exact=exact, stop=good)
            if clo.found is not None:
                outcome = clo, clo.found, None
                break
        if outcome is None:
            outcome = _double_rotation(g, path, on, exact, double_cap, rng)
        if outcome is None:
            return PosaResult(path, False)

        clo, y, _ = outcome
        rotated = clo.path_to(y)
        free = [w for w in adj[y] if w not in on]
        if free:
            w = free[0] if rng is None else rng.choice(free)
            path = rotated + [w]
            on.add(w)
            continue
        # rotated path closes into a cycle through every path vertex
        if len(rotated) == n:
            return PosaResult(rotated, True)
        opened = open_cycle(g, rotated, on, rng)
        if opened is None:
            return PosaResult(rotated, True, stuck=True)
        path = opened
        on.add(opened[0])


def _double_rotation(g: Graph, path: list[int], on: set[int], exact: bool,
                     cap: int | None, rng: random.Random | None):
    adj = g.adj
    outer = RotationClosure(g, path, exact=exact)
    ys = list(outer.endpoints)
    if rng is not None:
        rng.shuffle(ys)
    if cap is not None:
        ys = ys[:cap]
    for y in ys:
        flipped = outer.path_to(y)[::-1]
        if len(flipped) < 3:
            continue

        def good(z, y=y):
            return y in adj[z] or any(w not in on for w in adj[z])

        inner = RotationClosure(g, flipped, exact=exact, stop=good)
        if inner.found is not None:
            return inner, inner.found, y
    return None


def hamiltonicity_search(g: Graph, restarts: int = 50, rng: random.Random | None = None,
                         double_cap: int | None = 32) -> list[int] | None:
    """Look for a Hamilton cycle with randomised rotation-extension.

    Sound (a returned cycle is always checked) but incomplete: None only
    means nothing was found in ``restarts`` attempts.
    """
    n = g.n
    if n < 3 or g.min_degree() < 2 or not connected(g):
        return None
    rng = rng or random.Random(0)
    degs = g.degrees
    low = [v for v in range(n) if degs[v] == 2]
    for attempt in range(restarts):
        start = rng.choice(low) if low and attempt % 4 < 2 else rng.randrange(n)
        rule = GREEDY_RULES[attempt % 2]
        res = extend_or_close(g, [start], rng=rng, double_cap=double_cap, rule=rule)
        if res.is_cycle and len(res.vertices) == n and is_cycle(g, res.vertices):
            return res.vertices
    return None


def brute_force_hamiltonian(g: Graph, cap: int = 14) -> list[int] | None:
    """Exact Hamilton cycle search by backtracking; only for small graphs."""
    n = g.n
    if n > cap:
        raise ValueError(f"n={n} above brute-force cap {cap}")
    if n < 3 or g.min_degree() < 2:
        return None
    adj = g.adj
    start = min(range(n), key=lambda v: len(adj[v]))
    path = [start]
    used = [False] * n
    used[start] = True

    def dfs() -> bool:
        if len(path) == n:
            return start in adj[path[-1]]
        for w in adj[path[-1]]:
            if not used[w]:
                used[w] = True
                path.append(w)
                if dfs():
                    return True
                path.pop()
                used[w] = False
        return False

    return list(path) if dfs() else None
