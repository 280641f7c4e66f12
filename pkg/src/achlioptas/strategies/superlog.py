"""Five-phase strategy for K far above log n; almost every round extends a path.

1. grow L disjoint paths from their left ends until only m vertices are uncovered;
2. keep random edges inside the uncovered set and take their D_exp-core X;
3. join the paths pairwise through short connectors in X, then close the
   last path into a cycle C_Y;
4. make the rest Hamiltonian with the sparse strategy on the offers that
   fall inside it, giving a cycle C_X;
5. wait for a cut edge (x, y) and for (x+, y+), then splice the two cycles.

Sizes follow ``K = h^10 log n``, ``m = n/h^2``, ``L = n/(h^4 log n)`` unless
overridden.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..engine import RoundOffer, Strategy
from ..graph import Graph, diameter_within, peel_core, shortest_path
from .base import first_legal, pick_legal
from .sublog import Sublog, SublogParams


@dataclass
class SuperlogParams:
    h: float | None = None          # from K = h^10 log n when None
    m: int | None = None            # floor(n / h^2)
    L: int | None = None            # floor(n / (h^4 log n)), at least 1
    D_exp: int = 2000
    resilient_core: int | None = None  # degree X minus connectors is peeled to; D_exp when None
    d_cut: int = 20                 # neighbours into the core for the inner sparse run
    K_inner: int | str | None = None  # log n / h when None; "half" uses K (|X|/n)^2 / 2
    close_rounds: int | None = None  # per endpoint when closing; floor(n / 2h^7) when None
    close_slack: float | None = None  # when set, close budget is close_slack * n^2 / (2 |X~| K)
    cut_target: bool = False        # stop collecting cut edges once n / 2h^2 are in
    inner: SublogParams = field(default_factory=SublogParams.fidelity)
    debug: bool = False

    @classmethod
    def fidelity(cls) -> "SuperlogParams":
        return cls()

    @classmethod
    def desk(cls) -> "SuperlogParams":
        inner = SublogParams.desk()
        inner.early_stop = True
        return cls(h=6.0, L=30, D_exp=8, resilient_core=4, d_cut=3, K_inner="half", close_slack=10.0,
                   cut_target=True, inner=inner)

    def validate(self) -> None:
        if self.h is not None and self.h <= 1:
            raise ValueError("h must exceed 1")
        if self.m is not None and self.m < 1:
            raise ValueError("m must be >= 1")
        if self.L is not None and self.L < 1:
            raise ValueError("L must be >= 1")
        if self.D_exp < 1:
            raise ValueError("D_exp must be >= 1")


class PathCover:
    """Vertex-disjoint paths; paths grow at their last element (the left end)."""

    def __init__(self, n: int, starts: list[int]):
        self.n = n
        self.paths: list[list[int]] = [[s] for s in starts]
        self.inY = np.zeros(n, dtype=bool)
        self.inY[starts] = True
        self.owner = np.full(n, -1, dtype=np.int64)
        self.owner[starts] = np.arange(len(starts))
        self.left = np.zeros(n, dtype=bool)
        self.left[starts] = True
        self.covered = len(starts)

    def extend(self, end: int, v: int) -> None:
        p = int(self.owner[end])
        self.paths[p].append(v)
        self.left[end], self.left[v] = False, True
        self.inY[v] = True
        self.owner[v] = p
        self.covered += 1

    def check(self, g: Graph, L: int | None = None) -> None:
        seen: set[int] = set()
        for p in self.paths:
            if seen & set(p) or len(set(p)) != len(p):
                raise AssertionError("paths overlap")
            seen |= set(p)
            for a, b in zip(p, p[1:]):
                if b not in g.adj[a]:
                    raise AssertionError(f"path uses non-edge {a}-{b}")
        if seen != set(np.flatnonzero(self.inY).tolist()):
            raise AssertionError("Y differs from the union of the paths")
        if L is not None and len(self.paths) > L:
            raise AssertionError(f"{len(self.paths)} paths exceed L={L}")


def patch_cycles(cx: list[int], cy: list[int], x: int, y: int) -> list[int]:
    """Splice cycles through edges (x, y) and (x+, y+), successors taken in list order.

    The result walks C_X backwards from x to x+, jumps to y+, and walks C_Y
    forwards to y, which is adjacent to x.
    """
    i, j = cx.index(x), cy.index(y)
    back = [cx[(i - k) % len(cx)] for k in range(len(cx))]
    fwd = [cy[(j + 1 + k) % len(cy)] for k in range(len(cy))]
    return back + fwd


def _key(a, b, n):
    return np.minimum(a, b) * n + np.maximum(a, b)


class Superlog(Strategy):
    name = "superlog"
    phases = ("phase1", "phase2", "phase3", "phase4", "phase5")

    def __init__(self, params: SuperlogParams | None = None):
        super().__init__()
        self.p = params or SuperlogParams.desk()
        self.p.validate()

    def params(self) -> dict:
        d = asdict(self.p)
        d.update(h=self.h, m=self.m, L=self.L, P1=self.P1, P2=self.P2)
        return d

    def start(self, n, K, graph, rng):
        super().start(n, K, graph, rng)
        p = self.p
        self.logn = math.log(max(n, 2))
        self.h = p.h if p.h is not None else (K / self.logn) ** 0.1
        if self.h <= 1:
            raise ValueError(f"h={self.h:.3f} <= 1; K too small for this strategy")
        self.m = p.m if p.m is not None else max(1, int(n / self.h ** 2))
        self.L = p.L if p.L is not None else max(1, int(n / (self.h ** 4 * self.logn)))
        self.L = min(self.L, n - self.m) if n > self.m else 1
        self.P1 = math.ceil((1 + math.exp(-self.h)) * n)
        self.P2 = math.ceil(0.75 * p.D_exp * self.m)
        self.notes.update(joins=0, I_max=0, hooks_failed=0)
        self.cover = PathCover(n, rng.sample(range(n), self.L))
        self.left = self.P1
        self.stage = "p1"
        self._maybe_end_phase1(graph)

    # phase 1 -----------------------------------------------------------

    def _maybe_end_phase1(self, graph):
        if self.cover.covered >= self.n - self.m:
            self._begin_phase2(graph)
        elif self.left <= 0:
            self.fail(f"covered {self.cover.covered} of {self.n - self.m} within {self.P1} rounds")

    def _p1_offer(self, offer, graph):
        c = self.cover
        u, v = offer.u, offer.v
        mask = (c.left[u] & ~c.inY[v]) | (c.left[v] & ~c.inY[u])
        return pick_legal(offer, mask, graph, self.rng)

    def _p1_applied(self, edge, added, graph):
        if added:
            a, b = edge
            c = self.cover
            if c.left[a] and not c.inY[b]:
                c.extend(a, b)
            elif c.left[b] and not c.inY[a]:
                c.extend(b, a)
        self.left -= 1
        if self.p.debug:
            self.cover.check(graph, self.L)
        self._maybe_end_phase1(graph)

    # phase 2 -----------------------------------------------------------

    def _begin_phase2(self, graph):
        self.set_phase("phase2")
        self.stage = "p2"
        self.left = self.P2
        self.notes["phase1_paths"] = len(self.cover.paths)
        if self.left <= 0:
            self._end_phase2(graph)

    def _end_phase2(self, graph):
        free = np.flatnonzero(~self.cover.inY).tolist()
        self.X = peel_core(graph, self.p.D_exp, within=free)
        self.notes["X"] = len(self.X)
        if len(self.X) < 2 * self.m / 3:
            self.fail(f"expander core of size {len(self.X)} below 2m/3")
            return
        self._begin_phase3(graph)

    # phase 3 -----------------------------------------------------------

    def _begin_phase3(self, graph):
        self.set_phase("phase3")
        self.stage = "p3"
        self.I: set[int] = set()
        self.paths = [list(p) for p in self.cover.paths]
        self.inY = self.cover.inY.copy()
        self._refresh_core(graph)
        self.isEnd = np.zeros(self.n, dtype=bool)
        self.end_of: dict[int, int] = {}
        self._index_ends()
        self.level = 0
        self.a = float(self.L)
        self._next_level(graph)

    def _refresh_core(self, graph):
        self.Xt = peel_core(graph, self.p.resilient_core or self.p.D_exp, within=self.X - self.I)
        self.inXt = np.zeros(self.n, dtype=bool)
        self.inXt[list(self.Xt)] = True
        if self.p.debug:
            bound = 3 * math.log(max(self.m, 2))
            diam = diameter_within(graph, self.Xt)
            self.notes.setdefault("diameters", []).append(diam)
            if diam > bound:
                raise AssertionError(f"core diameter {diam} above {bound:.1f}")

    def _index_ends(self):
        self.isEnd[:] = False
        self.end_of.clear()
        for i, p in enumerate(self.paths):
            for e in (p[0], p[-1]):
                self.isEnd[e] = True
                self.end_of[e] = i

    def _next_level(self, graph):
        """Pick the doubling level for the current number of paths and start an attempt."""
        k = len(self.paths)
        if k == 1:
            self._begin_close(graph)
            return
        while self.a / 2 >= k:
            self.a /= 2
        self.level_goal = self.a / 2
        self.T = math.ceil(2 * self.n ** 2 / (self.m * self.a * self.K))
        self.attempts_left = max(1, math.ceil(self.h * self.a))
        self._start_attempt()

    def _start_attempt(self):
        self.hook1 = None
        self.step = 1
        self.left = self.T

    def _hook_mask(self, offer, exclude: set[int] = frozenset()):
        u, v = offer.u, offer.v
        ends = self.isEnd
        if exclude:
            ends = ends.copy()
            ends[list(exclude)] = False
        return (ends[u] & self.inXt[v]) | (ends[v] & self.inXt[u])

    def _p3_offer(self, offer, graph):
        exclude = set()
        if self.stage == "p3" and self.hook1 is not None:
            p = self.paths[self.end_of[self.hook1[0]]]
            exclude = {p[0], p[-1]}
        elif self.stage == "close":
            exclude = {self.hook1[0]} if self.hook1 is not None else set()
        return pick_legal(offer, self._hook_mask(offer, exclude), graph, self.rng)

    def _hooked(self, edge, added):
        if not added:
            return None
        a, b = edge
        if self.isEnd[a] and self.inXt[b]:
            return a, b
        if self.isEnd[b] and self.inXt[a]:
            return b, a
        return None

    def _p3_applied(self, edge, added, graph):
        self.left -= 1
        hook = self._hooked(edge, added)
        if hook is not None:
            if self.hook1 is None:
                self.hook1 = hook
                self.left = self.T
                return
            if self.end_of[hook[0]] != self.end_of[self.hook1[0]]:
                self._join(graph, self.hook1, hook)
                return
        if self.left > 0:
            return
        self.notes["hooks_failed"] += 1
        self.attempts_left -= 1
        if self.attempts_left <= 0:
            self.fail(f"{len(self.paths)} paths left at level a={self.a:g}")
            return
        self._start_attempt()

    def _connector(self, graph, x1, x2):
        return shortest_path(graph, x1, x2, restrict=self.Xt)

    def _join(self, graph, h1, h2):
        (e1, x1), (e2, x2) = h1, h2
        conn = self._connector(graph, x1, x2)
        if conn is None:
            # the core is disconnected between the two hooks; count it as a failed attempt
            self.notes["hooks_failed"] += 1
            self.attempts_left -= 1
            if self.attempts_left <= 0:
                self.fail("hooks landed in different components of the core")
            else:
                self._start_attempt()
            return
        i, j = self.end_of[e1], self.end_of[e2]
        p1, p2 = self.paths[i], self.paths[j]
        if p1[-1] != e1:
            p1 = p1[::-1]
        if p2[0] != e2:
            p2 = p2[::-1]
        joined = p1 + conn + p2
        self.paths = [p for k, p in enumerate(self.paths) if k not in (i, j)] + [joined]
        self._absorb(graph, conn)
        self.notes["joins"] += 1
        self._index_ends()
        if len(self.paths) <= self.level_goal:
            self._next_level(graph)
        else:
            self.attempts_left -= 1
            if self.attempts_left <= 0 and len(self.paths) > 1:
                self.fail(f"{len(self.paths)} paths left at level a={self.a:g}")
                return
            self._start_attempt()

    def _absorb(self, graph, conn):
        self.I.update(conn)
        self.inY[conn] = True
        self.notes["connectors"] = self.notes.get("connectors", 0) + 1
        bound = self.notes["connectors"] * 3 * math.log(max(self.m, 2))
        if len(self.I) > bound:
            raise AssertionError(f"connector set of size {len(self.I)} above {bound:.1f}")
        self.notes["I_max"] = len(self.I)
        self._refresh_core(graph)

    def _begin_close(self, graph):
        self.stage = "close"
        self.hook1 = None
        p = self.paths[0]
        if len(p) >= 3 and p[0] in graph.adj[p[-1]]:
            self._close_done(graph, p)
            return
        if self.p.close_rounds is not None:
            T = self.p.close_rounds
        elif self.p.close_slack is not None:
            T = math.ceil(self.p.close_slack * self.n ** 2 / (2 * max(1, len(self.Xt)) * self.K))
        else:
            T = int(self.n / (2 * self.h ** 7))
        self.T = self.left = max(1, T)
        self.notes["close_T"] = self.T

    def _close_applied(self, edge, added, graph):
        self.left -= 1
        hook = self._hooked(edge, added)
        if hook is not None:
            if self.hook1 is None:
                self.hook1 = hook
                self.left = self.T
                return
            if hook[0] != self.hook1[0]:
                conn = self._connector(graph, self.hook1[1], hook[1])
                if conn is None:
                    self.fail("closing hooks landed in different components of the core")
                    return
                p = self.paths[0]
                if p[-1] != self.hook1[0]:
                    p = p[::-1]
                self._absorb(graph, conn)
                self._close_done(graph, p + conn)
                return
        if self.left <= 0:
            self.fail("could not close the last path")

    def _close_done(self, graph, cycle):
        self.cy = cycle
        self.notes["cycle_Y"] = len(cycle)
        self._begin_phase4(graph)

    # phase 4 -----------------------------------------------------------

    def _begin_phase4(self, graph):
        self.set_phase("phase4")
        self.stage = "p4"
        self.inY = np.zeros(self.n, dtype=bool)
        self.inY[self.cy] = True
        self.X4 = np.flatnonzero(~self.inY).tolist()
        k = len(self.X4)
        self.notes["X4"] = k
        if k == 0:
            self.finish(self.cy)
            return
        if k <= 2:
            # one or two leftover vertices: splice each in as a one-vertex cycle
            self.pending = [[x] for x in self.X4]
            self._begin_phase5(graph)
            return
        self.local = {v: i for i, v in enumerate(self.X4)}
        self.lmap = np.full(self.n, -1, dtype=np.int64)
        self.lmap[self.X4] = np.arange(k)
        self.lgraph = graph.relabeled(self.X4)
        p = self.p
        if p.K_inner == "half":
            self.Kin = max(1, int(self.K * (k / self.n) ** 2 / 2))
        elif p.K_inner is not None:
            self.Kin = int(p.K_inner)
        else:
            self.Kin = max(1, math.ceil(self.logn / self.h))
        inner = SublogParams(**{**asdict(p.inner), "phase1_rounds": 0, "d": p.d_cut})
        self.inner = Sublog(inner)
        self.notes["K_inner"] = self.Kin
        self.inner.start(k, self.Kin, self.lgraph, self.rng)
        self._check_inner(graph)

    def _p4_offer(self, offer, graph):
        lu, lv = self.lmap[offer.u], self.lmap[offer.v]
        idx = np.flatnonzero((lu >= 0) & (lv >= 0))[: self.Kin]
        self._p4_idx = idx
        sub = RoundOffer(offer.round_index, np.stack([lu[idx], lv[idx]], axis=1))
        if len(idx) == 0:
            return None
        c = self.inner.on_offer(sub, self.lgraph)
        return None if c is None else int(idx[c])

    def _p4_applied(self, edge, added, graph):
        ledge = None
        if edge is not None:
            ledge = (self.local[edge[0]], self.local[edge[1]])
            if added:
                self.lgraph.add_edge(*ledge)
        self.inner.on_applied(ledge, added, self.lgraph)
        self._check_inner(graph)

    def _check_inner(self, graph):
        st = self.inner.status
        self.notes["inner"] = {"phase": self.inner.phase, "stage_rounds": self.inner.stage_rounds}
        if st == "done":
            self.pending = [[self.X4[i] for i in self.inner.certificate]]
            self._begin_phase5(graph)
        elif st == "failed":
            self.fail(f"inner run failed in its {self.inner.failed_phase}: "
                      f"{self.inner.notes.get('failure', '')}")

    # phase 5 -----------------------------------------------------------

    def _begin_phase5(self, graph):
        if self.phase != "phase5":
            self.set_phase("phase5")
        self.stage = "cut"
        self.cx = self.pending.pop(0)
        n = self.n
        self.inCX = np.zeros(n, dtype=bool)
        self.inCX[self.cx] = True
        self.succ_x = {v: self.cx[(i + 1) % len(self.cx)] for i, v in enumerate(self.cx)}
        self.succ_y = {v: self.cy[(i + 1) % len(self.cy)] for i, v in enumerate(self.cy)}
        self.E: list[tuple[int, int]] = []
        self.plus: dict[int, tuple[int, int]] = {}
        self.T1 = math.ceil(n / self.h ** 2)
        self.target = math.ceil(n / (2 * self.h ** 2)) if self.p.cut_target else None
        self.T2 = math.ceil(n / self.logn)
        self.left = self.T1
        # a cut edge already present can seed the search
        for x in self.cx:
            for y in graph.adj[x]:
                if self.inY[y] and self._add_cut(graph, x, y):
                    return
        self._check_cut_done(graph)

    def _add_cut(self, graph, x, y) -> bool:
        xp, yp = self.succ_x[x], self.succ_y[y]
        if yp in graph.adj[xp]:
            self._patch(graph, x, y)
            return True
        self.E.append((x, y))
        self.plus[int(min(xp, yp) * self.n + max(xp, yp))] = (x, y)
        return False

    def _check_cut_done(self, graph):
        if self.stage != "cut":
            return
        if self.left <= 0 or (self.target is not None and len(self.E) >= self.target):
            self.notes["cut_edges"] = len(self.E)
            self.stage = "plus"
            self.left = self.T2
            self.plus_keys = np.array(sorted(self.plus), dtype=np.int64)
            if not len(self.plus_keys):
                self.fail("no cut edges collected")

    def _p5_offer(self, offer, graph):
        u, v = offer.u, offer.v
        if self.stage == "cut":
            mask = self.inCX[u] != self.inCX[v]
            mask &= self.inY[u] | self.inY[v]
            return pick_legal(offer, mask, graph, self.rng)
        keys = _key(u, v, self.n)
        return first_legal(offer, np.isin(keys, self.plus_keys), graph)

    def _p5_applied(self, edge, added, graph):
        self.left -= 1
        if self.stage == "cut":
            if added:
                a, b = edge
                x, y = (a, b) if self.inCX[a] else (b, a)
                if self.inCX[x] and self.inY[y] and self._add_cut(graph, x, y):
                    return
            self._check_cut_done(graph)
            return
        if added:
            a, b = edge
            hit = self.plus.get(min(a, b) * self.n + max(a, b))
            if hit is not None:
                self._patch(graph, *hit)
                return
        if self.left <= 0:
            self.fail(f"no patching edge among {len(self.plus)} within {self.T2} rounds")

    def _patch(self, graph, x, y):
        cycle = patch_cycles(self.cx, self.cy, x, y)
        self.notes["patches"] = self.notes.get("patches", 0) + 1
        if self.pending:
            self.cy = cycle
            self.inY[self.cx] = True
            self._begin_phase5(graph)
            return
        self.finish(cycle)

    # dispatch ----------------------------------------------------------

    def on_offer(self, offer, graph):
        st = self.stage
        if st == "p1":
            return self._p1_offer(offer, graph)
        if st == "p2":
            u, v = offer.u, offer.v
            free = ~self.cover.inY
            return first_legal(offer, free[u] & free[v], graph)
        if st in ("p3", "close"):
            return self._p3_offer(offer, graph)
        if st == "p4":
            return self._p4_offer(offer, graph)
        return self._p5_offer(offer, graph)

    def on_applied(self, edge, added, graph):
        st = self.stage
        if st == "p1":
            self._p1_applied(edge, added, graph)
        elif st == "p2":
            self.left -= 1
            if self.left <= 0:
                self._end_phase2(graph)
        elif st == "p3":
            self._p3_applied(edge, added, graph)
        elif st == "close":
            self._close_applied(edge, added, graph)
        elif st == "p4":
            self._p4_applied(edge, added, graph)
        else:
            self._p5_applied(edge, added, graph)
