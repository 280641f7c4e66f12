"""Three-phase strategy for K well below log n.

1. keep the first candidate for a while (a sparse random graph) and take
   its D-core H;
2. give every vertex outside H at least d random neighbours inside H, first
   level by level in degree, then by hammering the leftover set;
3. rotation-extension: maintain a long path and, trial by trial, wait for a
   candidate that lengthens it or closes it into a cycle.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from ..engine import Strategy
from ..graph import Graph, peel_core
from ..posa import BoosterIndex, extend_or_close, open_cycle
from .base import any_legal, pick_legal


@dataclass
class SublogParams:
    epsilon: float = 0.009
    D: int | None = None               # core degree; ceil(1/epsilon) when None
    d: int = 20                        # neighbours into H for vertices outside it
    phase1_factor: float = 0.75        # phase 1 length is phase1_factor * D * n
    phase1_rounds: int | None = None   # explicit phase 1 length (0 keeps the given graph)
    boost_const: float = 1e4           # trial length is ceil(boost_const / K)
    T_boost: int | None = None
    max_trials: int | None = None      # 2n when None
    r_fraction: float = 0.01           # endpoints held fixed for double rotations
    early_stop: bool = False           # leave phase 2 stages as soon as their goal holds
    fill_idle: bool = False            # phase 2 rounds with nothing preferred keep a random edge
    search_restarts: int = 3
    debug: bool = False

    @classmethod
    def fidelity(cls) -> "SublogParams":
        return cls()

    @classmethod
    def desk(cls) -> "SublogParams":
        # D=2 ties epsilon to 1/D; d=3 avoids vertices with three degree-2 neighbours,
        # and a full 2n-round phase 1 keeps the 2-core near 0.9n at small log n
        return cls(epsilon=0.5, D=2, d=3, phase1_factor=1.0, fill_idle=True,
                   boost_const=4000, r_fraction=0.1)

    def validate(self, fidelity: bool = False) -> None:
        if self.epsilon <= 0 or (fidelity and self.epsilon >= 0.01):
            raise ValueError("epsilon must be in (0, 1/100) in fidelity mode, positive otherwise")
        for name in ("d", "boost_const", "r_fraction", "phase1_factor"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.D is not None and self.D < 1:
            raise ValueError("D must be >= 1")


class Sublog(Strategy):
    name = "sublog"
    phases = ("phase1", "phase2", "phase3")

    def __init__(self, params: SublogParams | None = None):
        super().__init__()
        self.p = params or SublogParams.desk()
        self.p.validate()

    def params(self) -> dict:
        d = asdict(self.p)
        d.update(D=self.D, T1=self.T1, T2=self.T2, T_boost=self.T_boost,
                 max_trials=self.max_trials, r_cap=self.r_cap, phase1_rounds=self.P1)
        return d

    def start(self, n, K, graph, rng):
        super().start(n, K, graph, rng)
        p = self.p
        self.D = p.D or math.ceil(1 / p.epsilon)
        logn = math.log(max(n, 2))
        self.T1 = math.ceil(p.epsilon / (2 * p.d * K) * n * logn) if p.d else 0
        self.T2 = math.ceil((0.5 + p.epsilon) * n / K * logn)
        self.T_boost = p.T_boost or max(1, math.ceil(p.boost_const / K))
        self.max_trials = p.max_trials or 2 * n
        self.r_cap = max(1, math.ceil(p.r_fraction * n))
        self.P1 = p.phase1_rounds if p.phase1_rounds is not None else math.ceil(p.phase1_factor * self.D * n)
        self.inH = np.zeros(n, dtype=bool)
        self.dH = np.zeros(n, dtype=np.int64)
        self.inX = np.zeros(n, dtype=bool)
        self.stage_rounds = {"1": 0, "2a": 0, "2b": 0, "3": 0}
        self.notes["stage_rounds"] = self.stage_rounds
        self._pending = None
        self.stage, self.left = "1", self.P1
        self._advance(graph)

    # stage transitions ------------------------------------------------

    def _advance(self, graph: Graph) -> None:
        while self.status == "running" and self.left <= 0 and self.stage != "3":
            if self.stage == "1":
                self._begin_phase2(graph)
            elif self.stage == "2a":
                self.j += 1
                if self.j < self.p.d:
                    self.left = self.T1
                    self._skip_idle_level()
                else:
                    self._begin_2b(graph)
            elif self.stage == "2b":
                self._end_2b(graph)

    def _begin_phase2(self, graph: Graph) -> None:
        n, D = self.n, self.D
        H = peel_core(graph, D)
        self.notes["core_size"] = len(H)
        if not H or len(H) < (1 - 1 / D) * n:
            self.fail(f"core of size {len(H)} below {(1 - 1 / D) * n:.0f}")
            return
        self.inH[list(H)] = True
        for v in range(n):
            if not self.inH[v]:
                self.dH[v] = sum(1 for w in graph.adj[v] if self.inH[w])
        self.set_phase("phase2")
        if self.p.d == 0:
            self._begin_2b(graph)
            return
        self.stage, self.j, self.left = "2a", 0, self.T1
        self._skip_idle_level()
        self._advance(graph)

    def _skip_idle_level(self) -> None:
        if self.p.early_stop and not ((~self.inH) & (self.dH == self.j)).any():
            self.left = 0

    def _begin_2b(self, graph: Graph) -> None:
        self.inX = (~self.inH) & (self.dH < self.p.d)
        self.notes["frozen"] = int(self.inX.sum())
        self.stage, self.left = "2b", self.T2
        if self.p.early_stop and not self.inX.any():
            self._end_2b(graph)

    def _end_2b(self, graph: Graph) -> None:
        short = int(((self.dH < self.p.d) & ~self.inH).sum())
        if short:
            self.fail(f"{short} vertices outside the core below {self.p.d} core neighbours")
            return
        if self.p.debug:
            self._debug_checks(graph)
        self._begin_phase3(graph)

    def _debug_checks(self, graph: Graph) -> None:
        from ..verify import verify_bipartite_expansion, verify_connected, verify_vertex_expansion
        n = self.n
        H = np.flatnonzero(self.inH).tolist()
        out = np.flatnonzero(~self.inH).tolist()
        s_max = max(1, n // 100)
        reps = [verify_connected(graph),
                verify_vertex_expansion(graph, range(n), s_max, 2, strict=True, samples=2000, rng=self.rng)]
        if out:
            # 8 at d=20; a fixed 8 is unreachable when each outside vertex has only d < 8 core neighbours
            factor = min(Fraction(8), Fraction(2 * self.p.d, 5))
            reps.append(verify_bipartite_expansion(graph, H, out, s_max, factor, samples=2000, rng=self.rng))
        self.notes["debug"] = [r.to_dict() for r in reps]

    def _begin_phase3(self, graph: Graph) -> None:
        self.set_phase("phase3")
        self.stage = "3"
        self.trials = self.hits = 0
        self.trial_left = self.T_boost
        self.notes["path_lengths"] = []
        best = None
        for i in range(max(1, self.p.search_restarts)):
            rule = ("most", "fewest")[i % 2]
            res = extend_or_close(graph, [self.rng.randrange(self.n)], rng=self.rng, rule=rule)
            if res.is_cycle and len(res.vertices) == self.n:
                self.finish(res.vertices)
                return
            if best is None or len(res.vertices) > len(best.vertices):
                best = res
        self._set_path(graph, best.vertices)

    def _set_path(self, graph: Graph, path: list[int]) -> None:
        self.path = path
        self.notes["path_lengths"].append(len(path) - 1)
        self.index = BoosterIndex(graph, path, r_cap=self.r_cap, rng=self.rng)
        self.inR = np.zeros(self.n, dtype=bool)
        self.inR[list(self.index.R)] = True

    # per round ----------------------------------------------------------

    def on_offer(self, offer, graph):
        st = self.stage
        if st == "1":
            return 0
        u, v = offer.u, offer.v
        if st == "2a":
            inH, dH = self.inH, self.dH
            mask = (inH[v] & ~inH[u] & (dH[u] == self.j)) | (inH[u] & ~inH[v] & (dH[v] == self.j))
            choice = pick_legal(offer, mask, graph, self.rng)
        elif st == "2b":
            inH, inX, below = self.inH, self.inX, self.dH < self.p.d
            hit = (inX[u] & inH[v]) | (inX[v] & inH[u])
            urgent = hit & ((inX[u] & below[u]) | (inX[v] & below[v]))
            choice = pick_legal(offer, urgent, graph, self.rng)
            if choice is None:
                choice = pick_legal(offer, hit, graph, self.rng)
        else:
            return self._booster_choice(offer, graph)
        if choice is None and self.p.fill_idle:
            choice = any_legal(offer, graph, self.rng)
        return choice

    def _booster_choice(self, offer, graph):
        inR = self.inR
        idx = np.flatnonzero(inR[offer.u] | inR[offer.v]).tolist()
        self.rng.shuffle(idx)
        for i in idx:
            a, b = offer.pair(i)
            res = self.index.realize(a, b)
            if res is not None:
                self._pending = res
                return i
        return None

    def on_applied(self, edge, added, graph):
        if added and self.stage != "1":
            a, b = edge
            if self.inH[a] != self.inH[b]:
                self.dH[b if self.inH[a] else a] += 1
        self.stage_rounds[self.stage] += 1
        if self.stage == "3":
            self._phase3_round(graph, added)
            return
        self.left -= 1
        if self.stage == "2a":
            self._skip_idle_level()
        elif self.p.early_stop and self.stage == "2b" and not (self.inX & (self.dH < self.p.d)).any():
            self.left = 0
        self._advance(graph)

    def _phase3_round(self, graph: Graph, added: bool) -> None:
        pending, self._pending = self._pending, None
        if pending is not None and added:
            self.hits += 1
            self.trials += 1
            self.trial_left = self.T_boost
            verts, is_cyc = pending
            if is_cyc:
                if len(verts) == self.n:
                    self.finish(verts)
                    return
                verts = open_cycle(graph, verts, rng=self.rng) or verts
            res = extend_or_close(graph, verts, rng=self.rng)
            if res.is_cycle and len(res.vertices) == self.n:
                self.finish(res.vertices)
                return
            self._set_path(graph, res.vertices)
        else:
            self.trial_left -= 1
            if self.trial_left <= 0:
                self.trials += 1
                self.trial_left = self.T_boost
        self.notes["trials"] = self.trials
        if self.trials >= self.max_trials:
            self.fail(f"no Hamilton cycle after {self.trials} trials")
