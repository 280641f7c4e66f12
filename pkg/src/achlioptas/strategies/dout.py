"""Random d-out graphs built online, and the intermediate-regime strategy on top.

Only the first coordinate of each ordered pair matters: choosing ``(a, b)``
gives ``a`` the out-neighbour ``b``.  A vertex keeps its first ``d`` distinct
out-neighbours; later picks for it would be wasted, so they are never
preferred.  Needs the relaxed sampling model (ordered iid pairs).
"""
from __future__ import annotations

import math

import numpy as np

from ..engine import Strategy
from ..graph import Graph
from ..posa import hamiltonicity_search


class DOut(Strategy):
    name = "d-out"
    phases = ("stage1", "stage2")

    def __init__(self, d: int = 3, epsilon: float = 0.1, fill_idle: bool = False):
        super().__init__()
        if d < 0:
            raise ValueError("d must be >= 0")
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        self.d, self.epsilon, self.fill_idle = d, epsilon, fill_idle

    def params(self) -> dict:
        return {"d": self.d, "epsilon": self.epsilon, "fill_idle": self.fill_idle,
                "T1": self.T1, "T2": self.T2}

    def start(self, n, K, graph, rng):
        super().start(n, K, graph, rng)
        d, eps = self.d, self.epsilon
        self.T1 = math.ceil((1 + eps / (2 * d)) * n) if d else 0
        self.T2 = math.ceil((1 + eps) * n / K * math.log(max(n, 2)))
        self.out: list[list[int]] = [[] for _ in range(n)]
        self.count = np.zeros(n, dtype=np.int64)
        self.inU = np.zeros(n, dtype=bool)
        self.j, self.left = 0, self.T1
        self.stage_rounds = {"stage1": 0, "stage2": 0}
        self.notes["stage_rounds"] = self.stage_rounds
        if d == 0:
            self._complete(graph)
            return
        self._advance(graph)

    def _advance(self, graph: Graph) -> None:
        if self.phase == "stage1":
            while self.j < self.d and (self.left <= 0 or not (self.count == self.j).any()):
                self.j += 1
                self.left = self.T1
            if self.j < self.d:
                return
            self.inU = self.count < self.d
            self.notes["U"] = int(self.inU.sum())
            self.set_phase("stage2")
            self.left = self.T2
        if not (self.count < self.d).any():
            self._complete(graph)
        elif self.left <= 0:
            self.fail(f"{int((self.count < self.d).sum())} vertices below out-degree {self.d}")

    def _complete(self, graph: Graph) -> None:
        self.status = "done"

    def on_offer(self, offer, graph):
        u, v = offer.u, offer.v
        cu = self.count[u]
        if self.phase == "stage1":
            choice = self._pick(offer, cu == self.j)
            if choice is None and self.fill_idle:
                # lowest out-count first; second coordinates stay uniform either way
                for c in range(self.d):
                    choice = self._pick(offer, cu == c)
                    if choice is not None:
                        break
            return choice
        return self._pick(offer, self.inU[u] & (cu < self.d))

    def _pick(self, offer, mask):
        idx = np.flatnonzero(mask & (offer.u != offer.v)).tolist()
        self.rng.shuffle(idx)
        for i in idx:
            a, b = offer.pair(i)
            if b not in self.out[a]:
                return i
        return None

    def on_applied(self, edge, added, graph):
        self.stage_rounds[self.phase] += 1
        if edge is not None:
            a, b = edge
            if a != b and b not in self.out[a] and self.count[a] < self.d:
                self.out[a].append(b)
                self.count[a] += 1
        self.left -= 1
        self._advance(graph)


class Intermediate(DOut):
    """Build a 3-out graph, then certify a Hamilton cycle in it.

    The reported rounds are the construction rounds only.  If the search
    finds nothing the outcome is ``not_certified``, which says nothing about
    whether the graph is Hamiltonian.
    """

    name = "intermediate"

    def __init__(self, d: int = 3, epsilon: float = 0.1, fill_idle: bool = False,
                 restarts: int = 50):
        super().__init__(d, epsilon, fill_idle)
        self.restarts = restarts

    def params(self) -> dict:
        return {**super().params(), "restarts": self.restarts}

    def _complete(self, graph: Graph) -> None:
        cycle = hamiltonicity_search(graph, restarts=self.restarts, rng=self.rng)
        if cycle is None:
            self.status = "not_certified"
        else:
            self.finish(cycle)
