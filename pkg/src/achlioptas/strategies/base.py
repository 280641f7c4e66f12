"""Shared pieces for strategies: candidate picking, baselines, stop predicates."""
from __future__ import annotations

import random

import numpy as np

from ..engine import RoundOffer, Strategy
from ..graph import Graph
from ..posa import hamiltonicity_search


def pick_legal(offer: RoundOffer, mask: np.ndarray, graph: Graph, rng: random.Random) -> int | None:
    """Uniform choice among masked candidates that would actually add an edge.

    Loops and present edges are never chosen while a usable candidate exists;
    if only such candidates are masked, None.
    """
    idx = np.flatnonzero(mask)
    if len(idx) == 0:
        return None
    adj = graph.adj
    cands = offer.candidates
    i = int(idx[rng.randrange(len(idx))]) if len(idx) > 1 else int(idx[0])
    a, b = int(cands[i, 0]), int(cands[i, 1])
    if a != b and b not in adj[a]:
        return i
    ok = [int(j) for j in idx if cands[j, 0] != cands[j, 1] and int(cands[j, 1]) not in adj[int(cands[j, 0])]]
    return ok[rng.randrange(len(ok))] if ok else None


def first_legal(offer: RoundOffer, mask: np.ndarray, graph: Graph) -> int | None:
    """Lowest-index masked candidate that adds an edge."""
    adj = graph.adj
    cands = offer.candidates
    for j in np.flatnonzero(mask):
        a, b = int(cands[j, 0]), int(cands[j, 1])
        if a != b and b not in adj[a]:
            return int(j)
    return None


def any_legal(offer: RoundOffer, graph: Graph, rng: random.Random) -> int | None:
    return pick_legal(offer, np.ones(len(offer), dtype=bool), graph, rng)


class FirstEdge(Strategy):
    """Always keep candidate 0; with K=1 this is the plain random graph process."""

    name = "first-edge"

    def on_offer(self, offer, graph):
        return 0


class SkipAll(Strategy):
    name = "skip"

    def on_offer(self, offer, graph):
        return None


class HamiltonStop:
    """Stop predicate that certifies Hamiltonicity of the current graph.

    Cheap necessary conditions are checked every ``every`` rounds; the
    rotation-extension search only runs once the minimum degree is 2.
    """

    def __init__(self, every: int = 0, restarts: int = 20, seed: int = 0):
        self.every = every
        self.restarts = restarts
        self.rng = random.Random(seed)
        self.searches = 0

    def __call__(self, graph: Graph, rounds: int):
        every = self.every or max(1, graph.n // 100)
        if rounds % every or graph.edge_count < graph.n:
            return None
        if graph.min_degree() < 2:
            return None
        self.searches += 1
        return hamiltonicity_search(graph, restarts=self.restarts, rng=self.rng)
