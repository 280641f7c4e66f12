"""Offline references computed from the offer stream rather than played online.

``collect_all`` keeps every offered edge, which no online rule can beat, so
its hitting times are lower-bound curves.  ``degree_deficiency_probe``
replays the kept edges of a recorded run.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from ..engine import Engine, RunRecord, SamplingModel
from ..graph import Graph
from ..posa import hamiltonicity_search


def engine_offers(n: int, K: int, seed: int = 0,
                  model: SamplingModel | str = SamplingModel.RELAXED) -> Iterator[np.ndarray]:
    """The offer stream a run with this seed would see, as (K, 2) arrays.

    Only valid for the relaxed model, where offers do not depend on the graph.
    """
    if SamplingModel(model) is not SamplingModel.RELAXED:
        raise ValueError("offers of the exact model depend on the chosen edges")
    eng = Engine(n, K, model, seed)
    while True:
        yield eng.next_offer().candidates
        eng.round += 1


def _candidates(item) -> np.ndarray:
    if isinstance(item, dict):
        item = item["candidates"]
    return np.asarray(item, dtype=np.int64).reshape(-1, 2)


@dataclass
class CollectAllResult:
    n: int
    rounds_seen: int
    min_degree2_round: int | None
    hamilton_round: int | None
    certificate: list[int] | None
    searches: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


class _Union:
    """Union graph of all offers, with the round at which each edge first appeared."""

    def __init__(self, n: int):
        self.n = n
        self.g = Graph(n)
        self.stamps: list[tuple[int, int, int]] = []
        self.rounds = 0
        self.low = n          # vertices of degree < 2
        self.md2_round: int | None = None if n > 2 else 0

    def feed(self, cands: np.ndarray) -> None:
        self.rounds += 1
        for a, b in cands.tolist():
            if a != b and self.g.add_edge(a, b):
                self.stamps.append((self.rounds, a, b))
                for w in (a, b):
                    if self.g.degree(w) == 2:
                        self.low -= 1
        if self.md2_round is None and self.low == 0:
            self.md2_round = self.rounds

    def at(self, t: int) -> Graph:
        g = Graph(self.n)
        for r, a, b in self.stamps:
            if r > t:
                break
            g.add_edge(a, b)
        return g


def collect_all(offers: Iterable, n: int, max_rounds: int | None = None, restarts: int = 20,
                rng: random.Random | None = None) -> CollectAllResult:
    """Hitting times of min degree 2 and of a certified Hamilton cycle in the union of offers.

    ``offers`` yields per-round candidate arrays or ledger records.  The
    Hamiltonicity time is found by galloping forward from the min-degree-2
    time and then bisecting; since the search is one-sided, the reported
    round is the first one the search certifies along that schedule.
    """
    rng = rng or random.Random(0)
    u = _Union(n)
    it = iter(offers)
    searches = 0
    cache: dict[int, list[int] | None] = {}

    def pull_to(t: int) -> bool:
        while u.rounds < t:
            try:
                item = next(it)
            except StopIteration:
                return False
            u.feed(_candidates(item))
        return True

    def certify(t: int) -> list[int] | None:
        nonlocal searches
        if t not in cache:
            searches += 1
            cache[t] = hamiltonicity_search(u.at(t), restarts=restarts, rng=rng)
        return cache[t]

    limit = max_rounds if max_rounds is not None else float("inf")
    while u.md2_round is None and u.rounds < limit:
        if not pull_to(u.rounds + 1):
            break
    if u.md2_round is None:
        return CollectAllResult(n, u.rounds, None, None, None, searches)

    lo, hi, cert = u.md2_round - 1, None, None
    step = max(1, n // 100)
    t = u.md2_round
    while True:
        t = min(t, limit)
        more = pull_to(t)
        t = min(t, u.rounds)
        cert = certify(t)
        if cert is not None:
            hi = t
            break
        lo = t
        if not more or t >= limit:
            break
        t += step
        step *= 2
    if hi is None:
        return CollectAllResult(n, u.rounds, u.md2_round, None, None, searches)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        c = certify(mid)
        if c is not None:
            hi, cert = mid, c
        else:
            lo = mid
    return CollectAllResult(n, u.rounds, u.md2_round, hi, cert, searches)


def degree_deficiency_probe(record: RunRecord, d: int, T: int) -> int:
    """Vertices of degree below ``d`` in the kept graph after exactly ``T`` rounds."""
    if record.ledger is None:
        raise ValueError("the record carries no ledger; rerun with record_ledger=True")
    if T < 0 or T > len(record.ledger):
        raise ValueError(f"T={T} outside the {len(record.ledger)} recorded rounds")
    g = Graph(record.n)
    for rec in record.ledger[:T]:
        c = rec["choice"]
        if c is not None:
            a, b = rec["candidates"][c]
            if a != b:
                g.add_edge(a, b)
    return sum(1 for k in g.degrees if k < d)
