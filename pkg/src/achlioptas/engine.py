"""The Achlioptas process: K candidate edges per round, one kept (or none).

Randomness comes from one seed split into two independent named streams,
``offers`` and ``strategy``, so changing a strategy never perturbs the sequence
of offers a seed produces.
"""
from __future__ import annotations

import datetime
import enum
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

import numpy as np

from .graph import Graph

RNG_ALGORITHM = "numpy.PCG64+SeedSequence(seed,spawn_key=(stream,))"
OFFER_STREAM, STRATEGY_STREAM = 0, 1


class SamplingModel(str, enum.Enum):
    EXACT = "exact"        # K distinct edges missing from the current graph
    RELAXED = "relaxed"    # K iid ordered pairs from [n]^2, loops/repeats allowed


def make_streams(seed: int) -> tuple[np.random.Generator, random.Random]:
    """Offer generator and strategy RNG derived from one 64-bit seed."""
    offer = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(OFFER_STREAM,))))
    strat_seed = np.random.SeedSequence(seed, spawn_key=(STRATEGY_STREAM,)).generate_state(2, np.uint64)
    strategy = random.Random(int(strat_seed[0]) << 64 | int(strat_seed[1]))
    return offer, strategy


@dataclass(frozen=True)
class RoundOffer:
    round_index: int
    candidates: np.ndarray          # shape (K, 2), int64

    @property
    def u(self) -> np.ndarray:
        return self.candidates[:, 0]

    @property
    def v(self) -> np.ndarray:
        return self.candidates[:, 1]

    def __len__(self) -> int:
        return len(self.candidates)

    def pair(self, i: int) -> tuple[int, int]:
        a, b = self.candidates[i]
        return int(a), int(b)


class OfferError(RuntimeError):
    pass


class Strategy:
    """Online edge chooser.

    The engine calls :meth:`start` once, then per round :meth:`on_offer`
    (return a candidate index, or None to skip) followed by
    :meth:`on_applied`.  A strategy sees the offer, the current graph and its
    own state; nothing else.  Setting ``status`` to ``"done"`` (with a
    ``certificate``, or without one for pure construction strategies) or
    ``"failed"`` (with ``failed_phase``) ends the run.
    """

    name = "strategy"
    phases: tuple[str, ...] = ("main",)

    def __init__(self) -> None:
        self.phase = self.phases[0]
        self.status = "running"
        self.certificate: list[int] | None = None
        self.failed_phase: str | None = None
        self.notes: dict = {}

    def start(self, n: int, K: int, graph: Graph, rng: random.Random) -> None:
        self.n, self.K, self.rng = n, K, rng

    def on_offer(self, offer: RoundOffer, graph: Graph) -> int | None:
        raise NotImplementedError

    def on_applied(self, edge: tuple[int, int] | None, added: bool, graph: Graph) -> None:
        pass

    def params(self) -> dict:
        return {}

    # helpers for subclasses
    def set_phase(self, name: str) -> None:
        if self.phases.index(name) < self.phases.index(self.phase):
            raise RuntimeError(f"phase order violated: {self.phase} -> {name}")
        self.phase = name

    def fail(self, reason: str = "") -> None:
        self.status = "failed"
        self.failed_phase = self.phase
        if reason:
            self.notes["failure"] = reason

    def finish(self, cycle: list[int]) -> None:
        self.status = "done"
        self.certificate = list(cycle)


class Engine:
    """State of one run: graph, round counter, offer stream, optional ledger."""

    def __init__(self, n: int, K: int, model: SamplingModel | str = SamplingModel.RELAXED,
                 seed: int = 0, record_ledger: bool = False,
                 offers: Iterable[np.ndarray] | None = None):
        if n < 1 or K < 1:
            raise ValueError("need n >= 1 and K >= 1")
        self.n, self.K = n, K
        self.model = SamplingModel(model)
        self.seed = seed
        self.graph = Graph(n)
        self.round = 0
        self.discarded = 0
        self.offer_rng, self.strategy_rng = make_streams(seed)
        self.ledger: list[dict] | None = [] if record_ledger else None
        self._replay: Iterator[np.ndarray] | None = iter(offers) if offers is not None else None

    def next_offer(self) -> RoundOffer:
        if self._replay is not None:
            cands = np.asarray(next(self._replay), dtype=np.int64).reshape(-1, 2)
        elif self.model is SamplingModel.RELAXED:
            cands = self.offer_rng.integers(0, self.n, size=(self.K, 2), dtype=np.int64)
        else:
            cands = self._exact_candidates()
        return RoundOffer(self.round, cands)

    def _exact_candidates(self) -> np.ndarray:
        n, K, g = self.n, self.K, self.graph
        missing = n * (n - 1) // 2 - g.edge_count
        if missing < K:
            raise OfferError(f"only {missing} missing edges left, cannot offer K={K}")
        out: list[tuple[int, int]] = []
        taken: set[tuple[int, int]] = set()
        rng = self.offer_rng
        while len(out) < K:
            a, b = (int(x) for x in rng.integers(0, n, size=2))
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            if key in taken or g.has_edge(a, b):
                continue
            taken.add(key)
            out.append(key)
        return np.array(out, dtype=np.int64)

    def apply(self, offer: RoundOffer, choice: int | None) -> tuple[tuple[int, int] | None, bool]:
        edge, added = None, False
        if choice is not None:
            if not 0 <= choice < len(offer):
                raise IndexError(f"choice {choice} outside offer of size {len(offer)}")
            edge = offer.pair(choice)
            added = self.graph.add_edge(*edge)
            if not added:
                self.discarded += 1
        self.round += 1
        return edge, added

    def step(self, strategy: Strategy) -> tuple[RoundOffer, int | None]:
        offer = self.next_offer()
        choice = strategy.on_offer(offer, self.graph)
        edge, added = self.apply(offer, choice)
        if self.ledger is not None:
            self.ledger.append({"round": offer.round_index, "phase": strategy.phase,
                                "candidates": offer.candidates.tolist(), "choice": choice})
        strategy.on_applied(edge, added, self.graph)
        return offer, choice


@dataclass
class RunRecord:
    seed: int
    n: int
    K: int
    model: str
    strategy: str
    params: dict
    phase_rounds: dict[str, int]
    total_rounds: int
    outcome: str    # hamiltonian | completed | budget_exhausted | phase_failed | not_certified
    failed_phase: str | None = None
    certificate: list[int] | None = None
    edges: int = 0
    discarded: int = 0
    notes: dict = field(default_factory=dict)
    rng: str = RNG_ALGORITHM
    ledger: list[dict] | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def hamiltonian(self) -> bool:
        return self.outcome == "hamiltonian"

    def to_dict(self, with_ledger: bool = False) -> dict:
        d = {k: getattr(self, k) for k in (
            "seed", "n", "K", "model", "strategy", "params", "phase_rounds", "total_rounds",
            "outcome", "failed_phase", "certificate", "edges", "discarded", "notes", "rng")}
        if with_ledger:
            d["ledger"] = self.ledger
        d["metadata"] = self.metadata
        return d

    def to_json(self, with_ledger: bool = False) -> str:
        return json.dumps(self.to_dict(with_ledger), sort_keys=True, default=_jsonable)

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, enum.Enum):
        return x.value
    raise TypeError(f"not JSON serialisable: {type(x)}")


def write_ledger(ledger: list[dict], path) -> None:
    """JSON lines, one ``{round, candidates, choice, phase}`` object per round."""
    with open(path, "w") as fh:
        for rec in ledger:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_ledger(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


StopFn = Callable[[Graph, int], object]


def run(n: int, K: int, strategy: Strategy, *, seed: int = 0,
        model: SamplingModel | str = SamplingModel.RELAXED,
        stop: StopFn | None = None, max_rounds: int = 10**7,
        record_ledger: bool = False, offers: Iterable[np.ndarray] | None = None) -> RunRecord:
    """Step until the strategy finishes or fails, ``stop`` fires, or the budget runs out.

    ``stop(graph, rounds)`` may return a Hamilton cycle (list) to certify the
    outcome, or any truthy value to end the run without a certificate.
    """
    if max_rounds < 0:
        raise ValueError("max_rounds must be >= 0")
    eng = Engine(n, K, model, seed, record_ledger, offers)
    strategy.start(n, K, eng.graph, eng.strategy_rng)
    counts: dict[str, int] = {p: 0 for p in strategy.phases}
    certificate = None
    stopped = False
    while eng.round < max_rounds and strategy.status == "running":
        if stop is not None:
            res = stop(eng.graph, eng.round)
            if res:
                stopped = True
                certificate = res if isinstance(res, list) else None
                break
        phase = strategy.phase
        eng.step(strategy)
        counts[phase] = counts.get(phase, 0) + 1
    else:
        if stop is not None and strategy.status == "running":
            res = stop(eng.graph, eng.round)
            if res:
                stopped = True
                certificate = res if isinstance(res, list) else None

    failed = None
    if strategy.status == "done":
        certificate = strategy.certificate
        outcome = "hamiltonian" if certificate is not None else "completed"
    elif strategy.status == "failed":
        outcome, failed = "phase_failed", strategy.failed_phase
    elif strategy.status == "not_certified":
        outcome = "not_certified"
    elif stopped and certificate is not None:
        outcome = "hamiltonian"
    else:
        outcome = "budget_exhausted"
    if outcome == "hamiltonian":
        from .verify import verify_certificate
        if not verify_certificate(eng.graph, certificate):
            raise AssertionError("strategy emitted an invalid Hamilton cycle")

    return RunRecord(
        seed=seed, n=n, K=K, model=SamplingModel(model).value, strategy=strategy.name,
        params=strategy.params(), phase_rounds=counts, total_rounds=eng.round,
        outcome=outcome, failed_phase=failed, certificate=certificate,
        edges=eng.graph.edge_count, discarded=eng.discarded, notes=dict(strategy.notes),
        ledger=eng.ledger,
        metadata={"timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat()},
    )
