import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from achlioptas.engine import (Engine, OfferError, RunRecord, SamplingModel, Strategy, make_streams,
                               read_ledger, run, write_ledger)
from achlioptas.strategies import FirstEdge, SkipAll


def test_streams_are_independent_and_seeded():
    a1, s1 = make_streams(5)
    a2, s2 = make_streams(5)
    assert np.array_equal(a1.integers(0, 100, 20), a2.integers(0, 100, 20))
    assert s1.random() == s2.random()
    b, _ = make_streams(6)
    assert not np.array_equal(make_streams(5)[0].integers(0, 10**9, 5), b.integers(0, 10**9, 5))


def test_offers_do_not_depend_on_strategy():
    r1 = run(50, 3, FirstEdge(), seed=2, max_rounds=40, record_ledger=True)
    r2 = run(50, 3, SkipAll(), seed=2, max_rounds=40, record_ledger=True)
    assert [x["candidates"] for x in r1.ledger] == [x["candidates"] for x in r2.ledger]
    assert r2.edges == 0 and r1.edges + r1.discarded == 40


@given(st.integers(3, 30), st.integers(1, 6), st.integers(0, 10**6))
def test_exact_model_offers_distinct_missing_edges(n, K, seed):
    eng = Engine(n, K, "exact", seed)
    strat = FirstEdge()
    strat.start(n, K, eng.graph, eng.strategy_rng)
    total = n * (n - 1) // 2
    while total - eng.graph.edge_count >= K and eng.round < 60:
        offer = eng.next_offer()
        keys = {(min(a, b), max(a, b)) for a, b in offer.candidates.tolist()}
        assert len(keys) == K
        assert all(a != b and not eng.graph.has_edge(a, b) for a, b in keys)
        eng.apply(offer, 0)
    if total - eng.graph.edge_count < K:
        with pytest.raises(OfferError):
            eng.next_offer()


@given(st.integers(2, 40), st.integers(1, 8), st.integers(0, 10**6))
def test_relaxed_model_offers_shape_and_range(n, K, seed):
    eng = Engine(n, K, SamplingModel.RELAXED, seed)
    off = eng.next_offer()
    assert off.candidates.shape == (K, 2)
    assert off.candidates.min() >= 0 and off.candidates.max() < n


def test_relaxed_round_counts_when_loop_or_duplicate_is_chosen():
    # replayed offers: a loop, then an edge, then the same edge again
    offers = [[[1, 1]], [[0, 1]], [[1, 0]]]
    rec = run(3, 1, FirstEdge(), offers=offers, max_rounds=3)
    assert rec.total_rounds == 3 and rec.edges == 1 and rec.discarded == 2


def test_round_budget_and_phase_sums():
    rec = run(30, 2, SkipAll(), seed=0, max_rounds=17)
    assert rec.outcome == "budget_exhausted"
    assert rec.total_rounds == 17 == sum(rec.phase_rounds.values())
    assert rec.edges == 0
    with pytest.raises(ValueError):
        run(10, 1, SkipAll(), max_rounds=-1)
    with pytest.raises(ValueError):
        Engine(0, 1)


def test_choice_out_of_range():
    eng = Engine(5, 2, seed=0)
    with pytest.raises(IndexError):
        eng.apply(eng.next_offer(), 2)


class _Liar(Strategy):
    name = "liar"

    def on_offer(self, offer, graph):
        self.finish([0, 1, 2])
        return None


def test_invalid_certificate_is_refused():
    with pytest.raises(AssertionError):
        run(3, 1, _Liar(), seed=0, max_rounds=5)


def test_stop_predicate_certificate():
    def stop(graph, rounds):
        return [0, 1, 2] if graph.edge_count == 3 else None
    offers = [[[0, 1]], [[1, 2]], [[2, 0]]]
    rec = run(3, 1, FirstEdge(), offers=offers, stop=stop, max_rounds=10)
    assert rec.outcome == "hamiltonian" and rec.total_rounds == 3 and rec.certificate == [0, 1, 2]


def test_record_and_ledger_roundtrip(tmp_path):
    rec = run(20, 2, FirstEdge(), seed=9, max_rounds=25, record_ledger=True)
    back = RunRecord.from_dict(json.loads(rec.to_json()))
    assert back.to_dict() == rec.to_dict()
    p = tmp_path / "l.jsonl"
    write_ledger(rec.ledger, p)
    assert read_ledger(p) == rec.ledger
    assert [x["round"] for x in rec.ledger] == list(range(25))
    replay = run(20, 2, FirstEdge(), offers=[x["candidates"] for x in rec.ledger], max_rounds=25)
    assert replay.edges == rec.edges


def test_same_seed_same_record():
    a = run(200, 4, FirstEdge(), seed=3, max_rounds=300).to_dict()
    b = run(200, 4, FirstEdge(), seed=3, max_rounds=300).to_dict()
    a.pop("metadata"), b.pop("metadata")
    assert a == b
