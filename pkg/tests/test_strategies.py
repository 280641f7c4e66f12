import math
import random
import statistics

import numpy as np
import pytest

from achlioptas.engine import Engine, RunRecord, run
from achlioptas.graph import Graph, peel_core
from achlioptas.posa import is_cycle
from achlioptas.strategies import (STRATEGIES, DOut, FirstEdge, Intermediate, PathCover, SkipAll, Sublog,
                                   SublogParams, Superlog, SuperlogParams, collect_all,
                                   degree_deficiency_probe, engine_offers, make_strategy, patch_cycles)
from achlioptas.verify import verify_certificate


def graph_from_ledger(n, ledger, T=None):
    g = Graph(n)
    for rec in ledger[:T]:
        if rec["choice"] is not None:
            a, b = rec["candidates"][rec["choice"]]
            if a != b:
                g.add_edge(a, b)
    return g


# registry ------------------------------------------------------------

def test_registry_builds_every_strategy():
    for name in STRATEGIES:
        for preset in ("desk", "fidelity"):
            assert make_strategy(name, preset).name == name


def test_registry_overrides_and_errors():
    s = make_strategy("sublog", "desk", {"d": 4, "epsilon": 0.25})
    assert s.p.d == 4 and s.p.epsilon == 0.25
    s = make_strategy("superlog", "desk", {"inner.d": 5, "h": 4.0})
    assert s.p.inner.d == 5 and s.p.h == 4.0
    assert make_strategy("d-out", "fidelity").epsilon == 0.1
    for bad in [("sublog", "desk", {"nope": 1}), ("first-edge", "desk", {"x": 1}),
                ("d-out", "desk", {"restarts": 3}), ("nope", "desk", None), ("sublog", "bogus", None)]:
        with pytest.raises(ValueError):
            make_strategy(*bad)


def test_fidelity_validation():
    with pytest.raises(ValueError):
        SublogParams(epsilon=0.5).validate(fidelity=True)
    SublogParams().validate(fidelity=True)
    with pytest.raises(ValueError):
        SuperlogParams(h=1.0).validate()


# baselines -----------------------------------------------------------

def test_first_edge_is_the_plain_process():
    rec = run(100, 3, FirstEdge(), seed=4, max_rounds=150, record_ledger=True)
    assert all(r["choice"] == 0 for r in rec.ledger)
    assert rec.edges + rec.discarded == 150


def test_skip_keeps_nothing():
    rec = run(50, 2, SkipAll(), seed=0, max_rounds=20)
    assert rec.edges == 0 and rec.outcome == "budget_exhausted"


# sublog --------------------------------------------------------------

def test_sublog_with_single_candidate():
    # K=1 leaves no choice at all: every phase keeps whatever comes
    rec = run(400, 1, make_strategy("sublog"), seed=0, record_ledger=True)
    assert rec.outcome == "hamiltonian", rec.failed_phase
    assert sum(rec.phase_rounds.values()) == rec.total_rounds
    assert verify_certificate(graph_from_ledger(400, rec.ledger), rec.certificate)


def test_sublog_phase2_gives_core_neighbours():
    strat = make_strategy("sublog", "desk", {"debug": True})
    rec = run(2000, 4, strat, seed=3)
    assert rec.outcome == "hamiltonian"
    assert rec.notes["core_size"] >= (1 - 1 / strat.D) * 2000
    for rep in rec.notes["debug"]:
        assert rep["passed"], rep
    # every vertex outside the core ended phase 2 with d neighbours inside it
    outside = ~strat.inH
    assert (strat.dH[outside] >= strat.p.d).all()


def test_sublog_phase3_paths_only_grow():
    strat = Sublog(SublogParams.desk())
    strat.p.fill_idle = False          # leave work for phase 3
    rec = run(1500, 2, strat, seed=1)
    lens = rec.notes.get("path_lengths", [])
    assert all(b > a for a, b in zip(lens, lens[1:]))
    assert rec.outcome == "hamiltonian"


def test_sublog_phase_failure_is_reported():
    rec = run(500, 2, make_strategy("sublog", "desk", {"phase1_factor": 0.1}), seed=0)
    assert rec.outcome == "phase_failed" and rec.failed_phase == "phase1"
    assert rec.notes["core_size"] < 250


# d-out ---------------------------------------------------------------

def out_lists(n, ledger):
    out = [[] for _ in range(n)]
    for rec in ledger:
        if rec["choice"] is not None:
            a, b = rec["candidates"][rec["choice"]]
            if a != b and b not in out[a] and len(out[a]) < 3:
                out[a].append(b)
    return out


@pytest.mark.parametrize("preset", ["desk", "fidelity"])
def test_dout_builds_a_3_out_graph(preset):
    n = 300
    strat = make_strategy("d-out", preset)
    rec = run(n, 8, strat, seed=2, record_ledger=True)
    if rec.outcome != "completed":
        assert preset == "fidelity" and rec.failed_phase == "stage2"
        return
    out = out_lists(n, rec.ledger)
    assert all(len(o) == 3 for o in out)
    assert out == strat.out
    # the kept graph is exactly the undirected 3-out graph
    want = Graph.from_edges(n, [(a, b) for a in range(n) for b in out[a]])
    assert graph_from_ledger(n, rec.ledger) == want
    # every kept pair is a useful pick (no repeats, no loops, no full vertex)
    assert rec.discarded <= rec.edges


def test_dout_zero_is_immediate():
    rec = run(50, 2, DOut(d=0), seed=0)
    assert rec.outcome == "completed" and rec.total_rounds == 0


def test_dout_rejects_bad_params():
    with pytest.raises(ValueError):
        DOut(d=-1)
    with pytest.raises(ValueError):
        DOut(epsilon=0)


def test_intermediate_certifies():
    rec = run(300, 6, make_strategy("intermediate"), seed=1)
    assert rec.outcome == "hamiltonian"
    assert rec.total_rounds <= 1.5 * (3 + math.log(300) / 6) * 300


# superlog ------------------------------------------------------------

def test_patch_two_squares():
    cx, cy = [0, 1, 2, 3], [4, 5, 6, 7]
    g = Graph.from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5)])
    c = patch_cycles(cx, cy, 0, 4)
    assert c == [0, 3, 2, 1, 5, 6, 7, 4]
    assert verify_certificate(g, c)


def test_patch_with_singleton():
    # x+ = x for a one-vertex cycle
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 0), (3, 0), (3, 1)])
    c = patch_cycles([3], [0, 1, 2], 3, 0)
    assert verify_certificate(g, c)


def test_path_cover_check():
    g = Graph.path(6)
    pc = PathCover(6, [0, 5])
    pc.extend(0, 1)
    pc.extend(5, 4)
    pc.check(g, L=2)
    with pytest.raises(AssertionError):
        pc.check(g, L=1)
    pc.extend(1, 3)               # 1-3 is not an edge
    with pytest.raises(AssertionError):
        pc.check(g)


def test_superlog_small_n_with_debug_checks():
    # h and L scaled down so the expander core survives at n=3000
    strat = make_strategy("superlog", "desk", {"debug": True, "h": 4.0, "L": 10})
    rec = run(3000, 3000, strat, seed=0)
    assert rec.outcome == "hamiltonian", (rec.failed_phase, rec.notes)
    assert sum(rec.phase_rounds.values()) == rec.total_rounds
    notes = rec.notes
    # L paths need L-1 joins and one closing connector
    assert notes["connectors"] == 10
    assert notes["I_max"] <= notes["connectors"] * 3 * math.log(strat.m)
    # the rest went through the inner sparse run and was spliced in by one patch
    assert notes["X4"] > 2 and notes["patches"] == 1


def test_superlog_rejects_small_k():
    with pytest.raises(ValueError):
        run(1000, 2, Superlog(SuperlogParams()), seed=0)


@pytest.mark.xfail(strict=True, reason="K = ceil(8 ln n) is far too small for phase 1 at n=20000")
def test_superlog_at_log_k():
    n = 20000
    rec = run(n, math.ceil(8 * math.log(n)), make_strategy("superlog"), seed=0)
    assert rec.outcome == "hamiltonian"


# offline references --------------------------------------------------

def test_collect_all_single_candidate_is_the_standard_process():
    n = 300
    rec = run(n, 1, FirstEdge(), seed=5, max_rounds=3000, record_ledger=True)
    res = collect_all(rec.ledger, n, rng=random.Random(0))
    # union of single offers == graph kept by first-edge
    degs = np.zeros(n, dtype=int)
    g = Graph(n)
    md2 = None
    for t, r in enumerate(rec.ledger, 1):
        a, b = r["candidates"][0]
        if a != b and g.add_edge(a, b):
            degs[[a, b]] += 1
        if md2 is None and degs.min() >= 2:
            md2 = t
    assert res.min_degree2_round == md2
    if res.hamilton_round is not None:
        assert verify_certificate(graph_from_ledger(n, rec.ledger, res.hamilton_round), res.certificate)
        assert res.hamilton_round >= md2


def test_collect_all_union_size():
    n, K = 200, 5
    offers = list(next(it) for it in [engine_offers(n, K, 3)] for _ in range(400))
    res = collect_all(offers, n, max_rounds=400, rng=random.Random(0))
    assert res.rounds_seen <= 400
    edges = {tuple(sorted(map(int, p))) for o in offers for p in o if p[0] != p[1]}
    assert len(edges) <= 400 * K
    # replaying through the engine yields the same offers
    eng = Engine(n, K, seed=3)
    assert np.array_equal(eng.next_offer().candidates, offers[0])


def test_collect_all_scales_with_k():
    n = 2000
    base = [collect_all(engine_offers(n, 1, s), n, rng=random.Random(s)).hamilton_round for s in range(5)]
    four = [collect_all(engine_offers(n, 4, s), n, rng=random.Random(s)).hamilton_round for s in range(5)]
    ratio = statistics.median(four) / (statistics.median(base) / 4)
    assert 0.8 <= ratio <= 1.2


def test_engine_offers_rejects_exact_model():
    with pytest.raises(ValueError):
        next(engine_offers(10, 2, 0, "exact"))


def test_probe_basics():
    n = 100
    rec = run(n, 2, FirstEdge(), seed=0, max_rounds=200, record_ledger=True)
    assert degree_deficiency_probe(rec, 1, 0) == n
    assert degree_deficiency_probe(rec, 0, 200) == 0
    g = graph_from_ledger(n, rec.ledger, 120)
    assert degree_deficiency_probe(rec, 2, 120) == sum(1 for k in g.degrees if k < 2)
    with pytest.raises(ValueError):
        degree_deficiency_probe(rec, 2, 201)
    bare = RunRecord.from_dict(rec.to_dict())
    with pytest.raises(ValueError):
        degree_deficiency_probe(bare, 2, 10)


# cross-cutting -------------------------------------------------------

PHASE_CASES = [("sublog", 800, 3, {}), ("d-out", 400, 6, {}), ("intermediate", 400, 6, {}),
               ("superlog", 2000, 1000, {"h": 3.0, "L": 8})]


@pytest.mark.parametrize("name,n,K,ov", PHASE_CASES)
def test_ledger_replay_reproduces_choices(name, n, K, ov):
    rec = run(n, K, make_strategy(name, "desk", ov), seed=7, record_ledger=True)
    again = run(n, K, make_strategy(name, "desk", ov), seed=7, record_ledger=True,
                offers=[r["candidates"] for r in rec.ledger])
    assert [r["choice"] for r in again.ledger] == [r["choice"] for r in rec.ledger]
    # phases only move forward
    order = make_strategy(name).phases
    idx = [order.index(r["phase"]) for r in rec.ledger]
    assert idx == sorted(idx)


def test_relaxed_discards_are_rare():
    n = 10_000
    rec = run(n, 4, make_strategy("sublog"), seed=0)
    assert rec.outcome == "hamiltonian"
    assert rec.discarded / rec.total_rounds < 0.01
