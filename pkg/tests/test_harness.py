import csv
import io
import json
import math
import os

import pytest

import oracles
from achlioptas import harness as H
from achlioptas.cli import main
from achlioptas.graph import Graph, peel_core

FIX = os.path.join(os.path.dirname(__file__), "fixtures")


def strip_meta(text):
    d = json.loads(text)
    d.pop("metadata", None)
    return d


def test_parse_k_and_seeds():
    assert H.parse_k("8", 1000) == 8
    assert H.parse_k("2ln", 1000) == 14
    assert H.parse_k("ln", 1000) == 7
    assert H.parse_k(3, 10) == 3
    assert H.parse_seeds(3) == [0, 1, 2]
    assert H.parse_seeds("4") == [0, 1, 2, 3]
    assert H.parse_seeds("5,9") == [5, 9]
    assert H.parse_seeds([1, "2"]) == [1, 2]


@pytest.mark.parametrize("bad", [
    {"strategy": "nope"}, {"n": 2}, {"k": []}, {"k": [0]}, {"seeds": []}, {"model": "lazy"},
    {"stop": "never"}, {"jobs": 0}, {"max_rounds": -1}, {"params": {"zzz": 1}},
])
def test_config_validation(bad):
    with pytest.raises(H.ConfigError):
        H.ExperimentConfig.from_dict(bad).validate()


def test_unknown_config_key():
    with pytest.raises(H.ConfigError):
        H.ExperimentConfig.from_dict({"colour": "red"})


def test_cli_run_is_deterministic(tmp_path, capsys):
    outs = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        rc = main(["run", "--strategy", "sublog", "--n", "600", "--k", "3", "--seed", "4", "--out", str(p)])
        assert rc == 0
        outs.append(p.read_text())
    a, b = strip_meta(outs[0]), strip_meta(outs[1])
    assert a == b
    assert sum(a["phase_rounds"].values()) == a["total_rounds"]
    assert a["outcome"] == "hamiltonian"


def test_cli_run_writes_ledger_and_probe_reads_it(tmp_path, capsys):
    rec, led = tmp_path / "r.json", tmp_path / "l.jsonl"
    rc = main(["run", "--strategy", "first-edge", "--n", "200", "--k", "2", "--seed", "1",
               "--max-rounds", "150", "--stop", "none", "--ledger", str(led), "--out", str(rec)])
    assert rc == 1                      # budget ran out, no Hamilton cycle
    assert len(H.read_ledger(led)) == 150
    capsys.readouterr()
    assert main(["oracle", "probe", "--record", str(rec), "--ledger", str(led), "--d", "1", "--T", "0"]) == 0
    assert json.loads(capsys.readouterr().out)["deficient"] == 200
    assert main(["oracle", "probe", "--record", str(rec), "--d", "1", "--T", "5"]) == 2   # no ledger


def test_collect_all_analyze_over_a_ledger(tmp_path, capsys):
    led = tmp_path / "l.jsonl"
    main(["run", "--strategy", "first-edge", "--n", "150", "--k", "2", "--seed", "0", "--stop", "none",
          "--max-rounds", "1500", "--ledger", str(led), "--out", str(tmp_path / "r.json")])
    capsys.readouterr()
    assert main(["run", "--strategy", "collect-all-analyze", "--n", "150", "--ledger", str(led)]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["rounds_seen"] <= 1500
    assert res["hamilton_round"] is None or res["hamilton_round"] >= res["min_degree2_round"]
    assert main(["run", "--strategy", "collect-all-analyze", "--n", "150"]) == 2


def test_oracle_collect_all_cli(capsys):
    assert main(["oracle", "collect-all", "--n", "200", "--k", "3", "--seed", "2"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["hamilton_round"] is not None and len(res["certificate"]) == 200


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"strategy": "d-out", "n": 300, "k": [5], "seeds": [2], "preset": "fidelity",
                               "params": {"d": 2}}))
    assert main(["run", "--config", str(cfg), "--desk", "--param", "epsilon=0.7"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["n"] == 300 and rec["K"] == 5 and rec["seed"] == 2
    assert rec["params"]["d"] == 2 and rec["params"]["epsilon"] == 0.7 and rec["params"]["fill_idle"] is True


def test_bad_config_exit_code(capsys):
    assert main(["run", "--strategy", "sublog", "--n", "2", "--k", "2", "--seed", "0"]) == 2
    assert main(["run", "--strategy", "sublog", "--n", "100", "--k", "2", "--seed", "0",
                 "--param", "nonsense=1"]) == 2
    assert main(["sweep", "--strategy", "sublog", "--n", "100", "--k-list", "2", "--seeds", "1",
                 "--param", "novalue"]) == 2


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_csv_layout(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--strategy", "d-out", "--n", "300", "--k-list", "4,ln", "--seeds", "1",
                 "--out", str(out)]) == 0
    rows = read_csv(out.read_text())
    head = out.read_text().splitlines()[0].split(",")
    assert head[:5] == ["row", "strategy", "n", "K", "seed"]
    assert "phase:stage1" in head and "total" in head and "outcome" in head
    runs = [r for r in rows if r["row"] == "run"]
    aggs = [r for r in rows if r["row"] == "aggregate"]
    assert [r["K"] for r in runs] == ["4", "6"]
    assert len(aggs) == 2
    for r in runs:
        assert int(r["phase:stage1"]) + int(r["phase:stage2"]) == int(r["total"])
    assert all(a["stddev_total"] == "" for a in aggs)     # a single seed has no spread


def test_sweep_parallel_matches_serial():
    base = dict(strategy="sublog", n=500, k=[2, 4], seeds=[0, 1, 2])
    serial = H.sweep(H.ExperimentConfig(**base, jobs=1))
    par = H.sweep(H.ExperimentConfig(**base, jobs=2))
    assert [strip_meta(r.to_json()) for r in serial] == [strip_meta(r.to_json()) for r in par]
    assert H.to_csv(serial) == H.to_csv(par)


def test_summarize_statistics():
    recs = H.sweep(H.ExperimentConfig(strategy="d-out", n=200, k=[4], seeds=[0, 1, 2]))
    agg = H.summarize(recs)[0]
    totals = sorted(r.total_rounds for r in recs if r.outcome in H.SUCCESS)
    assert agg["runs"] == 3 and agg["successes"] == len(totals)
    assert agg["median_total"] == totals[len(totals) // 2]
    assert agg["stddev_total"] is not None


def test_crashed_run_is_recorded(monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("kaput")
    monkeypatch.setattr(H, "run_one", boom)
    recs = H.sweep(H.ExperimentConfig(strategy="skip", n=20, k=[1], seeds=[0]))
    assert recs[0].outcome == "error" and "kaput" in recs[0].notes["error"]


# verify ------------------------------------------------------------------

def test_verify_certificate_and_tampering(tmp_path, capsys):
    rec = tmp_path / "r.json"
    assert main(["run", "--strategy", "sublog", "--n", "300", "--k", "2", "--seed", "0", "--out", str(rec)]) == 0
    d = json.loads(rec.read_text())
    # rebuild a graph holding exactly the certificate's cycle
    cyc = d["certificate"]
    g = Graph.from_edges(300, zip(cyc, cyc[1:] + cyc[:1]))
    gp = tmp_path / "g.edges"
    gp.write_text(g.to_edgelist())
    capsys.readouterr()
    assert main(["verify", "--graph", str(gp), "--cycle", str(rec), "--lemma", "certificate"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "pass"
    cyc[3], cyc[4] = cyc[4], cyc[3]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cyc))
    assert main(["verify", "--graph", str(gp), "--cycle", str(bad), "--lemma", "certificate"]) == 1
    assert main(["verify", "--graph", str(gp), "--lemma", "certificate"]) == 2


def test_verify_core_size_on_stored_gnp(capsys):
    path = os.path.join(FIX, "gnp1000_D10.edges")
    assert main(["verify", "--graph", path, "--lemma", "core-size", "--param", "D=10"]) == 0
    rep = json.loads(capsys.readouterr().out)
    g = H.read_graph(path)
    assert len(peel_core(g, 10)) >= 0.9 * 1000
    assert rep["passed"]


def test_verify_unknown_lemma(capsys):
    path = os.path.join(FIX, "g24.edges")
    assert main(["verify", "--graph", path, "--lemma", "girth"]) == 2


def test_golden_expansion_report(tmp_path):
    path = os.path.join(FIX, "g24.edges")
    out = tmp_path / "rep.json"
    rc = main(["verify", "--graph", path, "--lemma", "vertex-expansion", "--param", "s_max=4",
               "--param", "factor=2", "--out", str(out)])
    golden = open(os.path.join(FIX, "g24_expansion.json")).read()
    assert out.read_text() == golden
    rep = json.loads(golden)
    assert rc == 1 and rep["sampling"] == {"mode": "exhaustive", "sets_checked": sum(math.comb(24, s) for s in range(1, 5))}
    g = H.read_graph(path)
    want = oracles.expansion_violations([set(a) for a in g.adj], range(24), 4, 2)
    assert [[list(S), c] for S, c in want] == rep["witnesses"]


def test_verify_all_lemmas_run(capsys):
    path = os.path.join(FIX, "gnp1000_D10.edges")
    args = ["verify", "--graph", path, "--param", "samples=200", "--param", "s_max=5", "--param", "D=10"]
    for lem in H.LEMMAS:
        if lem != "certificate":
            args += ["--lemma", lem]
    main(args)
    reps = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [r["lemma"] for r in reps] == [x for x in H.LEMMAS if x != "certificate"]
    sampled = [r for r in reps if r["sampling"]["mode"] == "sampled"]
    assert sampled and all(r["verdict"].startswith("pass (sampled") or r["verdict"] == "fail" for r in sampled)


def test_read_cycle_formats(tmp_path):
    p = tmp_path / "c"
    p.write_text("0 1 2\n")
    assert H.read_cycle(p) == [0, 1, 2]
    p.write_text("[2, 1, 0]")
    assert H.read_cycle(p) == [2, 1, 0]
    p.write_text(json.dumps({"certificate": [1, 2, 0]}))
    assert H.read_cycle(p) == [1, 2, 0]
