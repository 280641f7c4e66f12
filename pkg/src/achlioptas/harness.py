"""Experiment orchestration: single runs, seed batteries over (n, K), CSV summaries, verifiers.

Everything here is deterministic given the config and seed list; the only
varying output is the timestamp inside a record's ``metadata``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

from . import verify as V
from .engine import RunRecord, SamplingModel, read_ledger, run, write_ledger
from .graph import Graph, peel_core
from .strategies import STRATEGIES, HamiltonStop, collect_all, make_strategy

SUCCESS = ("hamiltonian", "completed")
DEFAULT_MAX_ROUNDS = 10**7


class ConfigError(ValueError):
    pass


def parse_k(token, n: int) -> int:
    """``"8"`` is K=8; ``"2ln"`` is ceil(2 ln n); a bare ``"ln"`` is ceil(ln n)."""
    if isinstance(token, int):
        return token
    s = str(token).strip()
    if s.endswith("ln"):
        coef = float(s[:-2] or 1)
        return max(1, math.ceil(coef * math.log(n)))
    return int(s)


def parse_seeds(value) -> list[int]:
    """An int is a count (seeds 0..N-1); a list or comma string is explicit."""
    if isinstance(value, int):
        return list(range(value))
    if isinstance(value, (list, tuple)):
        return [int(s) for s in value]
    s = str(value)
    if "," in s:
        return [int(x) for x in s.split(",") if x.strip()]
    return list(range(int(s)))


@dataclass
class ExperimentConfig:
    strategy: str = "sublog"
    n: int = 1000
    k: list[Any] = field(default_factory=lambda: [1])
    model: str = "relaxed"
    seeds: list[int] = field(default_factory=lambda: list(range(10)))
    max_rounds: int = DEFAULT_MAX_ROUNDS
    preset: str = "desk"
    params: dict = field(default_factory=dict)
    stop: str = "auto"          # auto | none | hamilton
    ledger: str | None = None
    out: str | None = None
    jobs: int = 1
    debug: bool = False

    def validate(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}; choose from {STRATEGIES}")
        if self.n < 4:
            raise ConfigError("n must be >= 4")
        if not self.k:
            raise ConfigError("K list is empty")
        for K in self.Ks:
            if K < 1:
                raise ConfigError("K must be >= 1")
        if not self.seeds:
            raise ConfigError("seed list is empty")
        if self.max_rounds < 0:
            raise ConfigError("max_rounds must be >= 0")
        if self.stop not in ("auto", "none", "hamilton"):
            raise ConfigError(f"unknown stop rule {self.stop!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        try:
            SamplingModel(self.model)
        except ValueError:
            raise ConfigError(f"unknown model {self.model!r}") from None
        try:
            make_strategy(self.strategy, self.preset, self._overrides())
        except ValueError as e:
            raise ConfigError(str(e)) from None

    @property
    def Ks(self) -> list[int]:
        return [parse_k(t, self.n) for t in self.k]

    def _overrides(self) -> dict:
        ov = dict(self.params)
        if self.debug and self.strategy in ("sublog", "superlog"):
            ov.setdefault("debug", True)
        return ov

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "seeds" in d:
            d["seeds"] = parse_seeds(d["seeds"])
        if "k" in d and not isinstance(d["k"], list):
            d["k"] = [d["k"]]
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**d)


def run_one(cfg: ExperimentConfig, K: int, seed: int, record_ledger: bool = False) -> RunRecord:
    strat = make_strategy(cfg.strategy, cfg.preset, cfg._overrides())
    stop = None
    if cfg.stop == "hamilton" or (cfg.stop == "auto" and cfg.strategy in ("first-edge", "skip")):
        stop = HamiltonStop(seed=seed)
    return run(cfg.n, K, strat, seed=seed, model=cfg.model, stop=stop,
               max_rounds=cfg.max_rounds, record_ledger=record_ledger)


def _task(args) -> dict:
    cfg_dict, K, seed = args
    cfg = ExperimentConfig(**cfg_dict)
    try:
        return run_one(cfg, K, seed).to_dict()
    except Exception as e:     # a crashed run is recorded, never aborts the sweep
        return {"seed": seed, "n": cfg.n, "K": K, "model": cfg.model, "strategy": cfg.strategy,
                "params": {}, "phase_rounds": {}, "total_rounds": 0, "outcome": "error",
                "notes": {"error": f"{type(e).__name__}: {e}"}}


def sweep(cfg: ExperimentConfig) -> list[RunRecord]:
    """All (K, seed) runs, in (K, seed) order whatever the parallelism."""
    cfg.validate()
    tasks = [(asdict(cfg), K, s) for K in cfg.Ks for s in cfg.seeds]
    if cfg.jobs == 1:
        out = [_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            out = list(pool.map(_task, tasks))
    return [RunRecord.from_dict(d) for d in out]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def summarize(records: list[RunRecord]) -> list[dict]:
    """One aggregate row per (strategy, n, K); statistics over successful runs only."""
    cells: dict[tuple, list[RunRecord]] = {}
    for r in records:
        cells.setdefault((r.strategy, r.n, r.K), []).append(r)
    rows = []
    for (strategy, n, K), rs in cells.items():
        ok = [r for r in rs if r.outcome in SUCCESS]
        totals = [r.total_rounds for r in ok]
        phases = {}
        for r in ok:
            for p, c in r.phase_rounds.items():
                phases.setdefault(p, []).append(c)
        med = statistics.median(totals) if totals else None
        rows.append({
            "strategy": strategy, "n": n, "K": K, "runs": len(rs), "successes": len(ok),
            "success_rate": len(ok) / len(rs),
            "median_total": med,
            "mean_total": statistics.fmean(totals) if totals else None,
            "stddev_total": statistics.stdev(totals) if len(totals) > 1 else None,
            "phase_medians": {p: statistics.median(v) for p, v in phases.items()},
            "rounds_over_n": med / n if med is not None else None,
            "rounds_over_nlogn_2K": med / (n * math.log(n) / (2 * K)) if med is not None else None,
        })
    return rows


def to_csv(records: list[RunRecord]) -> str:
    """Long format: one ``run`` row per record, then one ``aggregate`` row per cell."""
    phases: list[str] = []
    for r in records:
        for p in r.phase_rounds:
            if p not in phases:
                phases.append(p)
    head = (["row", "strategy", "n", "K", "seed"] + [f"phase:{p}" for p in phases]
            + ["total", "outcome", "failed_phase", "runs", "successes", "success_rate",
               "median_total", "mean_total", "stddev_total", "rounds_over_n", "rounds_over_nlogn_2K"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(head)
    for r in records:
        w.writerow(["run", r.strategy, r.n, r.K, r.seed] + [_fmt(r.phase_rounds.get(p)) for p in phases]
                   + [r.total_rounds, r.outcome, _fmt(r.failed_phase)] + [""] * 7)
    for a in summarize(records):
        w.writerow(["aggregate", a["strategy"], a["n"], a["K"], ""]
                   + [_fmt(a["phase_medians"].get(p)) for p in phases]
                   + [_fmt(a["median_total"]), "", "", a["runs"], a["successes"], _fmt(a["success_rate"]),
                      _fmt(a["median_total"]), _fmt(a["mean_total"]), _fmt(a["stddev_total"]),
                      _fmt(a["rounds_over_n"]), _fmt(a["rounds_over_nlogn_2K"])])
    return buf.getvalue()


# verification ----------------------------------------------------------

LEMMAS = ("certificate", "core-size", "avg-degree", "vertex-expansion", "bipartite-expansion",
          "connected", "resilient-diameter")


def read_graph(path) -> Graph:
    with open(path) as fh:
        return Graph.from_edgelist(fh.read())


def read_cycle(path) -> list[int]:
    text = open(path).read().strip()
    if text.startswith("{"):
        return json.loads(text).get("certificate") or []
    if text.startswith("["):
        return json.loads(text)
    return [int(t) for t in text.split()]


def verify_graph(g: Graph, lemmas: list[str], params: dict, cycle=None) -> list[V.LemmaReport]:
    """Run the named verifiers with shared ``params`` (missing ones get defaults)."""
    unknown = [x for x in lemmas if x not in LEMMAS]
    if unknown:
        raise ConfigError(f"unknown lemma id(s) {unknown}; choose from {LEMMAS}")
    n = g.n
    rng = random.Random(int(params.get("seed", 0)))
    samples = params.get("samples")
    samples = None if samples in (None, "exhaustive") else int(samples)
    s_max = int(params.get("s_max", max(1, n // 100)))
    reps = []
    for lem in lemmas:
        if lem == "certificate":
            reps.append(V.verify_cycle_report(g, cycle))
        elif lem == "core-size":
            reps.append(V.verify_core_size(g, int(params.get("D", 2))))
        elif lem == "avg-degree":
            k = float(params.get("k", 2 * g.edge_count / max(n, 1)))
            reps.append(V.verify_avg_degree(g, k, s_max, samples, rng))
        elif lem == "vertex-expansion":
            reps.append(V.verify_vertex_expansion(g, range(n), s_max, params.get("factor", 2),
                                                  bool(params.get("strict", False)), samples, rng))
        elif lem == "bipartite-expansion":
            H = peel_core(g, int(params.get("D", 2)))
            rest = [v for v in range(n) if v not in H]
            reps.append(V.verify_bipartite_expansion(g, H, rest, s_max, params.get("factor", 8), samples, rng))
        elif lem == "connected":
            reps.append(V.verify_connected(g))
        elif lem == "resilient-diameter":
            D_exp = int(params.get("D_exp", 2))
            X = peel_core(g, D_exp)
            a = int(params.get("A", max(1, len(X) // 200)))
            A = rng.sample(sorted(X), min(a, len(X)))
            bound = float(params.get("bound", 3 * math.log(max(len(X), 2))))
            reps.append(V.verify_resilient_diameter(g, X, A, D_exp, bound))
    return reps


# oracles ---------------------------------------------------------------

def oracle_collect_all(n: int, K: int | None = None, seed: int = 0, ledger: str | None = None,
                       max_rounds: int | None = None) -> dict:
    from .strategies import engine_offers
    if ledger is not None:
        offers = read_ledger(ledger)
    else:
        if K is None:
            raise ConfigError("collect-all needs K or a ledger")
        offers = engine_offers(n, K, seed)
    res = collect_all(offers, n, max_rounds=max_rounds, rng=random.Random(seed))
    return res.to_dict()


__all__ = ["ConfigError", "ExperimentConfig", "LEMMAS", "oracle_collect_all", "parse_k", "parse_seeds",
           "read_cycle", "read_graph", "run_one", "summarize", "sweep", "to_csv", "verify_graph",
           "write_ledger"]
