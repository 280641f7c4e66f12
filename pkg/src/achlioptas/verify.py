"""Post-hoc structural checks on produced graphs.

Every check returns a :class:`LemmaReport`.  Witnesses are plain data (vertex
tuples and counts) so they can be re-checked against the raw adjacency
without going through this module.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable

from .graph import (DEFAULT_SUBSET_BUDGET, ExpansionReport, Graph, check_bipartite_expansion,
                    check_vertex_expansion, components, connected, diameter_within, peel_core)


@dataclass
class LemmaReport:
    lemma: str
    params: dict
    passed: bool
    witnesses: list = field(default_factory=list)
    sampling: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if not self.passed:
            return "fail"
        if self.sampling.get("mode") == "sampled":
            return f"pass (sampled, {self.sampling.get('sets_checked', 0)} sets)"
        return "pass"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict
        return d

    def to_json(self) -> str:
        return json.dumps(_finite(self.to_dict()), sort_keys=True, default=_plain)


def _plain(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    raise TypeError(type(x))


def _finite(x):
    # json would write bare Infinity, which strict parsers reject
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


def verify_certificate(g: Graph, cycle) -> bool:
    """True iff ``cycle`` lists every vertex once and each consecutive pair (with wraparound) is an edge."""
    if cycle is None:
        return False
    cycle = [int(v) for v in cycle]
    n = g.n
    if n < 3 or len(cycle) != n or sorted(cycle) != list(range(n)):
        return False
    return all(cycle[i - 1] in g.adj[cycle[i]] for i in range(n))


def verify_core_size(g: Graph, D: int) -> LemmaReport:
    core = peel_core(g, D)
    need = (1 - 1 / D) * g.n
    ok = len(core) >= need
    wit = [] if ok else [{"core_size": len(core), "required": need}]
    return LemmaReport("core-size", {"D": D, "n": g.n}, ok, wit, {"mode": "exact"})


def _induced_edges(g: Graph, S: set[int]) -> int:
    return sum(len(g.adj[v] & S) for v in S) // 2


def verify_avg_degree(g: Graph, k: float, s_max: int, samples: int | None = None,
                      rng: random.Random | None = None, budget: int = DEFAULT_SUBSET_BUDGET,
                      probes: int = 200) -> LemmaReport:
    """No vertex set of size <= ``s_max`` induces average degree above ``k/4``.

    ``samples=None`` enumerates all sets (subject to ``budget``).  In sampled
    mode uniform sets alone almost never find dense spots, so each sample
    round also grows ``probes`` sets greedily from random seeds, always adding
    the outside vertex with most neighbours inside.
    """
    limit = Fraction(k) / 4
    params = {"k": k, "s_max": s_max}
    witnesses = []
    checked = 0
    n = g.n
    if samples is None:
        import itertools
        total = sum(math.comb(n, s) for s in range(1, min(s_max, n) + 1))
        if total > budget:
            raise ValueError(f"exhaustive check needs {total} subsets (budget {budget}); "
                             "pass samples=N for sampled mode")
        for s in range(1, min(s_max, n) + 1):
            for S in itertools.combinations(range(n), s):
                checked += 1
                e = _induced_edges(g, set(S))
                if Fraction(2 * e, s) > limit:
                    witnesses.append((S, e))
        mode = "exhaustive"
    else:
        rng = rng or random.Random(0)
        top = min(s_max, n)
        for _ in range(samples):
            S = set(rng.sample(range(n), rng.randint(1, top)))
            checked += 1
            e = _induced_edges(g, S)
            if Fraction(2 * e, len(S)) > limit:
                witnesses.append((tuple(sorted(S)), e))
        for _ in range(probes if n else 0):
            checked += _grow_probe(g, rng.randrange(n), top, limit, rng, witnesses)
        mode = "sampled"
    return LemmaReport("avg-degree", params, not witnesses, witnesses,
                       {"mode": mode, "sets_checked": checked})


def _grow_probe(g: Graph, seed: int, top: int, limit: Fraction, rng, witnesses) -> int:
    S = {seed}
    edges = 0
    gain: dict[int, int] = {w: 1 for w in g.adj[seed]}
    sizes = 1
    while len(S) < top and gain:
        best = max(gain.values())
        pick = rng.choice([w for w, c in gain.items() if c == best])
        edges += gain.pop(pick)
        S.add(pick)
        for w in g.adj[pick]:
            if w not in S:
                gain[w] = gain.get(w, 0) + 1
        sizes += 1
        if Fraction(2 * edges, len(S)) > limit:
            witnesses.append((tuple(sorted(S)), edges))
            break
    return sizes


def _from_expansion(lemma: str, params: dict, rep: ExpansionReport) -> LemmaReport:
    return LemmaReport(lemma, params, rep.ok, [list(v) for v in rep.violations],
                       {"mode": rep.mode, "sets_checked": rep.sets_checked})


def verify_vertex_expansion(g: Graph, within: Iterable[int], s_max: int, factor,
                            strict: bool = False, samples: int | None = None,
                            rng: random.Random | None = None) -> LemmaReport:
    rep = check_vertex_expansion(g, within, s_max, factor, samples=samples, strict=strict, rng=rng)
    return _from_expansion("vertex-expansion",
                           {"s_max": s_max, "factor": Fraction(factor), "strict": strict}, rep)


def verify_bipartite_expansion(g: Graph, U: Iterable[int], W: Iterable[int], s_max: int, factor,
                               samples: int | None = None,
                               rng: random.Random | None = None) -> LemmaReport:
    rep = check_bipartite_expansion(g, U, W, s_max, factor, samples=samples, rng=rng)
    return _from_expansion("bipartite-expansion", {"s_max": s_max, "factor": Fraction(factor)}, rep)


def verify_connected(g: Graph, within: Iterable[int] | None = None) -> LemmaReport:
    ok = connected(g, within)
    wit = []
    if not ok:
        sub = g if within is None else g.induced(within)
        keep = None if within is None else set(within)
        comps = [c for c in components(sub) if keep is None or c[0] in keep]
        wit = [{"components": len(comps), "smallest": min(comps, key=len)}]
    return LemmaReport("connected", {}, ok, wit, {"mode": "exact"})


def verify_resilient_diameter(g: Graph, X: Iterable[int], A: Iterable[int], D_exp: int,
                              bound: float) -> LemmaReport:
    """Remove A from X, peel the rest to its ``D_exp``-core (the removed part is B).

    Passes iff ``|B| <= |A|`` and the core has diameter at most ``bound``.
    """
    X, A = set(X), set(A)
    rest = X - A
    core = peel_core(g, D_exp, within=rest) if rest else set()
    B = rest - core
    diam = diameter_within(g, core) if core else math.inf
    ok = len(B) <= len(A) and diam <= bound
    wit = [] if ok else [{"B": sorted(B), "diameter": diam}]
    params = {"D_exp": D_exp, "bound": bound, "X": len(X), "A": len(A)}
    return LemmaReport("resilient-diameter", params, ok, wit,
                       {"mode": "exact", "B": len(B), "diameter": diam})


def verify_cycle_report(g: Graph, cycle) -> LemmaReport:
    ok = verify_certificate(g, cycle)
    wit = [] if ok else [{"cycle_length": 0 if cycle is None else len(cycle), "n": g.n}]
    return LemmaReport("certificate", {"n": g.n}, ok, wit, {"mode": "exact"})
