"""Command line: ``achlioptas {run,sweep,verify,oracle}``.

Exit status: 0 on success (Hamilton cycle, or construction completed for
d-out), 1 when the run or a verifier fails, 2 on bad configuration.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import harness as H
from .engine import RunRecord, write_ledger
from .strategies import STRATEGIES, degree_deficiency_probe


def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _kv(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise H.ConfigError(f"expected key=value, got {item!r}")
        out[key] = _value(val)
    return out


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--strategy", choices=STRATEGIES + ("collect-all-analyze",))
    p.add_argument("--n", type=int)
    p.add_argument("--model", choices=("exact", "relaxed"))
    p.add_argument("--max-rounds", type=int, dest="max_rounds")
    preset = p.add_mutually_exclusive_group()
    preset.add_argument("--desk", dest="preset", action="store_const", const="desk")
    preset.add_argument("--fidelity", dest="preset", action="store_const", const="fidelity")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="strategy parameter override, e.g. epsilon=0.5 or inner.d=4")
    p.add_argument("--stop", choices=("auto", "none", "hamilton"))
    p.add_argument("--debug", action="store_true", default=None)
    p.add_argument("--out", help="output path (record JSON or sweep CSV)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="achlioptas", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="one seeded run")
    _common(r)
    r.add_argument("--k", dest="k")
    r.add_argument("--seed", type=int)
    r.add_argument("--ledger", help="write the per-round ledger here (JSON lines); "
                                    "with collect-all-analyze, read it instead")

    s = sub.add_parser("sweep", help="seed battery over a K list")
    _common(s)
    s.add_argument("--k-list", dest="k", help="comma list; entries like 8 or 2ln (= ceil(2 ln n))")
    s.add_argument("--k", dest="k")
    s.add_argument("--seeds", help="count (seeds 0..N-1) or comma list")
    s.add_argument("--jobs", type=int)

    v = sub.add_parser("verify", help="run structural verifiers on a stored graph")
    v.add_argument("--graph", required=True, help="edge list file ('n m' header)")
    v.add_argument("--cycle", help="cycle file (ints, JSON list, or a run record)")
    v.add_argument("--lemma", action="append", required=True, help=f"one of {H.LEMMAS}")
    v.add_argument("--param", action="append", metavar="KEY=VALUE")
    v.add_argument("--out")

    o = sub.add_parser("oracle", help="offline references")
    osub = o.add_subparsers(dest="oracle", required=True)
    c = osub.add_parser("collect-all", help="hitting times of the union of all offers")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--ledger")
    c.add_argument("--max-rounds", type=int, dest="max_rounds")
    pr = osub.add_parser("probe", help="vertices below degree d after T rounds of a recorded run")
    pr.add_argument("--record", required=True, help="run record JSON carrying a ledger")
    pr.add_argument("--ledger", help="ledger file, if not embedded in the record")
    pr.add_argument("--d", type=int, required=True)
    pr.add_argument("--T", type=int, required=True)
    return ap


def _config(args) -> H.ExperimentConfig:
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    flags = {k: getattr(args, k, None) for k in
             ("strategy", "n", "model", "max_rounds", "preset", "stop", "debug", "out", "ledger", "jobs")}
    data.update({k: v for k, v in flags.items() if v is not None})
    if getattr(args, "k", None) is not None:
        data["k"] = [t for t in str(args.k).split(",") if t]
    if getattr(args, "seed", None) is not None:
        data["seeds"] = [args.seed]
    if getattr(args, "seeds", None) is not None:
        data["seeds"] = args.seeds
    if args.param:
        data["params"] = {**data.get("params", {}), **_kv(args.param)}
    cfg = H.ExperimentConfig.from_dict(data)
    return cfg


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    if args.strategy == "collect-all-analyze":
        if not args.ledger or args.n is None:
            raise H.ConfigError("collect-all-analyze needs --ledger and --n")
        res = H.oracle_collect_all(args.n, ledger=args.ledger, max_rounds=args.max_rounds)
        _emit(json.dumps(res, sort_keys=True) + "\n", args.out)
        return 0
    cfg = _config(args)
    if len(cfg.seeds) != 1 or len(cfg.k) != 1:
        raise H.ConfigError("run takes exactly one seed and one K")
    cfg.validate()
    rec = H.run_one(cfg, cfg.Ks[0], cfg.seeds[0], record_ledger=bool(cfg.ledger))
    if cfg.ledger:
        write_ledger(rec.ledger, cfg.ledger)
    if cfg.out:
        _emit(rec.to_json() + "\n", cfg.out)
    print(f"{rec.strategy} n={rec.n} K={rec.K} seed={rec.seed}: {rec.outcome} after {rec.total_rounds} rounds "
          f"{json.dumps(rec.phase_rounds)}" + (f" (failed in {rec.failed_phase})" if rec.failed_phase else ""),
          file=sys.stderr if not cfg.out else sys.stdout)
    if not cfg.out:
        sys.stdout.write(rec.to_json() + "\n")
    return 0 if rec.outcome in H.SUCCESS else 1


def cmd_sweep(args) -> int:
    cfg = _config(args)
    records = H.sweep(cfg)
    _emit(H.to_csv(records), cfg.out)
    return 0


def cmd_verify(args) -> int:
    g = H.read_graph(args.graph)
    cycle = H.read_cycle(args.cycle) if args.cycle else None
    if "certificate" in args.lemma and cycle is None:
        raise H.ConfigError("certificate check needs --cycle")
    reps = H.verify_graph(g, args.lemma, _kv(args.param), cycle)
    _emit("".join(r.to_json() + "\n" for r in reps), args.out)
    return 0 if all(r.passed for r in reps) else 1


def cmd_oracle(args) -> int:
    if args.oracle == "collect-all":
        K = H.parse_k(args.k, args.n) if args.k is not None else None
        res = H.oracle_collect_all(args.n, K, args.seed, args.ledger, args.max_rounds)
        print(json.dumps(res, sort_keys=True))
        return 0
    with open(args.record) as fh:
        rec = RunRecord.from_dict(json.load(fh))
    if args.ledger:
        rec.ledger = H.read_ledger(args.ledger)
    print(json.dumps({"d": args.d, "T": args.T, "deficient": degree_deficiency_probe(rec, args.d, args.T)}))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return {"run": cmd_run, "sweep": cmd_sweep, "verify": cmd_verify, "oracle": cmd_oracle}[args.cmd](args)
    except (H.ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
