"""Strategy registry: ids, parameter presets and overrides."""
from __future__ import annotations

import dataclasses
from typing import Any

from ..engine import Strategy
from .base import FirstEdge, HamiltonStop, SkipAll, any_legal, first_legal, pick_legal
from .dout import DOut, Intermediate
from .oracles import CollectAllResult, collect_all, degree_deficiency_probe, engine_offers
from .sublog import Sublog, SublogParams
from .superlog import PathCover, Superlog, SuperlogParams, patch_cycles

PRESETS = ("desk", "fidelity")

# keyword defaults for the d-out family per preset
_DOUT = {"desk": {"epsilon": 1.0, "fill_idle": True}, "fidelity": {"epsilon": 0.1, "fill_idle": False}}

STRATEGIES = ("first-edge", "skip", "sublog", "superlog", "d-out", "intermediate")


def _apply(obj, overrides: dict[str, Any]):
    for key, value in overrides.items():
        head, _, rest = key.partition(".")
        if not hasattr(obj, head) or not dataclasses.is_dataclass(obj):
            raise ValueError(f"unknown parameter {key!r}")
        if rest:
            _apply(getattr(obj, head), {rest: value})
        else:
            setattr(obj, head, value)
    return obj


def make_strategy(name: str, preset: str = "desk", overrides: dict[str, Any] | None = None) -> Strategy:
    """Build a fresh strategy; ``overrides`` maps parameter names (``inner.d`` for nested) to values."""
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {PRESETS}")
    overrides = dict(overrides or {})
    if name == "first-edge":
        strat = FirstEdge()
    elif name == "skip":
        strat = SkipAll()
    elif name == "sublog":
        strat = Sublog(_apply(getattr(SublogParams, preset)(), overrides))
        overrides = {}
    elif name == "superlog":
        strat = Superlog(_apply(getattr(SuperlogParams, preset)(), overrides))
        overrides = {}
    elif name in ("d-out", "intermediate"):
        kw = {**_DOUT[preset], **overrides}
        allowed = {"d", "epsilon", "fill_idle"} | ({"restarts"} if name == "intermediate" else set())
        bad = set(kw) - allowed
        if bad:
            raise ValueError(f"unknown parameter(s) {sorted(bad)} for {name}")
        strat = DOut(**kw) if name == "d-out" else Intermediate(**kw)
        overrides = {}
    else:
        raise ValueError(f"unknown strategy {name!r}; choose from {STRATEGIES}")
    if overrides:
        raise ValueError(f"{name} takes no parameters, got {sorted(overrides)}")
    return strat


__all__ = [
    "CollectAllResult", "DOut", "FirstEdge", "HamiltonStop", "Intermediate", "PRESETS", "PathCover",
    "STRATEGIES", "SkipAll", "Sublog", "SublogParams", "Superlog", "SuperlogParams", "any_legal",
    "collect_all", "degree_deficiency_probe", "engine_offers", "first_legal", "make_strategy",
    "patch_cycles", "pick_legal",
]
