"""Achlioptas-process simulator with online Hamilton-cycle strategies."""
from .engine import Engine, RoundOffer, RunRecord, SamplingModel, Strategy, run
from .graph import Graph, peel_core

__all__ = ["Engine", "Graph", "RoundOffer", "RunRecord", "SamplingModel", "Strategy",
           "peel_core", "run"]
__version__ = "0.1.0"
