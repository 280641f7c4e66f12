import os
import random
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@st.composite
def small_graphs(draw, min_n=1, max_n=9):
    """(n, edge list) with arbitrary density."""
    from achlioptas.graph import Graph
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, k in zip(pairs, keep) if k])


def gnp_sample(n, p, seed):
    from achlioptas.graph import Graph
    from oracles import random_adj
    adj = random_adj(n, p, random.Random(seed))
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in adj[u] if u < v])


@pytest.fixture
def fixtures_dir():
    return FIXTURES
