import itertools
import math
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cliquekit.graph import build_graph

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = os.path.join(os.path.dirname(__file__), "data")


def data_path(name: str) -> str:
    return os.path.join(DATA, name)


@st.composite
def graphs(draw, max_n=10, min_n=0, weights="real"):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [p for p, keep in zip(pairs, mask) if keep]
    if weights == "unit":
        w = [1.0] * n
    elif weights == "int":
        w = draw(st.lists(st.integers(1, 10).map(float), min_size=n, max_size=n))
    else:
        w = draw(st.lists(st.floats(0.01, 10.0), min_size=n, max_size=n))
    return build_graph(n, edges, w)


def subset_max_clique(g, min_size=None):
    """Independent reference: scan every vertex subset (n <= 14)."""
    best_w, best = None, None
    k = min_size or 0
    for mask in range(1 << g.n):
        members = [v for v in range(g.n) if mask >> v & 1]
        if len(members) < k:
            continue
        if all(g.has_edge(a, b) for a, b in itertools.combinations(members, 2)):
            w = math.fsum(g.weights[v] for v in members)
            if best_w is None or w > best_w:
                best_w, best = w, members
    return best_w, best


def weights_close(a, b):
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ic_graph():
    """Three-user, four-file index-coding graph (files 1..4 as vertices 0..3)."""
    return build_graph(4, [(0, 2), (0, 3), (1, 3), (2, 3)])


@pytest.fixture
def idnc_graph():
    """IDNC graph of the same example; vertex order 13, 21, 22, 32, 33."""
    return build_graph(5, [(0, 1), (0, 2), (0, 4), (1, 4), (2, 3)], [0.9, 0.8, 0.8, 0.7, 0.7])
