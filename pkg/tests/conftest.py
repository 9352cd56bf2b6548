import numpy as np
import pytest

from chargecent import Graph, make_instance


def random_graph(rng, n_max=8, p=0.3, directed=None):
    n = int(rng.integers(2, n_max + 1))
    if directed is None:
        directed = bool(rng.random() < 0.5)
    edges = []
    for i in range(n):
        for j in range(n):
            if i == j or (not directed and j < i):
                continue
            if rng.random() < p:
                edges.append((i, j))
    return Graph(n, edges, directed=directed)


def random_instance(rng, n_max=8, p=0.3, kappa_max=3, directed=None):
    g = random_graph(rng, n_max, p, directed)
    kappa = int(rng.integers(1, kappa_max + 1))
    size = int(rng.integers(0, g.n + 1))
    omega = sorted(int(v) for v in rng.choice(g.n, size=size, replace=False)) if size else []
    return make_instance(g, omega, kappa)


def instance_corpus(count, seed, **kw):
    rng = np.random.default_rng(seed)
    return [random_instance(rng, **kw) for _ in range(count)]


@pytest.fixture(scope="session")
def small_instances():
    """Shared mixed corpus for cross-checks in module tests."""
    return instance_corpus(40, seed=1729)
