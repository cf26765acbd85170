import random

import numpy as np
import pytest

from picgame.netgraph import Network


def random_net(rnd: random.Random, n: int, arc_p: float = 0.3, probs=(0.3, 0.5, 1.0)) -> Network:
    arcs = [(u, v, rnd.choice(probs)) for u in range(n) for v in range(n) if u != v and rnd.random() < arc_p]
    return Network.from_arcs(n, arcs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pa_edge_list(n=120, m=2, seed=0):
    """Preferential-attachment style undirected edge list."""
    rnd = random.Random(seed)
    edges, ends = [], [0, 1]
    edges.append((0, 1))
    for v in range(2, n):
        for u in set(rnd.choice(ends) for _ in range(m)):
            edges.append((u, v))
            ends += [u, v]
    return "".join(f"{u} {v}\n" for u, v in edges)
