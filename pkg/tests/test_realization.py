import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from picgame.netgraph import Network
from picgame.oracle import enumerate_realizations
from picgame.realization import (INF, Realization, dump, from_orders, generate, live_distance,
                                 live_distances, parse_dump, probability, probability_exact)

from conftest import random_net


def test_all_certain_arcs_are_live(rng):
    net = Network.from_arcs(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    for _ in range(20):
        assert generate(net, rng).live.all()


def test_permutation_and_live_frequencies(rng):
    net = Network.from_arcs(3, [(0, 1, 0.3), (0, 2, 1.0)])
    first = live = 0
    trials = 10_000
    for _ in range(trials):
        r = generate(net, rng)
        first += r.perm(0) == [1, 2]
        live += bool(r.live[net.arc_index(0, 1)])
    assert abs(first / trials - 0.5) <= 0.02
    assert abs(live / trials - 0.3) <= 0.02


def test_generate_is_deterministic_per_seed():
    net = random_net(random.Random(3), 7)
    a = generate(net, np.random.default_rng(9))
    b = generate(net, np.random.default_rng(9))
    assert a == b


def test_probability_examples():
    chain = Network.from_arcs(3, [(0, 1), (1, 2)])
    assert probability(from_orders(chain, [(0, 1), (1, 2)], {})) == 1.0
    fork = Network.from_arcs(3, [(0, 1, 0.5), (0, 2, 0.5)])
    rs = list(enumerate_realizations(fork))
    assert len(rs) == 8
    for r, mass in rs:
        assert mass == Fraction(1, 8)
        assert probability(r) == pytest.approx(0.125)
        assert probability_exact(r) == mass
    assert sum(m for _, m in rs) == 1


def test_probability_sums_to_one_float():
    net = random_net(random.Random(5), 4, arc_p=0.4)
    assert abs(sum(probability(r) for r, _ in enumerate_realizations(net)) - 1.0) <= 1e-12


def test_invalid_ranks_rejected():
    net = Network.from_arcs(3, [(0, 1), (0, 2)])
    with pytest.raises(ValueError, match="node 0"):
        Realization(net, [True, True], [1, 1])
    with pytest.raises(ValueError):
        Realization(net, [True], [1])


def test_live_distance_examples():
    net = Network.from_arcs(4, [(0, 1), (0, 3), (1, 2)])
    # a=0, b=1, c=2; a tries 3 first so w(a,b)=2
    r = from_orders(net, [(0, 1), (1, 2)], {0: (3, 1)})
    assert r.weight(0, 1) == 2
    assert live_distance(r, {0}, 2) == 3
    assert live_distance(r, {2}, 2) == 0
    assert live_distance(r, {1}, 0) == INF
    with pytest.raises(ValueError):
        live_distance(r, set(), 1)


def _all_paths_distance(r, sources, target):
    """Minimum over every simple live path, found by exhaustive DFS."""
    net = r.base
    best = INF

    def walk(u, seen, d):
        nonlocal best
        if u == target:
            best = min(best, d)
            return
        for v in net.out_neighbors(u).tolist():
            a = net.arc_index(u, v)
            if r.live[a] and v not in seen:
                walk(v, seen | {v}, d + int(r.rank[a]))

    for s in sources:
        walk(s, {s}, 0)
    return best


def test_distances_match_path_enumeration():
    rnd = random.Random(11)
    gen = np.random.default_rng(11)
    for _ in range(40):
        net = random_net(rnd, 8, arc_p=0.25, probs=(0.5, 0.8))
        r = generate(net, gen)
        src = set(rnd.sample(range(8), rnd.randint(1, 2)))
        d = live_distances(r, src)
        for t in range(8):
            assert d[t] == _all_paths_distance(r, src, t)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_triangle_property(seed):
    rnd = random.Random(seed)
    net = random_net(rnd, 6, arc_p=0.4)
    r = generate(net, np.random.default_rng(seed))
    d = live_distances(r, {rnd.randrange(6)})
    for a, (u, v, _) in enumerate(net.arcs()):
        if r.live[a]:
            assert d[v] <= d[u] + r.rank[a]


def test_dump_round_trip(rng):
    net = random_net(random.Random(2), 6)
    r = generate(net, rng)
    text = dump(r)
    assert parse_dump(net, text) == r
    assert text.startswith("# realization")
