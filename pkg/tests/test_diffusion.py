import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from picgame.diffusion import (BIC, HETEROGENEOUS, INACTIVE, RUMOR, Scenario, SeedOverlapError,
                               Semantics, horizon, rumor_count_fast, run_deterministic,
                               run_stochastic, run_variant, scenario)
from picgame.netgraph import Network
from picgame.realization import from_orders, generate

from conftest import random_net

# v3 = node 0 with four out-neighbours, every arc certain
STAR = Network.from_arcs(5, [(0, 1), (0, 2), (0, 3), (0, 4)])


def test_pic_star_activates_one_neighbour_per_step():
    for seed in range(20):
        out = run_stochastic(STAR, scenario({0}), seed)
        assert np.count_nonzero(out.time == 1) == 1
        assert sorted(out.time.tolist()) == [0, 1, 2, 3, 4]


def test_bic_star_activates_all_neighbours_at_once():
    out = run_variant(STAR, scenario({0}, semantics=Semantics(model=BIC)), rng=1)
    assert out.time.tolist() == [0, 1, 1, 1, 1]


def test_no_arcs_only_seeds():
    net = Network.from_arcs(4, [])
    out = run_stochastic(net, scenario({0}, {2}), 0)
    assert out.cascade.tolist() == [RUMOR, INACTIVE, 1, INACTIVE]
    assert out.time.tolist() == [0, -1, 0, -1]


def test_simultaneous_claim_goes_to_rumor():
    # r=0 -> x=1 -> y=2, s=3 -> x
    net = Network.from_arcs(4, [(0, 1), (1, 2), (3, 1)])
    out = run_stochastic(net, scenario({0}, {3}), 0)
    assert out.cascade[1] == RUMOR and out.time[1] == 1
    assert out.rumor_count == 3


def test_deterministic_chain_times():
    # a=0 -> b=1; b tries d=3 first, then c=2
    net = Network.from_arcs(4, [(0, 1), (1, 2), (1, 3)])
    r = from_orders(net, [(0, 1), (1, 2)], {1: (3, 2)})
    out = run_deterministic(r, scenario({0}))
    assert out.time[1] == 1 and out.time[2] == 3
    assert out.cascade[3] == INACTIVE


def test_all_blocked_only_seeds():
    net = Network.from_arcs(3, [(0, 1), (1, 2), (2, 0)])
    r = from_orders(net, [], {})
    out = run_deterministic(r, scenario({0}, {2}))
    assert out.count(RUMOR) == 1 and out.count(1) == 1 and out.count(INACTIVE) == 1


def test_rumor_aware_overlap_rejected():
    with pytest.raises(SeedOverlapError):
        scenario({0}, {0, 1}, rumor_aware=True)
    assert scenario({0}, {0, 1}).k == 1


def test_seed_overlap_resolved_by_priority():
    net = Network.from_arcs(2, [(0, 1)])
    out = run_stochastic(net, scenario({0}, {0}), 0)
    assert out.cascade[0] == RUMOR
    out = run_deterministic(from_orders(net, [(0, 1)], {}), scenario({1}, {0}, {0}, priority=(2, 0, 1)))
    assert out.cascade[0] == 2


def test_bad_priority():
    with pytest.raises(ValueError):
        scenario({0}, {1}, priority=(0, 0))


def test_rumor_count_fast_examples():
    net = Network.from_arcs(5, [(0, 1), (1, 2), (2, 3), (4, 3)])
    r = from_orders(net, [(0, 1), (1, 2), (2, 3)], {})
    assert rumor_count_fast(r, {0}, set()) == 4
    # node 2 is two steps from both
    net = Network.from_arcs(5, [(0, 1), (1, 2), (3, 4), (4, 2)])
    r = from_orders(net, [(u, v) for u, v, _ in net.arcs()], {})
    assert rumor_count_fast(r, {0}, {3}) == 3
    # positive seed next to the rumor's only exit
    net = Network.from_arcs(3, [(0, 1), (1, 2)])
    r = from_orders(net, [(0, 1), (1, 2)], {})
    assert rumor_count_fast(r, {0}, {1}) == 1
    with pytest.raises(ValueError):
        rumor_count_fast(r, set(), {1})


def _random_scenario(rnd, n, k=2):
    nodes = list(range(n))
    rnd.shuffle(nodes)
    rumor = {nodes[0]}
    acts = [set(rnd.sample(nodes[1:], rnd.randint(0, 2))) for _ in range(k)]
    return Scenario(rumor, tuple(acts))


def test_engines_agree_on_random_realizations():
    rnd = random.Random(21)
    gen = np.random.default_rng(21)
    for _ in range(200):
        net = random_net(rnd, 8, arc_p=0.3)
        r = generate(net, gen)
        sc = _random_scenario(rnd, 8)
        det = run_deterministic(r, sc)
        step = run_variant(r, sc)
        assert det == step
        assert det.rumor_count == rumor_count_fast(r, sc.rumor_seeds, sc.positive_union)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_split_invariance_and_monotonicity_per_realization(seed):
    rnd = random.Random(seed)
    net = random_net(rnd, 7, arc_p=0.35)
    r = generate(net, np.random.default_rng(seed))
    rumor = {rnd.randrange(7)}
    union = set(rnd.sample([u for u in range(7) if u not in rumor], rnd.randint(0, 4)))
    owners = [rnd.randrange(3) for _ in union]
    acts = tuple({u for u, o in zip(sorted(union), owners) if o == i} for i in range(3))
    count = run_deterministic(r, Scenario(rumor, acts)).rumor_count
    assert count == run_deterministic(r, Scenario(rumor, (union,))).rumor_count
    extra = [u for u in range(7) if u not in union and u not in rumor]
    if extra:
        more = run_deterministic(r, Scenario(rumor, (union | {rnd.choice(extra)},))).rumor_count
        assert more <= count


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_outcome_invariants(seed):
    rnd = random.Random(seed)
    net = random_net(rnd, 7, arc_p=0.35)
    sc = _random_scenario(rnd, 7)
    out = run_stochastic(net, sc, seed)
    seeds = set().union(*sc.seed_sets())
    for u in range(7):
        if u in seeds:
            assert out.time[u] == 0
        elif out.cascade[u] != INACTIVE:
            assert 1 <= out.time[u] <= horizon(net)
    assert all(a <= b for a, b in zip(out.rounds, out.rounds[1:]))
    assert out.rounds[-1] == out.rumor_count


def test_stochastic_reproducible():
    net = random_net(random.Random(4), 8)
    sc = scenario({0}, {3})
    assert run_stochastic(net, sc, 77) == run_stochastic(net, sc, 77)


def test_heterogeneous_ranking_used_per_node():
    net = Network.from_arcs(3, [(0, 2), (1, 2)])
    sem = Semantics(priority_mode=HETEROGENEOUS, node_priority={2: (1, 0)})
    out = run_variant(from_orders(net, [(0, 2), (1, 2)], {}), scenario({0}, {1}, semantics=sem))
    assert out.cascade[2] == 1


def test_csv_exports():
    net = Network.from_arcs(3, [(0, 1), (1, 2)])
    out = run_deterministic(from_orders(net, [(0, 1), (1, 2)], {}), scenario({0}))
    assert out.to_node_csv().splitlines() == ["node,cascade,time", "0,0,0", "1,0,1", "2,0,2"]
    assert out.to_rounds_csv().splitlines() == ["round,rumor_count", "0,1", "1,2", "2,3"]
