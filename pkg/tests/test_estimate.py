import numpy as np
import pytest

from picgame import fixtures
from picgame.diffusion import scenario
from picgame.estimate import (Estimate, equivalence_distance, kernel_counts, mc_gamma,
                              mc_rumor_rounds, mc_sigma)
from picgame.netgraph import Network
from picgame.oracle import exact_counts, exact_gamma

LINE3 = fixtures.line3()


def test_estimate_from_samples():
    e = Estimate.from_samples([1, 2, 3, 4])
    assert e.mean == 2.5 and e.trials == 4
    assert e.stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert Estimate.from_samples([7]).stderr == 0.0
    with pytest.raises(ValueError):
        Estimate.from_samples([])


@pytest.mark.parametrize("backend", ["kernel", "realization", "stochastic"])
def test_no_arcs(backend):
    net = Network.from_arcs(10, [])
    e = mc_gamma(net, scenario({0, 1}), 200, 1, backend)
    assert e.mean == 8 and e.stderr == 0


@pytest.mark.parametrize("backend", ["kernel", "realization", "stochastic"])
def test_certain_line_reaches_everything(backend):
    net = Network.from_arcs(5, [(i, i + 1) for i in range(4)])
    assert mc_gamma(net, scenario({0}), 100, 1, backend).mean == 0


def test_kernel_matches_exact_gamma():
    net = Network.from_arcs(3, [(0, 1, 0.5), (1, 2, 0.7), (0, 2, 0.3)])
    for union in (set(), {1}, {2}):
        exact = exact_gamma(net, {0}, union).value
        assert mc_gamma(net, scenario({0}, union), 20_000, 3).within(exact)


def test_sigma_examples():
    net = Network.from_arcs(4, [(0, 1, 0.5), (1, 2, 0.5), (3, 2, 0.5), (0, 2, 0.5)])
    assert mc_sigma(net, scenario({0}, set(), {3}), 1, 100, 0).mean == 0
    assert mc_sigma(Network.from_arcs(3, [(0, 1)]), scenario({0}, {2}), 1, 100, 0).mean == 1
    sc = scenario({0}, {1}, {3})
    exact = exact_counts(net, sc)
    for agent in (1, 2):
        for backend in ("kernel", "realization"):
            assert mc_sigma(net, sc, agent, 20_000, 5, backend).within(exact[agent])
    with pytest.raises(ValueError):
        mc_sigma(net, sc, 3, 10)


def test_backends_agree():
    for fx in fixtures.equivalence_fixtures():
        sc = scenario(fx.rumor_seeds, *fx.positive)
        a = mc_gamma(fx.net, sc, 4000, 1, "stochastic")
        b = mc_gamma(fx.net, sc, 20_000, 2, "kernel")
        assert abs(a.mean - b.mean) <= 4 * np.hypot(a.stderr, b.stderr)


def test_fixed_seed_is_reproducible():
    fx = fixtures.equivalence_fixtures()[0]
    sc = scenario(fx.rumor_seeds, *fx.positive)
    for backend in ("kernel", "realization", "stochastic"):
        assert mc_gamma(fx.net, sc, 300, 9, backend) == mc_gamma(fx.net, sc, 300, 9, backend)


def test_rumor_reach_grows_with_nested_rumor_sets():
    fx = fixtures.exhaustive_fixtures()[2]
    n = fx.net.node_count
    reach = [n - exact_gamma(fx.net, set(range(j)), set()).value for j in range(1, n + 1)]
    assert all(a <= b for a, b in zip(reach, reach[1:]))


def test_rounds_series():
    net = Network.from_arcs(4, [(0, 1), (1, 2), (2, 3)])
    mean, err = mc_rumor_rounds(net, scenario({0}), 50, 1, 5)
    assert mean.tolist() == [1, 2, 3, 4, 4, 4]
    assert err.tolist() == [0] * 6
    fx = fixtures.exhaustive_fixtures()[4]
    mean, _ = mc_rumor_rounds(fx.net, scenario(fx.rumor_seeds), 2000, 1, 20)
    assert np.all(np.diff(mean) >= 0)


def test_kernel_counts_partition_nodes():
    fx = fixtures.equivalence_fixtures()[2]
    counts, _, _ = kernel_counts(fx.net, scenario(fx.rumor_seeds, *fx.positive), 500, 4)
    assert np.all(counts.sum(axis=1) <= fx.net.node_count)


def test_equivalence_deterministic_instance():
    net = Network.from_arcs(4, [(0, 1), (1, 2), (3, 2)])
    assert equivalence_distance(net, scenario({0}, {3}), 200, 1) == 0.0
    assert equivalence_distance(net, scenario({0}, {3}), 200, 1, with_times=True) == 0.0


def test_equivalence_small_instance():
    net = Network.from_arcs(4, [(0, 1), (0, 2), (1, 3), (2, 3)], prob=0.5)
    sc = scenario({0}, {2})
    assert equivalence_distance(net, sc, 50_000, 1) <= 0.02
    small = np.mean([equivalence_distance(net, sc, 500, s) for s in range(5)])
    large = np.mean([equivalence_distance(net, sc, 50_000, s) for s in range(2)])
    assert large <= small
