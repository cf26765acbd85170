"""Monte Carlo estimates of rumor spread and per-cascade reach."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .diffusion import RUMOR, Scenario, rumor_count_fast, run_deterministic, run_stochastic
from .netgraph import Network
from .realization import generate

DEFAULT_TRIALS = 10_000
BACKENDS = ("kernel", "realization", "stochastic")


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    trials: int

    @classmethod
    def from_samples(cls, xs) -> "Estimate":
        xs = np.asarray(xs, dtype=np.float64)
        if len(xs) < 1:
            raise ValueError("an estimate needs at least one trial")
        sd = xs.std(ddof=1) if len(xs) > 1 else 0.0
        return cls(float(xs.mean()), float(sd / math.sqrt(len(xs))), len(xs))

    def within(self, value, sigmas: float = 4.0) -> bool:
        return abs(self.mean - float(value)) <= sigmas * self.stderr


def _generator(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def _int_seed(rng) -> int:
    if isinstance(rng, (int, np.integer)):
        return int(rng) & (2**63 - 1)
    return int(_generator(rng).integers(2**63))


def seed_labels(net: Network, sc: Scenario) -> np.ndarray:
    """Per node, the priority rank of the cascade claiming it at step 0 (-1 if none)."""
    sc.check_nodes(net.node_count)
    label = np.full(net.node_count, -1, dtype=np.int64)
    for rank, c in reversed(list(enumerate(sc.priority))):
        for u in sc.seed_sets()[c]:
            label[u] = rank
    return label


def _check_kernel(sc: Scenario):
    if not sc.semantics.is_default:
        raise ValueError("the compiled kernel covers the default semantics only")


def kernel_counts(net: Network, sc: Scenario, trials: int, seed: int,
                  max_round: int = 0):
    """Per-trial node counts per cascade id, plus rumor round sums."""
    _check_kernel(sc)
    labels = seed_labels(net, sc)
    _kernels.check_limits(net.node_count, net.arc_count, sc.k + 1)
    ranks, rsum, rsq = _kernels.lazy_trials(
        net.indptr, net.targets, net.probs, _kernels.node_probs(net.indptr, net.probs),
        labels, sc.k + 1, trials, seed,
        max_round, sc.priority.index(RUMOR))
    counts = ranks[:, np.argsort(sc.priority)]  # columns by cascade id
    return counts, rsum, rsq


def mc_gamma(net: Network, sc: Scenario, trials: int = DEFAULT_TRIALS, rng=0,
             backend: str = "kernel") -> Estimate:
    """Expected number of nodes the rumor does not reach."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = net.node_count
    if backend == "kernel":
        counts, _, _ = kernel_counts(net, sc, trials, _int_seed(rng))
        return Estimate.from_samples(n - counts[:, RUMOR])
    g = _generator(rng)
    if backend == "realization":
        union = sc.positive_union
        xs = [n - rumor_count_fast(generate(net, g), sc.rumor_seeds, union) for _ in range(trials)]
    elif backend == "stochastic":
        xs = [n - run_stochastic(net, sc, g).rumor_count for _ in range(trials)]
    else:
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    return Estimate.from_samples(xs)


def mc_sigma(net: Network, sc: Scenario, agent: int, trials: int = DEFAULT_TRIALS, rng=0,
             backend: str = "kernel") -> Estimate:
    """Expected number of nodes taken by positive cascade ``agent`` (1-based)."""
    if not 1 <= agent <= sc.k:
        raise ValueError(f"agent must be in 1..{sc.k}")
    if backend == "kernel":
        counts, _, _ = kernel_counts(net, sc, trials, _int_seed(rng))
        return Estimate.from_samples(counts[:, agent])
    g = _generator(rng)
    if backend == "realization":
        xs = [run_deterministic(generate(net, g), sc).count(agent) for _ in range(trials)]
    elif backend == "stochastic":
        xs = [run_stochastic(net, sc, g).count(agent) for _ in range(trials)]
    else:
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    return Estimate.from_samples(xs)


def mc_rumor_rounds(net: Network, sc: Scenario, trials: int, rng, max_round: int):
    """Mean and standard error of the rumor-active count after each step."""
    _, rsum, rsq = kernel_counts(net, sc, trials, _int_seed(rng), max_round)
    mean = rsum / trials
    if trials > 1:
        var = np.maximum(rsq - trials * mean**2, 0.0) / (trials - 1)
    else:
        var = np.zeros_like(mean)
    return mean, np.sqrt(var / trials)


def equivalence_distance(net: Network, sc: Scenario, trials: int, rng=0,
                         with_times: bool = False, cap: int = 100_000) -> float:
    """Total-variation distance between the empirical law of final labellings
    under the stochastic process and the exact law of replaying a uniformly
    drawn realization."""
    from .oracle import outcome_law

    exact = outcome_law(net, sc, with_times=with_times, cap=cap)
    g = _generator(rng)
    seen = Counter()
    for _ in range(trials):
        out = run_stochastic(net, sc, g)
        seen[(out.labels(), tuple(out.time.tolist())) if with_times else out.labels()] += 1
    keys = set(exact) | set(seen)
    tv = sum(abs(float(exact.get(x, Fraction(0))) - seen[x] / trials) for x in keys)
    return tv / 2
