"""Seeding games between agents that each run one positive cascade.

The social value of a full-action is the expected number of nodes the rumor
does not reach.  Under the default semantics it depends only on the union of
the agents' seed sets, so evaluators are keyed by that union.

Agents are numbered from 1, matching their cascade ids.  A full-action is a
tuple of frozensets, one per agent.
"""

from __future__ import annotations

import copy
import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .diffusion import RUMOR, Scenario
from .estimate import seed_labels
from .netgraph import Network, top_degree_nodes
from .oracle import DEFAULT_CAP, EnumerationCapExceeded, RealizationTable, exact_counts, exact_gamma

RUMOR_AWARE = "rumor-aware"
RUMOR_OBLIVIOUS = "rumor-oblivious"
GREEDY_FACTOR = 1 - 1 / math.e
APPROX_EQUILIBRIUM_RATIO = (2 * math.e - 1) / (math.e - 1)


class CycleDetected(RuntimeError):
    pass


class RoundCapExceeded(RuntimeError):
    def __init__(self, msg, trace):
        super().__init__(msg)
        self.trace = trace


# ---------------------------------------------------------------------------
# evaluators


class ExactEvaluator:
    """Exact social value and own reach by realization enumeration."""

    def __init__(self, net: Network, rumor_seeds, cap: int = DEFAULT_CAP):
        self.net = net
        self.rumor_seeds = frozenset(rumor_seeds)
        self.table = RealizationTable(net, cap)
        self._gamma: dict = {}
        self._sigma: dict = {}

    def gamma(self, union) -> Fraction:
        union = frozenset(union)
        if union not in self._gamma:
            self._gamma[union] = exact_gamma(self.net, self.rumor_seeds, union, self.table).value
        return self._gamma[union]

    def gains(self, base, candidates) -> list:
        base = frozenset(base)
        g0 = self.gamma(base)
        return [self.gamma(base | {v}) - g0 for v in candidates]

    def sigma(self, actions, agent: int, priority=None) -> Fraction:
        key = (tuple(actions), priority)
        if key not in self._sigma:
            sc = Scenario(self.rumor_seeds, tuple(actions), priority)
            self._sigma[key] = exact_counts(self.net, sc, self.table)[1:]
        return self._sigma[key][agent - 1]


class SampledEvaluator:
    """Social value averaged over one fixed set of sampled realizations.

    Every comparison between actions uses the same realizations, so a
    unilateral improvement in an agent's contribution is a genuine
    improvement of the sampled social value.
    """

    def __init__(self, net: Network, rumor_seeds, samples: int = 200, seed: int = 0):
        if samples < 1:
            raise ValueError("samples must be >= 1")
        self.net = net
        self.rumor_seeds = frozenset(rumor_seeds)
        self.samples = samples
        _kernels.check_limits(net.node_count, net.arc_count)
        pnode = _kernels.node_probs(net.indptr, net.probs)
        ptrs, tgts, wts = [], [], []
        for s in range(samples):
            p, t, w = _kernels.sample_live(net.indptr, net.targets, net.probs, pnode,
                                           _kernels._trial_seed(seed, s))
            ptrs.append(p)
            tgts.append(t)
            wts.append(w)
        self._lptr = np.stack(ptrs)
        sizes = np.array([len(t) for t in tgts], dtype=np.int64)
        self._bases = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
        self._lt = np.concatenate(tgts) if tgts else np.empty(0, np.int64)
        self._lw = np.concatenate(wts) if wts else np.empty(0, np.int64)
        self._rumor = np.array(sorted(self.rumor_seeds), dtype=np.int64)
        self._gamma: dict = {}

    def retarget(self, rumor_seeds) -> "SampledEvaluator":
        """Same stored realizations, different rumor seeds."""
        other = copy.copy(self)
        other.rumor_seeds = frozenset(rumor_seeds)
        other._rumor = np.array(sorted(other.rumor_seeds), dtype=np.int64)
        other._gamma = {}
        other._gain_table = None
        return other

    @staticmethod
    def _arr(nodes) -> np.ndarray:
        return np.array(sorted(nodes), dtype=np.int64)

    def gamma_samples(self, union) -> np.ndarray:
        counts = _kernels.sample_rumor_counts(self._lptr, self._lt, self._lw, self._bases,
                                              self._rumor, self._arr(union))
        return self.net.node_count - counts

    def gamma(self, union) -> float:
        union = frozenset(union)
        if union not in self._gamma:
            self._gamma[union] = float(self.gamma_samples(union).mean())
        return self._gamma[union]

    def gains(self, base, candidates) -> np.ndarray:
        cand = np.asarray(list(candidates), dtype=np.int64)
        tot = _kernels.sample_gains(self._lptr, self._lt, self._lw, self._bases,
                                    self._rumor, self._arr(base), cand)
        return tot / self.samples

    def sigma(self, actions, agent: int, priority=None) -> float:
        sc = Scenario(self.rumor_seeds, tuple(actions), priority)
        labels = seed_labels(self.net, sc)
        _kernels.check_limits(self.net.node_count, self.net.arc_count, sc.k + 1)
        counts = _kernels.sample_label_counts(self._lptr, self._lt, self._lw, self._bases,
                                              labels, sc.k + 1)
        return float(counts[:, sc.priority.index(agent)].mean())


# ---------------------------------------------------------------------------
# agents and utilities


@dataclass(frozen=True)
class AgentSpec:
    budget: int
    pool: frozenset = None  # None: every node outside the rumor seeds
    utility_mode: str = RUMOR_AWARE

    def __post_init__(self):
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        if self.utility_mode not in (RUMOR_AWARE, RUMOR_OBLIVIOUS):
            raise ValueError(f"unknown utility mode {self.utility_mode!r}")
        if self.pool is not None:
            object.__setattr__(self, "pool", frozenset(self.pool))

    def candidates(self, evaluator) -> list:
        pool = self.pool
        if pool is None:
            pool = set(range(evaluator.net.node_count)) - evaluator.rumor_seeds
        elif self.utility_mode == RUMOR_AWARE and pool & evaluator.rumor_seeds:
            raise ValueError("a rumor-aware agent's pool may not contain rumor seeds")
        return sorted(pool)


def normalize(actions) -> tuple:
    return tuple(frozenset(int(u) for u in a) for a in actions)


def replace(actions, agent: int, action) -> tuple:
    acts = list(actions)
    acts[agent - 1] = frozenset(action)
    return tuple(acts)


def union_of(actions, skip: int | None = None) -> frozenset:
    return frozenset().union(*(a for i, a in enumerate(actions, start=1) if i != skip))


def check_full_action(actions, agents: Sequence[AgentSpec], evaluator):
    if len(actions) != len(agents):
        raise ValueError("one action per agent required")
    for i, (a, spec) in enumerate(zip(actions, agents), start=1):
        if len(a) > spec.budget:
            raise ValueError(f"agent {i} exceeds its budget of {spec.budget}")
        if not a <= set(spec.candidates(evaluator)):
            raise ValueError(f"agent {i} picks nodes outside its pool")


def delta(evaluator, actions, agent: int):
    """Agent's marginal contribution: value with its seeds minus without."""
    actions = normalize(actions)
    return evaluator.gamma(union_of(actions)) - evaluator.gamma(union_of(actions, skip=agent))


def sigma_private(evaluator, actions, agent: int):
    actions = normalize(actions)
    if not actions[agent - 1]:
        return 0
    return evaluator.sigma(actions, agent)


def utility(evaluator, actions, agent: int, mode: str = RUMOR_AWARE):
    if mode == RUMOR_AWARE:
        return delta(evaluator, actions, agent)
    return sigma_private(evaluator, actions, agent)


def action_space(spec: AgentSpec, evaluator, cap: int = 200_000) -> list:
    """All feasible actions, lexicographically ordered by sorted node tuple."""
    pool = spec.candidates(evaluator)
    size = sum(math.comb(len(pool), b) for b in range(min(spec.budget, len(pool)) + 1))
    if size > cap:
        raise EnumerationCapExceeded(f"{size} actions exceed the cap of {cap}")
    acts = [c for b in range(min(spec.budget, len(pool)) + 1) for c in itertools.combinations(pool, b)]
    return [frozenset(c) for c in sorted(acts)]


def best_response_bruteforce(evaluator, actions, agent: int, spec: AgentSpec, cap: int = 200_000):
    actions = normalize(actions)
    best, best_u = None, None
    for a in action_space(spec, evaluator, cap):
        u = utility(evaluator, replace(actions, agent, a), agent, spec.utility_mode)
        if best_u is None or u > best_u:
            best, best_u = a, u
    return best


def greedy_response(evaluator, actions, agent: int, spec: AgentSpec):
    """Add the pool node with the largest utility gain until the budget is
    spent or no node gains anything.

    Rumor-aware gains shrink as the seed set grows, so each step only
    re-evaluates nodes whose last known gain could still win (lazy greedy).
    """
    actions = normalize(actions)
    pool = spec.candidates(evaluator)
    chosen: set = set()
    if spec.utility_mode == RUMOR_AWARE:
        others = union_of(actions, skip=agent)
        singleton_bounds(evaluator)
    for _ in range(spec.budget):
        cands = [v for v in pool if v not in chosen]
        if not cands:
            break
        if spec.utility_mode == RUMOR_AWARE:
            v, gain = lazy_argmax(evaluator, others | chosen, cands)
        else:
            cur = utility(evaluator, replace(actions, agent, chosen), agent, RUMOR_OBLIVIOUS)
            gains = [utility(evaluator, replace(actions, agent, chosen | {v}), agent, RUMOR_OBLIVIOUS) - cur
                     for v in cands]
            j = _argmax(gains)
            v, gain = cands[j], gains[j]
        if gain <= 0:
            break
        chosen.add(v)
    return frozenset(chosen)


def _argmax(values) -> int:
    """First index of the maximum."""
    best = 0
    for i, v in enumerate(values):
        if v > values[best]:
            best = i
    return best


def _gain_table(evaluator) -> dict:
    """Every gain computed so far, keyed by base seed set, cached on the evaluator."""
    table = getattr(evaluator, "_gain_table", None)
    if table is None:
        table = evaluator._gain_table = {}
    return table


def cached_gains(evaluator, base, cands) -> list:
    base = frozenset(base)
    known = _gain_table(evaluator).setdefault(base, {})
    missing = [v for v in cands if v not in known]
    if missing:
        known.update(zip(missing, evaluator.gains(base, missing)))
    return [known[v] for v in cands]


def singleton_bounds(evaluator) -> dict:
    """Gain of each non-rumor node on its own."""
    nodes = sorted(set(range(evaluator.net.node_count)) - evaluator.rumor_seeds)
    cached_gains(evaluator, frozenset(), nodes)
    return _gain_table(evaluator)[frozenset()]


def lazy_argmax(evaluator, base, cands, batch: int = 32):
    """The candidate with the largest gain on top of ``base`` (smallest id
    among ties), and that gain.

    The social value is submodular, so a gain computed on top of any subset
    of ``base`` bounds the gain on top of ``base``.  Only candidates whose
    best bound reaches the best gain found so far are evaluated, so the
    answer equals a full scan.
    """
    base = frozenset(base)
    table = _gain_table(evaluator)
    exact = table.setdefault(base, {})
    subs = [g for b, g in table.items() if b <= base and b != base]

    def bound(v):
        if v in exact:
            return exact[v]
        return min((g[v] for g in subs if v in g), default=math.inf)

    ub = {v: bound(v) for v in cands}
    order = sorted(cands, key=lambda v: (-ub[v], v))
    best_v, best_g = None, None
    i = 0
    while i < len(order):
        if best_g is not None and ub[order[i]] < best_g:
            break
        chunk = []
        while i < len(order) and len(chunk) < batch:
            v = order[i]
            if best_g is None or ub[v] >= best_g:
                chunk.append(v)
            i += 1
        for v, g in zip(chunk, cached_gains(evaluator, base, chunk)):
            if best_g is None or g > best_g or (g == best_g and v < best_v):
                best_v, best_g = v, g
    return best_v, best_g


# ---------------------------------------------------------------------------
# dynamics


@dataclass
class TraceStep:
    iteration: int
    agent: int
    action: frozenset
    utility: object
    social: object


@dataclass
class NashAudit:
    is_nash: bool
    deviation: tuple = None  # (agent, action, utility gain)
    social: object = None
    optimum: object = None
    optimum_action: tuple = None

    @property
    def ratio(self) -> float:
        """Optimal social value over the audited one."""
        if self.optimum is None:
            return float("nan")
        if self.social == 0:
            return math.inf if self.optimum > 0 else 1.0
        return float(Fraction(self.optimum) / Fraction(self.social)) if isinstance(self.social, Fraction) \
            else float(self.optimum) / float(self.social)


@dataclass
class EquilibriumReport:
    final: tuple
    utilities: list
    social: object
    trace: list = field(default_factory=list)
    is_nash: NashAudit = None
    rounds: int = 0
    cycled: bool = False

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "agent", "action", "utility", "social"])
        for s in self.trace:
            w.writerow([s.iteration, s.agent, " ".join(map(str, sorted(s.action))),
                        float(s.utility), float(s.social)])
        return buf.getvalue()


def _report(evaluator, actions, agents, trace, rounds=0, cycled=False) -> EquilibriumReport:
    utils = [utility(evaluator, actions, i, spec.utility_mode) for i, spec in enumerate(agents, start=1)]
    return EquilibriumReport(actions, utils, evaluator.gamma(union_of(actions)), trace,
                             rounds=rounds, cycled=cycled)


def simple_game(evaluator, k: int, max_rounds: int | None = None) -> EquilibriumReport:
    """Round-robin play of ``k`` single-seed agents starting from no seeds.

    On its turn an agent moves to the node that maximizes its contribution
    given the others' seeds; it stays put when its current node already
    attains that maximum, and ties otherwise go to the smallest node id.
    Play stops after a round in which nobody moves.
    """
    agents = [AgentSpec(1) for _ in range(k)]
    actions = tuple(frozenset() for _ in range(k))
    if k == 0:
        return _report(evaluator, actions, agents, [])
    pool = agents[0].candidates(evaluator)
    singleton_bounds(evaluator)
    cap = max_rounds if max_rounds is not None else max(1, evaluator.net.node_count * k)
    trace = []
    it = 0
    for rnd in range(1, cap + 1):
        changed = False
        for i in range(1, k + 1):
            others = union_of(actions, skip=i)
            v, gain = lazy_argmax(evaluator, others, pool)
            cur = actions[i - 1]
            if cur and cached_gains(evaluator, others, list(cur))[0] == gain:
                continue
            actions = replace(actions, i, {v})
            changed = True
            it += 1
            trace.append(TraceStep(it, i, actions[i - 1], gain, evaluator.gamma(union_of(actions))))
        if not changed:
            return _report(evaluator, actions, agents, trace, rounds=rnd)
    raise RoundCapExceeded(f"no equilibrium after {cap} rounds", trace)


def better_response_dynamics(evaluator, agents: Sequence[AgentSpec], initial=None,
                             response: str = "first", max_steps: int | None = None,
                             cap: int = 200_000) -> EquilibriumReport:
    """Move agents to strictly better actions until nobody can improve.

    ``response`` picks the move: ``"first"`` scans agents in order and each
    agent's actions lexicographically, taking the first strict improvement;
    ``"best"`` takes a brute-force best response; ``"greedy"`` takes the
    greedy response.  Revisiting a full-action is reported as a cycle (an
    error when every agent is rumor-aware, since the social value must rise
    with every move).
    """
    agents = list(agents)
    k = len(agents)
    actions = normalize(initial) if initial is not None else tuple(frozenset() for _ in range(k))
    check_full_action(actions, agents, evaluator)
    aware = all(a.utility_mode == RUMOR_AWARE for a in agents)
    spaces = {}
    if response == "first":
        spaces = {i: action_space(spec, evaluator, cap) for i, spec in enumerate(agents, start=1)}
    seen = {actions}
    trace = []
    steps = 0
    while True:
        move = None
        for i, spec in enumerate(agents, start=1):
            cur = utility(evaluator, actions, i, spec.utility_mode)
            if response == "first":
                for a in spaces[i]:
                    u = utility(evaluator, replace(actions, i, a), i, spec.utility_mode)
                    if u > cur:
                        move = (i, a, u)
                        break
            else:
                if response == "best":
                    a = best_response_bruteforce(evaluator, actions, i, spec, cap)
                elif response == "greedy":
                    a = greedy_response(evaluator, actions, i, spec)
                else:
                    raise ValueError(f"unknown response rule {response!r}")
                u = utility(evaluator, replace(actions, i, a), i, spec.utility_mode)
                if u > cur:
                    move = (i, a, u)
            if move:
                break
        if move is None:
            return _report(evaluator, actions, agents, trace, rounds=steps)
        i, a, u = move
        before = evaluator.gamma(union_of(actions))
        actions = replace(actions, i, a)
        social = evaluator.gamma(union_of(actions))
        steps += 1
        trace.append(TraceStep(steps, i, a, u, social))
        if aware and not social > before:
            raise CycleDetected(f"social value did not rise at step {steps}")
        if actions in seen:
            if aware:
                raise CycleDetected(f"full-action revisited at step {steps}")
            return _report(evaluator, actions, agents, trace, rounds=steps, cycled=True)
        seen.add(actions)
        if max_steps is not None and steps >= max_steps:
            raise RoundCapExceeded(f"no equilibrium after {steps} moves", trace)


def optimal_full_action(evaluator, agents: Sequence[AgentSpec], cap: int = 200_000):
    """Brute-force the full-action with the largest social value."""
    spaces = [action_space(spec, evaluator, cap) for spec in agents]
    total = math.prod(len(s) for s in spaces)
    if total > cap:
        raise EnumerationCapExceeded(f"{total} full-actions exceed the cap of {cap}")
    best, best_v = None, None
    for acts in itertools.product(*spaces):
        v = evaluator.gamma(union_of(acts))
        if best_v is None or v > best_v:
            best, best_v = tuple(acts), v
    return best, best_v


def is_pure_nash(evaluator, agents: Sequence[AgentSpec], actions, cap: int = 200_000,
                 with_optimum: bool = True) -> NashAudit:
    """Try every unilateral deviation; optionally brute-force the optimum."""
    actions = normalize(actions)
    audit = NashAudit(True, social=evaluator.gamma(union_of(actions)))
    for i, spec in enumerate(agents, start=1):
        cur = utility(evaluator, actions, i, spec.utility_mode)
        for a in action_space(spec, evaluator, cap):
            gain = utility(evaluator, replace(actions, i, a), i, spec.utility_mode) - cur
            if gain > 0:
                audit.is_nash = False
                audit.deviation = (i, a, gain)
                break
        if not audit.is_nash:
            break
    if with_optimum:
        audit.optimum_action, audit.optimum = optimal_full_action(evaluator, agents, cap)
    return audit


# ---------------------------------------------------------------------------
# single-cascade baselines

BASELINES = ("greedy", "max-degree", "random", "none")


def baseline_seeds(net: Network, rumor_seeds, method: str, budget: int, evaluator=None, rng=None) -> frozenset:
    rumor_seeds = frozenset(rumor_seeds)
    free = net.node_count - len(rumor_seeds)
    if not 0 <= budget <= free:
        raise ValueError(f"budget {budget} infeasible with {free} non-rumor nodes")
    if method == "none":
        return frozenset()
    if method == "max-degree":
        return frozenset(top_degree_nodes(net, budget, exclude=rumor_seeds))
    if method == "random":
        g = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        pool = np.array(sorted(set(range(net.node_count)) - rumor_seeds), dtype=np.int64)
        return frozenset(int(u) for u in g.choice(pool, size=budget, replace=False))
    if method in ("greedy", "greedy-social"):
        if evaluator is None:
            raise ValueError("greedy seeding needs an evaluator")
        return greedy_response(evaluator, (frozenset(),), 1, AgentSpec(budget))
    raise ValueError(f"unknown baseline {method!r}")
