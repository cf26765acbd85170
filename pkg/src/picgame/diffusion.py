"""Multi-cascade diffusion: one rumor cascade against ``k`` positive cascades.

Cascade ids: ``0`` is the rumor, ``1..k`` are the positive cascades, ``-1``
marks an inactive node.

Three engines produce an :class:`Outcome`:

* :func:`run_stochastic` draws targets and coin flips as the process unfolds;
* :func:`run_deterministic` replays a fixed :class:`Realization`, where a node
  activated at ``t`` attempts its rank-``j`` neighbour at ``t + j``;
* :func:`rumor_count_fast` skips the simulation and counts rumor-active nodes
  from live-path distances alone.

:func:`run_variant` covers the alternative semantics (broadcast attempts,
per-node cascade rankings, attempts restricted to inactive neighbours).
"""

from __future__ import annotations

import csv
import heapq
import io
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .netgraph import Network
from .realization import INF, Realization, live_distances

RUMOR = 0
INACTIVE = -1

PIC, BIC = "PIC", "BIC"
HOMOGENEOUS, HETEROGENEOUS = "homogeneous", "heterogeneous"
ATTEMPT_ALL, INACTIVE_ONLY = "attempt-all", "inactive-only"


class SeedOverlapError(ValueError):
    pass


class HorizonExceeded(RuntimeError):
    """A run kept going past the largest possible activation time."""


@dataclass(frozen=True)
class Semantics:
    model: str = PIC
    priority_mode: str = HOMOGENEOUS
    selection: str = ATTEMPT_ALL
    # heterogeneous mode: node -> cascade ids, highest priority first
    node_priority: Mapping[int, tuple] = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in (PIC, BIC):
            raise ValueError(f"unknown model {self.model!r}")
        if self.priority_mode not in (HOMOGENEOUS, HETEROGENEOUS):
            raise ValueError(f"unknown priority mode {self.priority_mode!r}")
        if self.selection not in (ATTEMPT_ALL, INACTIVE_ONLY):
            raise ValueError(f"unknown selection rule {self.selection!r}")
        if self.node_priority and self.priority_mode != HETEROGENEOUS:
            raise ValueError("per-node priorities need heterogeneous priority mode")
        object.__setattr__(self, "node_priority",
                           {int(u): tuple(r) for u, r in dict(self.node_priority).items()})

    @property
    def is_default(self) -> bool:
        return (self.model, self.priority_mode, self.selection) == (PIC, HOMOGENEOUS, ATTEMPT_ALL)


DEFAULT_SEMANTICS = Semantics()


@dataclass(frozen=True)
class Scenario:
    rumor_seeds: frozenset
    positive_actions: tuple = ()
    priority: tuple = None  # cascade ids, highest first; default rumor, 1, 2, ...
    semantics: Semantics = DEFAULT_SEMANTICS
    rumor_aware: bool = False  # forbid positive seeds inside the rumor seed set

    def __post_init__(self):
        object.__setattr__(self, "rumor_seeds", frozenset(int(u) for u in self.rumor_seeds))
        acts = tuple(frozenset(int(u) for u in a) for a in self.positive_actions)
        object.__setattr__(self, "positive_actions", acts)
        prio = tuple(range(self.k + 1)) if self.priority is None else tuple(self.priority)
        if sorted(prio) != list(range(self.k + 1)):
            raise ValueError(f"priority {prio} is not an ordering of cascades 0..{self.k}")
        object.__setattr__(self, "priority", prio)
        for u, ranking in self.semantics.node_priority.items():
            if sorted(ranking) != list(range(self.k + 1)):
                raise ValueError(f"node {u} ranking {ranking} is not an ordering of 0..{self.k}")
        if self.rumor_aware:
            for i, a in enumerate(acts, start=1):
                if a & self.rumor_seeds:
                    raise SeedOverlapError(f"agent {i} seeds overlap the rumor seeds")

    @property
    def k(self) -> int:
        return len(self.positive_actions)

    @property
    def positive_union(self) -> frozenset:
        return frozenset().union(*self.positive_actions)

    def seed_sets(self) -> list:
        return [self.rumor_seeds, *self.positive_actions]

    def ranking_at(self, v: int) -> tuple:
        return self.semantics.node_priority.get(v, self.priority)

    def check_nodes(self, n: int):
        for c, seeds in enumerate(self.seed_sets()):
            for u in seeds:
                if not 0 <= u < n:
                    raise ValueError(f"seed {u} of cascade {c} is not a node")


@dataclass
class Outcome:
    cascade: np.ndarray  # per node: -1 inactive, 0 rumor, i agent
    time: np.ndarray  # per node activation time, -1 if inactive
    rounds: list  # rounds[t] = rumor-active nodes after step t

    def count(self, c: int) -> int:
        return int(np.count_nonzero(self.cascade == c))

    @property
    def rumor_count(self) -> int:
        return self.count(RUMOR)

    def labels(self) -> tuple:
        return tuple(self.cascade.tolist())

    def __eq__(self, other):
        if not isinstance(other, Outcome):
            return NotImplemented
        return (np.array_equal(self.cascade, other.cascade)
                and np.array_equal(self.time, other.time)
                and list(self.rounds) == list(other.rounds))

    def to_node_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "cascade", "time"])
        for u, (c, t) in enumerate(zip(self.cascade.tolist(), self.time.tolist())):
            w.writerow([u, c, t])
        return buf.getvalue()

    def to_rounds_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["round", "rumor_count"])
        for t, c in enumerate(self.rounds):
            w.writerow([t, c])
        return buf.getvalue()


def horizon(net: Network) -> int:
    return net.arc_count + net.node_count


def _rounds(cascade, time) -> list:
    rumor_times = time[cascade == RUMOR]
    if not len(rumor_times):
        return [0]
    last = int(time.max())
    return np.cumsum(np.bincount(rumor_times, minlength=last + 1)).tolist()


def _winner(sc: Scenario, v: int, claims) -> int:
    ranking = sc.ranking_at(v)
    return min(claims, key=ranking.index)


def _seed(net: Network, sc: Scenario):
    sc.check_nodes(net.node_count)
    cascade = np.full(net.node_count, INACTIVE, dtype=np.int64)
    time = np.full(net.node_count, -1, dtype=np.int64)
    claims: dict[int, list] = {}
    for c, seeds in enumerate(sc.seed_sets()):
        for u in seeds:
            claims.setdefault(u, []).append(c)
    for u, cs in claims.items():
        cascade[u] = _winner(sc, u, cs)
        time[u] = 0
    return cascade, time, sorted(claims)


def run_deterministic(r: Realization, sc: Scenario) -> Outcome:
    """Event-driven replay of the default semantics on a realization."""
    if not sc.semantics.is_default:
        raise ValueError("run_deterministic covers the default semantics; use run_variant")
    net = r.base
    cascade, time, active = _seed(net, sc)
    ip, tg, live, rank = net.indptr, net.targets, r.live, r.rank
    cap = horizon(net)
    events = []  # (attempt time, target, cascade of attempter)

    def schedule(u):
        t0, c = int(time[u]), int(cascade[u])
        for a in range(ip[u], ip[u + 1]):
            if live[a]:
                events.append((t0 + int(rank[a]), int(tg[a]), c))

    for u in active:
        schedule(u)
    heapq.heapify(events)
    while events:
        t = events[0][0]
        if t > cap:
            raise HorizonExceeded(f"activation time {t} exceeds horizon {cap}")
        claims: dict[int, list] = {}
        while events and events[0][0] == t:
            _, v, c = heapq.heappop(events)
            if cascade[v] == INACTIVE:
                claims.setdefault(v, []).append(c)
        for v, cs in claims.items():
            cascade[v] = _winner(sc, v, cs)
            time[v] = t
        for v in claims:
            t0, c = t, int(cascade[v])
            for a in range(ip[v], ip[v + 1]):
                if live[a]:
                    heapq.heappush(events, (t0 + int(rank[a]), int(tg[a]), c))
    return Outcome(cascade, time, _rounds(cascade, time))


def _simulate(net: Network, sc: Scenario, r: Realization | None, rnd: random.Random | None) -> Outcome:
    """Step-by-step simulation shared by the stochastic engine and the variants.

    With ``r`` given, choices follow the realization's attempt order and
    success is read from its live flags; otherwise both come from ``rnd``.
    """
    sem = sc.semantics
    cascade, time, active = _seed(net, sc)
    ip, tg, probs = net.indptr, net.targets, net.probs
    if r is not None:
        rank = r.rank.tolist()
        live = r.live.tolist()
    pools = {}  # node -> unattempted arc ids
    frontier = []

    def join(u):
        arcs = list(range(ip[u], ip[u + 1]))
        if r is not None:
            arcs.sort(key=rank.__getitem__)
        if arcs:
            pools[u] = arcs
            frontier.append(u)

    for u in active:
        join(u)
    cap = horizon(net)
    t = 0
    inactive_only = sem.selection == INACTIVE_ONLY
    broadcast = sem.model == BIC
    while frontier:
        t += 1
        if t > cap:
            raise HorizonExceeded(f"step {t} exceeds horizon {cap}")
        claims: dict[int, list] = {}
        attempted = False
        for u in list(frontier):
            pool = pools[u]
            if inactive_only:
                eligible = [j for j, a in enumerate(pool) if cascade[tg[a]] == INACTIVE]
            else:
                eligible = range(len(pool))
            if not eligible:
                continue
            if broadcast:
                picks = list(eligible)
            elif r is not None:
                picks = [eligible[0]]  # pool is kept in attempt order
            else:
                picks = [eligible[rnd.randrange(len(eligible))]]
            attempted = True
            chosen = [pool[j] for j in picks]
            for j in sorted(picks, reverse=True):
                pool.pop(j)
            c = int(cascade[u])
            for a in chosen:
                v = int(tg[a])
                if cascade[v] != INACTIVE:
                    continue
                ok = live[a] if r is not None else rnd.random() < probs[a]
                if ok:
                    claims.setdefault(v, []).append(c)
            if not pool:
                frontier.remove(u)
                del pools[u]
        for v, cs in claims.items():
            cascade[v] = _winner(sc, v, cs)
            time[v] = t
        for v in sorted(claims):
            join(v)
        if not attempted and not claims:
            break  # inactive-only: leftover pools only hold active targets
    return Outcome(cascade, time, _rounds(cascade, time))


def _as_random(rng) -> random.Random:
    if isinstance(rng, random.Random):
        return rng
    if isinstance(rng, np.random.Generator):
        return random.Random(int(rng.integers(2**63)))
    return random.Random(rng)


def run_stochastic(net: Network, sc: Scenario, rng) -> Outcome:
    """The stochastic process: each step an active node tries one uniformly
    chosen, not-yet-tried out-neighbour (active or not)."""
    if sc.semantics.model != PIC or not sc.semantics.is_default:
        raise ValueError("run_stochastic covers the default semantics; use run_variant")
    return _simulate(net, sc, None, _as_random(rng))


def run_variant(source, sc: Scenario, rng=None) -> Outcome:
    """Simulate under ``sc.semantics`` on a network (random) or a realization."""
    if isinstance(source, Realization):
        return _simulate(source.base, sc, source, None)
    if rng is None:
        raise ValueError("a random stream is required when simulating on a network")
    return _simulate(source, sc, None, _as_random(rng))


def rumor_count_fast(r: Realization, rumor_seeds, union_x) -> int:
    """Nodes whose live distance from the rumor is finite and no larger than
    from any positive seed."""
    rumor_seeds = set(rumor_seeds)
    if not rumor_seeds:
        raise ValueError("rumor seed set must be nonempty")
    dr = live_distances(r, rumor_seeds)
    dx = live_distances(r, union_x) if union_x else np.full(len(dr), INF)
    return int(np.count_nonzero((dr < INF) & (dr <= dx)))


def scenario(rumor, *actions, priority: Sequence[int] | None = None,
             semantics: Semantics = DEFAULT_SEMANTICS, rumor_aware: bool = False) -> Scenario:
    return Scenario(frozenset(rumor), tuple(frozenset(a) for a in actions),
                    None if priority is None else tuple(priority), semantics, rumor_aware)
