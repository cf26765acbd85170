"""Sampled worlds of a network: live/blocked arcs plus per-node attempt orders.

A realization fixes, for every arc, whether an attempt across it succeeds and,
for every node ``u``, the order in which ``u`` tries its out-neighbours.  The
rank of arc ``(u, v)`` in that order (1-based) is also its length when
measuring how long a cascade takes to travel along it.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .netgraph import Network

INF = math.inf


@dataclass(frozen=True, eq=False)
class Realization:
    base: Network
    live: np.ndarray  # bool per arc
    rank: np.ndarray  # int per arc, 1..d_u within each source

    def __post_init__(self):
        live = np.asarray(self.live, dtype=bool).copy()
        rank = np.asarray(self.rank, dtype=np.int64).copy()
        live.setflags(write=False)
        rank.setflags(write=False)
        object.__setattr__(self, "live", live)
        object.__setattr__(self, "rank", rank)
        if live.shape != (self.base.arc_count,) or rank.shape != (self.base.arc_count,):
            raise ValueError("one live flag and one rank per arc required")
        net = self.base
        expected = np.arange(net.arc_count) - np.repeat(net.indptr[:-1], net.out_degree) + 1
        got = rank[np.lexsort((rank, net.sources))]
        if not np.array_equal(got, expected):
            bad = int(net.sources[np.flatnonzero(got != expected)[0]])
            raise ValueError(f"ranks of node {bad} are not a permutation")

    def perm(self, u: int) -> list[int]:
        """Out-neighbours of ``u`` in attempt order."""
        lo, hi = self.base.indptr[u], self.base.indptr[u + 1]
        order = np.argsort(self.rank[lo:hi])
        return self.base.targets[lo:hi][order].tolist()

    def weight(self, u: int, v: int) -> int:
        return int(self.rank[self.base.arc_index(u, v)])

    def key(self) -> tuple:
        return (self.live.tobytes(), self.rank.tobytes())

    def __eq__(self, other):
        if not isinstance(other, Realization):
            return NotImplemented
        return self.base.same_structure(other.base) and self.key() == other.key()

    __hash__ = None


def ranks_from_keys(net: Network, keys: np.ndarray) -> np.ndarray:
    """Rank arcs within each source by ascending ``keys``."""
    src = net.sources
    order = np.lexsort((keys, src))
    pos = np.arange(net.arc_count) - np.repeat(net.indptr[:-1], net.out_degree)
    rank = np.empty(net.arc_count, dtype=np.int64)
    rank[order] = pos + 1
    return rank


def from_orders(net: Network, live_arcs, orders: dict) -> Realization:
    """Build a realization by hand: ``live_arcs`` as ``(u, v)`` pairs and
    ``orders[u]`` listing ``u``'s out-neighbours in attempt order (nodes left
    out keep their stored neighbour order)."""
    live = np.zeros(net.arc_count, dtype=bool)
    for u, v in live_arcs:
        live[net.arc_index(u, v)] = True
    rank = np.arange(net.arc_count) - np.repeat(net.indptr[:-1], net.out_degree) + 1
    for u, order in orders.items():
        for j, v in enumerate(order, start=1):
            rank[net.arc_index(u, v)] = j
    return Realization(net, live, rank)


def generate(net: Network, rng: np.random.Generator) -> Realization:
    """Draw one realization: independent live flags and uniform attempt orders."""
    live = rng.random(net.arc_count) < net.probs
    # i.i.d. continuous sort keys give each of the d_u! orders equal mass
    rank = ranks_from_keys(net, rng.random(net.arc_count))
    return Realization(net, live, rank)


def probability(r: Realization) -> float:
    p = r.base.probs
    arc_part = np.prod(np.where(r.live, p, 1.0 - p))
    perm_part = 1.0
    for d in r.base.out_degree.tolist():
        perm_part /= math.factorial(d)
    return float(arc_part * perm_part)


def exact_prob(p: float) -> Fraction:
    """Arc probability as an exact rational of its decimal repr (0.1 -> 1/10)."""
    return Fraction(repr(float(p)))


def probability_exact(r: Realization) -> Fraction:
    out = Fraction(1)
    for p, live in zip(r.base.probs.tolist(), r.live.tolist()):
        q = exact_prob(p)
        out *= q if live else 1 - q
    for d in r.base.out_degree.tolist():
        out /= math.factorial(d)
    return out


def live_distances(r: Realization, sources: Iterable[int]) -> np.ndarray:
    """Multi-source shortest live-path lengths, ``inf`` where unreachable."""
    net = r.base
    dist = np.full(net.node_count, INF)
    heap = []
    for s in set(sources):
        dist[s] = 0.0
        heap.append((0, s))
    heapq.heapify(heap)
    ip, tg, live, rank = net.indptr, net.targets, r.live, r.rank
    done = np.zeros(net.node_count, dtype=bool)
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for a in range(ip[u], ip[u + 1]):
            if not live[a]:
                continue
            v = tg[a]
            nd = d + rank[a]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, int(v)))
    return dist


def live_distance(r: Realization, sources: Iterable[int], target: int) -> float:
    sources = set(sources)
    if not sources:
        raise ValueError("live_distance needs at least one source")
    d = live_distances(r, sources)[target]
    return d if d == INF else int(d)


# ---------------------------------------------------------------------------
# text dump


def dump(r: Realization) -> str:
    net = r.base
    lines = [f"# realization nodes={net.node_count} arcs={net.arc_count}"]
    for u in range(net.node_count):
        order = r.perm(u)
        if order:
            lines.append(f"perm {u}: " + " ".join(map(str, order)))
    for u, v, live in zip(net.sources.tolist(), net.targets.tolist(), r.live.tolist()):
        if live:
            lines.append(f"live {u} {v}")
    return "\n".join(lines) + "\n"


def parse_dump(net: Network, text: str) -> Realization:
    live = np.zeros(net.arc_count, dtype=bool)
    rank = np.zeros(net.arc_count, dtype=np.int64)
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        if line.startswith("perm "):
            head, _, rest = line[5:].partition(":")
            u = int(head)
            for j, v in enumerate(rest.split(), start=1):
                rank[net.arc_index(u, int(v))] = j
        elif line.startswith("live "):
            u, v = map(int, line[5:].split())
            live[net.arc_index(u, v)] = True
        else:
            raise ValueError(f"unrecognised dump line {line!r}")
    return Realization(net, live, rank)
