"""Directed networks with per-arc propagation probabilities.

Arcs are stored in CSR order: grouped by source node, and within a source in
the order they were first seen in the input.  ``indptr[u]:indptr[u + 1]``
indexes the out-arcs of ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class EdgeListError(ValueError):
    """Raised for malformed edge-list input."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Network:
    node_count: int
    indptr: np.ndarray  # int64, length node_count + 1
    targets: np.ndarray  # int64, one entry per arc
    probs: np.ndarray  # float64, one entry per arc
    labels: np.ndarray = field(default=None)  # original node ids
    input_edges: int = -1  # edge lines read from the source file, if any

    def __post_init__(self):
        labels = self.labels if self.labels is not None else np.arange(self.node_count)
        object.__setattr__(self, "indptr", _frozen(np.asarray(self.indptr, dtype=np.int64)))
        object.__setattr__(self, "targets", _frozen(np.asarray(self.targets, dtype=np.int64)))
        object.__setattr__(self, "probs", _frozen(np.asarray(self.probs, dtype=np.float64)))
        object.__setattr__(self, "labels", _frozen(np.asarray(labels, dtype=np.int64)))
        if self.input_edges < 0:
            object.__setattr__(self, "input_edges", self.arc_count)
        self._validate()

    def _validate(self):
        n = self.node_count
        if self.indptr.shape != (n + 1,) or self.indptr[0] != 0:
            raise ValueError("indptr must have node_count + 1 entries starting at 0")
        if np.any(np.diff(self.indptr) < 0) or self.indptr[-1] != len(self.targets):
            raise ValueError("indptr is not a valid offset array")
        if len(self.probs) != len(self.targets):
            raise ValueError("one probability per arc is required")
        if len(self.targets) and (self.targets.min() < 0 or self.targets.max() >= n):
            raise ValueError("arc target out of range")
        if np.any((self.probs < 0) | (self.probs > 1)) or np.any(np.isnan(self.probs)):
            raise ValueError("arc probabilities must lie in [0, 1]")
        src = self.sources
        if len(src):
            if np.any(src == self.targets):
                raise ValueError("self-loops are not allowed")
            keys = src * n + self.targets
            if len(np.unique(keys)) != len(keys):
                raise ValueError("duplicate arcs")

    @classmethod
    def from_arcs(cls, node_count: int, arcs: Iterable[Sequence], prob: float = 1.0,
                  labels=None, input_edges: int = -1) -> "Network":
        """Build from ``(u, v)`` or ``(u, v, p)`` tuples; order within a source is kept."""
        arcs = list(arcs)
        src = np.array([a[0] for a in arcs], dtype=np.int64)
        dst = np.array([a[1] for a in arcs], dtype=np.int64)
        p = np.array([a[2] if len(a) > 2 else prob for a in arcs], dtype=np.float64)
        if len(src) and (src.min() < 0 or src.max() >= node_count):
            raise ValueError("arc source out of range")
        order = np.argsort(src, kind="stable")
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=node_count), out=indptr[1:])
        return cls(node_count, indptr, dst[order], p[order], labels, input_edges)

    @property
    def arc_count(self) -> int:
        return len(self.targets)

    @property
    def sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.node_count, dtype=np.int64), np.diff(self.indptr))

    @property
    def out_degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def in_degree(self) -> np.ndarray:
        return np.bincount(self.targets, minlength=self.node_count)

    def out_neighbors(self, u: int) -> np.ndarray:
        return self.targets[self.indptr[u]:self.indptr[u + 1]]

    def out_arcs(self, u: int) -> range:
        return range(self.indptr[u], self.indptr[u + 1])

    def arcs(self) -> list[tuple[int, int, float]]:
        return list(zip(self.sources.tolist(), self.targets.tolist(), self.probs.tolist()))

    def arc_index(self, u: int, v: int) -> int:
        hits = np.flatnonzero(self.out_neighbors(u) == v)
        if not len(hits):
            raise KeyError((u, v))
        return int(self.indptr[u] + hits[0])

    def with_probs(self, probs) -> "Network":
        return Network(self.node_count, self.indptr, self.targets, probs, self.labels, self.input_edges)

    def same_structure(self, other: "Network") -> bool:
        return (self.node_count == other.node_count
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.targets, other.targets)
                and np.array_equal(self.labels, other.labels))

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.same_structure(other) and np.array_equal(self.probs, other.probs)

    __hash__ = None


def load_edge_list(text: str, undirected: bool = False, prob: float = 1.0) -> Network:
    """Parse a SNAP-style edge list.

    Lines starting with ``#`` and blank lines are skipped; tabs and spaces both
    delimit.  Node ids are relabelled to ``0..n-1`` in ascending order of the
    original ids (kept in ``Network.labels``).  With ``undirected=True`` every
    line yields both arcs.  Repeated arcs are dropped.
    """
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if len(parts) != 2:
            raise EdgeListError(f"line {lineno}: expected two node ids, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"line {lineno}: node ids must be integers, got {line!r}") from None
        if u == v:
            raise EdgeListError(f"line {lineno}: self-loop on node {u}")
        pairs.append((u, v))

    if not pairs:
        return Network(0, np.zeros(1, dtype=np.int64), [], [], labels=[], input_edges=0)

    raw = np.array(pairs, dtype=np.int64)
    labels, dense = np.unique(raw, return_inverse=True)
    dense = dense.reshape(raw.shape)
    if undirected:
        # interleave so each edge's reverse arc follows it in input order
        dense = np.stack([dense, dense[:, ::-1]], axis=1).reshape(-1, 2)
    n = len(labels)
    keys = dense[:, 0] * n + dense[:, 1]
    _, first = np.unique(keys, return_index=True)
    dense = dense[np.sort(first)]
    arcs = [(int(u), int(v)) for u, v in dense]
    return Network.from_arcs(n, arcs, prob=prob, labels=labels, input_edges=len(pairs))


def read_edge_list(path, undirected: bool = False, prob: float = 1.0) -> Network:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh.read(), undirected=undirected, prob=prob)


def serialize_edge_list(net: Network) -> str:
    """One ``u<TAB>v`` line per arc, using the original node ids."""
    lab = net.labels
    lines = [f"# nodes: {net.node_count} arcs: {net.arc_count}"]
    lines += [f"{lab[u]}\t{lab[v]}" for u, v in zip(net.sources.tolist(), net.targets.tolist())]
    return "\n".join(lines) + "\n"


def serialize_remap(net: Network) -> str:
    """Two-column ``dense original`` table."""
    return "".join(f"{i}\t{orig}\n" for i, orig in enumerate(net.labels.tolist()))


# ---------------------------------------------------------------------------
# probability models


@dataclass(frozen=True)
class ProbabilityModel:
    kind: str  # "uniform" or "wcascade"
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "wcascade"):
            raise ValueError(f"unknown probability model {self.kind!r}")
        if self.kind == "uniform" and not 0.0 <= self.p <= 1.0:
            raise ValueError("uniform probability must lie in [0, 1]")

    @classmethod
    def parse(cls, spec: str) -> "ProbabilityModel":
        """``uniform:<p>`` or ``wcascade``."""
        if spec == "wcascade":
            return cls("wcascade")
        kind, _, value = spec.partition(":")
        if kind != "uniform" or not value:
            raise ValueError(f"bad probability model {spec!r}; use uniform:<p> or wcascade")
        return cls("uniform", float(value))

    def __str__(self):
        return "wcascade" if self.kind == "wcascade" else f"uniform:{self.p:g}"


def uniform(p: float) -> ProbabilityModel:
    return ProbabilityModel("uniform", p)


WEIGHTED_CASCADE = ProbabilityModel("wcascade")


def assign_probabilities(net: Network, model: ProbabilityModel) -> Network:
    if model.kind == "uniform":
        probs = np.full(net.arc_count, model.p)
    else:
        # 1/d_v with d_v the out-degree of the arc's head, clamped for sinks
        probs = 1.0 / np.maximum(net.out_degree, 1)[net.targets]
    return net.with_probs(probs)


def top_degree_nodes(net: Network, n: int, exclude: Iterable[int] = ()) -> list[int]:
    """The ``n`` nodes of highest total degree, ties by ascending id."""
    excluded = set(exclude)
    available = net.node_count - len(excluded & set(range(net.node_count)))
    if n < 0 or n > available:
        raise ValueError(f"cannot pick {n} nodes out of {available}")
    deg = net.out_degree + net.in_degree
    order = np.lexsort((np.arange(net.node_count), -deg))
    picked = [int(u) for u in order if int(u) not in excluded]
    return picked[:n]
