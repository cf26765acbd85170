"""Small hand-built networks used by the exhaustive checks, the acceptance
suite and the demos.

Every instance is small enough to enumerate all realizations.  The variant
instances reproduce, with deterministic replays, the three ways the social
value breaks once the default semantics are relaxed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diffusion import HETEROGENEOUS, INACTIVE_ONLY, Semantics, scenario
from .netgraph import Network
from .realization import from_orders


@dataclass(frozen=True)
class Fixture:
    name: str
    net: Network
    rumor_seeds: frozenset
    positive: tuple = ()  # a default full-action, for the equivalence runs


def _net(n, arcs, probs=0.5):
    if isinstance(probs, (int, float)):
        return Network.from_arcs(n, arcs, prob=float(probs))
    net = Network.from_arcs(n, arcs)
    return net.with_probs([probs.get((u, v), 0.5) for u, v, _ in net.arcs()])


def line3() -> Fixture:
    """r -> a -> b with certain arcs."""
    return Fixture("line3", Network.from_arcs(3, [(0, 1), (1, 2)]), frozenset({0}), ({1},))


# Four-and-five node instances with coin-flip arcs, for the equivalence check.
def equivalence_fixtures() -> list[Fixture]:
    return [
        Fixture("fan4", _net(4, [(0, 1), (0, 2), (0, 3), (3, 1), (3, 2), (2, 1)]),
                frozenset({0}), ({3},)),
        Fixture("diamond5", _net(5, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (4, 1)]),
                frozenset({0}), ({2},)),
        Fixture("contest5", _net(5, [(0, 2), (0, 3), (1, 2), (1, 4), (2, 3), (3, 4), (4, 2)]),
                frozenset({0}), ({1}, {3})),
    ]


# Instances with up to six candidate nodes for the exhaustive audits.  Arc
# probabilities mix certain, likely and coin-flip arcs.
def exhaustive_fixtures() -> list[Fixture]:
    return [
        line3(),
        Fixture("star5", _net(5, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (2, 4)],
                              {(0, 1): 1.0, (3, 4): 0.8}), frozenset({0})),
        Fixture("cycle6", _net(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)],
                               {(0, 1): 0.9, (1, 2): 0.9, (0, 3): 1.0}), frozenset({0})),
        Fixture("twin7", _net(7, [(0, 2), (1, 3), (2, 4), (3, 4), (4, 5), (4, 6), (2, 3)],
                              {(0, 2): 1.0, (1, 3): 1.0, (4, 5): 1.0}), frozenset({0, 1})),
        Fixture("hub7", _net(7, [(0, 1), (1, 2), (1, 3), (1, 4), (4, 5), (5, 6), (6, 1)],
                             {(0, 1): 0.7, (1, 2): 1.0}), frozenset({0})),
    ]


# ---------------------------------------------------------------------------
# variant semantics


def _all_arcs(net):
    return [(u, v) for u, v, _ in net.arcs()]


@dataclass(frozen=True)
class VariantCase:
    """Two full-actions whose replays contradict a default-semantics property."""

    name: str
    net: Network
    realization: object
    first: object  # Scenario
    second: object  # Scenario
    claim: str

    def rumor_counts(self):
        from .diffusion import run_variant

        return (run_variant(self.realization, self.first).rumor_count,
                run_variant(self.realization, self.second).rumor_count)


def priority_split_case() -> VariantCase:
    """A fixed cascade order that does not put the rumor first.

    Nodes: v1=0, v2=1, v3=2, v4=3, v5=4, v6=5.  Order: agent 2, rumor, agent 1.
    Seeding {v1, v3} wins or loses v4 depending on who holds v1.
    """
    net = Network.from_arcs(6, [(0, 3), (1, 3), (3, 4), (4, 5)])
    r = from_orders(net, _all_arcs(net), {})
    prio = (2, 0, 1)
    return VariantCase("priority_split", net, r,
                       scenario({1}, {0}, {2}, priority=prio),
                       scenario({1}, {2}, {0}, priority=prio),
                       "same union, different value")


def heterogeneous_case() -> VariantCase:
    """Per-node cascade orders.

    Nodes: v1=0, v2=1, v3=2, v4=3, v5=4, x=5.  v4 prefers agent 2 over agent 1
    and v5 ranks agent 1, rumor, agent 2.  Adding v2 for agent 2 hands v4 to
    agent 2, whose claim on v5 then loses to the rumor.
    """
    net = Network.from_arcs(6, [(0, 3), (1, 3), (3, 4), (2, 5), (5, 4)])
    sem = Semantics(priority_mode=HETEROGENEOUS, node_priority={3: (2, 1, 0), 4: (1, 0, 2)})
    r = from_orders(net, _all_arcs(net), {})
    return VariantCase("heterogeneous", net, r,
                       scenario({2}, {0}, set(), semantics=sem),
                       scenario({2}, {0}, {1}, semantics=sem),
                       "more seeds, lower value")


def inactive_only_case() -> VariantCase:
    """Active nodes skip neighbours that are already active.

    Nodes: v1=0, v2=1, v3=2, v4=3, v5=4, a=5, z=6.  v4 tries v1 before v5.
    Seeding v1 makes v4 skip it and reach v5 a step early, tying with the
    positive cascade, which the rumor wins.
    """
    net = Network.from_arcs(7, [(1, 3), (3, 0), (3, 4), (2, 5), (5, 4), (4, 6)])
    sem = Semantics(selection=INACTIVE_ONLY)
    r = from_orders(net, _all_arcs(net), {3: (0, 4)})
    return VariantCase("inactive_only", net, r,
                       scenario({1}, {2}, set(), semantics=sem),
                       scenario({1}, {2}, {0}, semantics=sem),
                       "more seeds, lower value")


def variant_cases() -> list[VariantCase]:
    return [priority_split_case(), heterogeneous_case(), inactive_only_case()]
