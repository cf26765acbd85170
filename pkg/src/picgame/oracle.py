"""Exact values on tiny networks by enumerating every realization.

Probabilities are carried as :class:`fractions.Fraction`, so identities such
as "the social value does not depend on how a seed union is split among
agents" can be checked with zero tolerance.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .diffusion import (RUMOR, DEFAULT_SEMANTICS, Outcome, Scenario, Semantics,
                        rumor_count_fast, run_deterministic, run_variant)
from .netgraph import Network
from .realization import Realization, exact_prob

DEFAULT_CAP = 10**6


class EnumerationCapExceeded(ValueError):
    pass


def realization_count(net: Network) -> int:
    return 2**net.arc_count * math.prod(math.factorial(d) for d in net.out_degree.tolist())


def enumerate_realizations(net: Network, cap: int = DEFAULT_CAP) -> Iterator[tuple[Realization, Fraction]]:
    """Every realization once, with its exact probability."""
    total = realization_count(net)
    if total > cap:
        raise EnumerationCapExceeded(f"{total} realizations exceed the cap of {cap}")
    q = [exact_prob(p) for p in net.probs.tolist()]
    perm_mass = Fraction(1, math.prod(math.factorial(d) for d in net.out_degree.tolist()))
    per_node = [list(itertools.permutations(range(1, d + 1))) for d in net.out_degree.tolist()]
    for pattern in itertools.product((True, False), repeat=net.arc_count):
        mass = perm_mass
        for qa, live in zip(q, pattern):
            mass *= qa if live else 1 - qa
        if mass == 0:
            # impossible pattern (p = 0 arc marked live or p = 1 arc blocked)
            continue
        live = np.array(pattern, dtype=bool)
        for ranks in itertools.product(*per_node):
            rank = np.fromiter(itertools.chain.from_iterable(ranks), dtype=np.int64,
                               count=net.arc_count)
            yield Realization(net, live, rank), mass


class RealizationTable:
    """Materialized enumeration, reused across many exact evaluations."""

    def __init__(self, net: Network, cap: int = DEFAULT_CAP):
        self.net = net
        self.items = list(enumerate_realizations(net, cap))
        total = sum(m for _, m in self.items)
        if total != 1:
            raise AssertionError(f"realization masses sum to {total}")

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)


def _table(net, table, cap):
    return table if table is not None else RealizationTable(net, cap)


@dataclass
class ExactValue:
    value: Fraction
    contributions: list = field(default=None, repr=False)

    def __float__(self):
        return float(self.value)


def exact_gamma(net: Network, rumor_seeds, union_x, table=None, cap: int = DEFAULT_CAP,
                keep_terms: bool = False) -> ExactValue:
    """Expected count of nodes the rumor does not reach, for a positive seed union."""
    n = net.node_count
    total = Fraction(0)
    terms = [] if keep_terms else None
    for r, mass in _table(net, table, cap):
        f = n - rumor_count_fast(r, rumor_seeds, union_x)
        total += mass * f
        if keep_terms:
            terms.append((mass, f))
    return ExactValue(total, terms)


def _engine(r: Realization, sc: Scenario) -> Outcome:
    return run_deterministic(r, sc) if sc.semantics.is_default else run_variant(r, sc)


def exact_counts(net: Network, sc: Scenario, table=None, cap: int = DEFAULT_CAP) -> list[Fraction]:
    """Expected count per cascade id (index 0 rumor, ``i`` agent ``i``) and,
    last, of inactive nodes."""
    acc = [Fraction(0)] * (sc.k + 2)
    for r, mass in _table(net, table, cap):
        out = _engine(r, sc)
        for c in range(sc.k + 1):
            acc[c] += mass * out.count(c)
        acc[-1] += mass * out.count(-1)
    return acc


def exact_sigma(net: Network, sc: Scenario, agent: int, table=None, cap: int = DEFAULT_CAP) -> ExactValue:
    if not 1 <= agent <= sc.k:
        raise ValueError(f"agent must be in 1..{sc.k}")
    if not sc.positive_actions[agent - 1]:
        return ExactValue(Fraction(0))
    return ExactValue(exact_counts(net, sc, table, cap)[agent])


def outcome_law(net: Network, sc: Scenario, with_times: bool = False, table=None,
                cap: int = DEFAULT_CAP) -> dict:
    """Exact distribution of final labellings when replaying a random realization."""
    law: dict = {}
    for r, mass in _table(net, table, cap):
        out = _engine(r, sc)
        key = (out.labels(), tuple(out.time.tolist())) if with_times else out.labels()
        law[key] = law.get(key, Fraction(0)) + mass
    return law


# ---------------------------------------------------------------------------
# structural checks


@dataclass
class CheckResult:
    name: str
    passed: bool
    checked: int
    witness: object = None


@dataclass
class StructureReport:
    checks: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def __getitem__(self, name) -> CheckResult:
        return self.checks[name]

    def failures(self) -> list:
        return [c for c in self.checks.values() if not c.passed]

    def to_csv(self) -> str:
        """Failed checks, one row each, with their witnesses."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "checked", "witness"])
        for c in self.failures():
            w.writerow([c.name, c.checked, repr(c.witness)])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = []
        for c in self.checks.values():
            status = "ok" if c.passed else "FAIL"
            lines.append(f"{c.name:<16} {status:<5} checked={c.checked}")
            if not c.passed:
                lines.append(f"    witness: {c.witness!r}")
        return "\n".join(lines) + "\n"


def _subsets(items):
    items = sorted(items)
    for size in range(len(items) + 1):
        yield from (frozenset(c) for c in itertools.combinations(items, size))


def _assignments(candidates, k):
    """Every full-action over ``candidates``: each node goes to no agent or one."""
    cands = sorted(candidates)
    for owner in itertools.product(range(k + 1), repeat=len(cands)):
        yield tuple(frozenset(u for u, o in zip(cands, owner) if o == i) for i in range(1, k + 1))


def check_structure(net: Network, rumor_seeds, k: int = 2, semantics: Semantics = DEFAULT_SEMANTICS,
                    priority=None, candidates=None, max_candidates: int = 8,
                    table=None, cap: int = DEFAULT_CAP) -> StructureReport:
    """Exhaustively audit the social value on a tiny network.

    Full-actions are all ways of handing the candidate nodes to at most one of
    ``k`` agents.  The social value of each is computed exactly by replaying
    every realization under ``semantics`` and ``priority``.  Checks:

    ``set_function``
        all full-actions sharing a union have the same value;
    ``monotone``
        handing any further node to any agent never lowers the value;
    ``distance_rule``
        (rumor-first only) values agree with the distance-based count;
    ``submodular``
        (rumor-first only) diminishing returns over all ``X <= Y``, ``v`` not in ``Y``;
    ``utility_sum``
        marginal contributions of the agents sum to at most the value;
    ``own_reach``
        each agent's own reach covers its marginal contribution.
    """
    rumor_seeds = frozenset(rumor_seeds)
    if candidates is None:
        candidates = set(range(net.node_count)) - rumor_seeds
    candidates = frozenset(candidates)
    if len(candidates) > max_candidates:
        raise EnumerationCapExceeded(f"{len(candidates)} candidate nodes exceed {max_candidates}")
    table = _table(net, table, cap)
    n = net.node_count

    values: dict = {}
    reach: dict = {}
    for acts in _assignments(candidates, k):
        sc = Scenario(rumor_seeds, acts, priority, semantics)
        counts = exact_counts(net, sc, table)
        values[acts] = n - counts[RUMOR]
        reach[acts] = counts[1:k + 1]

    checks = {}

    by_union: dict = {}
    witness = None
    for acts, val in values.items():
        u = frozenset().union(*acts)
        first = by_union.setdefault(u, (acts, val))
        if witness is None and first[1] != val:
            witness = {"union": sorted(u), "a": first[0], "gamma_a": first[1], "b": acts, "gamma_b": val}
    checks["set_function"] = CheckResult("set_function", witness is None, len(values), witness)

    witness, checked = None, 0
    for acts, val in values.items():
        used = frozenset().union(*acts)
        for v in sorted(candidates - used):
            for i in range(k):
                bigger = tuple(a | {v} if j == i else a for j, a in enumerate(acts))
                checked += 1
                if values[bigger] < val and witness is None:
                    witness = {"from": acts, "gamma_from": val, "to": bigger, "gamma_to": values[bigger]}
    checks["monotone"] = CheckResult("monotone", witness is None, checked, witness)

    rumor_first = semantics.is_default and (priority is None or tuple(priority)[0] == RUMOR)
    if rumor_first:
        union_value = {u: exact_gamma(net, rumor_seeds, u, table).value for u in _subsets(candidates)}
        witness = None
        for u, (acts, val) in by_union.items():
            if union_value[u] != val and witness is None:
                witness = {"union": sorted(u), "replayed": val, "distance_rule": union_value[u]}
        checks["distance_rule"] = CheckResult("distance_rule", witness is None, len(by_union), witness)

        witness, checked = None, 0
        for Y in union_value:
            for X in _subsets(Y):
                for v in sorted(candidates - Y):
                    checked += 1
                    lhs = union_value[X | {v}] - union_value[X]
                    rhs = union_value[Y | {v}] - union_value[Y]
                    if lhs < rhs and witness is None:
                        witness = {"X": sorted(X), "Y": sorted(Y), "v": v, "gain_X": lhs, "gain_Y": rhs}
        checks["submodular"] = CheckResult("submodular", witness is None, checked, witness)

    sum_witness = own_witness = None
    for acts, val in values.items():
        deltas = []
        for i in range(k):
            without = tuple(frozenset() if j == i else a for j, a in enumerate(acts))
            deltas.append(val - values[without])
        if sum(deltas) > val and sum_witness is None:
            sum_witness = {"action": acts, "deltas": deltas, "gamma": val}
        for i, d in enumerate(deltas):
            if reach[acts][i] < d and own_witness is None:
                own_witness = {"action": acts, "agent": i + 1, "reach": reach[acts][i], "delta": d}
    checks["utility_sum"] = CheckResult("utility_sum", sum_witness is None, len(values), sum_witness)
    checks["own_reach"] = CheckResult("own_reach", own_witness is None, len(values) * k, own_witness)
    return StructureReport(checks)
