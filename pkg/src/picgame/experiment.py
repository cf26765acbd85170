"""Experiment sweeps comparing seeding strategies on a real network.

Three sweeps are supported:

1. rumor seed count and budget move together;
2. the rumor seed count is fixed and the budget grows;
3. rumor seeds and budget are fixed and the rumor-active count is recorded
   after every step.

Every strategy at a sweep point is scored with the same Monte Carlo seed, so
differences between strategies are paired.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import game
from .diffusion import Scenario
from .estimate import kernel_counts, mc_rumor_rounds
from .netgraph import Network, ProbabilityModel, assign_probabilities, read_edge_list, top_degree_nodes

STRATEGIES = ("game", "greedy", "max-degree", "random", "none")
CSV_HEADER = ("sweep", "strategy", "rumor_active_mean", "stderr", "trials", "wall_ms")

DESK_TRIALS = 2_000
FULL_TRIALS = 10_000
DESK_SAMPLES = 50
FULL_SAMPLES = 500

# rumor seed count, budget, sweep values
DEFAULTS = {
    1: {"desk": (None, None, (1, 5, 10)), "full": (None, None, tuple(range(1, 31)))},
    2: {"desk": (20, None, (1, 5, 10, 15, 20)), "full": (20, None, tuple(range(1, 31)))},
    3: {"desk": (10, 15, tuple(range(0, 31))), "full": (10, 15, tuple(range(0, 31)))},
}


class ExperimentError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    prob: str = "uniform:0.1"
    rumor_seeds: object = None  # count, or explicit node ids
    budget: int = None
    strategies: tuple = STRATEGIES
    trials: int = DESK_TRIALS
    seed: int = 0
    experiment: int = 1
    out: str = None
    sweep: tuple = None
    samples: int = DESK_SAMPLES
    undirected: bool = False
    max_nodes: int = None
    timing: bool = True
    full_fidelity: bool = False

    def __post_init__(self):
        if self.experiment not in (1, 2, 3):
            raise ExperimentError(f"experiment must be 1, 2 or 3, not {self.experiment}")
        if self.trials < 1:
            raise ExperimentError("trials must be >= 1")
        if self.samples < 1:
            raise ExperimentError("samples must be >= 1")
        bad = [s for s in self.strategies if s not in STRATEGIES]
        if bad or not self.strategies:
            raise ExperimentError(f"unknown strategies {bad}; choose from {', '.join(STRATEGIES)}")
        ProbabilityModel.parse(self.prob)

    @classmethod
    def build(cls, full_fidelity: bool = False, **kw) -> "ExperimentConfig":
        """Fill unset knobs with desk-scale or full-fidelity defaults."""
        kw = {k: v for k, v in kw.items() if v is not None}
        exp = kw.get("experiment", 1)
        if exp not in DEFAULTS:
            raise ExperimentError(f"experiment must be 1, 2 or 3, not {exp}")
        mode = "full" if full_fidelity else "desk"
        rumor, budget, sweep = DEFAULTS[exp][mode]
        kw.setdefault("trials", FULL_TRIALS if full_fidelity else DESK_TRIALS)
        kw.setdefault("samples", FULL_SAMPLES if full_fidelity else DESK_SAMPLES)
        if rumor is not None:
            kw.setdefault("rumor_seeds", rumor)
        if budget is not None:
            kw.setdefault("budget", budget)
        kw.setdefault("sweep", sweep)
        return cls(full_fidelity=full_fidelity, **kw)

    def points(self) -> list[tuple]:
        """(sweep value, rumor seed count, budget) per sweep point."""
        if self.experiment == 1:
            return [(s, s, s) for s in self.sweep]
        if self.experiment == 2:
            return [(s, self.rumor_seeds, s) for s in self.sweep]
        return [(None, self.rumor_seeds, self.budget)]


@dataclass(frozen=True)
class ResultRow:
    sweep: int
    strategy: str
    rumor_active_mean: float
    stderr: float
    trials: int
    wall_ms: int
    experiment: int = field(default=1, compare=False)

    def cells(self) -> list:
        return [self.sweep, self.strategy, repr(float(self.rumor_active_mean)),
                repr(float(self.stderr)), self.trials, self.wall_ms]


def _derive(*words) -> int:
    return int(np.random.SeedSequence([int(w) & (2**64 - 1) for w in words]).generate_state(1, np.uint64)[0] >> 1)


_TAGS = {s: i for i, s in enumerate(STRATEGIES)}


def induced_bfs_subgraph(net: Network, max_nodes: int) -> Network:
    """Induced subgraph on the first ``max_nodes`` nodes reached by BFS over
    both arc directions, started from the highest-degree node.  Arc
    probabilities are reset to 1; assign them afterwards."""
    if max_nodes >= net.node_count:
        return net
    if max_nodes < 1:
        raise ExperimentError("max_nodes must be >= 1")
    nbrs = [set() for _ in range(net.node_count)]
    for u, v, _ in net.arcs():
        nbrs[u].add(v)
        nbrs[v].add(u)
    keep: dict = {}
    order = top_degree_nodes(net, net.node_count)
    for start in order:
        if len(keep) >= max_nodes:
            break
        if start in keep:
            continue
        keep[start] = len(keep)
        queue = [start]
        while queue and len(keep) < max_nodes:
            nxt = []
            for u in queue:
                for v in sorted(nbrs[u]):
                    if v not in keep and len(keep) < max_nodes:
                        keep[v] = len(keep)
                        nxt.append(v)
            queue = nxt
    old = sorted(keep)
    idx = {u: i for i, u in enumerate(old)}
    arcs = [(idx[u], idx[v]) for u, v, _ in net.arcs() if u in idx and v in idx]
    labels = [net.labels[u] for u in old] if net.labels is not None else old
    return Network.from_arcs(len(old), arcs, labels=labels)


def load_network(cfg: ExperimentConfig) -> Network:
    path = Path(cfg.dataset)
    if not path.is_file():
        raise ExperimentError(f"dataset not found: {path}")
    net = read_edge_list(path, undirected=cfg.undirected)
    if cfg.max_nodes is not None:
        net = induced_bfs_subgraph(net, cfg.max_nodes)
    return assign_probabilities(net, ProbabilityModel.parse(cfg.prob))


def rumor_seed_set(net: Network, spec) -> frozenset:
    if isinstance(spec, (int, np.integer)):
        if not 1 <= spec <= net.node_count:
            raise ExperimentError(f"cannot pick {spec} rumor seeds from {net.node_count} nodes")
        return frozenset(top_degree_nodes(net, int(spec)))
    seeds = frozenset(int(u) for u in spec)
    if not seeds or not all(0 <= u < net.node_count for u in seeds):
        raise ExperimentError("explicit rumor seeds must be nonempty node ids")
    return seeds


def strategy_seeds(net: Network, rumor: frozenset, strategy: str, budget: int, evaluator, rng) -> frozenset:
    free = net.node_count - len(rumor)
    if not 0 <= budget <= free:
        raise ExperimentError(f"budget {budget} infeasible with {free} non-rumor nodes")
    if strategy == "game":
        return game.union_of(game.simple_game(evaluator, budget).final)
    return game.baseline_seeds(net, rumor, strategy, budget, evaluator, rng)


def run_experiment(cfg: ExperimentConfig, net: Network | None = None) -> list[ResultRow]:
    """One row per sweep point and strategy, ordered by sweep then strategy name."""
    if net is None:
        net = load_network(cfg)
    strategies = sorted(cfg.strategies)
    needs_eval = any(s in ("game", "greedy") for s in strategies)
    shared = game.SampledEvaluator(net, (), cfg.samples, _derive(cfg.seed, 7)) if needs_eval else None
    rows = []
    n = net.node_count
    for sweep, rumor_spec, budget in cfg.points():
        if budget is None:
            raise ExperimentError("a budget is required for this experiment")
        rumor = rumor_seed_set(net, rumor_spec)
        evaluator = shared.retarget(rumor) if shared is not None else None
        mc_seed = _derive(cfg.seed, cfg.experiment, -1 if sweep is None else sweep)
        for strat in strategies:
            t0 = time.perf_counter()
            rng = np.random.default_rng(_derive(cfg.seed, cfg.experiment, budget, _TAGS[strat]))
            seeds = strategy_seeds(net, rumor, strat, budget, evaluator, rng)
            sc = Scenario(rumor, (seeds,))
            if cfg.experiment == 3:
                mean, err = mc_rumor_rounds(net, sc, cfg.trials, mc_seed, max(cfg.sweep))
                ms = _ms(t0, cfg.timing)
                for r in cfg.sweep:
                    rows.append(ResultRow(r, strat, float(mean[r]), float(err[r]), cfg.trials, ms, 3))
                continue
            counts, _, _ = kernel_counts(net, sc, cfg.trials, mc_seed)
            xs = counts[:, 0].astype(np.float64)
            err = xs.std(ddof=1) / np.sqrt(len(xs)) if len(xs) > 1 else 0.0
            mean = float(xs.mean())
            assert 0 <= mean <= n
            rows.append(ResultRow(sweep, strat, mean, float(err), cfg.trials, _ms(t0, cfg.timing),
                                  cfg.experiment))
    rows.sort(key=lambda r: (r.sweep, r.strategy))
    return rows


def _ms(t0, timing: bool) -> int:
    return int(round((time.perf_counter() - t0) * 1000)) if timing else 0


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def rows_from_csv(text: str, experiment: int = 1) -> list[ResultRow]:
    rd = csv.reader(io.StringIO(text))
    header = tuple(next(rd))
    if header != CSV_HEADER:
        raise ExperimentError(f"unexpected header {header}")
    return [ResultRow(int(s), st, float(m), float(e), int(t), int(w), experiment)
            for s, st, m, e, t, w in rd]


# ---------------------------------------------------------------------------
# plot data


def emit_plot_data(rows, outdir) -> dict:
    """Write one ``<strategy>.dat`` (x, mean) file per strategy and a combined
    ``series.csv``; returns the written paths by strategy (plus ``"combined"``)."""
    rows = list(rows)
    if not rows:
        raise ExperimentError("no rows to emit")
    if len({r.experiment for r in rows}) > 1:
        raise ExperimentError("rows come from more than one experiment")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    series = {}
    for r in sorted(rows, key=lambda r: (r.strategy, r.sweep)):
        series.setdefault(r.strategy, []).append((r.sweep, r.rumor_active_mean))
    paths = {}
    for strat, pts in series.items():
        p = outdir / f"{strat}.dat"
        p.write_text("".join(f"{x} {y!r}\n" for x, y in pts))
        paths[strat] = p
    xs = sorted({r.sweep for r in rows})
    lookup = {(r.sweep, r.strategy): r.rumor_active_mean for r in rows}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sweep", *series])
    for x in xs:
        w.writerow([x, *(repr(lookup[(x, s)]) if (x, s) in lookup else "" for s in series)])
    paths["combined"] = outdir / "series.csv"
    paths["combined"].write_text(buf.getvalue())
    return paths


def read_series(path) -> list[tuple]:
    out = []
    for line in Path(path).read_text().splitlines():
        x, y = line.split()
        out.append((int(x), float(y)))
    return out
