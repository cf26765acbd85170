"""Command-line experiment runner."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .experiment import (STRATEGIES, ExperimentConfig, ExperimentError, emit_plot_data,
                         rows_to_csv, run_experiment)


def _ints(text):
    if text is None:
        return None
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            lo, hi = part.split(":")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return tuple(out)


def _strategies(text):
    if text is None or text == "all":
        return STRATEGIES
    return tuple(s.strip() for s in text.split(",") if s.strip())


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--dataset", required=True, type=click.Path(dir_okay=False), help="Edge list file.")
@click.option("--prob", default="uniform:0.1", show_default=True, help="uniform:<p> or wcascade.")
@click.option("--rumor-seeds", default=None, help="Rumor seed count, or comma-separated node ids.")
@click.option("--budget", type=int, default=None, help="Positive seed budget k (experiment 3).")
@click.option("--strategy", default="all", show_default=True,
              help=f"Comma-separated subset of {', '.join(STRATEGIES)}, or all.")
@click.option("--trials", type=int, default=None, help="Monte Carlo trials per estimate.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--experiment", type=click.Choice(["1", "2", "3"]), default="1", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV path (default stdout).")
@click.option("--full-fidelity", is_flag=True, help="10,000 trials and the full sweeps.")
@click.option("--sweep", default=None, help="Sweep values, e.g. 1,5,10 or 1:30.")
@click.option("--samples", type=int, default=None, help="Stored realizations used to pick seeds.")
@click.option("--undirected", is_flag=True, help="Read each edge line as two arcs.")
@click.option("--max-nodes", type=int, default=None, help="Use a BFS-induced subgraph of this size.")
@click.option("--plot/--no-plot", default=True, show_default=True,
              help="With --out, write .dat series and a PNG next to the CSV.")
@click.option("--timing/--no-timing", default=True, show_default=True,
              help="Record wall time; --no-timing writes 0 for byte-identical reruns.")
def main(dataset, prob, rumor_seeds, budget, strategy, trials, seed, experiment, out, full_fidelity,
         sweep, samples, undirected, max_nodes, plot, timing):
    """Compare rumor blocking strategies and write one CSV row per sweep point and strategy."""
    if rumor_seeds is not None:
        ids = _ints(rumor_seeds)
        rumor_seeds = ids[0] if "," not in rumor_seeds and ":" not in rumor_seeds else ids
    try:
        cfg = ExperimentConfig.build(
            full_fidelity=full_fidelity, dataset=dataset, prob=prob, rumor_seeds=rumor_seeds,
            budget=budget, strategies=_strategies(strategy), trials=trials, seed=seed,
            experiment=int(experiment), out=out, sweep=_ints(sweep), samples=samples,
            undirected=undirected, max_nodes=max_nodes, timing=timing)
        rows = run_experiment(cfg)
    except (ExperimentError, ValueError) as e:
        raise click.ClickException(str(e))
    text = rows_to_csv(rows)
    if out is None:
        sys.stdout.write(text)
        return
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    if plot:
        from .plotting import render

        series_dir = out.with_suffix("")
        emit_plot_data(rows, series_dir)
        render(rows, out.with_suffix(".png"), title=f"experiment {experiment}, {prob}")
    click.echo(f"wrote {len(rows)} rows to {out}", err=True)


if __name__ == "__main__":
    main()
