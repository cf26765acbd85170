"""Figures for experiment results, rendered to files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

XLABELS = {1: "rumor seeds = budget", 2: "budget", 3: "round"}
STYLES = {"game": "o-", "greedy": "s--", "max-degree": "^-.", "random": "v:", "none": "x-"}


def render(rows, path, title: str | None = None) -> Path:
    """Line plot of the rumor-active mean per strategy with 2-sigma bands."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to plot")
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for strat in sorted({r.strategy for r in rows}):
        pts = sorted((r.sweep, r.rumor_active_mean, r.stderr) for r in rows if r.strategy == strat)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        es = [2 * p[2] for p in pts]
        ax.plot(xs, ys, STYLES.get(strat, "-"), label=strat, markersize=4)
        ax.fill_between(xs, [y - e for y, e in zip(ys, es)], [y + e for y, e in zip(ys, es)], alpha=0.2)
    ax.set_xlabel(XLABELS.get(rows[0].experiment, "sweep"))
    ax.set_ylabel("expected rumor-active nodes")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
