"""Figure rendering for the CLI report paths (headless, PNG output)."""
from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_distribution_plot(distributions, path: str, title: str | None = None) -> None:
    """Bar chart of photon-number distributions, one panel per mode."""
    distributions = list(distributions)
    if not distributions:
        raise ValueError("nothing to plot")
    fig, axes = plt.subplots(
        len(distributions), 1,
        figsize=(6.0, 2.4 * len(distributions)),
        squeeze=False,
    )
    for ax, dist in zip(axes[:, 0], distributions):
        k = np.arange(dist.probabilities.size)
        ax.bar(k, dist.probabilities, width=0.8, color="tab:blue")
        ax.set_ylabel("probability")
        ax.set_title(dist.mode_label, fontsize=10)
        ax.set_ylim(bottom=0.0)
    axes[-1, 0].set_xlabel("photon number")
    if title:
        fig.suptitle(title, fontsize=11)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _positive(values: Sequence[float]) -> bool:
    return all(v is not None and v > 0.0 for v in values)


def save_sweep_plot(axis_name: str, axis_values: Sequence[float],
                    curves: dict[str, Sequence[float | None]], path: str) -> None:
    """Overlaid g2 curves against the sweep axis; log scales when they fit."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    x = np.asarray(axis_values, dtype=float)
    plotted = []
    for label, ys in curves.items():
        pts = [(xv, yv) for xv, yv in zip(x, ys) if yv is not None]
        if not pts:
            continue
        xs, vals = zip(*pts)
        ax.plot(xs, vals, marker="o", markersize=3, label=label)
        plotted.extend(vals)
    if _positive(x) and x.max() / x.min() > 30.0:
        ax.set_xscale("log")
    if plotted and _positive(plotted) and max(plotted) / min(plotted) > 30.0:
        ax.set_yscale("log")
    ax.set_xlabel(axis_name)
    ax.set_ylabel("g2(0)")
    ax.legend(fontsize=9)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
