"""Render analytic curves and sweep results to figure files.

Companion to the CSV outputs: the same data that lands in the delimited
files can be drawn to PNG/PDF next to them.  Uses the Agg backend so it
works headless.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .core import TransferFormula
from .montecarlo import SweepRow, net_advantage

_LINE_COLORS = {
    TransferFormula.DVT: "tab:green",
    TransferFormula.PVT: "tab:red",
    TransferFormula.NVT: "tab:blue",
}


def plot_curves(
    series: Mapping[str, Sequence[tuple[float, float]]],
    path: str,
    ylabel: str = "Expected list vote share",
) -> None:
    """Draw one line per labelled (k, value) series and save the figure."""
    fig, ax = plt.subplots(figsize=(8, 6))
    for label, points in series.items():
        ks = [p[0] for p in points]
        values = [p[1] for p in points]
        ax.plot(ks, values, linewidth=2, label=label)
    ax.set_xlabel("Expected vote share (k)")
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sweep(rows: Sequence[SweepRow], path: str) -> None:
    """Draw sweep results grouped by (h, list seats / alpha).

    Each group gets one panel: bars for the PVT and NVT net advantage over
    DVT on a log scale (left axis) and lines for the mean seat share under
    each formula (right axis), both against k.
    """
    groups: dict[tuple, list[SweepRow]] = {}
    for row in rows:
        if row.tally is None:
            continue
        key = (row.config.h, row.config.m, row.config.alpha)
        groups.setdefault(key, []).append(row)
    if not groups:
        raise ValueError("no successful sweep rows to plot")

    ncols = min(2, len(groups))
    nrows = -(-len(groups) // ncols)
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(7 * ncols, 5 * nrows), squeeze=False
    )

    for ax, (key, group) in zip(axes.flat, sorted(groups.items(), key=str)):
        h, m, alpha = key
        group = sorted(group, key=lambda r: r.config.k)
        ks = [r.config.k for r in group]
        width = (min(b - a for a, b in zip(ks, ks[1:])) / 3.5) if len(ks) > 1 else 0.002
        adv_pvt = [net_advantage(r.tally, TransferFormula.PVT) for r in group]
        adv_nvt = [net_advantage(r.tally, TransferFormula.NVT) for r in group]
        ax.bar(
            [k - width / 2 for k in ks], [max(a, 0) for a in adv_pvt],
            width=width, color="lightcoral", label="net advantage PVT",
        )
        ax.bar(
            [k + width / 2 for k in ks], [max(a, 0) for a in adv_nvt],
            width=width, color="lightblue", label="net advantage NVT",
        )
        ax.set_yscale("log")
        ax.set_ylim(bottom=1)
        ax.set_xlabel("Expected vote share (k)")
        ax.set_ylabel("Net advantage over DVT (runs)")

        share_ax = ax.twinx()
        for formula in TransferFormula:
            share_ax.plot(
                ks,
                [r.tally.mean_seat_share[formula] for r in group],
                color=_LINE_COLORS[formula],
                linewidth=2,
                label=f"mean seat share {formula.value.upper()}",
            )
        share_ax.set_ylabel("Mean seat share")
        seats = f"m={m}" if m is not None else f"alpha={alpha:.4g}"
        ax.set_title(f"h={h}, {seats}")
        handles1, labels1 = ax.get_legend_handles_labels()
        handles2, labels2 = share_ax.get_legend_handles_labels()
        ax.legend(handles1 + handles2, labels1 + labels2, loc="best", fontsize=8)

    for ax in axes.flat[len(groups):]:
        ax.set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
