"""Benchmark figures: runtime, cost, and time-limit panels.

Renders the three standard panels from trial records to PNG files.
Rendering happens off-screen, so this works in headless runs.
"""

from __future__ import annotations

import os
from typing import Iterable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import ALGORITHMS, TrialRecord, aggregate_records

_COLORS = {
    "heid1": "tab:blue",
    "heid2": "tab:orange",
    "edgeid_exact": "tab:green",
    "mcip_via_t2_exact": "tab:red",
    "mcip_via_t2_heid1": "tab:purple",
    "mcip_via_t2_heid2": "tab:brown",
}


def _spread_panel(ax, table: dict, log_scale: bool):
    for alg in ALGORITHMS:
        by_n = table.get(alg)
        if not by_n:
            continue
        ns = sorted(int(k) for k in by_n)
        med = [by_n[str(n)]["median"] for n in ns]
        lo = [by_n[str(n)]["p5"] for n in ns]
        hi = [by_n[str(n)]["p95"] for n in ns]
        color = _COLORS.get(alg)
        ax.plot(ns, med, marker="o", markersize=3, label=alg, color=color)
        ax.fill_between(ns, lo, hi, alpha=0.15, color=color)
    if log_scale:
        ax.set_yscale("log")
    ax.set_xlabel("vertices")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=7)
    ax.grid(True, alpha=0.3)


def _fraction_panel(ax, table: dict):
    for alg in ALGORITHMS:
        by_n = table.get(alg)
        if not by_n:
            continue
        ns = sorted(int(k) for k in by_n)
        frac = [by_n[str(n)] for n in ns]
        ax.plot(ns, frac, marker="o", markersize=3, label=alg, color=_COLORS.get(alg))
    ax.set_ylim(-0.03, 1.03)
    ax.set_xlabel("vertices")
    ax.set_ylabel("fraction of trials")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=7)
    ax.grid(True, alpha=0.3)


def render_report(
    records: Iterable[TrialRecord],
    out_dir: str,
    prefix: str = "",
    dpi: int = 150,
) -> list[str]:
    """Write runtimes, costs, and timeout-fraction PNGs; returns the paths."""
    agg = aggregate_records(records)
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    panels = (
        ("runtimes", "Solve runtime", "seconds", agg["runtime_s"], True),
        ("costs", "Solution cost", "total removal weight", agg["cost"], False),
    )
    for name, title, ylabel, table, log_scale in panels:
        fig, ax = plt.subplots(figsize=(5.5, 3.8))
        _spread_panel(ax, table, log_scale)
        ax.set_title(title)
        ax.set_ylabel(ylabel)
        path = os.path.join(out_dir, f"{prefix}{name}.png")
        fig.tight_layout()
        fig.savefig(path, dpi=dpi)
        plt.close(fig)
        paths.append(path)

    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    _fraction_panel(ax, agg["timeout_fraction"])
    ax.set_title("Runs hitting the time limit")
    path = os.path.join(out_dir, f"{prefix}timeout_fraction.png")
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    paths.append(path)
    return paths
