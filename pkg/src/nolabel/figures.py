"""Figure rendering for the report path.

Sweep reports get a line plot of the scalar metrics against the swept
parameter; single-run reports get a bar summary.  Figures are written next
to the delimited output with the Agg backend, so no display is needed.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .scenario import RunRecord

_METRICS = (
    ("indistinguishability", "I", "tab:blue"),
    ("entanglement_of_formation", "EoF", "tab:red"),
    ("concurrence", "C", "tab:green"),
    ("probability", "P", "tab:gray"),
    ("fidelity", "fidelity", "tab:purple"),
)


def render_report_figure(records: Sequence[RunRecord], path) -> Path:
    """Render a PNG summary of pipeline records and return its path."""
    path = Path(path)
    sweep_values = [r.sweep_value for r in records]
    if len(records) >= 2 and all(v is not None for v in sweep_values):
        fig = _sweep_figure(records, sweep_values)
    else:
        fig = _summary_figure(records)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _sweep_figure(records, xs):
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for field, label, color in _METRICS:
        ys = [getattr(r, field) for r in records]
        if any(y is None for y in ys):
            continue
        ax.plot(xs, ys, marker="o", markersize=3, linewidth=1.2, color=color, label=label)
    ax.set_xlabel(records[0].sweep_parameter)
    ax.set_ylabel("value")
    ax.set_title("deformation + postselection sweep")
    ax.grid(alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def _summary_figure(records):
    fig, ax = plt.subplots(figsize=(6.4, 3.2))
    names, values = [], []
    for field, label, _ in _METRICS:
        value = getattr(records[0], field) if records else None
        if value is not None:
            names.append(label)
            values.append(value)
    ax.bar(names, values, color="tab:blue", width=0.6)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("value")
    ax.set_title("pipeline outputs")
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    return fig


def render_bench_figure(rows: Sequence[dict], path) -> Path:
    """Timing curve for the permanent kernel benchmark."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.semilogy([row["n"] for row in rows], [max(row["seconds"], 1e-9) for row in rows], marker="o")
    ax.set_xlabel("matrix size n")
    ax.set_ylabel("seconds")
    ax.set_title("permanent kernel timings")
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
