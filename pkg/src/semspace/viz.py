"""Matplotlib figure rendering for CLI reports (written to files, never shown)."""

from __future__ import annotations

import math


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_valence_figure(reports, path):
    """Bar chart of offered vs consumed slots per body type."""
    plt = _plt()
    reports = list(reports)
    labels = [r.type_tag for r in reports]
    offered = [0 if r.offered is None else r.offered for r in reports]
    consumed = [r.consumed for r in reports]
    xs = range(len(labels))
    fig, ax = plt.subplots(figsize=(max(4, len(labels) * 1.2), 4))
    ax.bar([x - 0.2 for x in xs], offered, width=0.4, label="offered", color="#4878d0")
    ax.bar([x + 0.2 for x in xs], consumed, width=0.4, label="consumed", color="#d65f5f")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels)
    ax.set_ylabel("valency slots")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_table_cost_figure(reports, path):
    """Total and per-agent-max table entries per scheme."""
    plt = _plt()
    reports = list(reports)
    labels = [f"{r.scheme} (N={r.n})" for r in reports]
    totals = [r.total_entries for r in reports]
    peaks = [r.max_per_agent for r in reports]
    xs = range(len(labels))
    fig, ax = plt.subplots(figsize=(max(4, len(labels) * 1.6), 4))
    ax.bar([x - 0.2 for x in xs], totals, width=0.4, label="total entries", color="#4878d0")
    ax.bar([x + 0.2 for x in xs], peaks, width=0.4, label="max per agent", color="#ee854a")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel("forwarding entries")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_graph_figure(st, path):
    """Promise graph on a circle; deterministic layout, arrows per adjacency."""
    plt = _plt()
    from .core import promise_adjacency_matrix

    matrix = promise_adjacency_matrix(st)
    n = max(1, len(matrix.labels))
    coords = {}
    for i, aid in enumerate(matrix.labels):
        angle = 2 * math.pi * i / n
        coords[aid] = (math.cos(angle), math.sin(angle))
    fig, ax = plt.subplots(figsize=(6, 6))
    for i, src in enumerate(matrix.labels):
        for j, dst in enumerate(matrix.labels):
            if matrix.entries[i][j]:
                x0, y0 = coords[src]
                x1, y1 = coords[dst]
                ax.annotate(
                    "",
                    xy=(x1, y1),
                    xytext=(x0, y0),
                    arrowprops=dict(arrowstyle="->", color="#777777", lw=0.8),
                )
    for aid, (x, y) in coords.items():
        ax.plot([x], [y], "o", color="#4878d0", markersize=8)
        ax.annotate(aid, (x, y), textcoords="offset points", xytext=(4, 4), fontsize=8)
    ax.set_axis_off()
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
