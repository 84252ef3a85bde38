"""Report figures for stage statistics (rendered next to the tables)."""

from __future__ import annotations

import os

from .pipeline import StageRun


def render_stats_figures(runs: list[StageRun], out_dir) -> list[str]:
    """Render a drawing-count chart and a time-cost chart as PNG files."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    runs = sorted(runs, key=lambda r: (r.stage_n, r.budget))
    written = []

    labels, counts = [], []
    for run in runs:
        for x in sorted(run.histogram):
            labels.append(f"$D_{{{run.stage_n}}}^{{{x}}}$")
            counts.append(run.histogram[x])
    if labels:
        fig, ax = plt.subplots(figsize=(max(4, 0.7 * len(labels)), 3.2))
        ax.bar(range(len(labels)), counts, color="#4878a8")
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels)
        ax.set_yscale("log")
        ax.set_ylabel("drawings")
        for i, c in enumerate(counts):
            ax.annotate(str(c), (i, c), ha="center", va="bottom", fontsize=8)
        fig.tight_layout()
        path = os.path.join(out_dir, "counts.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    names = [f"$K_{{{run.stage_n}}}$" for run in runs]
    times = [run.cpu_seconds for run in runs]
    if names:
        fig, ax = plt.subplots(figsize=(max(4, 0.7 * len(names)), 3.2))
        ax.bar(range(len(names)), times, color="#a85548")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names)
        ax.set_ylabel("CPU seconds")
        fig.tight_layout()
        path = os.path.join(out_dir, "times.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
