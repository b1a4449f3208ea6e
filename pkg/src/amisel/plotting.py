"""Matplotlib figures for the report path (PNG files next to the CSV/SVG outputs)."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Hashable, Mapping, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .amis import SelectionResult  # noqa: E402
from .cluster import Clustering  # noqa: E402
from .ingest import TradeoffMatrix  # noqa: E402
from .pareto import wrap_line  # noqa: E402
from .sha import ShaResult, _name  # noqa: E402

# PNG metadata would otherwise embed the matplotlib version string
_SAVE_KW = dict(dpi=120, metadata={"Software": None})

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def plot_tradeoffs(
    matrix: TradeoffMatrix,
    selection: SelectionResult,
    path: Union[str, Path],
) -> Path:
    """One panel per dataset: all candidates, the wrap-line, selected models in red."""
    n = len(matrix.datasets)
    cols = min(n, 4)
    rows = math.ceil(n / cols)
    chosen = set(selection.selected)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(rows, cols, figsize=(3.2 * cols, 2.8 * rows), squeeze=False)
        for ax, d in zip(axes.flat, matrix.datasets):
            pts = matrix.dataset_points(d)
            ax.scatter([p.time_ms for _, p in pts], [p.accuracy for _, p in pts], s=12, color="0.55", label="candidates")
            front = wrap_line(pts)
            ax.plot(
                [p.time_ms for _, p in front.points],
                [p.accuracy for _, p in front.points],
                color="tab:blue",
                lw=1.2,
                label="wrap-line",
            )
            sel = [(c, p) for c, p in pts if c in chosen]
            ax.scatter([p.time_ms for _, p in sel], [p.accuracy for _, p in sel], s=30, color="tab:red", zorder=3, label="selected")
            for c, p in sel:
                ax.annotate(c.label, (p.time_ms, p.accuracy), textcoords="offset points", xytext=(4, 4), fontsize=7)
            ax.set_title(d)
            ax.set_xlabel("inference time (ms)")
            ax.set_ylabel(matrix.accuracy_metric.label)
        for ax in list(axes.flat)[n:]:
            ax.set_visible(False)
        axes.flat[0].legend(loc="lower right", frameon=False)
        fig.tight_layout()
        return _save(fig, path)


def plot_clusters(
    values: Sequence[tuple[Hashable, float]],
    clustering: Clustering,
    path: Union[str, Path],
) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 2.2))
        for idx, center in enumerate(clustering.centers):
            xs = [t for c, t in values if clustering.assignments[c] == idx]
            ax.scatter(xs, [idx] * len(xs), s=18, label=f"cluster {idx}")
            ax.axvline(center, color="0.7", lw=0.8, ls="--")
        ax.set_yticks(range(len(clustering.centers)))
        ax.set_xlabel("inference time (ms)")
        ax.set_ylabel("cluster")
        fig.tight_layout()
        return _save(fig, path)


def plot_sha(result: ShaResult, path: Union[str, Path]) -> Path:
    """Score of every candidate at every rung it reached."""
    series: Mapping[str, list] = {}
    for e in result.log:
        series.setdefault(_name(e.candidate), []).append((e.budget, e.score))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.2))
        for name in sorted(series):
            xs, ys = zip(*series[name])
            winner = name == _name(result.survivor)
            ax.plot(xs, ys, marker="o", ms=3, lw=2 if winner else 0.8, label=name if winner else None)
        ax.set_xlabel("training budget (epochs)")
        ax.set_ylabel("score (%)")
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, path)
