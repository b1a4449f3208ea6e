"""One-dimensional k-means for grouping candidates by inference time."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

MAX_ITER = 100


@dataclass(frozen=True)
class Clustering:
    assignments: Mapping[Hashable, int]
    centers: tuple[float, ...]
    wcss: float
    trace: tuple[float, ...]  # WCSS after each Lloyd iteration

    def groups(self) -> list[list[Hashable]]:
        out: list[list[Hashable]] = [[] for _ in self.centers]
        for cand, idx in self.assignments.items():
            out[idx].append(cand)
        return out


def _wcss(x: np.ndarray, labels: np.ndarray, centers: np.ndarray) -> float:
    return float(np.sum((x - centers[labels]) ** 2))


def _assign(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # argmin returns the first minimum, so equidistant values go to the lower index
    return np.argmin(np.abs(x[:, None] - centers[None, :]), axis=1)


def _optimal_centers(x: np.ndarray, k: int) -> np.ndarray:
    """Exact minimum-WCSS centers via dynamic programming over sorted distinct values.

    Optimal 1-D clusters are contiguous in sorted order, so the best split
    into ``k`` runs is found with prefix sums in O(k m^2) for ``m`` distinct values.
    """
    values, counts = np.unique(x, return_counts=True)
    m = len(values)
    w = np.concatenate([[0.0], np.cumsum(counts)])
    s1 = np.concatenate([[0.0], np.cumsum(counts * values)])
    s2 = np.concatenate([[0.0], np.cumsum(counts * values**2)])

    def cost(i, j):  # values[i:j]
        n = w[j] - w[i]
        s = s1[j] - s1[i]
        return (s2[j] - s2[i]) - s * s / n

    inf = float("inf")
    best = np.full((k + 1, m + 1), inf)
    back = np.zeros((k + 1, m + 1), dtype=int)
    best[0, 0] = 0.0
    for c in range(1, k + 1):
        for j in range(c, m + 1):
            for i in range(c - 1, j):
                v = best[c - 1, i] + cost(i, j)
                if v < best[c, j]:
                    best[c, j] = v
                    back[c, j] = i
    bounds = [m]
    for c in range(k, 0, -1):
        bounds.append(back[c, bounds[-1]])
    bounds = bounds[::-1]
    return np.array(
        [(s1[b] - s1[a]) / (w[b] - w[a]) for a, b in zip(bounds[:-1], bounds[1:])]
    )


def _quantile_centers(x: np.ndarray, k: int) -> np.ndarray:
    distinct = np.unique(x)
    m = len(distinct)
    return np.array([distinct[(2 * i + 1) * m // (2 * k)] for i in range(k)], dtype=float)


def kmeans_1d(
    values: Sequence[tuple[Hashable, float]], k: int = 3, init: str = "optimal"
) -> Clustering:
    """Cluster ``(candidate, time_ms)`` pairs into ``k`` groups.

    ``init="optimal"`` seeds Lloyd's iterations with the exact dynamic-programming
    optimum (so the result is the global minimum of WCSS); ``init="quantile"``
    seeds them at the (2i+1)/(2k) quantiles of the distinct values, which is
    cheaper but may stop in a local minimum. Both are deterministic.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    x = np.array([float(t) for _, t in values])
    if not np.all(np.isfinite(x)):
        raise ValueError("values must be finite")
    n_distinct = len(np.unique(x))
    if k > n_distinct:
        raise ValueError(f"k={k} exceeds the {n_distinct} distinct values")
    if init == "optimal":
        centers = _optimal_centers(x, k)
    elif init == "quantile":
        centers = _quantile_centers(x, k)
    else:
        raise ValueError(f"unknown init {init!r}")

    labels = _assign(x, centers)
    trace = []
    for _ in range(MAX_ITER):
        new_centers = centers.copy()
        for c in range(k):
            members = x[labels == c]
            if len(members):
                new_centers[c] = members.mean()
        centers = new_centers
        trace.append(_wcss(x, labels, centers))
        new_labels = _assign(x, centers)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels

    # relabel so indices follow ascending centers and drop nothing silently
    order = np.argsort(centers, kind="stable")
    remap = np.empty(k, dtype=int)
    remap[order] = np.arange(k)
    labels = remap[labels]
    centers = centers[order]
    if len(np.unique(labels)) != k:
        raise RuntimeError("k-means produced an empty cluster")
    return Clustering(
        assignments={cand: int(lab) for (cand, _), lab in zip(values, labels)},
        centers=tuple(float(c) for c in centers),
        wcss=_wcss(x, labels, centers),
        trace=tuple(trace),
    )
