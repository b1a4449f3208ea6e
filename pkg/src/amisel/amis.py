"""Adaptive margin-dependent iterative selection of time/accuracy trade-off models.

Each selection round fits one least-squares line per dataset through the
remaining candidates, then sweeps a grid of slope adjustment factors. At every
factor the candidates are scored by their vertical distance above the adjusted
line (min-max normalized per dataset, weighted across datasets), ranked, and
given rank points. Points are accumulated across factors, except where the
ordered top-``stability_window`` list repeats the previous factor's. The
candidate with the most points is selected and removed, and the next round
starts over on the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import AmiselError, CandidateId
from .ingest import TradeoffMatrix
from .regression import DegenerateFitError, SlopeModel, adjusted_line, fit_line

DEFAULT_RANK_POINTS = (10.0, 9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0)

# Residual spreads below this fraction of the dataset's own scale are float noise
# (e.g. collinear points), not a ranking signal.
FLAT_RTOL = 1e-9
# Final scores are rounded before ranking so mathematically tied scores stay tied
# regardless of summation order or unit changes.
SCORE_DECIMALS = 8


class SelectionError(AmiselError):
    """Selection could not proceed (pool too small, degenerate round)."""


class NoFeasibleModelError(AmiselError):
    """No selected candidate fits within the requested time budget."""


@dataclass(frozen=True)
class AmisConfig:
    factor_count: int = 100
    factor_min: float = 0.001
    factor_max: float = 3.0
    rank_points: tuple[float, ...] = DEFAULT_RANK_POINTS
    stability_window: int = 10
    dataset_weights: Optional[Mapping[str, float]] = None
    selection_count: int = 5
    spacing: str = "geometric"

    def __post_init__(self):
        object.__setattr__(self, "rank_points", tuple(float(p) for p in self.rank_points))
        if self.dataset_weights is not None:
            object.__setattr__(
                self, "dataset_weights", {str(k): float(v) for k, v in self.dataset_weights.items()}
            )
        problems = []
        if int(self.factor_count) != self.factor_count or self.factor_count < 1:
            problems.append(f"factor_count must be a positive integer, got {self.factor_count}")
        if not (0 < self.factor_min and math.isfinite(self.factor_max)):
            problems.append("factor_min and factor_max must be positive and finite")
        elif self.factor_count > 1 and not self.factor_min < self.factor_max:
            problems.append(f"factor_min ({self.factor_min}) must be < factor_max ({self.factor_max})")
        if not self.rank_points:
            problems.append("rank_points must not be empty")
        if any(p < 0 for p in self.rank_points):
            problems.append("rank_points must be non-negative")
        if any(a <= b for a, b in zip(self.rank_points, self.rank_points[1:])):
            problems.append("rank_points must be strictly descending")
        if self.stability_window < 1:
            problems.append("stability_window must be positive")
        if self.selection_count < 1:
            problems.append("selection_count must be positive")
        if self.spacing not in ("geometric", "linear"):
            problems.append(f"spacing must be 'geometric' or 'linear', got {self.spacing!r}")
        if self.dataset_weights is not None:
            ws = list(self.dataset_weights.values())
            if any(w < 0 or not math.isfinite(w) for w in ws) or not sum(ws) > 0:
                problems.append("dataset_weights must be non-negative with a positive sum")
        if problems:
            raise ValueError("invalid AmisConfig: " + "; ".join(problems))

    def weights_for(self, datasets: Sequence[str]) -> dict[str, float]:
        if self.dataset_weights is None:
            return {d: 1.0 for d in datasets}
        missing = [d for d in datasets if d not in self.dataset_weights]
        if missing:
            raise ValueError(f"dataset_weights has no entry for {', '.join(missing)}")
        return {d: self.dataset_weights[d] for d in datasets}


def factor_grid(config: AmisConfig) -> np.ndarray:
    """Strictly increasing adjustment factors from ``factor_min`` to ``factor_max``."""
    n = config.factor_count
    if n == 1:
        return np.array([config.factor_min])
    i = np.arange(n)
    if config.spacing == "geometric":
        grid = config.factor_min * (config.factor_max / config.factor_min) ** (i / (n - 1))
    else:
        grid = config.factor_min + (config.factor_max - config.factor_min) * i / (n - 1)
    grid[0] = config.factor_min
    grid[-1] = config.factor_max
    return grid


def normalize_scores(residuals: Sequence[float], flat_tol: float = 0.0) -> list[float]:
    """Min-max map residuals onto 0..100; a flat list maps to 50 everywhere."""
    if len(residuals) == 0:
        raise ValueError("normalize_scores needs at least one residual")
    r = np.asarray(residuals, dtype=float)
    if not np.all(np.isfinite(r)):
        raise ValueError("residuals must be finite")
    return _normalize_rows(r[None, :], np.array([flat_tol]))[0].tolist()


def _normalize_rows(r: np.ndarray, flat_tol: np.ndarray) -> np.ndarray:
    lo = r.min(axis=1, keepdims=True)
    hi = r.max(axis=1, keepdims=True)
    span = hi - lo
    flat = (span <= flat_tol[:, None]) | (span == 0)
    safe = np.where(flat, 1.0, span)
    return np.where(flat, 50.0, 100.0 * (r - lo) / safe)


def weighted_score(scores: Mapping[str, float], weights: Mapping[str, float]) -> float:
    """Weighted mean of per-dataset scores."""
    if set(scores) != set(weights):
        raise ValueError(f"dataset keys differ: {sorted(scores)} vs {sorted(weights)}")
    total = math.fsum(weights.values())
    if not total > 0:
        raise ValueError("dataset weights sum to zero")
    return math.fsum(weights[d] * scores[d] for d in scores) / total


def _tie_order(candidates: Sequence[CandidateId], mean_times: Sequence[float]) -> np.ndarray:
    """Position of each candidate under the (mean time, name) tie-break."""
    order = sorted(range(len(candidates)), key=lambda i: (mean_times[i], candidates[i].sort_key))
    pos = np.empty(len(candidates), dtype=int)
    pos[order] = np.arange(len(candidates))
    return pos


def _points_for(order: np.ndarray, schedule: Sequence[float], n: int) -> np.ndarray:
    points = np.zeros(n)
    m = min(n, len(schedule))
    points[order[:m]] = schedule[:m]
    return points


def rank_points(
    final_scores: Mapping[CandidateId, float],
    schedule: Sequence[float] = DEFAULT_RANK_POINTS,
    mean_times: Optional[Mapping[CandidateId, float]] = None,
) -> dict[CandidateId, float]:
    """Award ``schedule[i]`` to the i-th best score (0 past the schedule).

    Ties go to the lower mean inference time, then to the name.
    """
    cands = list(final_scores)
    times = [mean_times[c] if mean_times else 0.0 for c in cands]
    tie = _tie_order(cands, times)
    order = sorted(range(len(cands)), key=lambda i: (-final_scores[cands[i]], tie[i]))
    pts = _points_for(np.array(order, dtype=int), schedule, len(cands))
    return {c: float(pts[i]) for i, c in enumerate(cands)}


@dataclass(frozen=True)
class FactorStep:
    factor: float
    top: tuple[CandidateId, ...]
    points: Mapping[CandidateId, float]
    accumulated: bool


@dataclass(frozen=True)
class RoundLog:
    round: int
    pool: tuple[CandidateId, ...]
    fits: Mapping[str, SlopeModel]
    steps: tuple[FactorStep, ...]
    totals: Mapping[CandidateId, float]
    selected: CandidateId

    @property
    def contributing_factors(self) -> list[float]:
        return [s.factor for s in self.steps if s.accumulated]


@dataclass(frozen=True)
class SelectionResult:
    selected: tuple[CandidateId, ...]
    rounds: tuple[RoundLog, ...]
    config: AmisConfig = field(default_factory=AmisConfig)


class _Pool:
    """Array view of the candidates still in play, shared by every factor."""

    def __init__(self, matrix: TradeoffMatrix, candidates: Sequence[CandidateId], config: AmisConfig):
        self.candidates = list(candidates)
        self.datasets = list(matrix.datasets)
        weights = config.weights_for(self.datasets)
        self.weights = np.array([weights[d] for d in self.datasets])
        self.times = np.array([[matrix.point(c, d).time_ms for c in candidates] for d in self.datasets])
        self.accs = np.array([[matrix.point(c, d).accuracy for c in candidates] for d in self.datasets])
        self.mean_times = [matrix.mean_time(c) for c in candidates]
        self.tie = _tie_order(self.candidates, self.mean_times)

    def scores(self, fitted: Mapping[str, SlopeModel], factors: np.ndarray) -> np.ndarray:
        """Final weighted scores, shape (factors, candidates)."""
        total = np.zeros((len(factors), len(self.candidates)))
        for j, d in enumerate(self.datasets):
            model = fitted[d]
            t_mean, a_mean = model.centroid
            slopes = factors * model.slope
            dt = self.times[j] - t_mean
            da = self.accs[j] - a_mean
            r = da[None, :] - slopes[:, None] * dt[None, :]
            scale = np.ptp(self.accs[j]) + np.abs(slopes) * np.ptp(self.times[j])
            total += self.weights[j] * _normalize_rows(r, FLAT_RTOL * scale)
        return np.round(total / self.weights.sum(), SCORE_DECIMALS)

    def ranking(self, scores_row: np.ndarray) -> np.ndarray:
        return np.lexsort((self.tie, -scores_row))


def _fits(matrix: TradeoffMatrix, candidates: Sequence[CandidateId]) -> dict[str, SlopeModel]:
    return {d: fit_line([matrix.point(c, d) for c in candidates]) for d in matrix.datasets}


def score_at_factor(
    matrix: TradeoffMatrix,
    fitted: Mapping[str, SlopeModel],
    factor: float,
    config: AmisConfig = AmisConfig(),
    candidates: Optional[Sequence[CandidateId]] = None,
) -> dict[CandidateId, float]:
    """Rank points awarded at one adjustment factor."""
    missing = [d for d in matrix.datasets if d not in fitted]
    if missing:
        raise ValueError(f"no fitted line for {', '.join(missing)}")
    adjusted_line(next(iter(fitted.values())), factor)  # validates the factor
    pool = _Pool(matrix, candidates or matrix.candidates, config)
    row = pool.scores(fitted, np.array([float(factor)]))[0]
    pts = _points_for(pool.ranking(row), config.rank_points, len(pool.candidates))
    return {c: float(pts[i]) for i, c in enumerate(pool.candidates)}


def factor_sweep(
    matrix: TradeoffMatrix,
    fitted: Mapping[str, SlopeModel],
    config: AmisConfig = AmisConfig(),
    candidates: Optional[Sequence[CandidateId]] = None,
) -> tuple[dict[CandidateId, float], list[FactorStep]]:
    """Accumulate rank points over the factor grid, applying the skip rule."""
    pool = _Pool(matrix, candidates or matrix.candidates, config)
    factors = factor_grid(config)
    scores = pool.scores(fitted, factors)
    n = len(pool.candidates)
    totals = np.zeros(n)
    steps = []
    previous_top = None
    for f, row in zip(factors, scores):
        order = pool.ranking(row)
        top = tuple(order[: config.stability_window].tolist())
        pts = _points_for(order, config.rank_points, n)
        accumulate = top != previous_top
        if accumulate:
            totals += pts
        previous_top = top
        steps.append(
            FactorStep(
                factor=float(f),
                top=tuple(pool.candidates[i] for i in top),
                points={c: float(pts[i]) for i, c in enumerate(pool.candidates)},
                accumulated=accumulate,
            )
        )
    return {c: float(totals[i]) for i, c in enumerate(pool.candidates)}, steps


def select(matrix: TradeoffMatrix, config: AmisConfig = AmisConfig()) -> SelectionResult:
    """Pick ``config.selection_count`` candidates, one per round, refitting each round.

    When a single candidate is left it is taken without a sweep.
    """
    k = config.selection_count
    if len(matrix.candidates) < k:
        raise SelectionError(
            f"pool has {len(matrix.candidates)} candidates, fewer than the {k} requested"
        )
    config.weights_for(matrix.datasets)
    remaining = list(matrix.candidates)
    selected: list[CandidateId] = []
    rounds = []
    for rnd in range(1, k + 1):
        if len(remaining) == 1:
            winner = remaining[0]
            rounds.append(RoundLog(rnd, (winner,), {}, (), {winner: 0.0}, winner))
        else:
            try:
                fitted = _fits(matrix, remaining)
            except DegenerateFitError as exc:
                raise SelectionError(f"round {rnd}: {exc}") from exc
            totals, steps = factor_sweep(matrix, fitted, config, remaining)
            winner = min(
                remaining, key=lambda c: (-totals[c], matrix.mean_time(c), c.sort_key)
            )
            rounds.append(RoundLog(rnd, tuple(remaining), fitted, tuple(steps), totals, winner))
        selected.append(winner)
        remaining.remove(winner)
    return SelectionResult(tuple(selected), tuple(rounds), config)


def weighted_means(
    matrix: TradeoffMatrix, candidate: CandidateId, dataset_weights: Optional[Mapping[str, float]] = None
) -> tuple[float, float]:
    """Dataset-weighted mean (time_ms, accuracy) of one candidate."""
    weights = dataset_weights or {d: 1.0 for d in matrix.datasets}
    total = math.fsum(weights[d] for d in matrix.datasets)
    if not total > 0:
        raise ValueError("dataset weights sum to zero")
    t = math.fsum(weights[d] * matrix.point(candidate, d).time_ms for d in matrix.datasets) / total
    a = math.fsum(weights[d] * matrix.point(candidate, d).accuracy for d in matrix.datasets) / total
    return t, a


def best_within_budget(
    matrix: TradeoffMatrix,
    selected: Sequence[CandidateId],
    budget_ms: float,
    dataset_weights: Optional[Mapping[str, float]] = None,
) -> CandidateId:
    """Most accurate selected candidate whose weighted-mean time fits the budget."""
    if not selected:
        raise ValueError("no selected candidates to choose from")
    feasible = []
    for c in selected:
        t, a = weighted_means(matrix, c, dataset_weights)
        if t <= budget_ms:
            feasible.append((-a, t, c.sort_key, c))
    if not feasible:
        fastest = min(weighted_means(matrix, c, dataset_weights)[0] for c in selected)
        raise NoFeasibleModelError(
            f"no selected model fits a {budget_ms:g} ms budget (fastest needs {fastest:.2f} ms)"
        )
    return min(feasible)[3]
