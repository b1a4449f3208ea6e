"""Least-squares lines in (time, accuracy) space, slope adjustment and residuals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import AmiselError, TradeoffPoint


class DegenerateFitError(AmiselError, ValueError):
    """The sample has fewer than two points or no spread in time."""


@dataclass(frozen=True)
class SlopeModel:
    slope: float
    intercept: float
    centroid: tuple[float, float]

    def predict(self, time_ms: float) -> float:
        return self.intercept + self.slope * time_ms


def fit_line(points: Sequence[TradeoffPoint]) -> SlopeModel:
    """Ordinary least squares of accuracy on time (the "default slope")."""
    if len(points) < 2:
        raise DegenerateFitError(f"need at least 2 points to fit a line, got {len(points)}")
    n = len(points)
    t_mean = math.fsum(p.time_ms for p in points) / n
    a_mean = math.fsum(p.accuracy for p in points) / n
    sxx = math.fsum((p.time_ms - t_mean) ** 2 for p in points)
    if sxx == 0.0:
        raise DegenerateFitError("all inference times are identical; no time/accuracy trade-off")
    sxy = math.fsum((p.time_ms - t_mean) * (p.accuracy - a_mean) for p in points)
    slope = sxy / sxx
    return SlopeModel(slope, a_mean - slope * t_mean, (t_mean, a_mean))


def adjusted_line(model: SlopeModel, factor: float) -> SlopeModel:
    """Scale the slope by ``factor``, pivoting at the centroid."""
    if not (math.isfinite(factor) and factor > 0):
        raise ValueError(f"adjustment factor must be finite and > 0, got {factor!r}")
    slope = factor * model.slope
    t_mean, a_mean = model.centroid
    return SlopeModel(slope, a_mean - slope * t_mean, model.centroid)


def residual(model: SlopeModel, point: TradeoffPoint) -> float:
    """Signed vertical offset of ``point`` from the line; positive above it."""
    # Centroid form; equal to accuracy - (intercept + slope * time) but with less cancellation.
    t_mean, a_mean = model.centroid
    return (point.accuracy - a_mean) - model.slope * (point.time_ms - t_mean)
