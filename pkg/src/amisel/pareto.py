"""Wrap-line (2-D Pareto frontier) of time/accuracy trade-off points."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import AmiselError, CandidateId, TradeoffPoint


@dataclass(frozen=True)
class Frontier:
    """Non-dominated points in ascending time (and therefore accuracy) order."""

    points: tuple[tuple[CandidateId, TradeoffPoint], ...]

    @property
    def candidates(self) -> list[CandidateId]:
        return [c for c, _ in self.points]

    def __len__(self) -> int:
        return len(self.points)


def dominates(p: TradeoffPoint, q: TradeoffPoint) -> bool:
    """True when ``p`` is at least as fast and as accurate as ``q`` and differs from it."""
    return (
        p.time_ms <= q.time_ms
        and p.accuracy >= q.accuracy
        and (p.time_ms != q.time_ms or p.accuracy != q.accuracy)
    )


def wrap_line(points: Sequence[tuple[CandidateId, TradeoffPoint]]) -> Frontier:
    """Sort-then-scan frontier extraction, O(n log n).

    Equal-time ties keep the most accurate point; exact duplicates keep the
    candidate that sorts first by ``(model_id, refined)``.
    """
    if not points:
        raise AmiselError("wrap_line needs at least one point")
    ordered = sorted(points, key=lambda cp: (cp[1].time_ms, -cp[1].accuracy, cp[0].sort_key))
    kept = []
    best = float("-inf")
    for cand, pt in ordered:
        if pt.accuracy > best:
            kept.append((cand, pt))
            best = pt.accuracy
    return Frontier(tuple(kept))
