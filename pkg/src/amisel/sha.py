"""Successive halving over candidates with a pluggable evaluator.

The evaluator is any callable ``(candidate, budget_epochs) -> score`` with the
score on a 0..100 scale. It receives the total budget for the rung, not an
increment, so checkpoint reuse stays the evaluator's business.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Hashable, Mapping, Optional, Sequence

from .core import AmiselError

Evaluator = Callable[[Hashable, int], float]


class EvaluationError(AmiselError, ValueError):
    pass


@dataclass(frozen=True)
class RungPlan:
    rungs: tuple[tuple[int, int], ...] = ((5, 5), (10, 3), (15, 1))

    def __post_init__(self):
        rungs = tuple((int(b), int(s)) for b, s in self.rungs)
        object.__setattr__(self, "rungs", rungs)
        if not rungs:
            raise ValueError("rung plan is empty")
        budgets = [b for b, _ in rungs]
        survivors = [s for _, s in rungs]
        if any(b < 1 for b in budgets) or any(s < 1 for s in survivors):
            raise ValueError("budgets and survivor counts must be positive")
        if any(a >= b for a, b in zip(budgets, budgets[1:])):
            raise ValueError(f"budgets must be strictly increasing, got {budgets}")
        if any(a <= b for a, b in zip(survivors, survivors[1:])):
            raise ValueError(f"survivor counts must be strictly decreasing, got {survivors}")
        if survivors[-1] != 1:
            raise ValueError("the last rung must keep exactly one survivor")

    @classmethod
    def parse(cls, text: str) -> "RungPlan":
        """Parse ``"5:5,10:3,15:1"`` (budget:survivors pairs)."""
        pairs = []
        for chunk in text.split(","):
            budget, _, keep = chunk.strip().partition(":")
            pairs.append((int(budget), int(keep)))
        return cls(tuple(pairs))


@dataclass(frozen=True)
class RungEntry:
    rung: int
    budget: int
    candidate: Hashable
    score: float
    kept: bool


@dataclass(frozen=True)
class ShaResult:
    survivor: Hashable
    log: tuple[RungEntry, ...]

    def populations(self) -> list[int]:
        """Candidates entering each rung, followed by the final survivor count."""
        entering: dict[int, int] = {}
        for e in self.log:
            entering[e.rung] = entering.get(e.rung, 0) + 1
        last = max(entering)
        kept = sum(1 for e in self.log if e.rung == last and e.kept)
        return [entering[r] for r in sorted(entering)] + [kept]


def _name(candidate: Hashable) -> str:
    return getattr(candidate, "label", None) or str(candidate)


def run_sha(candidates: Sequence[Hashable], evaluator: Evaluator, plan: RungPlan = RungPlan()) -> ShaResult:
    """Evaluate, keep the top ``survivors`` of each rung, and repeat."""
    first_keep = plan.rungs[0][1]
    if len(candidates) < first_keep:
        raise ValueError(f"{len(candidates)} candidates cannot fill a first rung keeping {first_keep}")
    alive = list(candidates)
    log = []
    for rung, (budget, keep) in enumerate(plan.rungs, start=1):
        scores = {}
        for cand in alive:
            score = float(evaluator(cand, budget))
            if not (math.isfinite(score) and 0.0 <= score <= 100.0):
                raise EvaluationError(
                    f"rung {rung}: score {score!r} for {_name(cand)} is outside [0, 100]"
                )
            scores[cand] = score
        ranked = sorted(alive, key=lambda c: (-scores[c], _name(c)))
        kept = set(ranked[:keep])
        log.extend(RungEntry(rung, budget, c, scores[c], c in kept) for c in alive)
        alive = [c for c in alive if c in kept]
    return ShaResult(alive[0], tuple(log))


@dataclass(frozen=True)
class CurveParams:
    asymptote: float
    rate: float
    offset: float = 0.0

    def __post_init__(self):
        problems = []
        if not (0.0 <= self.asymptote <= 100.0):
            problems.append(f"asymptote must lie in [0, 100], got {self.asymptote}")
        if not (math.isfinite(self.rate) and self.rate > 0):
            problems.append(f"rate must be > 0, got {self.rate}")
        if not (math.isfinite(self.offset) and self.offset >= 0):
            problems.append(f"offset must be >= 0, got {self.offset}")
        if problems:
            raise ValueError("; ".join(problems))


def synthetic_curve(params: CurveParams) -> Callable[[int], float]:
    """Saturating learning curve ``asymptote * (1 - exp(-rate * budget)) + offset``, clamped."""

    def score(budget: int) -> float:
        value = params.asymptote * (1.0 - math.exp(-params.rate * budget)) + params.offset
        return min(100.0, max(0.0, value))

    return score


def curve_evaluator(curves: Mapping[Hashable, CurveParams]) -> Evaluator:
    """Evaluator backed by one synthetic curve per candidate."""
    fns = {cand: synthetic_curve(p) for cand, p in curves.items()}

    def evaluate(candidate: Hashable, budget: int) -> float:
        return fns[candidate](budget)

    return evaluate


def random_curves(names: Sequence[str], seed: Optional[int] = 0) -> dict[str, CurveParams]:
    """Random but reproducible curve parameters for demos."""
    rng = random.Random(seed)
    return {
        name: CurveParams(
            asymptote=round(rng.uniform(40.0, 90.0), 3),
            rate=round(rng.uniform(0.05, 0.5), 4),
            offset=round(rng.uniform(0.0, 5.0), 3),
        )
        for name in names
    }
