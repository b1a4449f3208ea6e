"""Domain types shared across the package, plus metric aggregation helpers."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Optional

METRIC_FIELDS = ("mspd", "mssd", "vsd", "add")
REQUIRED_METRICS = ("mspd", "mssd")


class AmiselError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(AmiselError, ValueError):
    """One or more fields failed validation.

    ``problems`` holds ``(field, message)`` pairs, one per violated field, so
    callers can report every problem at once instead of the first one only.
    """

    def __init__(self, problems: Iterable[tuple[str, str]], row: Optional[int] = None):
        self.problems = list(problems)
        self.row = row
        where = f"row {row}: " if row is not None else ""
        detail = "; ".join(f"{name}: {msg}" for name, msg in self.problems)
        super().__init__(f"{where}{detail}")

    @property
    def fields(self) -> list[str]:
        return [name for name, _ in self.problems]


class HeadConfig(str, enum.Enum):
    F0 = "F0"
    F2 = "F2"
    E0 = "E0"
    C0 = "C0"


@dataclass(frozen=True)
class CandidateId:
    """Identity of one candidate model.

    Two candidates are equal when ``model_id`` and ``refined`` match; the
    backbone, head configuration and numeric code are descriptive metadata
    taken from a candidate-pool sidecar when one is supplied.
    """

    model_id: str
    refined: bool = False
    backbone: Optional[str] = field(default=None, compare=False)
    head_config: Optional[HeadConfig] = field(default=None, compare=False)
    numeric_code: Optional[int] = field(default=None, compare=False)

    @property
    def sort_key(self) -> tuple[str, bool]:
        return (self.model_id, self.refined)

    @property
    def label(self) -> str:
        """Short machine-friendly label, ``model_id`` or ``model_id+ref``."""
        return f"{self.model_id}+ref" if self.refined else self.model_id

    @property
    def display_name(self) -> str:
        """Human label in the "11 with ref." style when a numeric code is known."""
        name = str(self.numeric_code) if self.numeric_code is not None else self.model_id
        return f"{name} {'with' if self.refined else 'without'} ref."

    def __str__(self) -> str:
        return self.label

    @classmethod
    def parse(cls, label: str) -> "CandidateId":
        label = label.strip()
        if label.endswith("+ref"):
            return cls(label[: -len("+ref")], refined=True)
        return cls(label)


def check_pool(candidates: Iterable[CandidateId]) -> None:
    """Raise if numeric codes or (backbone, head, refined) triples collide.

    A refined and an unrefined variant of the same model legitimately share
    their numeric code, so codes are checked per refinement flag.
    """
    codes: dict[tuple[int, bool], CandidateId] = {}
    triples: dict[tuple[str, HeadConfig, bool], CandidateId] = {}
    problems = []
    for cand in candidates:
        if cand.numeric_code is not None:
            key = (cand.numeric_code, cand.refined)
            if key in codes and codes[key] != cand:
                problems.append(("numeric_code", f"{cand.numeric_code} used by {codes[key]} and {cand}"))
            codes.setdefault(key, cand)
        if cand.backbone is not None and cand.head_config is not None:
            triple = (cand.backbone, cand.head_config, cand.refined)
            if triple in triples and triples[triple] != cand:
                problems.append(("backbone", f"{triple} used by {triples[triple]} and {cand}"))
            triples.setdefault(triple, cand)
    if problems:
        raise ValidationError(problems)


@dataclass(frozen=True)
class BenchmarkRecord:
    candidate: CandidateId
    dataset: str
    time_ms: float
    mspd: float
    mssd: float
    vsd: Optional[float] = None
    add: Optional[float] = None

    def metric(self, name: str) -> Optional[float]:
        return getattr(self, name)


@dataclass(frozen=True)
class TradeoffPoint:
    time_ms: float
    accuracy: float

    def __post_init__(self):
        if not (math.isfinite(self.time_ms) and math.isfinite(self.accuracy)):
            raise ValidationError([("point", f"non-finite coordinate {self}")])
        if self.time_ms <= 0:
            raise ValidationError([("time_ms", f"must be > 0, got {self.time_ms}")])


def _check_percent(name: str, value: float) -> Optional[str]:
    if not math.isfinite(value):
        return f"must be finite, got {value}"
    if value < 0 or value > 100:
        return f"must lie in [0, 100], got {value}"
    return None


def aggregate_ar(mspd: float, mssd: float, vsd: float) -> float:
    """Average recall: the arithmetic mean of the MSPD, MSSD and VSD percentages."""
    problems = []
    for name, value in (("mspd", mspd), ("mssd", mssd), ("vsd", vsd)):
        msg = _check_percent(name, float(value))
        if msg:
            problems.append((name, msg))
    if problems:
        raise ValidationError(problems)
    return math.fsum((mspd, mssd, vsd)) / 3.0


def relative_delta(baseline: float, value: float) -> float:
    """Signed percent change of ``value`` relative to ``baseline``.

    No sign flip is applied: a faster model gets a negative time delta.
    """
    if not (math.isfinite(baseline) and math.isfinite(value)):
        raise ValueError(f"relative_delta needs finite inputs, got {baseline!r}, {value!r}")
    if baseline == 0:
        raise ZeroDivisionError("relative_delta baseline is zero")
    return 100.0 * (value - baseline) / baseline


def _to_float(value: Any) -> float:
    if isinstance(value, bool):
        raise TypeError("boolean is not a number")
    if isinstance(value, str):
        value = value.strip()
    return float(value)


def _parse_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if value is None:
        return False
    text = str(value).strip().lower()
    if text in ("", "false", "0", "no"):
        return False
    if text in ("true", "1", "yes"):
        return True
    raise ValueError(f"expected true/false, got {value!r}")


def _is_blank(value: Any) -> bool:
    return value is None or (isinstance(value, str) and value.strip() == "")


def validate_record(
    raw: Mapping[str, Any],
    pool: Optional[Mapping[str, CandidateId]] = None,
    row: Optional[int] = None,
) -> BenchmarkRecord:
    """Build a :class:`BenchmarkRecord` from a loosely typed mapping.

    Accepts the CSV column names (``model_id``, ``dataset_id``, ``time_ms``,
    ``mspd``, ``mssd``, ``vsd``, ``add``, ``refined``). Every violated field is
    collected before raising, so the error lists them all. ``pool`` optionally
    maps ``model_id`` to a :class:`CandidateId` carrying backbone metadata.
    """
    problems: list[tuple[str, str]] = []
    values: dict[str, Any] = {}

    model_id = raw.get("model_id")
    if _is_blank(model_id):
        problems.append(("model_id", "missing"))
    dataset = raw.get("dataset_id")
    if _is_blank(dataset):
        problems.append(("dataset_id", "missing"))

    try:
        refined = _parse_bool(raw.get("refined"))
    except ValueError as exc:
        problems.append(("refined", str(exc)))
        refined = False

    time_raw = raw.get("time_ms")
    if _is_blank(time_raw):
        problems.append(("time_ms", "missing"))
    else:
        try:
            t = _to_float(time_raw)
        except (TypeError, ValueError):
            problems.append(("time_ms", f"not a number: {time_raw!r}"))
        else:
            if not math.isfinite(t) or t <= 0:
                problems.append(("time_ms", f"must be finite and > 0, got {t}"))
            else:
                values["time_ms"] = t

    for name in METRIC_FIELDS:
        value = raw.get(name)
        if _is_blank(value):
            if name in REQUIRED_METRICS:
                problems.append((name, "missing"))
            else:
                values[name] = None
            continue
        try:
            v = _to_float(value)
        except (TypeError, ValueError):
            problems.append((name, f"not a number: {value!r}"))
            continue
        msg = _check_percent(name, v)
        if msg:
            problems.append((name, msg))
        else:
            values[name] = v

    if problems:
        raise ValidationError(problems, row=row)

    model_id = str(model_id).strip()
    described = pool.get(model_id) if pool is not None else None
    if described is not None:
        candidate = replace(described, refined=refined)
    else:
        candidate = CandidateId(model_id, refined)
    return BenchmarkRecord(candidate=candidate, dataset=str(dataset).strip(), **values)
