"""CSV ingestion and the candidate x dataset trade-off matrix."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, Optional, Sequence, Union

from .core import (
    BenchmarkRecord,
    CandidateId,
    HeadConfig,
    TradeoffPoint,
    ValidationError,
    aggregate_ar,
    check_pool,
    validate_record,
)

COLUMNS = ("model_id", "dataset_id", "time_ms", "mspd", "mssd", "vsd", "add", "refined")
POOL_COLUMNS = ("model_id", "backbone", "head_config", "numeric_code")


class AccuracyMetric(str, enum.Enum):
    AR = "AR"
    MSPD = "MSPD"
    MSSD = "MSSD"
    VSD = "VSD"
    ADD = "ADD"
    MEAN_OF_LISTED = "mean_of_listed"

    @classmethod
    def parse(cls, value: Union[str, "AccuracyMetric"]) -> "AccuracyMetric":
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value.lower() == str(value).lower():
                return member
        raise ValueError(f"unknown accuracy metric {value!r}")

    @property
    def label(self) -> str:
        if self is AccuracyMetric.AR:
            return "AR (mean of MSPD, MSSD, VSD) (%)"
        if self is AccuracyMetric.MEAN_OF_LISTED:
            return "mean accuracy (%)"
        return f"{self.value} (%)"


class IngestError(ValidationError):
    """A table-level problem (header, column count, grid completeness)."""


Source = Union[bytes, str, IO[bytes], IO[str]]


def _text_stream(source: Source) -> IO[str]:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8-sig"))
    if isinstance(source, str):
        return io.StringIO(source)
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return io.StringIO(data)


def _read_rows(source: Source, columns: Sequence[str]):
    reader = csv.reader(_text_stream(source))
    header = next(reader, None)
    if header is None:
        raise IngestError([("header", "empty input, expected a header row")], row=0)
    header = [h.strip() for h in header]
    if tuple(header) != tuple(columns):
        raise IngestError(
            [("header", f"expected columns {','.join(columns)}, got {','.join(header)}")], row=0
        )
    for index, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(columns):
            raise IngestError(
                [("row", f"expected {len(columns)} columns, got {len(row)}")], row=index
            )
        yield index, dict(zip(columns, row))


def parse_pool(source: Source) -> dict[str, CandidateId]:
    """Parse a candidate-pool sidecar (``model_id,backbone,head_config,numeric_code``)."""
    pool: dict[str, CandidateId] = {}
    for index, row in _read_rows(source, POOL_COLUMNS):
        problems = []
        model_id = row["model_id"].strip()
        if not model_id:
            problems.append(("model_id", "missing"))
        head = row["head_config"].strip() or None
        try:
            head_config = HeadConfig(head) if head else None
        except ValueError:
            problems.append(("head_config", f"must be one of F0, F2, E0, C0, got {head!r}"))
            head_config = None
        code_text = row["numeric_code"].strip()
        code = None
        if code_text:
            try:
                code = int(code_text)
                if code <= 0:
                    raise ValueError
            except ValueError:
                problems.append(("numeric_code", f"must be a positive integer, got {code_text!r}"))
        if model_id in pool:
            problems.append(("model_id", f"duplicate pool entry {model_id!r}"))
        if problems:
            raise ValidationError(problems, row=index)
        pool[model_id] = CandidateId(
            model_id,
            backbone=row["backbone"].strip() or None,
            head_config=head_config,
            numeric_code=code,
        )
    check_pool(pool.values())
    return pool


def parse_benchmark_table(
    source: Source, pool: Optional[Mapping[str, CandidateId]] = None
) -> list[BenchmarkRecord]:
    """Parse the benchmark CSV into validated records.

    Errors carry the 1-based data row index (the header is row 0).
    """
    records = []
    for index, row in _read_rows(source, COLUMNS):
        records.append(validate_record(row, pool=pool, row=index))
    return records


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def serialize_records(records: Iterable[BenchmarkRecord]) -> str:
    """Inverse of :func:`parse_benchmark_table` (floats written with ``repr``)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.candidate.model_id,
                r.dataset,
                _fmt(r.time_ms),
                _fmt(r.mspd),
                _fmt(r.mssd),
                _fmt(r.vsd),
                _fmt(r.add),
                "true" if r.candidate.refined else "false",
            ]
        )
    return out.getvalue()


def record_accuracy(
    record: BenchmarkRecord,
    metric: AccuracyMetric,
    listed: Sequence[str] = (),
) -> float:
    """Accuracy of one record under the selected metric."""
    if metric is AccuracyMetric.AR:
        if record.vsd is None:
            raise ValidationError(
                [("vsd", f"AR requires vsd, missing for {record.candidate} on {record.dataset}")]
            )
        return aggregate_ar(record.mspd, record.mssd, record.vsd)
    if metric is AccuracyMetric.MEAN_OF_LISTED:
        if not listed:
            raise ValidationError([("listed", "mean_of_listed needs at least one metric name")])
        values = []
        for name in listed:
            value = record.metric(name.lower())
            if value is None:
                raise ValidationError(
                    [(name.lower(), f"missing for {record.candidate} on {record.dataset}")]
                )
            values.append(value)
        return math.fsum(values) / len(values)
    name = metric.value.lower()
    value = record.metric(name)
    if value is None:
        raise ValidationError(
            [(name, f"{metric.value} requires {name}, missing for {record.candidate} on {record.dataset}")]
        )
    return value


@dataclass(frozen=True)
class TradeoffMatrix:
    """Complete candidate x dataset grid of trade-off points.

    ``records`` keeps the full metric rows so reports can compute columns other
    than the selection metric.
    """

    candidates: tuple[CandidateId, ...]
    datasets: tuple[str, ...]
    cells: Mapping[tuple[CandidateId, str], TradeoffPoint]
    accuracy_metric: AccuracyMetric = AccuracyMetric.AR
    records: Mapping[tuple[CandidateId, str], BenchmarkRecord] = field(default_factory=dict)

    def point(self, candidate: CandidateId, dataset: str) -> TradeoffPoint:
        return self.cells[(candidate, dataset)]

    def dataset_points(
        self, dataset: str, candidates: Optional[Sequence[CandidateId]] = None
    ) -> list[tuple[CandidateId, TradeoffPoint]]:
        cands = self.candidates if candidates is None else candidates
        return [(c, self.cells[(c, dataset)]) for c in cands]

    def mean_time(self, candidate: CandidateId) -> float:
        return math.fsum(self.cells[(candidate, d)].time_ms for d in self.datasets) / len(self.datasets)

    def restrict(self, candidates: Sequence[CandidateId]) -> "TradeoffMatrix":
        keep = set(candidates)
        ordered = tuple(c for c in self.candidates if c in keep)
        return TradeoffMatrix(
            candidates=ordered,
            datasets=self.datasets,
            cells={k: v for k, v in self.cells.items() if k[0] in keep},
            accuracy_metric=self.accuracy_metric,
            records={k: v for k, v in self.records.items() if k[0] in keep},
        )

    def candidate(self, label: Union[str, CandidateId]) -> CandidateId:
        """Look up a candidate by label (``model_id`` or ``model_id+ref``)."""
        wanted = CandidateId.parse(label) if isinstance(label, str) else label
        for c in self.candidates:
            if c == wanted:
                return c
        raise KeyError(f"candidate {wanted} not in matrix")


def build_matrix(
    records: Sequence[BenchmarkRecord],
    metric: Union[str, AccuracyMetric] = AccuracyMetric.AR,
    listed: Sequence[str] = (),
) -> TradeoffMatrix:
    """Assemble the trade-off grid, rejecting duplicates and missing cells."""
    metric = AccuracyMetric.parse(metric)
    if not records:
        raise IngestError([("records", "no benchmark records")])
    candidates: dict[CandidateId, None] = {}
    datasets: dict[str, None] = {}
    by_cell: dict[tuple[CandidateId, str], BenchmarkRecord] = {}
    for rec in records:
        candidates.setdefault(rec.candidate, None)
        datasets.setdefault(rec.dataset, None)
        key = (rec.candidate, rec.dataset)
        if key in by_cell:
            raise IngestError([("cell", f"duplicate record for ({rec.candidate}, {rec.dataset})")])
        by_cell[key] = rec

    missing = [(c, d) for c in candidates for d in datasets if (c, d) not in by_cell]
    if missing:
        names = ", ".join(f"({c}, {d})" for c, d in missing)
        raise IngestError([("cell", f"incomplete grid, missing {names}")])

    cells = {
        key: TradeoffPoint(rec.time_ms, record_accuracy(rec, metric, listed))
        for key, rec in by_cell.items()
    }
    return TradeoffMatrix(
        candidates=tuple(candidates),
        datasets=tuple(datasets),
        cells=cells,
        accuracy_metric=metric,
        records=by_cell,
    )


def matrix_from_points(
    grid: Mapping[str, Mapping[str, tuple[float, float]]],
    metric: AccuracyMetric = AccuracyMetric.AR,
) -> TradeoffMatrix:
    """Build a matrix directly from ``{model_id: {dataset: (time_ms, accuracy)}}``.

    Handy for synthetic pools and tests; no full metric records are attached.
    """
    candidates = tuple(CandidateId(name) for name in grid)
    datasets: dict[str, None] = {}
    for per_ds in grid.values():
        for d in per_ds:
            datasets.setdefault(d, None)
    cells = {}
    for cand in candidates:
        for d in datasets:
            try:
                t, a = grid[cand.model_id][d]
            except KeyError:
                raise IngestError([("cell", f"incomplete grid, missing ({cand}, {d})")]) from None
            cells[(cand, d)] = TradeoffPoint(float(t), float(a))
    return TradeoffMatrix(candidates, tuple(datasets), cells, metric)
