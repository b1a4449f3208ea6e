"""Comparison tables against a baseline and deterministic SVG scatter plots."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union
from xml.sax.saxutils import escape

from .amis import SelectionResult
from .core import AmiselError, CandidateId, TradeoffPoint, relative_delta
from .ingest import TradeoffMatrix
from .pareto import Frontier

AXIS_PAD = 0.05  # fraction of the data span added on each side of both axes

HEADERS = (
    "Candidate",
    "Avg MSPD/MSSD/VSD (%)",
    "ADD (%)",
    "Avg MSPD/MSSD/VSD/ADD (%)",
    "Time (%)",
)


class ReportError(AmiselError):
    pass


@dataclass(frozen=True)
class ComparisonRow:
    candidate: CandidateId
    delta_avg3: float
    delta_time: float
    delta_add: Optional[float] = None
    delta_avg4: Optional[float] = None


def format_delta(value: Optional[float]) -> str:
    """Two decimals with an explicit sign, e.g. ``+25.14`` / ``-35.71``; blank for None."""
    if value is None:
        return ""
    text = f"{value:+.2f}"
    return "+0.00" if text == "-0.00" else text


def _weighted(values: Mapping[str, float], weights: Mapping[str, float]) -> float:
    total = math.fsum(weights[d] for d in values)
    return math.fsum(weights[d] * v for d, v in values.items()) / total


def _summary(matrix: TradeoffMatrix, cand: CandidateId, weights: Mapping[str, float]) -> dict:
    avg3, avg4, add, time = {}, {}, {}, {}
    have_add = True
    for d in matrix.datasets:
        rec = matrix.records.get((cand, d))
        if rec is None:
            raise ReportError(f"matrix has no full metric record for ({cand}, {d})")
        if rec.vsd is None:
            raise ReportError(f"vsd missing for ({cand}, {d}); the comparison table needs MSPD, MSSD and VSD")
        avg3[d] = math.fsum((rec.mspd, rec.mssd, rec.vsd)) / 3
        time[d] = rec.time_ms
        if rec.add is None:
            have_add = False
        else:
            add[d] = rec.add
            avg4[d] = math.fsum((rec.mspd, rec.mssd, rec.vsd, rec.add)) / 4
    out = {"avg3": _weighted(avg3, weights), "time": _weighted(time, weights)}
    if have_add:
        out["add"] = _weighted(add, weights)
        out["avg4"] = _weighted(avg4, weights)
    return out


def comparison_table(
    selection: Union[SelectionResult, Sequence[CandidateId]],
    matrix: TradeoffMatrix,
    baseline: Union[str, CandidateId],
    dataset_weights: Optional[Mapping[str, float]] = None,
) -> list[ComparisonRow]:
    """One row per selected candidate, in selection order, of deltas vs ``baseline``.

    Each column compares dataset-weighted means. ADD columns are left empty
    when the candidate or the baseline lacks ADD on some dataset.
    """
    selected = selection.selected if isinstance(selection, SelectionResult) else tuple(selection)
    if dataset_weights is None and isinstance(selection, SelectionResult):
        dataset_weights = selection.config.dataset_weights
    weights = dataset_weights or {d: 1.0 for d in matrix.datasets}
    try:
        base_id = matrix.candidate(baseline)
    except KeyError:
        raise ReportError(f"baseline {baseline} is not in the benchmark matrix") from None
    base = _summary(matrix, base_id, weights)
    rows = []
    for cand in selected:
        s = _summary(matrix, matrix.candidate(cand), weights)
        both_add = "add" in s and "add" in base
        rows.append(
            ComparisonRow(
                candidate=matrix.candidate(cand),
                delta_avg3=relative_delta(base["avg3"], s["avg3"]),
                delta_time=relative_delta(base["time"], s["time"]),
                delta_add=relative_delta(base["add"], s["add"]) if both_add else None,
                delta_avg4=relative_delta(base["avg4"], s["avg4"]) if both_add else None,
            )
        )
    return rows


def _cells(row: ComparisonRow) -> list[str]:
    return [
        row.candidate.display_name if row.candidate.numeric_code is not None else row.candidate.label,
        format_delta(row.delta_avg3),
        format_delta(row.delta_add),
        format_delta(row.delta_avg4),
        format_delta(row.delta_time),
    ]


def table_text(rows: Sequence[ComparisonRow], baseline_label: str = "baseline") -> str:
    """Aligned plain-text rendering, one line per row."""
    body = [_cells(r) for r in rows]
    widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h) for i, h in enumerate(HEADERS)]
    lines = [f"Selected candidates vs {baseline_label} (relative change, %)"]
    lines.append("  ".join(h.ljust(w) if i == 0 else h.rjust(w) for i, (h, w) in enumerate(zip(HEADERS, widths))))
    lines.append("  ".join("-" * w for w in widths))
    for cells in body:
        lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths))))
    return "\n".join(lines) + "\n"


def table_csv(rows: Sequence[ComparisonRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["model_id", "refined", "delta_avg3", "delta_add", "delta_avg4", "delta_time"])
    for r in rows:
        writer.writerow(
            [
                r.candidate.model_id,
                "true" if r.candidate.refined else "false",
                format_delta(r.delta_avg3),
                format_delta(r.delta_add),
                format_delta(r.delta_avg4),
                format_delta(r.delta_time),
            ]
        )
    return out.getvalue()


def _padded_range(values: Sequence[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    span = hi - lo
    if span == 0:
        span = abs(lo) or 1.0
    return lo - AXIS_PAD * span, hi + AXIS_PAD * span


def _ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-12 * step:
        ticks.append(round(v, 10))
        v += step
    return ticks


def _num(v: float) -> str:
    return f"{v:.2f}"


def scatter_svg(
    points: Sequence[tuple[CandidateId, TradeoffPoint]],
    frontier: Optional[Frontier] = None,
    highlighted: Sequence[CandidateId] = (),
    width: int = 640,
    height: int = 480,
    metric_label: str = "accuracy (%)",
    title: Optional[str] = None,
) -> bytes:
    """Standalone SVG 1.1 scatter of time vs accuracy with the wrap-line drawn through.

    Output bytes depend only on the inputs. Highlighted candidates get a larger
    red marker; every data marker carries ``class="point"``.
    """
    if not points:
        raise ReportError("scatter_svg needs at least one point")
    if width <= 0 or height <= 0:
        raise ReportError("canvas size must be positive")
    left, right, top, bottom = 70.0, 20.0, 40.0 if title else 20.0, 55.0
    x_lo, x_hi = _padded_range([p.time_ms for _, p in points])
    y_lo, y_hi = _padded_range([p.accuracy for _, p in points])
    plot_w, plot_h = width - left - right, height - top - bottom

    def sx(t: float) -> float:
        return left + (t - x_lo) / (x_hi - x_lo) * plot_w

    def sy(a: float) -> float:
        return top + (y_hi - a) / (y_hi - y_lo) * plot_h

    hl = set(highlighted)
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{_num(width / 2)}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    x0, x1, y0, y1 = left, left + plot_w, top, top + plot_h
    out.append('<g class="axes" stroke="black" stroke-width="1">')
    out.append(f'<line x1="{_num(x0)}" y1="{_num(y1)}" x2="{_num(x1)}" y2="{_num(y1)}"/>')
    out.append(f'<line x1="{_num(x0)}" y1="{_num(y0)}" x2="{_num(x0)}" y2="{_num(y1)}"/>')
    out.append("</g>")
    out.append('<g class="ticks" fill="black">')
    for t in _ticks(x_lo, x_hi):
        out.append(f'<line x1="{_num(sx(t))}" y1="{_num(y1)}" x2="{_num(sx(t))}" y2="{_num(y1 + 4)}" stroke="black"/>')
        out.append(f'<text x="{_num(sx(t))}" y="{_num(y1 + 16)}" text-anchor="middle">{t:g}</text>')
    for a in _ticks(y_lo, y_hi):
        out.append(f'<line x1="{_num(x0 - 4)}" y1="{_num(sy(a))}" x2="{_num(x0)}" y2="{_num(sy(a))}" stroke="black"/>')
        out.append(f'<text x="{_num(x0 - 7)}" y="{_num(sy(a) + 4)}" text-anchor="end">{a:g}</text>')
    out.append("</g>")
    out.append(
        f'<text class="xlabel" x="{_num((x0 + x1) / 2)}" y="{_num(height - 12)}" text-anchor="middle">inference time (ms)</text>'
    )
    out.append(
        f'<text class="ylabel" x="16" y="{_num((y0 + y1) / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_num((y0 + y1) / 2)})">{escape(metric_label)}</text>'
    )
    if frontier is not None and len(frontier):
        coords = " ".join(f"{_num(sx(p.time_ms))},{_num(sy(p.accuracy))}" for _, p in frontier.points)
        out.append(f'<polyline class="frontier" points="{coords}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>')
    for cand, p in points:
        if cand in hl:
            style = 'class="point highlighted" r="6" fill="#d62728" stroke="black"'
        else:
            style = 'class="point" r="3.5" fill="#7f7f7f"'
        out.append(
            f'<circle {style} cx="{_num(sx(p.time_ms))}" cy="{_num(sy(p.accuracy))}">'
            f"<title>{escape(cand.label)}: {p.time_ms:g} ms, {p.accuracy:g}</title></circle>"
        )
    for cand, p in points:
        if cand in hl:
            out.append(
                f'<text class="annotation" x="{_num(sx(p.time_ms) + 8)}" y="{_num(sy(p.accuracy) - 8)}">'
                f"{escape(cand.label)}</text>"
            )
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def selection_csv(result: SelectionResult, matrix: TradeoffMatrix) -> str:
    """Selected candidates in order with their winning points and mean time."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["rank", "model_id", "refined", "points", "mean_time_ms"])
    for rnd, cand in zip(result.rounds, result.selected):
        writer.writerow(
            [
                rnd.round,
                cand.model_id,
                "true" if cand.refined else "false",
                repr(rnd.totals[cand]),
                repr(matrix.mean_time(cand)),
            ]
        )
    return out.getvalue()


def rounds_csv(result: SelectionResult) -> str:
    """Per-round accumulated points for every candidate still in the pool."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["round", "model_id", "refined", "points", "selected", "contributing_factors"])
    for rnd in result.rounds:
        n_contrib = len(rnd.contributing_factors)
        for cand in rnd.pool:
            writer.writerow(
                [
                    rnd.round,
                    cand.model_id,
                    "true" if cand.refined else "false",
                    repr(rnd.totals.get(cand, 0.0)),
                    "true" if cand == rnd.selected else "false",
                    n_contrib,
                ]
            )
    return out.getvalue()


def factors_csv(result: SelectionResult) -> str:
    """Per-factor diagnostics: which factors accumulated and who led."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["round", "factor_index", "factor", "accumulated", "top"])
    for rnd in result.rounds:
        for i, step in enumerate(rnd.steps):
            writer.writerow(
                [
                    rnd.round,
                    i,
                    repr(step.factor),
                    "true" if step.accumulated else "false",
                    " ".join(c.label for c in step.top),
                ]
            )
    return out.getvalue()
