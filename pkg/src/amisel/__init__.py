"""Time/accuracy trade-off model selection toolkit."""

from .amis import AmisConfig, SelectionResult, best_within_budget, select
from .core import BenchmarkRecord, CandidateId, TradeoffPoint, aggregate_ar, relative_delta
from .ingest import AccuracyMetric, TradeoffMatrix, build_matrix, parse_benchmark_table
from .pareto import wrap_line

__version__ = "0.1.0"

__all__ = [
    "AccuracyMetric",
    "AmisConfig",
    "BenchmarkRecord",
    "CandidateId",
    "SelectionResult",
    "TradeoffMatrix",
    "TradeoffPoint",
    "aggregate_ar",
    "best_within_budget",
    "build_matrix",
    "parse_benchmark_table",
    "relative_delta",
    "select",
    "wrap_line",
]
