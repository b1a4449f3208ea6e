"""YAML run configuration shared by the command-line subcommands."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import yaml

from .amis import AmisConfig
from .core import ValidationError
from .ingest import AccuracyMetric
from .sha import RungPlan

EXAMPLE_CONFIG = Path(__file__).parent / "data" / "example_config.yaml"

_SECTIONS = {
    "ingest": {"metric", "listed", "pool"},
    "amis": {
        "selection_count",
        "factor_count",
        "factor_min",
        "factor_max",
        "spacing",
        "rank_points",
        "stability_window",
        "dataset_weights",
    },
    "sha": {"plan"},
    "cluster": {"k"},
    "report": {"baseline", "width", "height"},
}


@dataclass(frozen=True)
class RunConfig:
    amis: AmisConfig = field(default_factory=AmisConfig)
    plan: RungPlan = field(default_factory=RungPlan)
    k: int = 3
    metric: AccuracyMetric = AccuracyMetric.AR
    listed: tuple[str, ...] = ()
    pool: Optional[Path] = None
    baseline: Optional[str] = None
    width: int = 640
    height: int = 480

    def with_amis(self, **changes: Any) -> "RunConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, amis=replace(self.amis, **changes)) if changes else self


def parse_config(data: Optional[Mapping[str, Any]], base_dir: Path = Path(".")) -> RunConfig:
    data = data or {}
    if not isinstance(data, Mapping):
        raise ValidationError([("config", "top level must be a mapping")])
    problems = []
    for section, body in data.items():
        if section not in _SECTIONS:
            problems.append((section, "unknown section"))
        elif body is not None and not isinstance(body, Mapping):
            problems.append((section, "must be a mapping"))
        else:
            for key in body or {}:
                if key not in _SECTIONS[section]:
                    problems.append((f"{section}.{key}", "unknown key"))
    if problems:
        raise ValidationError(problems)

    ingest = data.get("ingest") or {}
    amis = dict(data.get("amis") or {})
    if amis.get("dataset_weights") == {}:
        amis["dataset_weights"] = None
    try:
        amis_cfg = AmisConfig(**amis)
        plan = RungPlan(tuple(tuple(r) for r in (data.get("sha") or {}).get("plan", RungPlan().rungs)))
        metric = AccuracyMetric.parse(ingest.get("metric", "AR"))
    except (TypeError, ValueError) as exc:
        raise ValidationError([("config", str(exc))]) from None
    report = data.get("report") or {}
    pool = ingest.get("pool")
    return RunConfig(
        amis=amis_cfg,
        plan=plan,
        k=int((data.get("cluster") or {}).get("k", 3)),
        metric=metric,
        listed=tuple(ingest.get("listed") or ()),
        pool=(base_dir / pool) if pool else None,
        baseline=report.get("baseline"),
        width=int(report.get("width", 640)),
        height=int(report.get("height", 480)),
    )


def load_config(path: Optional[Union[str, Path]]) -> RunConfig:
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ValidationError([("config", f"{path}: {exc}")]) from None
    return parse_config(data, path.parent)
