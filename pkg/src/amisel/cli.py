"""Command-line front end.

Exit status: 0 on success, 1 on validation or data errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .amis import AmisConfig, best_within_budget, select, weighted_means
from .cluster import kmeans_1d
from .config import RunConfig, load_config
from .core import AmiselError, CandidateId
from .ingest import AccuracyMetric, TradeoffMatrix, build_matrix, parse_benchmark_table, parse_pool
from .pareto import wrap_line
from .posemetrics import (
    Intrinsics,
    SymmetrySet,
    add_metric,
    load_vertices,
    mspd,
    mssd,
    pose_from_row,
    recall,
)
from .report import (
    comparison_table,
    factors_csv,
    rounds_csv,
    scatter_svg,
    selection_csv,
    table_csv,
    table_text,
)
from .sha import CurveParams, RungPlan, curve_evaluator, random_curves, run_sha

POSE_FIELDS = ("r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33", "tx", "ty", "tz")
POSE_COLUMNS = tuple(f"{side}_{f}" for side in ("est", "gt") for f in POSE_FIELDS)


class CliError(AmiselError):
    pass


def _write(path: Optional[str], data) -> None:
    if path is None:
        return
    p = Path(path)
    if isinstance(data, bytes):
        p.write_bytes(data)
    else:
        p.write_text(data)


def _weights(text: Optional[str]) -> Optional[dict[str, float]]:
    if not text:
        return None
    out = {}
    for chunk in text.split(","):
        name, sep, value = chunk.partition("=")
        if not sep:
            raise CliError(f"--weights expects name=value pairs, got {chunk!r}")
        out[name.strip()] = float(value)
    return out


def _load(args, cfg: RunConfig) -> TradeoffMatrix:
    pool_path = getattr(args, "pool", None) or cfg.pool
    pool = parse_pool(Path(pool_path).read_bytes()) if pool_path else None
    records = parse_benchmark_table(Path(args.results).read_bytes(), pool=pool)
    metric = AccuracyMetric.parse(args.metric) if getattr(args, "metric", None) else cfg.metric
    listed = tuple(args.listed.split(",")) if getattr(args, "listed", None) else cfg.listed
    return build_matrix(records, metric, listed)


def _amis_config(args, cfg: RunConfig) -> AmisConfig:
    cfg = cfg.with_amis(
        selection_count=getattr(args, "k", None),
        spacing=getattr(args, "spacing", None),
        dataset_weights=_weights(getattr(args, "weights", None)),
    )
    return cfg.amis


def _read_selection(path: str, matrix: TradeoffMatrix) -> list[CandidateId]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "model_id" not in rows[0]:
        raise CliError(f"{path}: expected a selection CSV with model_id and refined columns")
    out = []
    for row in rows:
        refined = row.get("refined", "false").strip().lower() == "true"
        try:
            out.append(matrix.candidate(CandidateId(row["model_id"].strip(), refined)))
        except KeyError as exc:
            raise CliError(f"{path}: {exc.args[0]}") from None
    return out


def cmd_validate(args, cfg: RunConfig, out) -> int:
    pool_path = args.pool or cfg.pool
    pool = parse_pool(Path(pool_path).read_bytes()) if pool_path else None
    records = parse_benchmark_table(Path(args.results).read_bytes(), pool=pool)
    if not records:
        print(f"ok: 0 records in {args.results}", file=out)
        return 0
    matrix = build_matrix(records, AccuracyMetric.MSPD)
    print(
        f"ok: {len(records)} records, {len(matrix.candidates)} candidates, "
        f"{len(matrix.datasets)} datasets ({', '.join(matrix.datasets)}), complete grid",
        file=out,
    )
    return 0


def cmd_pareto(args, cfg: RunConfig, out) -> int:
    matrix = _load(args, cfg)
    if args.dataset not in matrix.datasets:
        raise CliError(f"dataset {args.dataset!r} not in {', '.join(matrix.datasets)}")
    pts = matrix.dataset_points(args.dataset)
    front = wrap_line(pts)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["model_id", "refined", "time_ms", "accuracy"])
    for c, p in front.points:
        w.writerow([c.model_id, "true" if c.refined else "false", repr(p.time_ms), repr(p.accuracy)])
    if args.svg:
        _write(
            args.svg,
            scatter_svg(
                pts,
                front,
                front.candidates,
                cfg.width,
                cfg.height,
                matrix.accuracy_metric.label,
                f"{args.dataset}: wrap-line",
            ),
        )
    return 0


def cmd_select(args, cfg: RunConfig, out) -> int:
    matrix = _load(args, cfg)
    amis_cfg = _amis_config(args, cfg)
    result = select(matrix, amis_cfg)
    text = selection_csv(result, matrix)
    out.write(text)
    _write(args.out, text)
    _write(args.diagnostics, rounds_csv(result))
    _write(args.factors, factors_csv(result))
    return 0


def cmd_budget(args, cfg: RunConfig, out) -> int:
    matrix = _load(args, cfg)
    selected = _read_selection(args.selection, matrix)
    weights = _weights(args.weights) or cfg.amis.dataset_weights
    best = best_within_budget(matrix, selected, args.budget_ms, weights)
    t, a = weighted_means(matrix, best, weights)
    print(f"{best.label},{t:.2f},{a:.2f}", file=out)
    return 0


def _read_times(path: str) -> list[tuple[str, float]]:
    data = Path(path).read_bytes()
    header = data.decode("utf-8-sig").splitlines()[0].strip() if data else ""
    if header.split(",") == ["name", "time_ms"]:
        with io.StringIO(data.decode("utf-8-sig")) as fh:
            return [(r["name"], float(r["time_ms"])) for r in csv.DictReader(fh)]
    matrix = build_matrix(parse_benchmark_table(data), AccuracyMetric.MSPD)
    return [(c.label, matrix.mean_time(c)) for c in matrix.candidates]


def cmd_cluster(args, cfg: RunConfig, out) -> int:
    values = _read_times(args.times)
    k = args.k or cfg.k
    result = kmeans_1d(values, k, init=args.init)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["name", "time_ms", "cluster", "center_ms"])
    for name, t in values:
        idx = result.assignments[name]
        w.writerow([name, repr(t), idx, f"{result.centers[idx]:.4f}"])
    if args.png:
        from .plotting import plot_clusters

        plot_clusters(values, result, args.png)
    return 0


def _read_curves(path: str) -> dict[str, CurveParams]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or set(rows[0]) != {"name", "asymptote", "rate", "offset"}:
        raise CliError(f"{path}: expected columns name,asymptote,rate,offset")
    return {
        r["name"]: CurveParams(float(r["asymptote"]), float(r["rate"]), float(r["offset"] or 0.0))
        for r in rows
    }


def cmd_sha(args, cfg: RunConfig, out) -> int:
    if args.curves:
        curves = _read_curves(args.curves)
    else:
        curves = random_curves([f"backbone_{i:02d}" for i in range(args.demo)], seed=args.seed)
    plan = RungPlan.parse(args.plan) if args.plan else cfg.plan
    result = run_sha(list(curves), curve_evaluator(curves), plan)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rung", "budget_epochs", "name", "score", "kept"])
    for e in result.log:
        w.writerow([e.rung, e.budget, e.candidate, f"{e.score:.6f}", "true" if e.kept else "false"])
    out.write(buf.getvalue())
    print(f"# survivor: {result.survivor}; populations {'->'.join(map(str, result.populations()))}", file=out)
    _write(args.log, buf.getvalue())
    if args.png:
        from .plotting import plot_sha

        plot_sha(result, args.png)
    return 0


def _read_poses(path: str):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != POSE_COLUMNS:
            raise CliError(f"{path}: expected columns {','.join(POSE_COLUMNS)}")
        rows = list(reader)
    pairs = []
    for i, row in enumerate(rows, start=1):
        try:
            est = pose_from_row([float(row[f"est_{f}"]) for f in POSE_FIELDS])
            gt = pose_from_row([float(row[f"gt_{f}"]) for f in POSE_FIELDS])
        except ValueError as exc:
            raise CliError(f"{path}: row {i}: {exc}") from None
        pairs.append((est, gt))
    return pairs


def _read_symmetries(path: Optional[str]) -> SymmetrySet:
    if not path:
        return SymmetrySet()
    transforms = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if text:
            try:
                transforms.append(pose_from_row([float(v) for v in text.replace(",", " ").split()]))
            except ValueError as exc:
                raise CliError(f"{path}: line {lineno}: {exc}") from None
    return SymmetrySet(tuple(transforms))


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def cmd_metrics(args, cfg: RunConfig, out) -> int:
    model = load_vertices(args.model)
    sym = _read_symmetries(args.symmetries)
    cam = Intrinsics(args.fx, args.fy, args.cx, args.cy)
    pairs = _read_poses(args.poses)
    if not pairs:
        raise CliError(f"{args.poses}: no poses")
    pts = model.points
    diameter = float(max(np.linalg.norm(pts - p, axis=1).max() for p in pts))
    rows = []
    for est, gt in pairs:
        rows.append((add_metric(est, gt, model), mssd(est, gt, model, sym), mspd(est, gt, model, sym, cam)))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pose", "add_m", "mssd_m", "mspd_px"])
    for i, (a, s, p) in enumerate(rows, start=1):
        w.writerow([i, f"{a:.9g}", f"{s:.9g}", f"{p:.9g}"])
    out.write(buf.getvalue())
    _write(args.out, buf.getvalue())

    mssd_th = [f * diameter for f in _floats(args.mssd_thresholds)]
    mspd_th = _floats(args.mspd_thresholds)
    r_mssd = recall([r[1] for r in rows], mssd_th)
    r_mspd = recall([r[2] for r in rows], mspd_th)
    r_add = recall([r[0] for r in rows], [args.add_threshold * diameter])
    print(f"# diameter_m={diameter:.6g}", file=out)
    print(f"# recall_mssd={r_mssd:.2f} recall_mspd={r_mspd:.2f} recall_add={r_add:.2f}", file=out)
    return 0


def cmd_report(args, cfg: RunConfig, out) -> int:
    matrix = _load(args, cfg)
    baseline = args.baseline or cfg.baseline
    if not baseline:
        raise CliError("no baseline given (use --baseline or report.baseline in the config)")
    selected = _read_selection(args.selection, matrix)
    weights = _weights(args.weights) or cfg.amis.dataset_weights
    rows = comparison_table(selected, matrix, baseline, weights)
    text = table_text(rows, baseline)
    out.write(text)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "comparison.txt").write_text(text)
    (out_dir / "comparison.csv").write_text(table_csv(rows))
    for d in matrix.datasets:
        pts = matrix.dataset_points(d)
        svg = scatter_svg(
            pts, wrap_line(pts), selected, cfg.width, cfg.height, matrix.accuracy_metric.label, d
        )
        (out_dir / f"scatter_{d}.svg").write_bytes(svg)
    if args.figures:
        from .amis import SelectionResult
        from .plotting import plot_tradeoffs

        plot_tradeoffs(matrix, SelectionResult(tuple(selected), ()), out_dir / "tradeoffs.png")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amisel",
        description="Pick models with good inference-time/accuracy trade-offs from benchmark tables.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p, results=True):
        p.add_argument("--config", help="YAML run configuration")
        if results:
            p.add_argument("results", help="benchmark CSV")
            p.add_argument("--pool", help="candidate-pool sidecar CSV")
            p.add_argument("--metric", help="accuracy metric: AR, MSPD, MSSD, VSD, ADD, mean_of_listed")
            p.add_argument("--listed", help="comma-separated metrics for mean_of_listed")

    p = sub.add_parser("validate", help="check a benchmark CSV")
    p.add_argument("--config", help="YAML run configuration")
    p.add_argument("results", help="benchmark CSV")
    p.add_argument("--pool", help="candidate-pool sidecar CSV")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("pareto", help="wrap-line of one dataset")
    common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--svg", help="write a scatter plot to this SVG file")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("select", help="run the iterative trade-off selection")
    common(p)
    p.add_argument("-k", type=int, help="number of models to select")
    p.add_argument("--spacing", choices=("geometric", "linear"))
    p.add_argument("--weights", help="dataset weights, e.g. lmo=1,ycbv=2")
    p.add_argument("--out", help="write the selection CSV here")
    p.add_argument("--diagnostics", help="write per-round points CSV here")
    p.add_argument("--factors", help="write per-factor diagnostics CSV here")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("budget", help="best selected model within a time budget")
    common(p)
    p.add_argument("--selection", required=True, help="selection CSV written by 'select'")
    p.add_argument("--budget-ms", type=float, required=True)
    p.add_argument("--weights", help="dataset weights, e.g. lmo=1,ycbv=2")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("cluster", help="1-D k-means of inference times")
    common(p, results=False)
    p.add_argument("times", help="CSV with name,time_ms columns, or a benchmark CSV")
    p.add_argument("-k", type=int)
    p.add_argument("--init", choices=("optimal", "quantile"), default="optimal")
    p.add_argument("--png", help="write a cluster figure here")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("sha", help="successive halving with synthetic learning curves")
    common(p, results=False)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--curves", help="CSV with name,asymptote,rate,offset")
    src.add_argument("--demo", type=int, metavar="N", help="generate N random curves")
    p.add_argument("--seed", type=int, default=0, help="seed for --demo curves")
    p.add_argument("--plan", help="rung plan, e.g. 5:5,10:3,15:1")
    p.add_argument("--log", help="write the rung log CSV here")
    p.add_argument("--png", help="write a rung figure here")
    p.set_defaults(func=cmd_sha)

    p = sub.add_parser("metrics", help="ADD / MSSD / MSPD for pose pairs")
    common(p, results=False)
    p.add_argument("--model", required=True, help="point list, one 'x y z' per line (meters)")
    p.add_argument("--poses", required=True, help="CSV of estimated and ground-truth poses")
    p.add_argument("--symmetries", help="one 12-number transform per line")
    p.add_argument("--fx", type=float, required=True)
    p.add_argument("--fy", type=float, required=True)
    p.add_argument("--cx", type=float, default=0.0)
    p.add_argument("--cy", type=float, default=0.0)
    p.add_argument("--mssd-thresholds", default="0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5",
                   help="fractions of the object diameter")
    p.add_argument("--mspd-thresholds", default="5,10,15,20,25,30,35,40,45,50", help="pixels")
    p.add_argument("--add-threshold", type=float, default=0.1, help="fraction of the object diameter")
    p.add_argument("--out", help="write per-pose errors CSV here")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("report", help="comparison table, SVG scatter plots and figures")
    common(p)
    p.add_argument("--selection", required=True, help="selection CSV written by 'select'")
    p.add_argument("--baseline", help="baseline candidate label")
    p.add_argument("--weights", help="dataset weights, e.g. lmo=1,ycbv=2")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-figures", dest="figures", action="store_false", help="skip matplotlib PNG figures")
    p.set_defaults(func=cmd_report)
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(getattr(args, "config", None))
        return args.func(args, cfg, out)
    except (AmiselError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return 1


def main() -> None:
    sys.exit(run())
