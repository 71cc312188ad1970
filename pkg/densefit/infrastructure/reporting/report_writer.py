"""results.csv, results.json, per-axis SVG charts and report.md"""

import csv
import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

from pydantic import ValidationError

from densefit.application.dtos.result_dto import ResultRowDTO, ResultsFileDTO
from densefit.domain.entities.experiment import ResultRow
from densefit.domain.entities.objectives import METRIC_NAMES
from densefit.domain.errors import ReportError
from densefit.infrastructure.reporting.svg_charts import write_pve_chart

logger = logging.getLogger(__name__)

CSV_FIELDS = ["mix", "sweep_axis", "sweep_value", "scenes", "failed"] + [
    f"{name}_{stat}" for name in METRIC_NAMES for stat in ("mean", "std")
]

SPARSE_ONLY_NAMES = ("sparse2d", "sparse2d_only", "2d_only")


def _number(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def csv_rows(rows: Sequence[ResultRow]) -> List[dict]:
    lines = []
    for row in rows:
        line = {
            "mix": row.mix,
            "sweep_axis": row.sweep_axis,
            "sweep_value": _number(row.sweep_value),
            "scenes": row.scene_count,
            "failed": row.failed_count,
        }
        for name, (mean, std) in row.statistics().items():
            line[f"{name}_mean"] = _number(mean)
            line[f"{name}_std"] = _number(std)
        lines.append(line)
    return lines


def write_csv(rows: Sequence[ResultRow], path: Path) -> Path:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(csv_rows(rows))
    return path


def write_json(rows: Sequence[ResultRow], path: Path) -> Path:
    payload = ResultsFileDTO(rows=[ResultRowDTO.from_entity(row) for row in rows]).model_dump()
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.4g}"


def markdown_report(rows: Sequence[ResultRow]) -> str:
    lines = [
        "# Ablation results",
        "",
        "Per-image fits on synthetic scenes; every mix sees the same scenes.",
        "Input-encoder variants are out of scope: only the supervision axis is varied.",
        "",
        "| mix | axis | value | scenes | failed | PVE | MPJPE | PVE-T | DKD (px) |",
        "|---|---|---|---|---|---|---|---|---|",
    ]
    for row in rows:
        stats = row.statistics()
        cells = [f"{_fmt(stats[name][0])} ± {_fmt(stats[name][1])}" for name in METRIC_NAMES]
        lines.append(
            f"| {row.mix} | {row.sweep_axis} | {row.sweep_value:g} | {row.scene_count} | "
            f"{row.failed_count} | " + " | ".join(cells) + " |"
        )

    ratio = dense_to_sparse_ratio(rows)
    if ratio is not None:
        lines += ["", f"Mean PVE of the dense mix relative to the 2D-only mix: {ratio:.3f}"]
    return "\n".join(lines) + "\n"


def dense_to_sparse_ratio(rows: Sequence[ResultRow]) -> Optional[float]:
    """PVE(dense) / PVE(2D-only) at the first sweep value, when both mixes are present"""
    dense = sparse = None
    for row in rows:
        mean = row.mean("pve")
        if mean is None or row.sweep_value != rows[0].sweep_value:
            continue
        if row.mix in SPARSE_ONLY_NAMES:
            sparse = mean
        elif "dense" in row.mix and dense is None:
            dense = mean
    if dense is None or not sparse:
        return None
    return dense / sparse


def emit_report(rows: Sequence[ResultRow], outdir: Union[str, Path]) -> List[Path]:
    """Write every report file for ``rows`` into ``outdir``; contents are deterministic"""
    if not rows:
        raise ReportError("no result rows to report", field="rows")
    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        written = [write_csv(rows, outdir / "results.csv"), write_json(rows, outdir / "results.json")]
        for axis in sorted({row.sweep_axis for row in rows}):
            axis_rows = [row for row in rows if row.sweep_axis == axis]
            written.append(write_pve_chart(axis_rows, axis, outdir / f"pve_{axis}.svg"))
        report = outdir / "report.md"
        report.write_text(markdown_report(rows), encoding="utf-8")
        written.append(report)
    except OSError as exc:
        raise ReportError(f"cannot write report to {outdir}: {exc.strerror or exc}", field="outdir") from exc
    logger.info("Report written to %s (%d files)", outdir, len(written))
    return written


def load_rows(indir: Union[str, Path]) -> List[ResultRow]:
    """Rows back from a previous run's results.json"""
    path = Path(indir) / "results.json"
    try:
        payload = ResultsFileDTO.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ReportError(f"cannot read {path}: {exc.strerror or exc}", field="in") from exc
    except ValidationError as exc:
        raise ReportError(f"{path} is not a results file: {exc.errors()[0]['msg']}", field="in") from exc
    return [row.to_entity() for row in payload.rows]
