"""Report serialization: deterministic CSV and JSON tables plus SVG charts.

Float cells are rendered with repr(), so identical runs produce identical
bytes. Empty cells carry an empty value and n=0.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .experiment import ExperimentReport, ReportRow, METRICS, ROLES

CSV_HEADER = ("experiment", "layer_name", "subset", "gold_role", "metric", "value", "n")

# fixed palette, one color per (subset, role) series in charts
_COLORS = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
)


def reports_to_csv(reports: list[ExperimentReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for report in reports:
        for row in report.rows:
            value = "" if row.value is None else repr(float(row.value))
            writer.writerow(
                (
                    report.experiment,
                    row.layer_name,
                    row.subset,
                    row.gold_role,
                    row.metric,
                    value,
                    row.n,
                )
            )
    return buf.getvalue()


def write_csv(reports: list[ExperimentReport], path: str | Path) -> None:
    Path(path).write_text(reports_to_csv(reports), encoding="utf-8")


def report_to_dict(report: ExperimentReport) -> dict:
    return {
        "experiment": report.experiment,
        "layer_names": list(report.layer_names),
        "subsets": list(report.subsets),
        "config": report.config,
        "rows": [
            {
                "layer_name": r.layer_name,
                "subset": r.subset,
                "gold_role": r.gold_role,
                "metric": r.metric,
                "value": r.value,
                "n": r.n,
            }
            for r in report.rows
        ],
    }


def report_from_dict(data: dict) -> ExperimentReport:
    return ExperimentReport(
        experiment=data["experiment"],
        layer_names=list(data["layer_names"]),
        subsets=tuple(data["subsets"]),
        rows=[
            ReportRow(
                layer_name=r["layer_name"],
                subset=r["subset"],
                gold_role=r["gold_role"],
                metric=r["metric"],
                value=r["value"],
                n=r["n"],
            )
            for r in data["rows"]
        ],
        config=data["config"],
    )


def write_json(reports: list[ExperimentReport], path: str | Path) -> None:
    payload = {"reports": [report_to_dict(r) for r in reports]}
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def read_json(path: str | Path) -> list[ExperimentReport]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return [report_from_dict(d) for d in payload["reports"]]


def series_value(report: ExperimentReport, layer: str, subset: str, role: str, metric: str):
    for row in report.rows:
        if (
            row.layer_name == layer
            and row.subset == subset
            and row.gold_role == role
            and row.metric == metric
        ):
            return row.value
    return None


def default_chart_series(report: ExperimentReport, metric: str) -> list[tuple[str, str]]:
    """Which (subset, role) lines to draw for a metric."""
    split_subsets = [s for s in report.subsets if s != "all"]
    if metric == "mean_subject_probability":
        return [(s, role) for s in split_subsets for role in ("subject", "object")]
    return [(s, "all") for s in split_subsets]


def render_svg_chart(
    report: ExperimentReport, metric: str, series: list[tuple[str, str]] | None = None
) -> str:
    """A fixed-size line chart: layers on x, metric value on y in [0, 1]."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    if series is None:
        series = default_chart_series(report, metric)
    width, height = 640, 400
    left, right, top, bottom = 60, 200, 30, 40
    plot_w = width - left - right
    plot_h = height - top - bottom
    layers = report.layer_names
    n = len(layers)

    def x_at(i: int) -> float:
        if n == 1:
            return left + plot_w / 2
        return left + plot_w * i / (n - 1)

    def y_at(v: float) -> float:
        return top + plot_h * (1.0 - v)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left}" y="18" font-size="13" font-family="sans-serif">'
        f"{report.experiment}: {metric}</text>",
    ]
    # axes and horizontal gridlines at 0, 0.25, 0.5, 0.75, 1
    for quarter in range(5):
        v = quarter / 4
        y = y_at(v)
        parts.append(
            f'<line x1="{left}" y1="{y:.1f}" x2="{left + plot_w}" y2="{y:.1f}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{left - 8}" y="{y + 4:.1f}" font-size="10" '
            f'font-family="sans-serif" text-anchor="end">{v:.2f}</text>'
        )
    for i, layer in enumerate(layers):
        x = x_at(i)
        parts.append(
            f'<text x="{x:.1f}" y="{height - bottom + 16}" font-size="10" '
            f'font-family="sans-serif" text-anchor="middle">{layer}</text>'
        )
    parts.append(
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" '
        'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" '
        f'y2="{top + plot_h}" stroke="black" stroke-width="1"/>'
    )
    for si, (subset, role) in enumerate(series):
        color = _COLORS[si % len(_COLORS)]
        points = []
        for i, layer in enumerate(layers):
            value = series_value(report, layer, subset, role, metric)
            if value is None:
                continue
            points.append(f"{x_at(i):.1f},{y_at(value):.1f}")
        if points:
            parts.append(
                f'<polyline points="{" ".join(points)}" fill="none" '
                f'stroke="{color}" stroke-width="2"/>'
            )
        label = f"{subset}/{role}" if role != "all" else subset
        ly = top + 14 + 16 * si
        lx = left + plot_w + 12
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 24}" y="{ly}" font-size="11" '
            f'font-family="sans-serif">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(
    report: ExperimentReport,
    metric: str,
    path: str | Path,
    series: list[tuple[str, str]] | None = None,
) -> None:
    Path(path).write_text(render_svg_chart(report, metric, series), encoding="utf-8")
