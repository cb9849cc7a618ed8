"""Experiment reports: deterministic CSV/JSON/SVG persistence.

Everything written here is byte-reproducible: floats are serialized with
``repr`` (shortest round-trip form), tables are RFC-4180 CSV with CRLF
line endings and UTF-8 text, JSON is sorted and indented, and the SVG
plots are assembled from fixed-precision strings with no library in the
loop.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class Table:
    header: list[str]
    rows: list[tuple]


@dataclass
class PlotSpec:
    """Either a scatter of (x, y) points or a log-decay polyline."""

    name: str
    kind: str  # 'scatter' | 'decay'
    xs: list[float]
    ys: list[float]
    title: str = ""


@dataclass
class ExperimentReport:
    subcommand: str
    config: dict
    version: str
    seed: int
    wall_time_s: float = 0.0
    tables: dict[str, Table] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    plots: list[PlotSpec] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(self.checks.values())


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (bool,)):
        return "true" if v else "false"
    return str(v)


def table_to_csv_bytes(table: Table) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def _svg_header(width: int, height: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def _scaled(values, lo, hi, out_lo, out_hi):
    span = hi - lo if hi > lo else 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def plot_to_svg_bytes(plot: PlotSpec, width: int = 480, height: int = 360) -> bytes:
    import math

    lines = _svg_header(width, height)
    margin = 40
    xs, ys = list(plot.xs), list(plot.ys)
    if plot.kind == "decay":
        ys = [math.log10(max(y, 1e-300)) for y in ys]
    if xs:
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        px = _scaled(xs, x0, x1, margin, width - margin)
        py = _scaled(ys, y0, y1, height - margin, margin)
        if plot.kind == "scatter":
            for a, b in zip(px, py):
                lines.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2" fill="steelblue"/>')
        else:
            path = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
            lines.append(
                f'<polyline points="{path}" fill="none" stroke="firebrick" stroke-width="1.5"/>'
            )
            for a, b in zip(px, py):
                lines.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2.5" fill="firebrick"/>')
    lines.append(
        f'<text x="{width // 2}" y="16" text-anchor="middle" font-size="12">{plot.title}</text>'
    )
    lines.append(
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>'
    )
    lines.append(
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>'
    )
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_report(report: ExperimentReport, out_dir, plots: bool = True) -> list[Path]:
    """Write summary.json, one CSV per table and optional SVG plots.

    File names are deterministic functions of the report content keys.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    summary = {
        "subcommand": report.subcommand,
        "config": report.config,
        "version": report.version,
        "seed": report.seed,
        "wall_time_s": report.wall_time_s,
        "summary": report.summary,
        "checks": report.checks,
        "all_passed": report.all_passed,
        "tables": sorted(report.tables),
    }
    p = out / "summary.json"
    p.write_bytes((json.dumps(summary, indent=2, sort_keys=True) + "\n").encode("utf-8"))
    written.append(p)
    for name in sorted(report.tables):
        path = out / f"{name}.csv"
        path.write_bytes(table_to_csv_bytes(report.tables[name]))
        written.append(path)
    if plots:
        for plot in report.plots:
            path = out / f"{plot.name}.svg"
            path.write_bytes(plot_to_svg_bytes(plot))
            written.append(path)
    return written


def stamp_wall_time(report: ExperimentReport, t_start: float) -> ExperimentReport:
    report.wall_time_s = round(time.time() - t_start, 3)
    return report
