"""Report tables and SVG plots.

All rendering is a pure function of its inputs (no timestamps, no
locale), so outputs are golden-file testable byte for byte. Display
rounding: F1 as a percentage to 2 decimals, calibration metrics to 4;
the CSV twin keeps full precision.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DomainError, EmptyInputError
from .stats import RunAggregate, pct_change

METHODS = ("baseline", "temperature", "dropout", "ensemble")
METRICS = ("ece", "f1", "mce", "rmsce")
# for F1 higher is better; for the calibration errors lower is better
_HIGHER_BETTER = {"ece": False, "f1": True, "mce": False, "rmsce": False}


@dataclass(frozen=True)
class MetricComparison:
    delta_sign: str  # "better" | "worse" | "same"
    significant: bool

    @property
    def marker(self) -> str:
        if self.delta_sign == "same":
            return "="
        symbol = "+" if self.delta_sign == "better" else "-"
        return symbol + ("*" if self.significant else "")


@dataclass(frozen=True)
class ReportRow:
    dataset: str
    method: str
    ece: RunAggregate
    f1: RunAggregate
    mce: RunAggregate
    rmsce: RunAggregate
    vs_baseline: Optional[dict[str, MetricComparison]] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")

    def aggregate_for(self, metric: str) -> RunAggregate:
        return getattr(self, metric)


def _fmt_cal(agg: RunAggregate) -> str:
    return f"{agg.mean:.4f} ±{agg.std:.4f}"


def _fmt_f1(agg: RunAggregate) -> str:
    return f"{100 * agg.mean:.2f} ±{100 * agg.std:.2f}"


def _cell(row: ReportRow, metric: str) -> str:
    text = _fmt_f1(row.aggregate_for(metric)) if metric == "f1" else _fmt_cal(row.aggregate_for(metric))
    if row.vs_baseline is not None and metric in row.vs_baseline:
        text += f" [{row.vs_baseline[metric].marker}]"
    return text


def render_report(rows: Sequence[ReportRow]) -> tuple[str, str]:
    """Deterministic text table plus its full-precision CSV twin."""
    if not rows:
        raise EmptyInputError("no report rows")
    baselines: dict[str, ReportRow] = {}
    for row in rows:
        if row.method == "baseline":
            baselines[row.dataset] = row
    for row in rows:
        if row.dataset not in baselines:
            raise DomainError(f"missing baseline row for dataset {row.dataset!r}")

    header = ["dataset", "method", "ECE", "ECE red. %", "F1 %", "MCE", "RMSCE"]
    table_rows = [header]
    for row in rows:
        if row.method == "baseline":
            reduction = ""
        else:
            base_ece = baselines[row.dataset].ece.mean
            reduction = "" if base_ece == 0 else f"{pct_change(base_ece, row.ece.mean):.2f}"
        table_rows.append(
            [
                row.dataset,
                row.method,
                _cell(row, "ece"),
                reduction,
                _cell(row, "f1"),
                _cell(row, "mce"),
                _cell(row, "rmsce"),
            ]
        )
    widths = [max(len(r[i]) for r in table_rows) for i in range(len(header))]
    lines = []
    for i, r in enumerate(table_rows):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    text = "\n".join(lines) + "\n"

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = ["dataset", "method"]
    for metric in METRICS:
        cols += [f"{metric}_mean", f"{metric}_std", f"{metric}_marker"]
    cols.append("ece_reduction_pct")
    writer.writerow(cols)
    for row in rows:
        out = [row.dataset, row.method]
        for metric in METRICS:
            agg = row.aggregate_for(metric)
            marker = ""
            if row.vs_baseline is not None and metric in row.vs_baseline:
                marker = row.vs_baseline[metric].marker
            out += [format(agg.mean, ".17g"), format(agg.std, ".17g"), marker]
        if row.method == "baseline" or baselines[row.dataset].ece.mean == 0:
            out.append("")
        else:
            out.append(format(pct_change(baselines[row.dataset].ece.mean, row.ece.mean), ".17g"))
        writer.writerow(out)
    return text, buf.getvalue()


def compare(
    metric: str, baseline_mean: float, treated_mean: float, significant: bool
) -> MetricComparison:
    if treated_mean == baseline_mean:
        return MetricComparison("same", significant)
    improved = (treated_mean > baseline_mean) == _HIGHER_BETTER[metric]
    return MetricComparison("better" if improved else "worse", significant)


_SIZE = 440
_MARGIN = 40
_PLOT = _SIZE - 2 * _MARGIN


def _fx(x: float) -> str:
    return format(_MARGIN + x * _PLOT, ".2f")


def _fy(y: float) -> str:
    return format(_SIZE - _MARGIN - y * _PLOT, ".2f")


def _svg_open(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
        f'viewBox="0 0 {_SIZE} {_SIZE}">',
        f'<title>{title}</title>',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_PLOT}" height="{_PLOT}" '
        'fill="white" stroke="black"/>',
    ]


def render_reliability_svg(
    points: Sequence[tuple[float, float]], metrics: dict[str, float]
) -> bytes:
    """Unit-square reliability diagram: diagonal, one dot per non-empty bin."""
    if not points:
        raise EmptyInputError("no reliability points to plot")
    parts = _svg_open("reliability diagram")
    parts.append(
        f'<line x1="{_fx(0)}" y1="{_fy(0)}" x2="{_fx(1)}" y2="{_fy(1)}" '
        'stroke="gray" stroke-dasharray="4 4"/>'
    )
    for conf, rate in points:
        parts.append(f'<circle cx="{_fx(conf)}" cy="{_fy(rate)}" r="4" fill="steelblue"/>')
    y = _MARGIN + 14
    for name in ("ece", "mce", "rmsce"):
        if name in metrics:
            parts.append(
                f'<text x="{_MARGIN + 6}" y="{y}" font-size="12" font-family="monospace">'
                f"{name.upper()}={metrics[name]:.4f}</text>"
            )
            y += 14
    parts.append(
        f'<text x="{_SIZE // 2}" y="{_SIZE - 8}" font-size="12" text-anchor="middle">'
        "mean predicted probability</text>"
    )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


def render_histogram_svg(
    correct_pct: Sequence[float],
    incorrect_pct: Sequence[float],
    log_scale: bool = False,
) -> bytes:
    """Two overlaid per-bin percentage series; zero cells are omitted on log axes."""
    if len(correct_pct) != len(incorrect_pct):
        raise DomainError("series must have equal length")
    if not any(correct_pct) and not any(incorrect_pct):
        raise EmptyInputError("all-zero histogram")
    bins = len(correct_pct)
    floor = 1e-2  # log-axis lower bound, in percent
    top = max(max(correct_pct), max(incorrect_pct))

    def bar_height(pct: float) -> Optional[float]:
        if pct <= 0:
            return None  # zero cells are never drawn at -inf
        if not log_scale:
            return pct / top
        if pct < floor:
            pct = floor
        return math.log(pct / floor) / math.log(max(top, floor * 10) / floor)

    parts = _svg_open("confidence histogram" + (" (log scale)" if log_scale else ""))
    width = _PLOT / bins
    for series, color, shrink in ((correct_pct, "green", 0.0), (incorrect_pct, "red", 0.25)):
        for i, pct in enumerate(series):
            h = bar_height(pct)
            if h is None:
                continue
            x0 = _MARGIN + (i + shrink) * width
            w = width * (1 - 2 * shrink)
            parts.append(
                f'<rect x="{x0:.2f}" y="{_fy(h)}" width="{w:.2f}" '
                f'height="{h * _PLOT:.2f}" fill="{color}" fill-opacity="0.6"/>'
            )
    parts.append(
        f'<text x="{_SIZE // 2}" y="{_SIZE - 8}" font-size="12" text-anchor="middle">'
        "predicted probability</text>"
    )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")
