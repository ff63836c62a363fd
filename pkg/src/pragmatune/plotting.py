"""Search-trace rendering: a dependency-free SVG plus a trace.csv.

The SVG shows every successful evaluation's objective (blue) and the
best-so-far prefix minimum (red) against the evaluation index.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .evaluator import OK
from .optimizer import best_so_far
from .perfdb import format_seconds

WIDTH = 640
HEIGHT = 420
MARGIN_LEFT = 72
MARGIN_RIGHT = 24
MARGIN_TOP = 24
MARGIN_BOTTOM = 56
OBJECTIVE_COLOR = "#1f77b4"
BEST_COLOR = "#d62728"


def write_trace_csv(rows, path: str | Path) -> None:
    """Columns index,objective,best_so_far; one line per record.

    Failed and duplicate records keep their index with an empty objective;
    best_so_far stays empty until the first successful evaluation.
    """
    best_by_index = dict(best_so_far(rows))
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["index", "objective", "best_so_far"])
        for row in rows:
            objective = format_seconds(row.objective) if row.status == OK else ""
            best = best_by_index.get(row.index)
            writer.writerow([row.index, objective, "" if best is None else format_seconds(best)])


def render_svg(rows) -> str:
    """Self-contained SVG trace plot; needs at least one ok record."""
    ok_points = [(row.index, row.objective) for row in rows if row.status == OK]
    if not ok_points:
        raise ValueError("plot needs at least one successful evaluation")
    best_points = best_so_far(rows)

    xs = [index for index, _ in best_points]
    ys = [value for _, value in ok_points] + [value for _, value in best_points]
    x_lo, x_hi = min(min(xs), ok_points[0][0]), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    pad = (y_hi - y_lo) * 0.05 or abs(y_hi) * 0.05 or 0.5
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x: float) -> float:
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    def polyline(points, color: str) -> str:
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in points)
        return (
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    axis_y = HEIGHT - MARGIN_BOTTOM
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{axis_y}" '
        f'stroke="black"/>'
    )
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{axis_y}" x2="{WIDTH - MARGIN_RIGHT}" y2="{axis_y}" '
        f'stroke="black"/>'
    )
    for i in range(5):
        frac = i / 4
        x_val = x_lo + frac * (x_hi - x_lo)
        x_pix = sx(x_val)
        parts.append(f'<line x1="{x_pix:.2f}" y1="{axis_y}" x2="{x_pix:.2f}" '
                     f'y2="{axis_y + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{x_pix:.2f}" y="{axis_y + 20}" font-size="12" '
            f'text-anchor="middle">{x_val:.0f}</text>'
        )
        y_val = y_lo + frac * (y_hi - y_lo)
        y_pix = sy(y_val)
        parts.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{y_pix:.2f}" x2="{MARGIN_LEFT}" '
                     f'y2="{y_pix:.2f}" stroke="black"/>')
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{y_pix + 4:.2f}" font-size="12" '
            f'text-anchor="end">{y_val:.4g}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.2f}" y="{HEIGHT - 14}" font-size="14" '
        f'text-anchor="middle">Evaluation</text>'
    )
    parts.append(
        f'<text x="18" y="{MARGIN_TOP + plot_h / 2:.2f}" font-size="14" '
        f'text-anchor="middle" transform="rotate(-90 18 {MARGIN_TOP + plot_h / 2:.2f})">'
        f"Runtime (s)</text>"
    )
    parts.append(polyline(ok_points, OBJECTIVE_COLOR))
    for x, y in ok_points:
        parts.append(
            f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" fill="{OBJECTIVE_COLOR}"/>'
        )
    parts.append(polyline(best_points, BEST_COLOR))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_plot(rows, out_path: str | Path) -> None:
    Path(out_path).write_text(render_svg(rows), encoding="utf-8")
