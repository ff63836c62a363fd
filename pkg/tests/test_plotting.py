"""Trace CSV and SVG rendering."""

import xml.etree.ElementTree as ET

import pytest

from pragmatune.perfdb import RowView
from pragmatune.plotting import render_svg, write_plot, write_trace_csv

SVG_NS = "{http://www.w3.org/2000/svg}"


def row(index: int, objective: float | None = None, status: str = "ok",
        duplicate_of: int | None = None) -> RowView:
    return RowView(
        index=index,
        params=(("P0", "x"),),
        objective=objective,
        elapsed=0.01,
        status=status,
        duplicate_of=duplicate_of,
        timestamp="2001-09-09T01:46:41+00:00",
    )


def mixed_rows() -> list[RowView]:
    return [
        row(1, 0.5),
        row(2, status="run_error"),
        row(3, 0.25),
        row(4, status="duplicate", duplicate_of=3),
        row(5, 0.75),
    ]


# ---- trace.csv -----------------------------------------------------------


def test_trace_csv_columns_and_prefix_minimum(tmp_path):
    path = tmp_path / "trace.csv"
    write_trace_csv(mixed_rows(), path)
    assert path.read_text(encoding="utf-8") == (
        "index,objective,best_so_far\n"
        "1,0.5,0.5\n"
        "2,,0.5\n"
        "3,0.25,0.25\n"
        "4,,0.25\n"
        "5,0.75,0.25\n"
    )


def test_trace_csv_best_is_empty_before_first_success(tmp_path):
    path = tmp_path / "trace.csv"
    write_trace_csv([row(1, status="compile_error"), row(2, 0.5)], path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[1] == "1,,"
    assert lines[2] == "2,0.5,0.5"


# ---- SVG -----------------------------------------------------------------


def test_svg_is_well_formed_with_both_series():
    root = ET.fromstring(render_svg(mixed_rows()))
    assert root.tag == f"{SVG_NS}svg"
    polylines = root.findall(f"{SVG_NS}polyline")
    strokes = {p.get("stroke") for p in polylines}
    assert strokes == {"#1f77b4", "#d62728"}
    circles = root.findall(f"{SVG_NS}circle")
    assert len(circles) == 3  # one marker per successful evaluation
    labels = {t.text for t in root.findall(f"{SVG_NS}text")}
    assert "Evaluation" in labels
    assert "Runtime (s)" in labels


def test_svg_point_counts_follow_the_trace():
    rows = mixed_rows()
    root = ET.fromstring(render_svg(rows))
    objective_line, best_line = (
        p for color in ("#1f77b4", "#d62728")
        for p in root.findall(f"{SVG_NS}polyline") if p.get("stroke") == color
    )
    assert len(objective_line.get("points").split()) == 3  # ok records
    assert len(best_line.get("points").split()) == 5  # every index from first ok on


def test_svg_requires_a_successful_record():
    with pytest.raises(ValueError):
        render_svg([row(1, status="run_error"), row(2, status="timeout")])


def test_svg_handles_a_single_record():
    root = ET.fromstring(render_svg([row(1, 0.5)]))
    assert len(root.findall(f"{SVG_NS}circle")) == 1


def test_svg_handles_a_flat_trace():
    rows = [row(i, 0.5) for i in range(1, 4)]
    root = ET.fromstring(render_svg(rows))
    assert len(root.findall(f"{SVG_NS}circle")) == 3


def test_write_plot_writes_the_svg_file(tmp_path):
    out = tmp_path / "plot.svg"
    write_plot(mixed_rows(), out)
    assert out.read_text(encoding="utf-8").startswith("<svg ")
