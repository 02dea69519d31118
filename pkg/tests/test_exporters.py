import json

import numpy as np
import pytest

from stretchchaos import __version__
from stretchchaos.exporters import (
    BOUNDARY_HEADER,
    SCHEMA,
    CSVExporter,
    GnuplotExporter,
    JSONExporter,
    boundary_rows,
    dumps,
    iterate_rows,
)


def test_dumps_sorts_keys_and_spells_out_non_finite_floats():
    text = dumps({"b": float("nan"), "a": [np.float64(0.1), np.inf, -np.inf], "c": np.int64(3)})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert json.loads(text) == {"a": [0.1, "inf", "-inf"], "b": "nan", "c": 3}


def test_floats_round_trip_exactly():
    value = 0.1 + 0.2
    assert json.loads(dumps({"x": value}))["x"] == value


def test_json_report_carries_the_envelope(tmp_path):
    config = {"seed": 7, "tolerances": {"stretch": 1e-6}}
    path = JSONExporter({"status": "pass"}, tmp_path, name="report", command="verify",
                        config=config).export()
    assert path == tmp_path / "report.json"
    report = json.loads(path.read_text())
    assert report["schema"] == SCHEMA
    assert report["version"] == __version__
    assert report["command"] == "verify"
    assert report["seed"] == 7
    assert report["tolerances"] == {"stretch": 1e-6}
    assert report["status"] == "pass"


def test_json_payload_must_be_a_mapping(tmp_path):
    with pytest.raises(ValueError):
        JSONExporter([1, 2], tmp_path).export()


def test_csv_rows_must_match_the_header(tmp_path):
    rows = iterate_rows(np.array([[0.5, 0.25], [1.0 / 3.0, 2.0]]))
    path = CSVExporter(("n", "x", "y"), rows, tmp_path / "iterates.csv").export()
    lines = path.read_text().splitlines()
    assert lines[0] == "n,x,y"
    assert lines[2] == f"1,{1.0 / 3.0!r},2.0"
    with pytest.raises(ValueError):
        CSVExporter(("n", "x"), rows, tmp_path).export()


def test_boundary_rows_walk_all_four_sides(square):
    rows = boundary_rows(square)
    assert {r[0] for r in rows} == {"left", "down", "right", "up"}
    assert len(rows[0]) == len(BOUNDARY_HEADER)


def test_gnuplot_script_lists_every_layer(tmp_path):
    layers = [("boundary_R.csv", "2:3", "R", "lines"), ("regions.csv", "2:3", "K", "dots")]
    path = GnuplotExporter(layers, tmp_path, title="logistic").export()
    script = path.read_text()
    assert path.name == "plot.gp"
    assert "set datafile separator ','" in script
    assert "'boundary_R.csv' every ::1 using 2:3 with lines" in script
    assert "'regions.csv'" in script
    with pytest.raises(ValueError):
        GnuplotExporter([], tmp_path).export()
