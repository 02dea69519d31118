import json
import logging

import pytest

from stretchchaos import __version__
from stretchchaos.__main__ import UsageError, main, parse_model_flags
from stretchchaos.geometry import GridMask
from stretchchaos.utils import setup_logging


def test_model_flags():
    flags = parse_model_flags(["--mu", "80", "--abcd", "1,1,1,0.5", "--auto-times", "--no-empirical",
                               "--c1=-1.5", "--rq-grid", "150,200"])
    assert flags == {"mu": 80.0, "a": 1.0, "b": 1.0, "c": 1.0, "d": 0.5, "auto_times": True,
                     "empirical": False, "c1": -1.5, "rq_grid": [150.0, 200.0]}


@pytest.mark.parametrize("extra", [["mu", "80"], ["--abcd", "1,2"]])
def test_bad_model_flags(extra):
    with pytest.raises(UsageError):
        parse_model_flags(extra)


def test_entropy_of_the_golden_mean_shift(tmp_path, capsys):
    path = tmp_path / "golden.txt"
    path.write_text("# golden mean\n1 1\n1 0\n")
    assert main(["entropy", str(path), "--max-word", "5"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["entropy"] == pytest.approx(0.4812118250596, abs=1e-10)
    assert report["irreducible"] is True
    assert report["word_counts"] == {"1": 2, "2": 3, "3": 5, "4": 8, "5": 13}


def test_entropy_report_carries_the_envelope(tmp_path, capsys):
    path = tmp_path / "golden.txt"
    path.write_text("1 1\n1 0\n")
    assert main(["entropy", str(path), "--max-word", "2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["schema"] == "sc-report/1"
    assert report["version"] == __version__
    assert report["command"] == "entropy"
    assert report["config"] == {"matrix": str(path), "kind": "transition", "max_word": 2}


def test_log_records_go_to_stderr(capsys):
    setup_logging("INFO")
    try:
        logging.getLogger("stretchchaos.cli").info("regions loaded")
        captured = capsys.readouterr()
        assert "regions loaded" in captured.err
        assert "regions loaded" not in captured.out
    finally:
        logging.basicConfig(force=True, handlers=[logging.NullHandler()])


def test_entropy_of_an_adjacency_matrix(tmp_path, capsys):
    path = tmp_path / "double.txt"
    path.write_text("2\n")
    assert main(["entropy", str(path), "--adjacency", "--max-word", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["eigenvalue"] == pytest.approx(2.0)
    assert report["edge_matrix"] == [[1, 1], [1, 1]]


@pytest.mark.parametrize("text", ["1 1\n1\n", "1 x\n0 1\n", "# nothing\n"])
def test_unreadable_matrix_exits_65(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    assert main(["entropy", str(path)]) == 65


def test_missing_matrix_exits_65(tmp_path):
    assert main(["entropy", str(tmp_path / "absent.txt")]) == 65


def test_cutcheck(tmp_path, capsys):
    full = GridMask.full(8, 6).write_pbm(tmp_path / "full.pbm")
    empty = GridMask.empty(8, 6).write_pbm(tmp_path / "empty.pbm")
    assert main(["cutcheck", str(full)]) == 0
    assert capsys.readouterr().out.strip() == "CUTS"
    assert main(["cutcheck", str(empty), "--direction", "down_up"]) == 0
    assert capsys.readouterr().out.strip() == "DOES NOT CUT"


def test_malformed_mask_exits_65(tmp_path):
    path = tmp_path / "bad.pbm"
    path.write_text("P1\n2 2\n0 1 1\n")
    assert main(["cutcheck", str(path)]) == 65
    assert main(["cutcheck", str(tmp_path / "absent.pbm")]) == 65


@pytest.mark.parametrize("argv", [
    ["verify", "henon"],
    ["frobnicate"],
    ["verify"],
    ["verify", "logistic", "--n-paths", "many"],
    ["entropy", "m.txt", "--bogus", "1"],
])
def test_usage_errors_exit_64(argv):
    assert main(argv) == 64


def test_bad_parameter_file_exits_64(tmp_path):
    params = tmp_path / "params.txt"
    params.write_text("mu = 4.5\n")
    assert main(["verify", "logistic", "--params", str(params), "-o", str(tmp_path)]) == 64


def test_verify_logistic_writes_a_report(tmp_path, capsys):
    code = main(["verify", "logistic", "-o", str(tmp_path), "--n-paths", "8", "--n-samples", "128",
                 "--max-period", "3", "--seed", "5"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "logistic: pass"
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["schema"] == "sc-report/1"
    assert report["command"] == "verify"
    assert report["seed"] == 5
    assert report["certificate"]["chaos_claim"] is True
    assert (tmp_path / "orbits.csv").read_text().startswith("itinerary,k,x,y,residual\n")
    assert (tmp_path / "plot.gp").exists()


def test_verify_reads_parameter_files(tmp_path):
    params = tmp_path / "params.txt"
    params.write_text("model counterexample\na = 0.3\nb = 0.6\n")
    code = main(["verify", "counterexample", "--params", str(params), "-o", str(tmp_path),
                 "--n-paths", "12", "--n-samples", "128", "--no-plots"])
    assert code == 1
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["status"] == "fail"
    assert report["details"]["control_as_expected"] is True
    assert not (tmp_path / "plot.gp").exists()


def test_orbit_command(tmp_path, capsys):
    assert main(["orbit", "li_yorke", "--itinerary", "011", "-o", str(tmp_path)]) == 0
    assert capsys.readouterr().out.startswith("011,3,")
    assert main(["orbit", "li_yorke", "--itinerary", "001", "-o", str(tmp_path)]) == 1
    report = json.loads((tmp_path / "orbits.json").read_text())
    assert report["failures"][0]["pair"] == [0, 1]


def test_itinerary_command(tmp_path, capsys):
    assert main(["itinerary", "logistic", "--x0", "0", "--n", "5", "-o", str(tmp_path)]) == 0
    assert capsys.readouterr().out.strip() == "00000"
    assert main(["itinerary", "logistic", "--x0", "0.5", "--n", "5", "-o", str(tmp_path)]) == 1
    assert capsys.readouterr().out.strip() == "!0:outside"


@pytest.mark.slow
def test_scan_writes_one_cell_per_pair(tmp_path, capsys):
    code = main(["scan", "duffing", "-o", str(tmp_path), "--n-samples", "64",
                 "--rq-grid", "150", "--rs-grid", "1.2,1.6", "--scan-paths", "2"])
    report = json.loads((tmp_path / "scan.json").read_text())
    assert code == (0 if report["accepted"] else 1)
    assert capsys.readouterr().out.strip() == f"accepted pairs: {report['accepted']}"
    assert report["command"] == "scan"
    assert [(c["rq"], c["rs"]) for c in report["cells"]] == [(150.0, 1.2), (150.0, 1.6)]
    for cell in report["cells"]:
        assert cell["min_crossings_q"] >= 0 and cell["min_crossings_s"] >= 0
        assert cell["accepted"] == (cell["min_crossings_q"] >= report["m"] and cell["min_crossings_s"] >= 1)
