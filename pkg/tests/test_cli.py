import csv
import io
import math
from pathlib import Path

import pytest

from conftest import SCENARIOS
from muband.cli import main
from muband.errors import ParseError
from muband.pipelines import run_scenario
from muband.report import validate_report
from muband.scenario import load_scenario, parse_scenario

SUBCOMMAND = {"verify": "verify", "bubble": "bubble", "sweep": "sweep"}
EXPECTED_EXIT = {
    "cone_caps": 3,
    "hyperbolic_caps": 3,
    "cone_caps_narrow": 0,
}


def _rows(text, table):
    block = text.split(f"# {table}\n")[1].split("\n\n")[0]
    return list(csv.DictReader(io.StringIO(block)))


def test_width_command(capsys):
    assert main(["width", "--n", "7", "--kappa", "1", "--d", "0.44879895"]) == 0
    row = _rows(capsys.readouterr().out, "width")[0]
    assert row["ell"].startswith("0.285714")


def test_width_table_format(capsys):
    assert main(["width", "--n", "2", "--d", str(math.pi / 2), "--format", "table"]) == 0
    assert "classical" in capsys.readouterr().out


def test_model_and_potential_commands(capsys):
    assert main(["model", "--family", "hyperbolic", "--n", "4", "--sigma", "5", "--grid", "11"]) == 0
    rows = _rows(capsys.readouterr().out, "model")
    assert len(rows) == 11
    assert all(abs(float(r["scal"]) + 5) < 1e-9 for r in rows)
    assert main(["potential", "--n", "7", "--d", str(math.pi / 7), "--grid", "50"]) == 0
    rows = _rows(capsys.readouterr().out, "potential")
    assert min(float(r["margin"]) for r in rows) > 0


def test_numeric_error_exit_codes(capsys):
    assert main(["width", "--n", "7", "--d", "1.0"]) == 65
    assert main(["width", "--n", "7", "--d", "0.4", "--sigma", "1e6"]) == 70
    assert "ThresholdError" in capsys.readouterr().err


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.toml")), ids=lambda p: p.stem)
def test_shipped_scenarios_round_trip(path, tmp_path):
    sc = load_scenario(path)
    code = main([SUBCOMMAND[sc.kind], str(path), "--out", str(tmp_path)])
    assert code == EXPECTED_EXIT.get(sc.name, 0)
    assert validate_report(tmp_path) == []


def test_verify_cone_caps_metrics(tmp_path):
    rep = run_scenario(load_scenario(SCENARIOS / "cone_caps.toml"))
    assert rep.exit_code == 3
    assert rep.metrics["max_junction_mismatch"] < 1e-12
    assert rep.metrics["min_condition_margin"] > 0


def test_bubble_cylinder_centroid():
    rep = run_scenario(load_scenario(SCENARIOS / "flat_cylinder_h_linear.toml"))
    assert abs(rep.metrics["boundary_centroid_x"] - 1.0) <= 2 * 2.0 / 200


def test_hypothesis_violation_exit_code(tmp_path):
    text = (SCENARIOS / "cone_caps.toml").read_text()
    text = text.replace("width_factor = 1.1", "width_factor = 1.1\nscal_lower = [0.0, 41.0, 0.0]")
    p = tmp_path / "bad.toml"
    p.write_text(text)
    assert main(["verify", str(p)]) == 2


def test_parse_errors(tmp_path):
    with pytest.raises(ParseError):
        parse_scenario('[scenario]\nkind = "verify"\n[band]\nn = 7\nwidht = 1\n')
    with pytest.raises(ParseError):
        parse_scenario('[scenario]\nkind = "verify"\n[extra]\n')
    with pytest.raises(ParseError):
        parse_scenario("[scenario\n")
    with pytest.raises(ParseError):
        parse_scenario('[scenario]\nkind = "bubble"\n[grid]\nmode = "grid-3d"\n')
    p = tmp_path / "bad.toml"
    p.write_text('[scenario]\nkind = "sweep"\n[sweep]\nn = [7]\nbogus = 1\n')
    assert main(["sweep", str(p)]) == 64
    assert main(["verify", str(tmp_path / "missing.toml")]) == 64


def test_sweep_order_independent_of_jobs(tmp_path):
    path = SCENARIOS / "width_sweep.toml"
    main(["sweep", str(path), "--jobs", "1", "--out", str(tmp_path / "a")])
    main(["sweep", str(path), "--jobs", "3", "--out", str(tmp_path / "b")])
    a = (tmp_path / "a" / "sweep.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep.csv").read_bytes()


def test_csv_is_lossless(tmp_path):
    main(["width", "--n", "5", "--d", "0.3", "--out", str(tmp_path)])
    with open(tmp_path / "width.csv") as fh:
        row = next(csv.DictReader(fh))
    from muband.comparison import ell_nonneg

    assert float(row["ell"]) == ell_nonneg(5, 1.0, 0.3).value
