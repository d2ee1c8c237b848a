"""Command-line interface: outputs, formats, exit codes, determinism."""

import json
import math
import os

import pytest

from hyplab import cli


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = cli.main(["--out", str(out)] + list(argv))
    return code, out


def test_fmt_twelve_significant_digits():
    assert cli.fmt(math.pi) == "3.14159265359"
    assert cli.fmt(1.0) == "1"
    assert cli.fmt(1e-30) == "1e-30"


def test_fmt_rationals():
    from fractions import Fraction
    assert cli.fmt(Fraction(17, 432)) == "17/432"
    assert cli.fmt(Fraction(3)) == "3/1"


def test_config_hash_ignores_key_order():
    a = cli.config_hash({"x": 1, "y": "z"})
    b = cli.config_hash({"y": "z", "x": 1})
    assert a == b and len(a) == 16
    assert cli.config_hash({"x": 2, "y": "z"}) != a


def test_count_tree_outputs(tmp_path):
    code, out = run(tmp_path, "count", "--backend", "tree", "--Rmax", "10")
    assert code == cli.EXIT_OK
    lines = (out / "orbit_census.csv").read_text().splitlines()
    assert lines[0].startswith("# config ")
    assert lines[1] == "R,count,complete"
    first = lines[2].split(",")
    assert int(first[1]) == 2 * 3 ** int(float(first[0])) - 1
    fit = json.loads((out / "entropy_fit.json").read_text())
    assert abs(fit["h_fit"] - math.log(3)) < 0.02
    assert "config_hash" in fit


def test_count_modular_census(tmp_path):
    code, out = run(tmp_path, "count", "--backend", "modular", "--T", "4")
    assert code == cli.EXIT_OK
    rows = (out / "geodesic_census.csv").read_text().splitlines()[2:]
    first_len = float(rows[0].split(",")[0])
    assert first_len == pytest.approx(2 * math.acosh(1.5), abs=1e-9)


def test_measure_tree_conformal(tmp_path):
    code, out = run(tmp_path, "measure", "--backend", "tree",
                    "--check", "conformal")
    assert code == cli.EXIT_OK
    rows = (out / "conformal_defect.csv").read_text().splitlines()[2:]
    assert all(r.rsplit(",", 1)[1] == "0" for r in rows)


def test_entropy_tree(tmp_path):
    code, out = run(tmp_path, "entropy", "--backend", "tree")
    assert code == cli.EXIT_OK
    data = json.loads((out / "htop.json").read_text())
    assert abs(data["h_top"] - math.log(3)) < 1e-6


def test_validate_passes_and_reports(tmp_path, capsys):
    code, out = run(tmp_path, "validate")
    assert code == cli.EXIT_OK
    text = capsys.readouterr().out
    assert "PASS" in text and "FAIL" not in text
    data = json.loads((out / "validate.json").read_text())
    assert data["all_pass"]
    assert all(rec["pass"] for rec in data["records"])


def test_validate_corruption_is_caught(tmp_path, capsys):
    code, out = run(tmp_path, "validate", "--corrupt-delta")
    assert code == cli.EXIT_VIOLATION
    assert "FAIL" in capsys.readouterr().out


def test_validate_deterministic_across_worker_counts(tmp_path):
    out1 = tmp_path / "w1"
    out2 = tmp_path / "w2"
    assert cli.main(["--out", str(out1), "--workers", "1",
                     "--seed", "3", "validate"]) == cli.EXIT_OK
    assert cli.main(["--out", str(out2), "--workers", "4",
                     "--seed", "3", "validate"]) == cli.EXIT_OK
    b1 = (out1 / "validate.json").read_bytes()
    b2 = (out2 / "validate.json").read_bytes()
    assert b1 == b2


def test_unknown_backend_is_usage_error(tmp_path):
    code, _ = run(tmp_path, "count", "--backend", "moebius")
    assert code == cli.EXIT_USAGE


def test_measure_flat_refused(tmp_path):
    code, _ = run(tmp_path, "measure", "--backend", "flat")
    assert code == cli.EXIT_USAGE


def test_config_file_round_trip(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("backend=tree\nRmax=8\n")
    code = cli.main(["--out", str(tmp_path / "o"), "--config", str(cfg),
                     "count"])
    assert code == cli.EXIT_OK
