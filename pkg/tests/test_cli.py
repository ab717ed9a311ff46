"""End-to-end CLI runs through main(argv)."""

import json

import pytest

from ruinlab import __version__
from ruinlab.cache import cache_path
from ruinlab.cli import main


def run(argv, tmp_path, name="out"):
    path = tmp_path / name
    rc = main(list(argv) + ["--out", str(path)])
    return rc, path.read_text() if path.exists() else None


def strip_timestamp(text):
    return "\n".join(
        line for line in text.splitlines() if "generated_at" not in line
    )


def test_grid_csv_first_row(tmp_path):
    rc, text = run(["grid", "--p", "3/10", "--n", "3", "--format", "csv"], tmp_path)
    assert rc == 0
    lines = text.splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    assert any("schema_version" in ln for ln in meta)
    data = [ln for ln in lines if not ln.startswith("#")]
    assert data[0] == "x,f"
    assert data[1] == "2,1"  # ruin is certain up to fortune 2


def test_grid_json_schema(tmp_path):
    rc, text = run(["grid", "--p", "3/10", "--n", "3"], tmp_path)
    assert rc == 0
    doc = json.loads(text)
    assert "schema_version" in doc
    assert "generated_at" in doc
    assert doc["pieces"] == len(doc["function"]["breakpoints"])
    assert doc["config"]["mode"] == "exact"
    assert doc["config"]["params"]["command"] == "grid"


def test_output_reproducible_modulo_timestamp(tmp_path):
    argv = ["mc", "--x", "3", "--p", "3/10", "--n", "8", "--samples", "500", "--seed", "7"]
    rc1, t1 = run(argv, tmp_path, "a.json")
    rc2, t2 = run(argv, tmp_path, "b.json")
    assert rc1 == rc2 == 0
    assert strip_timestamp(t1) == strip_timestamp(t2)


def test_poly_json(tmp_path):
    rc, text = run(["poly", "--x", "3", "--n", "3"], tmp_path)
    assert rc == 0
    doc = json.loads(text)
    assert doc["coefficients"] == [0, 1, 1, -1]
    assert doc["eval"][0]["value"] == "0/1"  # p = 0


def test_mc_json_fields(tmp_path):
    rc, text = run(
        ["mc", "--x", "3", "--p", "3/10", "--n", "10", "--samples", "400", "--seed", "1"],
        tmp_path,
    )
    assert rc == 0
    doc = json.loads(text)
    assert 0.0 <= doc["estimate"] <= 1.0
    assert doc["samples"] == 400
    assert doc["config"]["seed"] == 1


def test_eventual_fractions_sum(tmp_path):
    rc, text = run(
        ["eventual", "--x", "3", "--p", "3/10", "--horizon", "60", "--samples", "300"],
        tmp_path,
    )
    assert rc == 0
    doc = json.loads(text)
    total = doc["doomed_frac"] + doc["censored_frac"]
    assert total == pytest.approx(1.0)


def test_digits_csv_row_count(tmp_path):
    rc, text = run(
        ["digits", "--p", "3/10", "--k", "2", "--samples", "100", "--format", "csv"],
        tmp_path,
    )
    assert rc == 0
    data = [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert data[0] == "digit,count"
    assert len(data) == 1 + 4  # header plus 2^k digits


def test_couple_clean_run(tmp_path):
    rc, text = run(
        ["couple", "--x", "3", "--p1", "1/5", "--p2", "2/5", "--horizon", "40",
         "--samples", "500"],
        tmp_path,
    )
    assert rc == 0
    doc = json.loads(text)
    assert doc["domination_violations"] == 0
    assert doc["doomed_frac_hi"] >= doc["doomed_frac_lo"]


def test_scan_row_count(tmp_path):
    rc, text = run(
        ["scan", "--rho", "3", "--p", "3/10", "--x-lo", "1.2", "--x-hi", "1.6",
         "--x-step", "1/5", "--horizon", "50", "--samples", "200", "--format", "csv"],
        tmp_path,
    )
    assert rc == 0
    data = [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert len(data) == 1 + 3  # 1.2, 1.4, 1.6


def test_verify_ok(tmp_path):
    rc, text = run(
        ["verify", "--x", "3", "--p", "3/10", "--steps", "40", "--samples", "50",
         "--zchain-j", "6"],
        tmp_path,
    )
    assert rc == 0
    doc = json.loads(text)
    assert doc["ok"] is True
    assert doc["closed_form"]["paths"] == 50


def test_exit_code_usage_errors(tmp_path, capsys):
    assert main(["grid", "--n", "3"]) == 2          # missing --p
    capsys.readouterr()
    assert main(["grid", "--p", "7/5", "--n", "3"]) == 2   # p out of range
    assert main(["mc", "--x", "0", "--p", "3/10", "--n", "4"]) == 2  # x <= 0
    assert main(["mc", "--x", "3", "--p", "zebra", "--n", "4"]) == 2
    assert main([]) == 2
    capsys.readouterr()


def test_exit_code_budget(tmp_path, capsys):
    assert main(["grid", "--p", "3/10", "--n", "8", "--budget", "10"]) == 3
    capsys.readouterr()


def test_exit_code_corrupt_cache(tmp_path, capsys):
    from fractions import Fraction

    path = cache_path(str(tmp_path), Fraction(3, 10), 4, "exact")
    with open(path, "w") as fh:
        fh.write("garbage {")
    rc = main(["grid", "--p", "3/10", "--n", "4", "--cache-dir", str(tmp_path),
               "--out", str(tmp_path / "x.json")])
    assert rc == 4
    capsys.readouterr()


def test_version_banner(capsys):
    rc = main(["--version"])
    out = capsys.readouterr().out
    assert rc == 0
    assert f"ruinlab {__version__}" in out
    assert "kernels" in out


def test_stdout_default(capsys):
    rc = main(["poly", "--x", "3", "--n", "2"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["coefficients"] == [0, 1]
