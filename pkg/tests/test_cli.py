import csv
import io
import json
import os
import subprocess
import sys

import pytest

from dnwave.cli import main, parse_range, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_sub(*argv, env=None):
    full_env = dict(os.environ, **(env or {}))
    return subprocess.run([sys.executable, "-m", "dnwave", *argv], capture_output=True, text=True, env=full_env)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_range():
    assert parse_range("0.5") == [0.5]
    assert parse_range("0.1:0.3:3") == pytest.approx([0.1, 0.2, 0.3])
    assert parse_range("0.4:0.9:1") == [0.4]
    for bad in ("a", "1:2", "0:1:0", "0:1:x"):
        with pytest.raises(UsageError):
            parse_range(bad)


def test_wave_default(capsys):
    code, out, _ = run(capsys, "wave", "--c", "2", "--omega", "1.5", "--alpha", "0.25", "--kappa", "0.5")
    data = json.loads(out)
    assert code == 0
    assert data["params"]["A"] == pytest.approx(1.0, rel=1e-15)
    assert data["params"]["beta"] == 0.75
    assert data["residuals"]["r1_rel"] <= 1e-9 and data["residuals"]["r2_rel"] <= 1e-9


def test_wave_inadmissible(capsys):
    code, out, err = run(capsys, "wave", "--c", "1", "--omega", "1", "--alpha", "0.1", "--kappa", "0.5")
    assert code == 2 and out == ""
    assert "c > 1" in err


def test_wave_degenerate_modulus(capsys):
    code, _, err = run(capsys, "wave", "--kappa", "1")
    assert code == 2 and "kappa" in err


def test_wave_csv(capsys):
    code, out, _ = run(capsys, "wave", "--format", "csv")
    table = rows(out)
    assert code == 0 and len(table) == 1
    assert out.count("\n") == 2
    assert float(table[0]["A"]) == pytest.approx(1.0)


def test_wave_verbose_includes_profiles(capsys):
    _, out, _ = run(capsys, "wave", "--N", "64", "--verbose")
    assert len(json.loads(out)["profiles"]["phi"]) == 64


def test_check_default_exit_zero(capsys):
    code, out, _ = run(capsys, "check")
    report = json.loads(out)
    assert code == 0, f"verdict {report['verdict']}"


def test_check_second_tuple(capsys):
    code, out, _ = run(capsys, "check", "--c", "3", "--omega", "3", "--alpha", "0.2", "--kappa", "0.3", "--format", "csv")
    assert code == 0 and rows(out)[0]["verdict"] == "stable"


def test_check_broken_symmetry_exits_one(capsys):
    code, out, _ = run(capsys, "check", "--break-symmetry")
    assert code == 1 and json.loads(out)["verdict"] == "unstable"


def test_check_malformed_flag(capsys):
    code, _, err = run(capsys, "check", "--kapa", "0.5")
    assert code == 2 and "usage" in err


def test_check_rejects_range(capsys):
    code, _, err = run(capsys, "check", "--kappa", "0.1:0.5:3")
    assert code == 2 and "single value" in err


def test_figure1_default(capsys):
    code, out, _ = run(capsys, "figure1", "--format", "csv")
    table = rows(out)
    assert code == 0 and len(table) == 91
    assert list(table[0]) == ["kappa", "es2_variant_a", "es2_variant_b", "numeric_oracle"]
    assert all(float(r["numeric_oracle"]) < 0 for r in table)


def test_figure1_single_point_reports_match(capsys):
    code, out, _ = run(capsys, "figure1", "--kappa", "0.5")
    data = json.loads(out)
    assert code == 0 and len(data["rows"]) == 1
    assert data["matching_variant"] == "a"


def test_figure1_logs_matching_variant():
    res = run_sub("figure1", "--kappa", "0.5", "--format", "csv", env={"DNWAVE_LOG": "info"})
    assert res.returncode == 0
    assert "matching" in res.stderr and ": a" in res.stderr
    assert "INFO" not in res.stdout


def test_figure1_range_violation(capsys):
    code, _, err = run(capsys, "figure1", "--kappa", "0.01:0.5:3")
    assert code == 2 and "0.02" in err


def test_out_and_force(capsys, tmp_path):
    path = tmp_path / "f.csv"
    assert run(capsys, "figure1", "--kappa", "0.5", "--format", "csv", "--out", str(path))[0] == 0
    first = path.read_text()
    assert len(rows(first)) == 1
    code, _, err = run(capsys, "figure1", "--kappa", "0.3", "--out", str(path))
    assert code == 2 and "--force" in err
    assert path.read_text() == first
    assert run(capsys, "figure1", "--kappa", "0.3", "--format", "csv", "--out", str(path), "--force")[0] == 0
    assert rows(path.read_text())[0]["kappa"] == "0.29999999999999999"


def test_sweep_default_exit_zero():
    res = run_sub("sweep", "--format", "csv")
    table = rows(res.stdout)
    assert len(table) >= 9
    assert res.returncode == 0, [r["verdict"] for r in table]


def test_sweep_skips_inadmissible():
    res = run_sub("sweep", "--c", "0.5:2:2", "--omega", "1.5", "--alpha", "0.25", "--kappa", "0.3", "--N", "64", "--format", "csv")
    assert len(rows(res.stdout)) == 1
    assert "c > 1" in res.stderr


def test_sweep_empty(capsys):
    code, out, err = run(capsys, "sweep", "--c", "0.5", "--kappa", "0.3", "--format", "csv")
    assert out == ",".join(["c", "omega", "alpha", "kappa", "N", "min_eig_H", "maxReJH", "es2_value_variant_a", "es2_value_variant_b", "weinstein_L", "weinstein_Q", "weinstein_ones", "verdict"]) + "\n"
    assert code == 0


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    data = json.loads(out)
    assert code == 0 and data["passed"] and data["n_checks"] > 100
    assert "checks" not in data


def test_selftest_verbose_and_deterministic(capsys):
    _, a, _ = run(capsys, "selftest", "--verbose")
    _, b, _ = run(capsys, "selftest", "--verbose")
    assert a == b
    checks = json.loads(a)["checks"]
    assert all({"name", "value", "threshold", "passed"} <= set(c) for c in checks)


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"kappa": 0.7, "format": "csv", "N": 64}))
    _, out, _ = run(capsys, "wave", "--config", str(cfg))
    assert float(rows(out)[0]["kappa"]) == 0.7 and rows(out)[0]["N"] == "64"
    _, out, _ = run(capsys, "wave", "--config", str(cfg), "--kappa", "0.3", "--format", "json")
    assert json.loads(out)["params"]["kappa"] == 0.3


def test_config_errors(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"kapa": 0.7}))
    code, _, err = run(capsys, "wave", "--config", str(cfg))
    assert code == 2 and "kapa" in err
    code, _, _ = run(capsys, "wave", "--config", str(tmp_path / "missing.json"))
    assert code == 2


def test_seventeen_digit_output(capsys):
    _, out, _ = run(capsys, "wave", "--format", "csv")
    gamma = rows(out)[0]["gamma"]
    assert len(gamma.replace("0.", "", 1).lstrip("0")) == 17


def test_check_repeatable(capsys):
    a = run(capsys, "check", "--kappa", "0.3", "--N", "64")[1]
    b = run(capsys, "check", "--kappa", "0.3", "--N", "64")[1]
    assert a == b
