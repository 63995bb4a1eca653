import io
import json
import shutil
import subprocess

import pytest

from vosa import cli


def run(argv):
    out = io.StringIO()
    code = cli.dispatch(argv, out=out)
    return code, out.getvalue()


def reports(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_theta_passes_with_json():
    code, text = run(["theta", "--lattice", "D4", "--order", "2"])
    assert code == 0
    (r,) = reports(text)
    assert r["pass"] and r["example"] == "D4"
    assert list(r) == sorted(r)


def test_output_is_deterministic():
    argv = ["characters", "--lattice", "D6+[1]", "--sector", "NS-", "--order", "2"]
    assert run(argv) == run(argv)


def test_text_format():
    code, text = run(["glue", "--family", "d", "--n", "2", "--format", "text"])
    assert code == 0
    lines = text.splitlines()
    assert len(lines) == 4 and all(l.startswith("PASS glue") for l in lines)


def test_failing_check_exits_one():
    code, text = run(["n4", "lemma"])
    assert code == 1
    (r,) = reports(text)
    assert r["magnitudes"] == ["4", "2"] and not r["pass"]


def test_library_errors_become_fail_reports():
    code, text = run(["characters", "--lattice", "D6+"])
    assert code == 1
    assert "error" in reports(text)[0]


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    [],
    ["theta"],
    ["theta", "--lattice", "D4", "--points", "0,0.1"],
    ["theta", "--lattice", "D4", "--points", "x"],
    ["theta", "--lattice", "D4", "--order", "-1"],
    ["theta", "--lattice", "D4", "--tol", "0"],
    ["glue", "--family", "d"],
])
def test_usage_errors_exit_two(argv):
    assert run(argv)[0] == 2


def test_help_exits_zero(capsys):
    assert cli.dispatch(["--help"]) == 0


def test_order_from_environment(monkeypatch):
    monkeypatch.setenv("VOSA_ORDER", "3/2")
    assert cli.RunConfig().order == cli.Fraction(3, 2)
    monkeypatch.delenv("VOSA_ORDER")
    assert cli.RunConfig().order == 6


def test_parse_points():
    assert cli.parse_points("0,1; 0.3,0.9") == [1j, complex(0.3, 0.9)]


def test_modular_subcommand():
    code, text = run(["modular", "--example", "diagD", "--n", "1"])
    assert code == 0 and reports(text)[0]["pass"]


def test_console_script():
    exe = shutil.which("vosa")
    if exe is None:
        pytest.skip("package not installed")
    p = subprocess.run([exe, "classify", "--format", "text"], capture_output=True, text=True, timeout=120)
    assert p.returncode == 0 and p.stdout.startswith("PASS classify")
