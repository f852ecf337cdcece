import json
import os

import pytest

from lamplighter.cli import COMMANDS, run

SMALL = {
    "coupling": ["--radius", "8", "--trials", "2000", "--seed", "7"],
    "kernel": ["--radius", "5"],
    "harmonic-check": ["--group", "C2 wr Z2", "--radius", "8", "--tol", "1e-8"],
    "growth-profile": ["--group", "C2 wr Z2", "--radius", "20"],
    "entropy-exact": ["--group", "C2 wr Z", "--steps", "6"],
    "audit-inequalities": ["--trials", "300", "--seed", "1", "--steps", "5"],
    "visit-profile": ["--group", "Z2", "--steps", "256", "--trials", "10"],
    "entropy-growth": ["--group", "C2 wr Z2", "--steps", "512", "--trials", "10"],
    "expansion-check": ["--steps", "8", "--radius", "16"],
    "binomial-bound": ["--steps", "30", "--radius", "3"],
}


def test_every_subcommand_has_a_smoke_case():
    assert set(SMALL) == set(COMMANDS)


@pytest.mark.parametrize("cmd", sorted(SMALL))
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_smoke_and_determinism(cmd, fmt, tmp_path):
    out = str(tmp_path / f"{cmd}.{fmt}")
    assert run([cmd, *SMALL[cmd], "--out", out]) == 0
    first = open(out, "rb").read()
    assert run([cmd, *SMALL[cmd], "--out", out, "--threads", "4"]) == 0
    assert open(out, "rb").read() == first
    assert os.path.exists(out + ".manifest.json")
    if fmt == "json":
        data = json.loads(first)
        assert data["manifest"]["subcommand"] == cmd


def test_coupling_columns(tmp_path):
    out = str(tmp_path / "c.csv")
    assert run(["coupling", "--radius", "4", "--trials", "500", "--out", out]) == 0
    assert open(out).readline().strip() == "r,estimate,stderr"


def test_harmonic_check_reports_residual(tmp_path):
    out = str(tmp_path / "h.json")
    assert run(["harmonic-check", "--group", "C2 wr Z2", "--radius", "10", "--out", out]) == 0
    assert json.load(open(out))["summary"]["max_residual"] < 1e-8


def test_default_output_directory(tmp_path, monkeypatch):
    monkeypatch.setenv("LAMPLIGHTER_OUT", str(tmp_path))
    assert run(["kernel", "--radius", "2"]) == 0
    assert (tmp_path / "kernel.csv").exists()


@pytest.mark.parametrize("argv", [
    ["nope"],
    ["coupling", "--group", "C2 wr"],
    ["kernel", "--group", "C2 wr", "--radius", "3"],
    ["harmonic-check", "--group", "C2 wr"],
    ["coupling", "--trials", "0"],
    ["kernel", "--radius", "500"],
    ["kernel", "--radius", "3", "--format", "json", "--out", "x.csv"],
    ["entropy-growth", "--group", "Z wr Z2"],
    ["coupling", "--steps", "x"],
])
def test_parameter_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(argv) == 2


def test_unwritable_path_is_failure(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert run(["kernel", "--radius", "2", "--out", str(blocker / "k.csv")]) == 1
