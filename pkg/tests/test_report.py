import json

from lamplighter.report import Result, RunManifest, csv_text, emit_report, format_value


def test_number_format():
    assert format_value(1 / 3) == "0.333333333333"
    assert format_value(3) == "3"
    assert format_value(True) == "true"
    assert format_value(float("nan")) == "nan"


def test_header_only_csv():
    assert csv_text(Result(["a", "b"])) == "a,b\n"


def test_json_round_trip(tmp_path):
    res = Result(["x"], [(0.1,), (2,)], {"note": "ok"})
    path, side = emit_report(res, "json", str(tmp_path / "r.json"), RunManifest("t", {"k": 1}, 5),
                             wall_clock=0.5)
    data = json.loads(open(path).read())
    assert data["manifest"]["seed"] == 5 and data["rows"] == [[0.1], [2]]
    assert "wall_clock_seconds" not in data["manifest"]
    assert json.loads(open(side).read())["wall_clock_seconds"] == 0.5


def test_kernel_rows(tmp_path):
    from lamplighter.kernel import build_kernel_table
    t = build_kernel_table(5)
    res = Result(["x", "y", "a"], list(t.rows()))
    path, _ = emit_report(res, "csv", str(tmp_path / "k.csv"), RunManifest("kernel", {}))
    lines = open(path).read().splitlines()
    assert len(lines) == 1 + 121
