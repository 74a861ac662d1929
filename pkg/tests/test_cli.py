import csv
import json
import math

import pytest

from pthill import cli
from pthill.errors import IntegrationError


def _write(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


ZERO = {
    "potential": {"preset": "zero"},
    "n_max": 3,
    "t_grid": [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, math.pi],
    "integrator": {"steps": 256},
    "tasks": ["bands"],
}


def test_zero_bands_csv(tmp_path):
    cfg = _write(tmp_path, ZERO)
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 0
    with open(tmp_path / "out" / "bands.csv", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["n", "t", "re_lambda", "im_lambda", "multiplicity"]
    keys = [(int(r["n"]), float(r["t"])) for r in rows]
    assert keys == sorted(keys)
    assert len(rows) == 7 * 8
    for r in rows:
        n, t = int(r["n"]), float(r["t"])
        exact = (2 * math.pi * n + t) ** 2
        assert abs(float(r["re_lambda"]) - exact) <= 1e-8 * max(1.0, exact)
        assert float(r["im_lambda"]) == 0.0


def test_report_schema_and_determinism(tmp_path):
    cfg = _write(tmp_path, ZERO)
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "b")]) == 0
    first = (tmp_path / "a" / "report.json").read_bytes()
    assert first == (tmp_path / "b" / "report.json").read_bytes()
    assert (tmp_path / "a" / "bands.csv").read_bytes() == (tmp_path / "b" / "bands.csv").read_bytes()
    report = json.loads(first)
    assert report["schema"] == 1 and report["status"] == "ok"
    for key in ("potential", "config", "tolerances", "bands", "real_gaps", "verdicts"):
        assert key in report
    assert report["verdicts"]["spectrum_real"] == "yes"


def test_float_format():
    assert cli.format_float(0.1) == "0.10000000000000001"
    assert cli.format_float(2.0) == "2.0"
    assert cli.dumps({"x": complex(1, -2), "y": float("nan")}) == '{\n  "x": [1.0, -2.0],\n  "y": null\n}'


@pytest.mark.parametrize(
    "data",
    [
        {"potential": {"preset": "nope"}},
        {"potential": {"preset": "zero"}, "n_max": 0},
        {"potential": {"preset": "zero"}, "unknown": 1},
        {"potential": {"preset": "zero"}, "t_grid": [0.5, 1.0]},
        {"potential": {"preset": "cos"}, "tasks": ["mathieu"]},
        {"potential": {"preset": "mathieu"}, "tasks": ["mathieu"], "mathieu": {"pair": [1.0, -1.0]}},
    ],
)
def test_validation_errors_exit_2(tmp_path, data):
    cfg = _write(tmp_path, data)
    assert cli.main(["run", str(cfg), "--out", str(tmp_path)]) == 2


def test_unreadable_config_exit_2(tmp_path):
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    assert cli.main(["run", str(bad)]) == 2
    assert cli.main(["frobnicate"]) == 2


def test_numerical_failure_exit_3(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise IntegrationError("forced failure")

    monkeypatch.setattr(cli, "build_spectrum", boom)
    cfg = _write(tmp_path, ZERO)
    assert cli.main(["run", str(cfg), "--out", str(tmp_path)]) == 3
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert report["status"] == "partial"
    assert report["errors"][0]["error"] == "IntegrationError"


def test_mathieu_task(tmp_path):
    data = {
        "potential": {"preset": "mathieu", "a": 1.0, "b": 1.0},
        "n_max": 2,
        "integrator": {"steps": 512},
        "tasks": ["mathieu"],
        "mathieu": {"pair": [2.0, 0.5]},
    }
    cfg = _write(tmp_path, data)
    assert cli.main(["run", str(cfg), "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert report["mathieu"]["max_deviation"] < 1e-8
    assert report["mathieu"]["spectral"] is True


def test_presets_listing(capsys):
    assert cli.main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in ("zero", "cos", "mathieu", "gasymov", "sawtooth"):
        assert name in out


def test_selftest_passes(capsys):
    assert cli.main(["selftest", "--quiet"]) == 0
