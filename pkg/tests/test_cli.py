import csv
import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from vdwtails import cli, validation

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture()
def workdir(tmp_path):
    for name in ("f3_pair.toml", "two_level_atom.toml", "ground_pair.toml", "exchange_pair.toml"):
        shutil.copy(CONFIGS / name, tmp_path / name)
    return tmp_path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_curve_f3(workdir):
    out = workdir / "out"
    assert cli.main(["curve", "--config", str(workdir / "f3_pair.toml"), "--out", str(out)]) == 0
    rows = _rows(out / "f3_curve.csv")
    assert tuple(rows[0]) == cli.COLUMNS
    assert len(rows) == 65 and all(len(r) == 10 for r in rows)
    assert float(rows[1][0]) == 10.0 and float(rows[-1][0]) == pytest.approx(1e4, rel=1e-15)
    # 17 significant digits
    assert len(rows[1][1].split("e")[0].replace("-", "").replace(".", "")) == 17
    assert all(r[4] == r[5] == r[6] == "null" for r in rows[1:])
    meta = json.loads((out / "f3_curve.json").read_text())
    assert meta["rows"] == 64 and meta["units"]["c"] == 137.035999
    assert len(meta["config_sha256"]) == 64


def test_ground_pair_mixing_columns(workdir):
    out = workdir / "out"
    assert cli.main(["curve", "--config", str(workdir / "ground_pair.toml"), "--out", str(out)]) == 0
    rows = _rows(out / "ground_curve.csv")[1:]
    # identical atoms in the same state: exchange equals direct
    for r in rows:
        assert float(r[4]) == pytest.approx(float(r[1]), rel=1e-12)
        assert float(r[8]) == pytest.approx(0.0, abs=1e-12 * abs(float(r[7])))


def test_channel_selection(workdir):
    text = (workdir / "f3_pair.toml").read_text().replace('["wick", "pole", "width"]', '["wick"]')
    (workdir / "wick.toml").write_text(text)
    assert cli.main(["curve", "--config", str(workdir / "wick.toml"), "--out", str(workdir)]) == 0
    row = _rows(workdir / "f3_curve.csv")[1]
    assert row[1] != "null" and row[2:] == ["null"] * 8


def test_threads_from_environment(workdir, monkeypatch):
    serial, threaded = workdir / "serial", workdir / "threaded"
    assert cli.main(["curve", "--config", str(workdir / "exchange_pair.toml"), "--out", str(serial)]) == 0
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    assert cli.main(["curve", "--config", str(workdir / "exchange_pair.toml"), "--out", str(threaded)]) == 0
    for name in ("exchange_curve.csv", "exchange_curve.json"):
        assert (serial / name).read_bytes() == (threaded / name).read_bytes()
    monkeypatch.setenv(cli.THREADS_ENV, "0")
    assert cli.main(["curve", "--config", str(workdir / "exchange_pair.toml"), "--out", str(threaded)]) == 2


def test_retarded_rejected_for_shifts(workdir, capsys):
    cfg = str(workdir / "f3_pair.toml")
    assert cli.main(["curve", "--config", cfg, "--prescription", "retarded", "--out", str(workdir)]) == 2
    assert "inspect" in capsys.readouterr().err
    assert cli.main(["regimes", "--config", cfg, "--prescription", "retarded", "--out", str(workdir)]) == 2


def test_input_error_exit_code(workdir, capsys):
    bad = workdir / "bad.toml"
    bad.write_text((workdir / "f3_pair.toml").read_text().replace("points = 64", "points = 1"))
    assert cli.main(["curve", "--config", str(bad), "--out", str(workdir)]) == 2
    assert "bad.toml:" in capsys.readouterr().err
    assert cli.main(["curve", "--config", str(workdir / "missing.toml")]) == 2
    assert cli.main(["frobnicate"]) == 2


def test_resonance_exit_code(workdir, capsys):
    text = (workdir / "exchange_pair.toml").read_text().replace('ref_b = "g"', 'ref_b = "s"')
    (workdir / "res.toml").write_text(text)
    assert cli.main(["curve", "--config", str(workdir / "res.toml"), "--out", str(workdir)]) == 3
    assert "p1" in capsys.readouterr().err


def test_regimes_ground_pair(workdir, capsys):
    assert cli.main(["regimes", "--config", str(workdir / "ground_pair.toml"), "--out", str(workdir)]) == 0
    report = json.loads((workdir / "regimes.json").read_text())["report"]
    assert report["C6"] == 6.0
    assert report["C7"] == pytest.approx(23 / (4 * np.pi) * 137.035999 * 16, rel=1e-14)
    assert report["crossover_radius"] is None and report["envelopes"] == []


def test_regimes_f3_crossover(workdir):
    text = (workdir / "f3_pair.toml").read_text()
    text = text.replace("min = 10.0", "min = 15000.0").replace("max = 10000.0", "max = 1.0e6").replace(
        "points = 64", "points = 25"
    )
    (workdir / "cp.toml").write_text(text)
    assert cli.main(["regimes", "--config", str(workdir / "cp.toml"), "--out", str(workdir)]) == 0
    report = json.loads((workdir / "regimes.json").read_text())["report"]
    assert report["crossover_radius"] == pytest.approx(1291.956855166332, rel=1e-5)
    assert report["ratio_slope"] == pytest.approx(5.0, abs=0.1)


def test_regimes_malformed_grid(workdir):
    bad = workdir / "bad.toml"
    bad.write_text((workdir / "f3_pair.toml").read_text().replace("max = 10000.0", "max = 1.0"))
    assert cli.main(["regimes", "--config", str(bad), "--out", str(workdir)]) == 2


def test_validate(tmp_path, capsys):
    assert cli.main(["validate", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "validate.json").read_text())
    names = [c["name"] for c in report["checks"]]
    assert "identity_two_denominators(1,1) = 2*pi*i" in names
    assert "total ~ vdW at short range, slope 2" in names
    assert report["passed"] and all(c["passed"] for c in report["checks"])


def test_validate_reports_failure(monkeypatch, capsys):
    def broken():
        raise RuntimeError("boom")

    monkeypatch.setattr(validation, "CHECKS", validation.CHECKS + (broken,))
    assert cli.main(["validate"]) == 1
    assert "boom" in capsys.readouterr().out


def test_inspect_permittivity(workdir, capsys):
    args = ["inspect", "--config", str(workdir / "f3_pair.toml"), "--atom", "B", "--omega-re", "0.2"]
    assert cli.main(args + ["--prescription", "retarded", "--epsilon", "1e-3", "--density", "1e-4"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["permittivity"]["value"][0] > 1.0
    assert cli.main(args + ["--density", "1e-4"]) == 2
