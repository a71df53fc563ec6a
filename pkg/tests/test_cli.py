import csv
import json

import pytest

from app.cli import build_parser, main
from tests.conftest import SMALL_OVERRIDES


@pytest.fixture
def small_conf(tmp_path):
    path = tmp_path / "small.conf"
    path.write_text("".join(f"{key} = {value}\n" for key, value in SMALL_OVERRIDES.items()))
    return path


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_simulate_writes_outputs(small_conf, tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["simulate", "--config", str(small_conf), "--out", str(out), "--scheme", "proposed", "--seed", "5"])

    assert code == 0
    with (out / "slots.csv").open() as f:
        rows = list(csv.DictReader(f))
    assert {r["scheme"] for r in rows} == {"proposed"}
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["mc"]["seed"] == 5
    assert "proposed: mean RMSE" in capsys.readouterr().out


def test_set_overrides_apply(small_conf, tmp_path):
    out = tmp_path / "run"
    code = main(["simulate", "--config", str(small_conf), "--out", str(out),
                 "--set", "beamforming.mode=equal", "--set", "tpm.c_pi=0.3"])
    assert code == 0
    config = json.loads((out / "summary.json").read_text())["config"]
    assert config["beamforming"]["mode"] == "equal"
    assert config["tpm"]["c_pi"] == 0.3


def test_sweep_writes_table(small_conf, tmp_path, capsys):
    out = tmp_path / "sweep"
    code = main(["sweep", "--config", str(small_conf), "--out", str(out),
                 "--param", "tpm.c_pi", "--values", "0, 1", "--set", "scheme=proposed"])
    assert code == 0
    with (out / "sweep.csv").open() as f:
        rows = list(csv.DictReader(f))
    assert [r["value"] for r in rows] == ["0.0", "1.0"]
    assert (out / "tpm.c_pi=0" / "slots.csv").exists()
    assert "Sweep CSV" in capsys.readouterr().out


def test_config_errors_exit_2(small_conf, tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "missing.conf"), "--out", str(tmp_path)]) == 2
    assert main(["simulate", "--config", str(small_conf), "--out", str(tmp_path), "--set", "tpm.zeta=1"]) == 2
    assert main(["simulate", "--config", str(small_conf), "--out", str(tmp_path), "--set", "novalue"]) == 2
    assert main(["sweep", "--config", str(small_conf), "--out", str(tmp_path),
                 "--param", "scheme", "--values", "1"]) == 2
    assert "Config error" in capsys.readouterr().err


def test_empty_sweep_values_fail(small_conf, tmp_path):
    assert main(["sweep", "--config", str(small_conf), "--out", str(tmp_path),
                 "--param", "tpm.c_pi", "--values", ","]) == 1
