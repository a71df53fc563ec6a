import json

import pytest

from app.harness.config_file import ConfigError
from app.harness.experiment import run_experiment, sweep
from app.models import SweepRun


def test_run_experiment_in_memory(small_config):
    result = run_experiment(small_config)
    assert result.slots_csv is None
    assert result.experiment_id is None
    # records ordered by run, then scheme, then slot
    n = small_config.n_slots
    assert [r.scheme for r in result.records] == ["proposed"] * n + ["baseline"] * n
    assert [r.slot for r in result.records[:n]] == list(range(n))


def test_sweep_rows_and_files(small_config, tmp_path, db_session):
    result = sweep(small_config, "tpm.c_pi", [0.0, 1.0], tmp_path, db_session)

    assert [(row.value, row.scheme) for row in result.rows] == [
        (0.0, "proposed"), (0.0, "baseline"), (1.0, "proposed"), (1.0, "baseline"),
    ]
    assert result.sweep_csv == tmp_path / "sweep.csv"
    assert (tmp_path / "tpm.c_pi=1" / "summary.json").exists()
    assert len(json.loads((tmp_path / "sweep.json").read_text())) == 4

    stored = db_session.query(SweepRun).filter(SweepRun.id == result.sweep_id).first()
    assert stored.param == "tpm.c_pi"
    assert len(json.loads(stored.table_json)) == 4


def test_sweep_baseline_ignores_fusion_weight(small_config):
    """The baseline never reads tpm.c_pi, so its rows match across values"""
    config = small_config.model_copy(update={"scheme": "baseline"})
    rows = sweep(config, "tpm.c_pi", ["0", "0.5"]).rows
    assert rows[0].mean_rmse == rows[1].mean_rmse
    assert rows[0].mean_aoa_error == rows[1].mean_aoa_error


def test_sweep_validates_before_running(small_config, tmp_path):
    with pytest.raises(ConfigError):
        sweep(small_config, "scheme", [1.0], tmp_path)
    with pytest.raises(ConfigError):
        sweep(small_config, "tpm.c_pi", [0.5, 2.0], tmp_path)
    assert not any(tmp_path.iterdir())
    with pytest.raises(ValueError):
        sweep(small_config, "tpm.c_pi", [])
