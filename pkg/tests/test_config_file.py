from pathlib import Path

import pytest

from app.harness.config_file import (
    ConfigError,
    apply_overrides,
    get_path,
    load_config,
    numeric_override,
    parse_config_text,
    parse_value,
)
from app.schemas import SimConfig

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_parse_value():
    assert parse_value("3") == 3
    assert parse_value(" 1e-9 ") == 1e-9
    assert parse_value("-20, 10, 10") == [-20, 10, 10]
    assert parse_value("optimized") == "optimized"
    assert parse_value("None") is None
    assert parse_value("True") is True
    assert parse_value('[{"y": 20, "loss": 0.5}]') == [{"y": 20, "loss": 0.5}]


def test_parse_config_text():
    config = parse_config_text(
        """
        # comment line
        scene.nt = 16      # trailing comment
        trajectory.initial = -10, 10, 5
        blockage.static_window = none
        beamforming.mode = equal
        """
    )
    assert config.scene.nt == 16
    assert config.trajectory.initial == (-10.0, 10.0, 5.0)
    assert config.blockage.static_window is None
    assert config.beamforming.mode == "equal"
    # untouched keys keep their defaults
    assert config.timing.frame_len == 1024


def test_unknown_key_names_the_key():
    with pytest.raises(ConfigError, match="timing.tmax"):
        parse_config_text("timing.tmax = 1.0")


def test_malformed_line():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config_text("scene.nt = 8\nscene.nr 8")
    with pytest.raises(ConfigError, match="empty key"):
        parse_config_text("= 8")


def test_invalid_value_names_the_key():
    with pytest.raises(ConfigError, match="tpm.c_pi"):
        parse_config_text("tpm.c_pi = 2.0")
    with pytest.raises(ConfigError, match="scene.nt"):
        parse_config_text("scene.nt.x = 2")


def test_load_config(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("mc.runs = 3\nmc.seed = 11\n")
    config = load_config(path)
    assert config.mc.runs == 3
    assert config.mc.seed == 11

    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.conf")


def test_shipped_configs_load():
    assert load_config(CONFIGS / "default.conf").n_slots == 200
    assert load_config(CONFIGS / "smoke.conf").scene.nt == 8


def test_default_config_matches_model_defaults():
    config = load_config(CONFIGS / "default.conf")
    assert config.trajectory.accel == SimConfig().trajectory.accel
    assert config.filter.q_alpha == SimConfig().filter.q_alpha
    assert config.signal.dynamic_range_db == 60.0


def test_apply_overrides_revalidates():
    config = apply_overrides(SimConfig(), {"scene.nt": 8, "scene.nr": 8})
    assert config.scene.nt == 8
    assert config.budget == pytest.approx(2.0)
    with pytest.raises(ConfigError):
        apply_overrides(SimConfig(), {"scene.ns": 40})


def test_get_path():
    assert get_path(SimConfig(), "tpm.xi") == 0.8
    with pytest.raises(ConfigError, match="Unknown"):
        get_path(SimConfig(), "tpm.zeta")


def test_numeric_override():
    assert numeric_override(SimConfig(), "tpm.c_pi", "0.25").tpm.c_pi == 0.25
    assert numeric_override(SimConfig(), "mc.runs", 4.0).mc.runs == 4
    with pytest.raises(ConfigError, match="integer"):
        numeric_override(SimConfig(), "mc.runs", 2.5)
    with pytest.raises(ConfigError, match="not numeric"):
        numeric_override(SimConfig(), "scheme", 1)
    with pytest.raises(ConfigError, match="needs a number"):
        numeric_override(SimConfig(), "tpm.xi", "high")
