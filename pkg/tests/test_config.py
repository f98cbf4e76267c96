import pytest

from heckezeros.config import load_config, parse_value
from heckezeros.errors import ConfigError
from heckezeros.models import PrecisionMode, RunConfig


def test_defaults_without_sources() -> None:
    assert load_config(environ={}) == RunConfig()


def test_priority_file_then_environment_then_flags(tmp_path) -> None:
    path = tmp_path / "run.env"
    path.write_text("weight=16\njobs=2\nt_grid=10,20\n", encoding="utf-8")
    environ = {"HECKEZEROS_JOBS": "3", "HECKEZEROS_WEIGHT": "18", "UNRELATED": "x"}
    config = load_config(str(path), overrides={"weight": 20}, environ=environ)
    assert config.weight == 20
    assert config.jobs == 3
    assert config.t_grid == (10.0, 20.0)


def test_value_parsing() -> None:
    assert parse_value("orders", "0, 1;2") == (0, 1, 2)
    assert parse_value("sigma_grid", "0.55,0.75") == (0.55, 0.75)
    assert parse_value("precision", "extended") is PrecisionMode.EXTENDED
    assert parse_value("log_level", "debug") == "DEBUG"
    assert parse_value("t_grid", "") == ()
    assert parse_value("weight", 12) == 12


@pytest.mark.parametrize("key, raw", [("colour", "blue"), ("weight", "twelve"), ("precision", "quad")])
def test_bad_settings(key, raw) -> None:
    with pytest.raises(ConfigError):
        parse_value(key, raw)


def test_missing_file(tmp_path) -> None:
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.env"), environ={})


def test_unknown_environment_key() -> None:
    with pytest.raises(ConfigError):
        load_config(environ={"HECKEZEROS_COLOUR": "blue"})
