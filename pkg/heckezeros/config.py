"""Run configuration: defaults < key=value file < HECKEZEROS_* environment < flags."""
import os
from dataclasses import replace

from dotenv import dotenv_values, load_dotenv
from loguru import logger

from heckezeros.errors import ConfigError
from heckezeros.models import PrecisionMode, RunConfig

ENV_PREFIX = "HECKEZEROS_"


def _floats(raw: str) -> tuple:
    return tuple(float(v) for v in raw.replace(";", ",").split(",") if v.strip())


def _ints(raw: str) -> tuple:
    return tuple(int(v) for v in raw.replace(";", ",").split(",") if v.strip())


KEY_PARSERS = {
    "weight": int,
    "orders": _ints,
    "t_grid": _floats,
    "sigma_grid": _floats,
    "precision": PrecisionMode,
    "jobs": int,
    "out": str,
    "cache": str,
    "table_length": int,
    "seed": int,
    "t_floor": float,
    "max_height": float,
    "log_level": str.upper,
}


def parse_value(key: str, raw):
    """Convert one textual setting into its RunConfig type."""
    if key not in KEY_PARSERS:
        raise ConfigError(f"unknown configuration key {key!r}")
    if not isinstance(raw, str):
        return raw
    try:
        return KEY_PARSERS[key](raw.strip())
    except ValueError as e:
        raise ConfigError(f"bad value for {key}: {raw!r} ({e})") from e


def _apply(config: RunConfig, values: dict, source: str) -> RunConfig:
    updates = {}
    for key, raw in values.items():
        if raw is None:
            continue
        updates[key] = parse_value(key, raw)
    if updates:
        logger.debug("[cli] {} sets {}", source, sorted(updates))
    return replace(config, **updates)


def load_config(
    path: str | None = None,
    overrides: dict | None = None,
    environ: dict | None = None,
) -> RunConfig:
    """Resolve a RunConfig from all sources in priority order."""
    config = RunConfig()

    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file {path} not found")
        config = _apply(config, dict(dotenv_values(path)), path)

    if environ is None:
        load_dotenv()
        environ = os.environ
    env_values = {
        key[len(ENV_PREFIX):].lower(): value
        for key, value in environ.items()
        if key.startswith(ENV_PREFIX)
    }
    config = _apply(config, env_values, "environment")

    if overrides:
        config = _apply(config, overrides, "flags")
    return config
