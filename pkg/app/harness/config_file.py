"""
Flat `section.key = value` configuration files and dotted-path overrides.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Union

from pydantic import ValidationError

from app.schemas import SimConfig

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key"""


def parse_value(raw: str) -> Any:
    """JSON when possible, else a comma list of JSON-or-string items, else the string"""
    raw = raw.strip()
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        pass
    if "," in raw:
        return [parse_value(part) for part in raw.split(",")]
    if raw.lower() in ("none", "null"):
        return None
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    return raw


def _set_path(tree: Dict[str, Any], key: str, value: Any) -> None:
    parts = key.split(".")
    node = tree
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError(f"Config key '{key}': '{part}' is not a section")
        node = child
    node[parts[-1]] = value


def get_path(config: SimConfig, key: str) -> Any:
    node: Any = config
    for part in key.split("."):
        if not hasattr(node, part):
            raise ConfigError(f"Unknown config key '{key}'")
        node = getattr(node, part)
    return node


def _validate(tree: Dict[str, Any]) -> SimConfig:
    try:
        return SimConfig.model_validate(tree)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"])
        if first["type"] == "extra_forbidden":
            raise ConfigError(f"Unknown config key '{key}'") from e
        raise ConfigError(f"Invalid value for config key '{key}': {first['msg']}") from e


def parse_config_text(text: str) -> SimConfig:
    """
    Parse the flat config format.

    Raises:
        ConfigError: On malformed lines, unknown keys or invalid values
    """
    tree: Dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"Malformed config line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"Malformed config line {lineno}: empty key")
        _set_path(tree, key, parse_value(raw))
    return _validate(tree)


def load_config(path: Union[str, Path]) -> SimConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    config = parse_config_text(path.read_text())
    logger.info("Loaded config from %s", path)
    return config


def apply_overrides(config: SimConfig, overrides: Mapping[str, Any]) -> SimConfig:
    """New config with dotted-key overrides applied and re-validated"""
    tree = config.model_dump(mode="json")
    for key, value in overrides.items():
        _set_path(tree, key, value)
    return _validate(tree)


def numeric_override(config: SimConfig, key: str, value: Union[str, float]) -> SimConfig:
    """
    Override a numeric key, keeping integer keys integral.

    Raises:
        ConfigError: If the key is unknown or not numeric
    """
    current = get_path(config, key)
    if isinstance(current, bool) or not isinstance(current, (int, float)):
        raise ConfigError(f"Config key '{key}' is not numeric")
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Config key '{key}' needs a number, got {value!r}") from None
    if isinstance(current, int):
        if not number.is_integer():
            raise ConfigError(f"Config key '{key}' needs an integer, got {value}")
        number = int(number)
    return apply_overrides(config, {key: number})
