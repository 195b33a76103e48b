"""Airframe parameter files: one `name value unit` triple per line."""

import dataclasses
import logging
from pathlib import Path
from typing import Dict, Union

from soarsim.errors import ConfigError
from soarsim.vehicle.models import AirframeParams

logger = logging.getLogger(__name__)

_FIELDS = {f.name for f in dataclasses.fields(AirframeParams)}


def parse_airframe_text(text: str) -> Dict[str, float]:
    values: Dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ConfigError(f"airframe line {lineno}: expected 'name value unit', got {raw!r}")
        name, value, _unit = parts
        if name not in _FIELDS:
            raise ConfigError(f"airframe line {lineno}: unknown parameter '{name}'")
        if name in values:
            raise ConfigError(f"airframe line {lineno}: duplicate parameter '{name}'")
        try:
            values[name] = float(value)
        except ValueError as e:
            raise ConfigError(f"airframe line {lineno}: '{value}' is not a number") from e
    return values


def load_airframe(path: Union[str, Path]) -> AirframeParams:
    """
    Load an airframe parameter file.

    Raises:
        ConfigError: Unreadable file, unknown or missing parameter, bad value
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read airframe file {path}: {e}") from e
    values = parse_airframe_text(text)
    missing = sorted(_FIELDS - values.keys())
    if missing:
        raise ConfigError(f"airframe file {path} is missing: {', '.join(missing)}")
    try:
        params = AirframeParams(**values)
    except ValueError as e:
        raise ConfigError(f"airframe file {path}: {e}") from e
    logger.info(f"Loaded airframe {path} (m={params.m} kg, b={params.b} m)")
    return params
