"""Scenario config files and ``key=value`` overrides."""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from quantum_core.errors import SimulationError
from scenarios.errors import InvalidConfig
from scenarios.models import ScenarioConfig

logger = logging.getLogger(__name__)


class ConfigParseError(SimulationError):
    """A config file or override could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column


def parse_config_text(text: str) -> dict[str, Any]:
    try:
        tree = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(tree, dict):
        raise ConfigParseError("Config root must be an object", 1, 1)
    return tree


def read_config(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"Cannot read config {path}: {exc.strerror}") from exc
    return parse_config_text(text)


def parse_value(raw: str) -> Any:
    """JSON literal when it parses, the raw string otherwise."""
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_override(tree: dict[str, Any], assignment: str) -> None:
    key, sep, raw = assignment.partition("=")
    if not sep or not key.strip():
        raise ConfigParseError(f"Override {assignment!r} is not key=value")
    *parents, leaf = key.strip().split(".")
    node = tree
    for part in parents:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigParseError(f"Override {assignment!r} descends into non-object {part!r}")
        node = child
    node[leaf] = parse_value(raw)


def resolve_config(
    tree: Mapping[str, Any],
    overrides: Iterable[str] = (),
    flag_values: Mapping[str, Any] | None = None,
) -> ScenarioConfig:
    """File tree, then ``--set`` overrides, then explicit flags; validated last."""
    merged = json.loads(json.dumps(tree))
    for assignment in overrides:
        apply_override(merged, assignment)
    for key, value in (flag_values or {}).items():
        if value is not None:
            merged[key] = value
    try:
        return ScenarioConfig.model_validate(merged)
    except ValidationError as exc:
        raise InvalidConfig(str(exc)) from exc


__all__ = [
    "ConfigParseError",
    "apply_override",
    "parse_config_text",
    "parse_value",
    "read_config",
    "resolve_config",
]
