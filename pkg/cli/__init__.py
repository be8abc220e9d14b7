"""Command-line front door."""

from .config import ConfigParseError, resolve_config
from .selftest import run_selftest

__all__ = ["ConfigParseError", "resolve_config", "run_selftest"]
