"""Scenario configuration faults."""

from __future__ import annotations

from quantum_core.errors import SimulationError


class InvalidConfig(SimulationError):
    """A scenario was configured with inconsistent parameters."""


__all__ = ["InvalidConfig"]
