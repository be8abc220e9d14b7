"""Differentiation faults."""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any

from quantum_core.errors import SimulationError


class NotPointerDiagonal(SimulationError):
    """The coupling does not commute with the pointer observable."""


class AmbiguousRole(SimulationError):
    """The overlap trajectory fits no role in the taxonomy."""

    def __init__(self, message: str, trajectory: Sequence[Any]) -> None:
        super().__init__(message)
        self.trajectory = list(trajectory)


class IrreversibleContext(SimulationError):
    """The environment was partially traced out, so no countertransformation exists."""


__all__ = ["AmbiguousRole", "IrreversibleContext", "NotPointerDiagonal"]
