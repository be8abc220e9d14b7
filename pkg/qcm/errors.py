"""Quantum causal model faults."""

from __future__ import annotations

from quantum_core.errors import SimulationError


class IncompleteInterventionSet(SimulationError):
    """A node of the process has no intervention."""


class NotDiagonal(SimulationError):
    """A factor has coherences, so no classical model exists."""

    def __init__(self, message: str, max_off_diagonal: float) -> None:
        super().__init__(message)
        self.max_off_diagonal = max_off_diagonal


class InvalidProcess(SimulationError):
    """The DAG or its factors are malformed."""


__all__ = ["IncompleteInterventionSet", "InvalidProcess", "NotDiagonal"]
