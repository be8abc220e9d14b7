"""Pointer couplings: interaction Hamiltonians diagonal in the pointer basis."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from config import settings
from quantum_core.gates import IDENTITY2, SIGMA_Y
from quantum_core.models import HilbertSpace, Observable, PureState, UnitaryEvolution

from .errors import NotPointerDiagonal

logger = logging.getLogger(__name__)

COMMUTATOR_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class PointerCoupling:
    """Interaction ``H`` on ``pointer.space (x) environment`` with ``[H, O_P (x) I] = 0``.

    The system self-Hamiltonian is neglected, so ``unitary(t) = exp(-i H t)``
    commutes with the pointer observable for every duration.
    """

    pointer: Observable
    environment: HilbertSpace
    hamiltonian: np.ndarray
    strengths: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        space = self.space
        hamiltonian = np.array(self.hamiltonian, dtype=complex)
        if hamiltonian.shape != (space.total_dim, space.total_dim):
            raise NotPointerDiagonal(
                f"Hamiltonian shape {hamiltonian.shape} does not match {space.labels}."
            )
        lifted = np.kron(self.pointer.matrix, np.eye(self.environment.total_dim))
        commutator = hamiltonian @ lifted - lifted @ hamiltonian
        norm = float(np.linalg.norm(commutator))
        if norm > COMMUTATOR_TOL:
            raise NotPointerDiagonal(f"Coupling fails to commute with the pointer (norm {norm:.3e}).")
        hamiltonian.setflags(write=False)
        object.__setattr__(self, "hamiltonian", hamiltonian)

    @property
    def system_label(self) -> str:
        return self.pointer.space.labels[0]

    @property
    def environment_labels(self) -> frozenset[str]:
        return frozenset(self.environment.labels)

    @property
    def space(self) -> HilbertSpace:
        return self.pointer.space.concat(self.environment)

    def unitary(self, duration: float) -> UnitaryEvolution:
        return UnitaryEvolution.from_generator(self.hamiltonian, duration, space=self.space)

    def ready_state(self) -> PureState:
        """Environment in its all-zero ready state."""
        return PureState.basis(self.environment)

    def orthogonalization_time(self) -> float:
        """First time the most distant pointer branches have orthogonal records.

        Exact for two-level pointers coupled to a bath built by ``bath``.
        """
        if not self.strengths:
            raise NotPointerDiagonal("Orthogonalization time is only known for bath couplings.")
        spread = float(self.pointer.eigenvalues[-1] - self.pointer.eigenvalues[0])
        return math.pi / (2 * max(self.strengths) * spread)

    @classmethod
    def bath(
        cls,
        pointer: Observable,
        strengths: Sequence[float],
        prefix: str = "env",
        labels: Sequence[str] | None = None,
    ) -> PointerCoupling:
        """``H = O_P (x) sum_k g_k sigma_y^(k)`` over ``len(strengths)`` qubits.

        Each bath qubit rotates by an angle proportional to the pointer value,
        so the branch overlap is ``prod_k cos(g_k (q_i - q_j) t)``.
        """
        if labels is None:
            labels = [f"{prefix}{k}" for k in range(len(strengths))]
        elif len(labels) != len(strengths):
            raise ValueError("One environment label is needed per coupling strength.")
        environment = HilbertSpace.qubits(*labels)
        total = np.zeros((environment.total_dim, environment.total_dim), dtype=complex)
        for k, strength in enumerate(strengths):
            term = np.array([[1.0]], dtype=complex)
            for j in range(len(strengths)):
                term = np.kron(term, SIGMA_Y if j == k else IDENTITY2)
            total += strength * term
        hamiltonian = np.kron(pointer.matrix, total)
        logger.debug("Built %d-qubit bath with strengths %s", len(strengths), list(strengths))
        return cls(pointer, environment, hamiltonian, tuple(float(g) for g in strengths))


def bath_strengths(
    rng: np.random.Generator,
    size: int = settings.BATH_SIZE,
    low: float = settings.BATH_LOW,
    high: float = settings.BATH_HIGH,
) -> tuple[float, ...]:
    """Coupling strengths drawn uniformly from ``[low, high]``."""
    return tuple(float(g) for g in rng.uniform(low, high, size=size))


__all__ = ["PointerCoupling", "bath_strengths"]
