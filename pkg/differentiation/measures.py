"""Environment overlaps and the entropic degree of differentiation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from quantum_core.errors import SpaceMismatch
from quantum_core.models import ENTROPY_FLOOR, DensityOperator, Observable, PureState
from quantum_core.operations import partial_trace, reorder, von_neumann_entropy

AMPLITUDE_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class OverlapMatrix:
    """``values[i, j] = <E_j|E_i>`` for normalized conditional environment states.

    ``defined[i, j]`` is False wherever branch ``i`` or ``j`` has zero amplitude;
    the matching ``values`` entry is NaN.
    """

    values: np.ndarray
    defined: np.ndarray
    weights: np.ndarray

    def max_off_diagonal(self) -> float:
        """Largest coherence modulus among defined pairs; 0 when no pair is defined."""
        mask = self.defined & ~np.eye(self.values.shape[0], dtype=bool)
        if not mask.any():
            return 0.0
        return float(np.abs(self.values[mask]).max())

    def to_json(self) -> dict[str, Any]:
        return {
            "weights": [float(w) for w in self.weights],
            "overlaps": [
                [None if not ok else [float(z.real), float(z.imag)] for z, ok in zip(row, mask, strict=True)]
                for row, mask in zip(self.values, self.defined, strict=True)
            ],
        }


def coherence_overlaps(
    joint: PureState | DensityOperator, system_label: str, pointer: Observable
) -> OverlapMatrix:
    """Decompose ``joint = sum_i a_i |s_i>|E_i>`` in the pointer basis and overlap the E_i.

    A mixed joint state has no such decomposition; its overlaps are the
    normalized pointer-basis coherences ``rho_s[i, j] / sqrt(p_i p_j)`` of the
    reduced state, which equal ``<E_j|E_i>`` whenever the joint state is pure.
    """
    if pointer.space.labels != (system_label,):
        raise SpaceMismatch(f"Pointer acts on {pointer.space.labels}, not {system_label!r}.")
    if system_label not in joint.space:
        raise SpaceMismatch(f"Joint state has no subsystem {system_label!r}.")
    if isinstance(joint, DensityOperator):
        reduced = joint if len(joint.space.labels) == 1 else partial_trace(joint, {system_label})
        return _mixed_overlaps(reduced, pointer)
    d_s = pointer.space.total_dim
    if len(joint.space.labels) == 1:
        branches = pointer.eigenvectors.conj().T @ joint.amplitudes.reshape(d_s, 1)
    else:
        order = (system_label, *(label for label in joint.space.labels if label != system_label))
        psi = reorder(joint, order).amplitudes.reshape(d_s, -1)
        # Row i is (<s_i| (x) I) |Psi>.
        branches = pointer.eigenvectors.conj().T @ psi
    weights = np.linalg.norm(branches, axis=1)
    present = weights > AMPLITUDE_FLOOR
    normalized = np.zeros_like(branches)
    normalized[present] = branches[present] / weights[present, None]
    values = normalized.conj() @ normalized.T
    values = values.T
    defined = np.outer(present, present)
    values = np.where(defined, values, np.nan + 0j)
    values.setflags(write=False)
    defined.setflags(write=False)
    return OverlapMatrix(values=values, defined=defined, weights=weights)


def _mixed_overlaps(rho_s: DensityOperator, pointer: Observable) -> OverlapMatrix:
    block = _in_pointer_basis(rho_s, pointer)
    weights = np.sqrt(np.clip(np.real(np.diag(block)), 0.0, None))
    present = weights > AMPLITUDE_FLOOR
    defined = np.outer(present, present)
    scale = np.where(defined, np.outer(weights, weights), 1.0)
    values = np.where(defined, block / scale, np.nan + 0j)
    values.setflags(write=False)
    defined.setflags(write=False)
    return OverlapMatrix(values=values, defined=defined, weights=weights)


def _in_pointer_basis(rho_s: DensityOperator, pointer: Observable) -> np.ndarray:
    if rho_s.space != pointer.space:
        raise SpaceMismatch("Reduced state and pointer live on different spaces.")
    basis = pointer.eigenvectors
    return basis.conj().T @ rho_s.matrix @ basis


def degree_of_differentiation(rho_s: DensityOperator, pointer: Observable) -> float:
    """``S(rho_s) / ln N`` with ``rho_s`` rotated into the pointer eigenbasis."""
    rotated = DensityOperator(rho_s.space, _in_pointer_basis(rho_s, pointer))
    value = von_neumann_entropy(rotated) / math.log(rho_s.space.total_dim)
    return min(max(value, 0.0), 1.0)


def max_degree(rho_s: DensityOperator, pointer: Observable) -> float:
    """Degree reached once every pointer-basis coherence is gone."""
    populations = np.real(np.diag(_in_pointer_basis(rho_s, pointer)))
    populations = populations[populations > ENTROPY_FLOOR]
    entropy = -float(np.sum(populations * np.log(populations)))
    return min(max(entropy / math.log(rho_s.space.total_dim), 0.0), 1.0)


__all__ = [
    "OverlapMatrix",
    "coherence_overlaps",
    "degree_of_differentiation",
    "max_degree",
]
