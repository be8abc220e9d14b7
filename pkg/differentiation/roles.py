"""Role taxonomy for interactions, read off overlap trajectories."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from quantum_core.gates import number_observable
from quantum_core.models import DensityOperator, PureState
from quantum_core.operations import expectation, partial_trace

from .coupling import PointerCoupling
from .errors import AmbiguousRole
from .measures import OverlapMatrix
from .models import InteractionRole

logger = logging.getLogger(__name__)

OVERLAP_TOL = 1e-9
POPULATION_TOL = 1e-9


def _series(overlap_trajectory: Sequence[OverlapMatrix | float]) -> list[float]:
    return [
        item.max_off_diagonal() if isinstance(item, OverlapMatrix) else abs(float(item))
        for item in overlap_trajectory
    ]


def classify_role(
    coupling: PointerCoupling | None,
    overlap_trajectory: Sequence[OverlapMatrix | float],
    env_chain_connected: bool,
) -> InteractionRole:
    """Map the largest off-diagonal overlap modulus per step onto a role.

    Entries with an undefined conditional environment never enter the series.
    """
    if not overlap_trajectory:
        raise ValueError("Overlap trajectory must be non-empty.")
    if coupling is not None:
        size = coupling.pointer.space.total_dim
        for item in overlap_trajectory:
            if isinstance(item, OverlapMatrix) and item.values.shape != (size, size):
                raise ValueError("Overlap matrices do not match the coupling's pointer.")
    series = _series(overlap_trajectory)
    steps = np.diff(series)
    decreasing = bool((steps < -OVERLAP_TOL).any())
    increasing = bool((steps > OVERLAP_TOL).any())

    if max(series) <= OVERLAP_TOL:
        if env_chain_connected:
            return InteractionRole.VALUE_DETERMINING
        return InteractionRole.UNSTABLE_DIFFERENTIATOR
    if decreasing and increasing:
        raise AmbiguousRole("Overlaps are non-monotone.", overlap_trajectory)
    if increasing:
        return InteractionRole.UNDIFFERENTIATOR
    if not env_chain_connected:
        return InteractionRole.UNSTABLE_DIFFERENTIATOR
    if decreasing:
        return InteractionRole.STABLE_DIFFERENTIATOR
    raise AmbiguousRole(
        "Connected environment holds nonzero overlaps without differentiating.",
        overlap_trajectory,
    )


def populated_modes(
    state: PureState | DensityOperator, modes: Sequence[str], tol: float = POPULATION_TOL
) -> list[str]:
    """Modes with a nonzero mean occupation."""
    populated = []
    for mode in modes:
        dim = state.space.dim(mode)
        if len(state.space.labels) == 1:
            reduced = state.density() if isinstance(state, PureState) else state
        else:
            reduced = partial_trace(state, {mode})
        if expectation(reduced, number_observable(mode, dim)) > tol:
            populated.append(mode)
    return populated


def classify_mode_transfer(
    before: PureState | DensityOperator,
    after: PureState | DensityOperator,
    modes: Sequence[str],
    env_chain_connected: bool,
) -> InteractionRole:
    """Second-order roles of a device that spreads or gathers a system across modes."""
    signature = (populated_modes(before, modes), populated_modes(after, modes))
    if env_chain_connected:
        raise AmbiguousRole("Second-order roles apply to devices outside any chain.", signature)
    spread_in, spread_out = (len(part) for part in signature)
    if spread_in == 1 and spread_out > 1:
        return InteractionRole.SECOND_ORDER_UNSTABLE_UNDIFFERENTIATOR
    if spread_in > 1 and spread_out == 1:
        return InteractionRole.SECOND_ORDER_UNSTABLE_DIFFERENTIATOR
    raise AmbiguousRole(f"Mode signature {signature} fits no second-order role.", signature)


__all__ = ["classify_mode_transfer", "classify_role", "populated_modes"]
