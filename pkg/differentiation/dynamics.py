"""Differentiation runs and countertransformations."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from config import settings
from quantum_core.errors import SpaceMismatch
from quantum_core.models import DensityOperator, PureState, UnitaryEvolution
from quantum_core.operations import (
    born_branches,
    draw,
    embed_unitary,
    evolve,
    local_projectors,
    partial_trace,
    tensor,
)

from .coupling import PointerCoupling
from .errors import IrreversibleContext
from .measures import OverlapMatrix, coherence_overlaps, degree_of_differentiation, max_degree
from .models import QuantumProperty, ValueProperty

logger = logging.getLogger(__name__)


class TrajectoryPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    time: float
    degree: float
    value: ValueProperty


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Per-step degrees, value properties and overlaps of one differentiation run."""

    points: tuple[TrajectoryPoint, ...]
    overlaps: tuple[OverlapMatrix, ...]
    max_degree: float
    licensed_updates: int
    final_state: PureState | DensityOperator

    def degrees(self) -> list[float]:
        return [point.degree for point in self.points]

    def off_diagonal_series(self) -> list[float]:
        return [matrix.max_off_diagonal() for matrix in self.overlaps]

    @property
    def outcome(self) -> ValueProperty:
        return self.points[-1].value

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "time": [p.time for p in self.points],
                "degree": [p.degree for p in self.points],
                "value_kind": [p.value.kind for p in self.points],
                "value": [p.value.value for p in self.points],
            }
        )

    def to_csv(self, path: str | Path) -> None:
        self.to_frame().to_csv(path, index=False)

    def overlaps_json(self) -> list[dict[str, Any]]:
        return [
            {"time": point.time, **matrix.to_json()}
            for point, matrix in zip(self.points, self.overlaps, strict=True)
        ]


def is_complete(degree: float, ceiling: float, gap: float = settings.COMPLETION_GAP) -> bool:
    """Coherences are exhausted: the degree sits within ``gap`` of its dephased ceiling."""
    return ceiling - degree <= gap


def run_differentiation(
    system: QuantumProperty,
    coupling: PointerCoupling,
    env_chain_connected: bool,
    duration: float,
    steps: int,
    rng: np.random.Generator,
    gap: float = settings.COMPLETION_GAP,
) -> Trajectory:
    """Evolve the system with its environment and assign a value at each step.

    A disconnected environment leaves every value Indeterminate(0). A connected
    one yields Indeterminate(D*) until completion and a sampled Determinate
    eigenvalue from the first completed step on; the sample licenses one
    state update recorded in ``final_state``. Mixed carriers run the same way
    on density operators.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1.")
    if coupling.pointer.space != system.observable.space:
        raise SpaceMismatch("Coupling pointer and property observable differ in space.")
    clash = set(coupling.environment.labels) & set(system.carrier.space.labels)
    if clash:
        raise SpaceMismatch(f"Environment labels {sorted(clash)} already in the carrier.")

    label = system.system_label
    ready = coupling.ready_state()
    if isinstance(system.carrier, DensityOperator):
        joint0: PureState | DensityOperator = tensor(system.carrier, ready.density())
    else:
        joint0 = tensor(system.carrier, ready)
    ceiling = max_degree(system.reduced(), system.observable)
    points: list[TrajectoryPoint] = []
    overlaps: list[OverlapMatrix] = []
    determined: ValueProperty | None = None
    collapsed: DensityOperator | None = None
    final_state: PureState | DensityOperator = joint0

    for k in range(steps + 1):
        time = duration * k / steps
        joint = evolve(joint0, embed_unitary(coupling.unitary(time), joint0.space))
        degree = degree_of_differentiation(partial_trace(joint, {label}), system.observable)
        overlaps.append(coherence_overlaps(joint, label, system.observable))
        final_state = joint
        if not env_chain_connected:
            value = ValueProperty.indeterminate(0.0)
        elif determined is not None:
            value = determined
        elif is_complete(degree, ceiling, gap):
            branch = draw(born_branches(joint, local_projectors(system.observable, joint.space)), rng)
            determined = ValueProperty.determinate(float(branch.outcome))  # type: ignore[arg-type]
            collapsed = branch.updated
            logger.debug("Value determined at t=%.6g: %s", time, determined.value)
            value = determined
        else:
            value = ValueProperty.indeterminate(degree)
        points.append(TrajectoryPoint(time=time, degree=degree, value=value))

    if collapsed is not None:
        final_state = collapsed
    return Trajectory(
        points=tuple(points),
        overlaps=tuple(overlaps),
        max_degree=ceiling,
        licensed_updates=int(determined is not None),
        final_state=final_state,
    )


def reverse(joint: PureState | DensityOperator, forward: UnitaryEvolution) -> PureState:
    """Apply ``forward^dagger``; only possible while the environment is fully retained."""
    labels = set(joint.space.labels)
    if labels < set(forward.space.labels):
        raise IrreversibleContext(
            f"Environment {sorted(set(forward.space.labels) - labels)} was traced out."
        )
    if isinstance(joint, DensityOperator):
        if joint.space != forward.space:
            raise SpaceMismatch("Joint state and forward unitary live on different spaces.")
        if not joint.is_pure():
            raise IrreversibleContext("Joint state is mixed: records left the retained systems.")
        values, vectors = np.linalg.eigh(joint.matrix)
        joint = PureState(joint.space, vectors[:, int(np.argmax(values))])
    if joint.space != forward.space:
        raise SpaceMismatch("Joint state and forward unitary live on different spaces.")
    return evolve(joint, forward.dagger())


__all__ = ["Trajectory", "TrajectoryPoint", "is_complete", "reverse", "run_differentiation"]
