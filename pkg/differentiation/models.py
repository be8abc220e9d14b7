"""Value types for quantum properties, value properties and interaction roles."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from quantum_core.errors import InvalidState, SpaceMismatch
from quantum_core.models import DensityOperator, Observable, PureState
from quantum_core.operations import partial_trace

from .measures import degree_of_differentiation

DEGREE_TOL = 1e-9


class InteractionRole(str, Enum):
    VALUE_DETERMINING = "ValueDetermining"
    STABLE_DIFFERENTIATOR = "StableDifferentiator"
    UNSTABLE_DIFFERENTIATOR = "UnstableDifferentiator"
    UNDIFFERENTIATOR = "Undifferentiator"
    SECOND_ORDER_UNSTABLE_DIFFERENTIATOR = "SecondOrderUnstableDifferentiator"
    SECOND_ORDER_UNSTABLE_UNDIFFERENTIATOR = "SecondOrderUnstableUndifferentiator"


class ValueProperty(BaseModel):
    """Determinate eigenvalue (degree 1) or an indeterminate value with degree < 1."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["determinate", "indeterminate"]
    value: float | None = Field(default=None, description="Eigenvalue when determinate.")
    degree: float = Field(..., ge=0.0, le=1.0, description="Degree of determinacy D.")

    @model_validator(mode="after")
    def _check_kind(self) -> ValueProperty:
        if self.kind == "determinate":
            if self.value is None or self.degree != 1.0:
                raise ValueError("Determinate values carry an eigenvalue and degree 1.")
        elif self.value is not None or self.degree >= 1.0:
            raise ValueError("Indeterminate values carry no eigenvalue and degree < 1.")
        return self

    @classmethod
    def determinate(cls, value: float) -> ValueProperty:
        return cls(kind="determinate", value=float(value), degree=1.0)

    @classmethod
    def indeterminate(cls, degree: float = 0.0) -> ValueProperty:
        # A degree rounding up to 1 without completion stays just below it.
        return cls(kind="indeterminate", degree=min(max(float(degree), 0.0), 1.0 - 1e-15))

    @property
    def is_determinate(self) -> bool:
        return self.kind == "determinate"


@dataclass(frozen=True, eq=False)
class QuantumProperty:
    """``(carrier, observable, degree)``; the carrier may include spectator subsystems.

    The observable lives on the system's own one-subsystem space, which names
    the system inside a joint carrier.
    """

    carrier: PureState | DensityOperator
    observable: Observable
    degree: float = field(init=False)

    def __post_init__(self) -> None:
        if len(self.observable.space.labels) != 1:
            raise SpaceMismatch("The observable must act on a single subsystem.")
        if self.system_label not in self.carrier.space:
            raise SpaceMismatch(f"Carrier has no subsystem {self.system_label!r}.")
        degree = degree_of_differentiation(self.reduced(), self.observable)
        if not -DEGREE_TOL <= degree <= 1 + DEGREE_TOL:
            raise InvalidState(f"Degree {degree} outside [0, 1].")
        object.__setattr__(self, "degree", min(max(degree, 0.0), 1.0))

    @property
    def system_label(self) -> str:
        return self.observable.space.labels[0]

    def reduced(self) -> DensityOperator:
        carrier = self.carrier
        if carrier.space.labels == (self.system_label,):
            return carrier.density() if isinstance(carrier, PureState) else carrier
        return partial_trace(carrier, {self.system_label})


__all__ = ["InteractionRole", "QuantumProperty", "ValueProperty"]
