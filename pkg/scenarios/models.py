"""Scenario configuration and report records."""

from __future__ import annotations

import math
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from chains.models import StabilityParams
from config import settings
from quantum_core.rng import Stream

SIGMA_MULTIPLIER = 3.0
FREQUENCY_SUM_TOL = 1e-12


class Scenario(str, Enum):
    TOY_SDC = "toy-sdc"
    WIGNERS_FRIEND = "wigners-friend"
    INTERFEROMETER = "interferometer"
    EPR_BELL = "epr-bell"


class Mode(str, Enum):
    PROBABILISTIC = "prob"
    DETERMINISTIC_CHANCY = "det-chancy"
    DETERMINISTIC_EARLY_HV = "det-hv"


class Amplitudes(BaseModel):
    """Real amplitudes of the four toy-universe histories over ``(B, D)``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(default=0.5, description="History B=s_i, D=v_k.")
    beta: float = Field(default=0.5, description="History B=s_j, D=v_k.")
    gamma: float = Field(default=0.5, description="History B=s_i, D=v_l.")
    delta: float = Field(default=0.5, description="History B=s_j, D=v_l.")

    def weights(self) -> dict[str, float]:
        return {name: value * value for name, value in self.model_dump().items()}


class StreamConfig(BaseModel):
    """Spawn-key prefixes for the independent random streams of a run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    outcomes: int = Field(default=int(Stream.OUTCOMES), ge=0)
    preparation: int = Field(default=int(Stream.PREPARATION), ge=0)
    settings_a: int = Field(default=int(Stream.SETTINGS_A), ge=0)
    settings_b: int = Field(default=int(Stream.SETTINGS_B), ge=0)


class ScenarioConfig(BaseModel):
    """Fully resolved parameters of one scenario run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: Scenario
    mode: Mode = Mode.PROBABILISTIC
    seed: int = Field(default=settings.DEFAULT_SEED, description="Master seed of every stream.")
    trials: int = Field(default=settings.DEFAULT_TRIALS, ge=1)
    lab_open: bool = Field(default=True, description="Whether the lab stays chain-connected.")
    d3_present: bool = Field(default=True, description="Interferometer detector D3 in the upper arm.")
    alice_angles: tuple[float, float] = Field(
        default=(0.0, math.pi / 2), description="Alice's two measurement angles in radians."
    )
    bob_angles: tuple[float, float] = Field(
        default=(5 * math.pi / 4, 7 * math.pi / 4), description="Bob's two measurement angles in radians."
    )
    amplitudes: Amplitudes = Field(default_factory=Amplitudes)
    stability: StabilityParams = Field(default_factory=StabilityParams)
    streams: StreamConfig = Field(default_factory=StreamConfig)
    steps: int = Field(default=8, ge=1, description="Sampling steps of each differentiation run.")
    inject_bs_sign_error: bool = Field(
        default=False, description="Flip the beam-splitter reflection phase (mutation fixture)."
    )


class TrialRecord(BaseModel):
    trial: int
    outcome: str
    values: dict[str, str | int | float | None] = Field(default_factory=dict)


class OutcomeFrequency(BaseModel):
    outcome: str
    count: int
    frequency: float
    expected: float
    radius: float = Field(description="Three-sigma binomial radius at the expected probability.")
    within: bool


class Expectation(BaseModel):
    """One analytic check with its pass flag."""

    name: str
    expected: Any = None
    observed: Any = None
    tolerance: float | None = None
    passed: bool


class ScenarioReport(BaseModel):
    scenario: Scenario
    config: ScenarioConfig
    records: list[TrialRecord] = Field(default_factory=list)
    frequencies: list[OutcomeFrequency] = Field(default_factory=list)
    expectations: list[Expectation] = Field(default_factory=list)
    snapshots: dict[str, str] = Field(default_factory=dict, description="Time slice -> DOT text.")
    events: list[dict[str, Any]] = Field(default_factory=list)
    tables: dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.expectations)

    def failures(self) -> list[Expectation]:
        return [item for item in self.expectations if not item.passed]

    def expectation(self, name: str) -> Expectation:
        try:
            return next(item for item in self.expectations if item.name == name)
        except StopIteration as exc:
            raise KeyError(name) from exc


def binomial_radius(p: float, n: int) -> float:
    return SIGMA_MULTIPLIER * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def tabulate(
    records: list[TrialRecord], expected: dict[str, float]
) -> list[OutcomeFrequency]:
    """Counts per outcome of ``expected``'s alphabet, checked against three-sigma radii."""
    n = len(records)
    counts = dict.fromkeys(expected, 0)
    for record in records:
        if record.outcome not in counts:
            raise KeyError(f"Outcome {record.outcome!r} is outside the alphabet.")
        counts[record.outcome] += 1
    rows = []
    for outcome, p in expected.items():
        frequency = counts[outcome] / n
        radius = binomial_radius(p, n)
        rows.append(
            OutcomeFrequency(
                outcome=outcome,
                count=counts[outcome],
                frequency=frequency,
                expected=p,
                radius=radius,
                within=abs(frequency - p) <= radius + FREQUENCY_SUM_TOL,
            )
        )
    return rows


def check(
    name: str, passed: bool, expected: Any = None, observed: Any = None, tolerance: float | None = None
) -> Expectation:
    return Expectation(
        name=name, expected=expected, observed=observed, tolerance=tolerance, passed=bool(passed)
    )


def close(name: str, observed: float, expected: float, tolerance: float) -> Expectation:
    observed = float(observed)
    return check(name, abs(observed - expected) <= tolerance, expected, observed, tolerance)


def frequency_checks(frequencies: list[OutcomeFrequency]) -> list[Expectation]:
    total = sum(row.frequency for row in frequencies)
    checks = [close("frequencies_sum_to_one", total, 1.0, FREQUENCY_SUM_TOL)]
    checks.extend(
        check(
            f"frequency[{row.outcome}]",
            row.within,
            row.expected,
            row.frequency,
            row.radius,
        )
        for row in frequencies
    )
    return checks


__all__ = [
    "Amplitudes",
    "Expectation",
    "Mode",
    "OutcomeFrequency",
    "Scenario",
    "ScenarioConfig",
    "ScenarioReport",
    "StreamConfig",
    "TrialRecord",
    "binomial_radius",
    "check",
    "close",
    "frequency_checks",
    "tabulate",
]
