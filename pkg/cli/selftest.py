"""Reduced-trial run of every scenario variant with a machine-readable summary."""

from __future__ import annotations

import logging
from typing import Any

from pydantic import BaseModel, Field

from config import settings
from scenarios.models import Mode, OutcomeFrequency, Scenario, ScenarioConfig, ScenarioReport
from scenarios.runner import run_scenario

logger = logging.getLogger(__name__)

VARIANTS: dict[str, dict[str, Any]] = {
    "toy-sdc/prob": {"scenario": Scenario.TOY_SDC, "mode": Mode.PROBABILISTIC},
    "toy-sdc/det-chancy": {"scenario": Scenario.TOY_SDC, "mode": Mode.DETERMINISTIC_CHANCY},
    "toy-sdc/det-hv": {"scenario": Scenario.TOY_SDC, "mode": Mode.DETERMINISTIC_EARLY_HV},
    "wigners-friend/open": {"scenario": Scenario.WIGNERS_FRIEND, "lab_open": True},
    "wigners-friend/isolated": {"scenario": Scenario.WIGNERS_FRIEND, "lab_open": False},
    "interferometer/no-d3": {"scenario": Scenario.INTERFEROMETER, "d3_present": False},
    "interferometer/d3": {"scenario": Scenario.INTERFEROMETER, "d3_present": True},
    "interferometer/d3-isolated": {"scenario": Scenario.INTERFEROMETER, "d3_present": True, "lab_open": False},
    "epr-bell": {"scenario": Scenario.EPR_BELL},
}
MODE_PAIRS = (("toy-sdc/prob", "toy-sdc/det-chancy"), ("toy-sdc/prob", "toy-sdc/det-hv"), ("toy-sdc/det-chancy", "toy-sdc/det-hv"))


class VariantResult(BaseModel):
    name: str
    passed: bool
    failures: list[str] = Field(default_factory=list)


class SelftestSummary(BaseModel):
    passed: bool
    trials: int
    seed: int
    results: list[VariantResult]

    def failures(self) -> list[str]:
        return [f"{result.name}:{name}" for result in self.results for name in result.failures]


def frequencies_compatible(a: list[OutcomeFrequency], b: list[OutcomeFrequency]) -> list[str]:
    """Outcomes whose two empirical frequencies differ by more than the summed radii."""
    other = {row.outcome: row for row in b}
    return [
        row.outcome
        for row in a
        if abs(row.frequency - other[row.outcome].frequency) > row.radius + other[row.outcome].radius
    ]


def run_selftest(
    trials: int = settings.SELFTEST_TRIALS,
    seed: int = settings.DEFAULT_SEED,
    inject_bs_sign_error: bool = False,
) -> SelftestSummary:
    reports: dict[str, ScenarioReport] = {}
    results: list[VariantResult] = []
    for name, params in VARIANTS.items():
        config = ScenarioConfig(
            seed=seed, trials=trials, inject_bs_sign_error=inject_bs_sign_error, **params
        )
        report = run_scenario(config)
        reports[name] = report
        failed = [item.name for item in report.failures()]
        results.append(VariantResult(name=name, passed=not failed, failures=failed))
    for left, right in MODE_PAIRS:
        mismatched = frequencies_compatible(reports[left].frequencies, reports[right].frequencies)
        results.append(
            VariantResult(
                name=f"mode-equivalence/{left.split('/')[1]}~{right.split('/')[1]}",
                passed=not mismatched,
                failures=[f"frequency[{outcome}]" for outcome in mismatched],
            )
        )
    summary = SelftestSummary(
        passed=all(result.passed for result in results), trials=trials, seed=seed, results=results
    )
    logger.info("Selftest %s with %d failure(s)", "passed" if summary.passed else "failed", len(summary.failures()))
    return summary


__all__ = ["MODE_PAIRS", "SelftestSummary", "VARIANTS", "VariantResult", "frequencies_compatible", "run_selftest"]
