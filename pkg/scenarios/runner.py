"""Scenario dispatch."""

from __future__ import annotations

import logging
from collections.abc import Callable

from .epr_bell import run_epr_bell
from .interferometer import run_interferometer
from .models import Scenario, ScenarioConfig, ScenarioReport
from .toy_sdc import run_toy_sdc
from .wigners_friend import run_wigners_friend

logger = logging.getLogger(__name__)

RUNNERS: dict[Scenario, Callable[[ScenarioConfig], ScenarioReport]] = {
    Scenario.TOY_SDC: run_toy_sdc,
    Scenario.WIGNERS_FRIEND: run_wigners_friend,
    Scenario.INTERFEROMETER: run_interferometer,
    Scenario.EPR_BELL: run_epr_bell,
}


def run_scenario(config: ScenarioConfig) -> ScenarioReport:
    logger.info("Running %s (seed=%d, trials=%d)", config.scenario.value, config.seed, config.trials)
    report = RUNNERS[config.scenario](config)
    for failure in report.failures():
        logger.warning("Expectation %s failed: expected %r, observed %r", failure.name, failure.expected, failure.observed)
    return report


__all__ = ["RUNNERS", "run_scenario"]
