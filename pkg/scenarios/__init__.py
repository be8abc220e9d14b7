"""End-to-end scenario runs with analytic expectations."""

from .artifacts import RunDirectory, RunManifest, load_report, load_snapshot
from .epr_bell import run_epr_bell
from .errors import InvalidConfig
from .interferometer import run_interferometer
from .models import (
    Amplitudes,
    Expectation,
    Mode,
    OutcomeFrequency,
    Scenario,
    ScenarioConfig,
    ScenarioReport,
    StreamConfig,
    TrialRecord,
)
from .runner import run_scenario
from .toy_sdc import run_toy_sdc
from .wigners_friend import run_wigners_friend

__all__ = [
    "Amplitudes",
    "Expectation",
    "InvalidConfig",
    "Mode",
    "OutcomeFrequency",
    "RunDirectory",
    "RunManifest",
    "Scenario",
    "ScenarioConfig",
    "ScenarioReport",
    "StreamConfig",
    "TrialRecord",
    "load_report",
    "load_snapshot",
    "run_epr_bell",
    "run_interferometer",
    "run_scenario",
    "run_toy_sdc",
    "run_wigners_friend",
]
