"""Single-photon interferometer with an optional which-path detector D3.

Modes ``ch1..ch4`` hold zero or one photon. BS1 routes the input photon into
the lower and upper arms (``ch3`` and ``ch4``); BS2 recombines them so that,
without D3, only D2 (on ``ch4``) ever clicks. D3 sits in the ``ch3`` arm as a
two-level pointer environment and hands its absorbed photon to ``ch1``, which
is where D3 is read out. D1 reads ``ch3`` after BS2.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from chains.graph import Gate, determinacy_gate, isolate, lapse_time, record_value_determination
from chains.models import ChainGraph
from differentiation.errors import AmbiguousRole
from differentiation.models import InteractionRole, ValueProperty
from differentiation.roles import classify_mode_transfer
from quantum_core.gates import HALF, beam_splitter, controlled_rotation, swap
from quantum_core.models import HilbertSpace, PureState, UnitaryEvolution
from quantum_core.operations import Branch, born_branches, embed, evolve
from quantum_core.rng import trial_rng

from .models import ScenarioConfig, ScenarioReport, TrialRecord, check, close, frequency_checks, tabulate
from .sampling import BranchSampler
from .slices import record_slices

logger = logging.getLogger(__name__)

MODES = ("ch1", "ch2", "ch3", "ch4")
DETECTOR_ENV = "E3"
DETECTOR_MODES = {"D3": "ch1", "D1": "ch3", "D2": "ch4"}
NO_CLICK = "none"
INDETERMINATE = "indeterminate"
ANALYTIC_TOL = 1e-9
LAB = "E'"


class InterferometerRun:
    """Amplitudes of one configuration, from the input photon to the detectors."""

    def __init__(self, d3_present: bool, reflection_phase: complex = 1j):
        labels = MODES + ((DETECTOR_ENV,) if d3_present else ())
        self.d3_present = d3_present
        self.space = HilbertSpace.qubits(*labels)
        self.reflection_phase = reflection_phase
        self.input = PureState.basis(self.space, {"ch1": 1})

    def _splitter(self, a: str, b: str) -> UnitaryEvolution:
        return beam_splitter(a, b, self.space, reflection_phase=self.reflection_phase)

    def bs1(self) -> UnitaryEvolution:
        return (
            self._splitter("ch1", "ch2")
            .then(swap(("ch1", 2), ("ch3", 2), self.space))
            .then(swap(("ch2", 2), ("ch4", 2), self.space))
        )

    def detector(self) -> UnitaryEvolution:
        """D3 flips its pointer on a photon in ``ch3`` and parks the photon in ``ch1``."""
        return controlled_rotation("ch3", DETECTOR_ENV, math.pi / 2, self.space).then(
            swap(("ch1", 2), ("ch3", 2), self.space)
        )

    def bs2(self) -> UnitaryEvolution:
        return self._splitter("ch3", "ch4")

    def states(self) -> dict[str, PureState]:
        after_bs1 = evolve(self.input, self.bs1())
        before_bs2 = evolve(after_bs1, self.detector()) if self.d3_present else after_bs1
        return {
            "input": self.input,
            "after_bs1": after_bs1,
            "before_bs2": before_bs2,
            "final": evolve(before_bs2, self.bs2()),
        }

    def click_projectors(self) -> dict[str, np.ndarray]:
        """Exactly one photon, found in the detector's mode; the remainder is ``none``."""
        modes = HilbertSpace.qubits(*MODES)
        projectors: dict[str, np.ndarray] = {}
        names = [name for name in ("D1", "D2", "D3") if self.d3_present or name != "D3"]
        for name in names:
            vector = np.zeros(modes.total_dim, dtype=complex)
            vector[modes.basis_index({DETECTOR_MODES[name]: 1})] = 1.0
            projectors[name] = embed(np.outer(vector, vector.conj()), modes, self.space)
        projectors[NO_CLICK] = np.eye(self.space.total_dim) - sum(projectors.values())
        return projectors

    def branches(self) -> list[Branch]:
        return born_branches(self.states()["final"], self.click_projectors())


def expected_final(d3_present: bool) -> PureState:
    if not d3_present:
        return PureState.basis(HilbertSpace.qubits(*MODES), {"ch4": 1})
    space = HilbertSpace.qubits(*MODES, DETECTOR_ENV)
    return PureState.superposition(
        space,
        [
            (HALF, {"ch1": 1, DETECTOR_ENV: 1}),
            (-0.5, {"ch3": 1}),
            (0.5j, {"ch4": 1}),
        ],
    )


def expected_after_bs1(d3_present: bool) -> PureState:
    labels = MODES + ((DETECTOR_ENV,) if d3_present else ())
    return PureState.superposition(
        HilbertSpace.qubits(*labels), [(HALF, {"ch3": 1}), (1j * HALF, {"ch4": 1})]
    )


def device_roles(reflection_phase: complex = 1j) -> dict[str, str]:
    """Second-order roles of both splitters, read off the detector-free run."""
    states = InterferometerRun(False, reflection_phase).states()
    roles: dict[str, str] = {}
    for name, before, after in (
        ("BS1", states["input"], states["after_bs1"]),
        ("BS2", states["after_bs1"], states["final"]),
    ):
        try:
            roles[name] = classify_mode_transfer(before, after, MODES, env_chain_connected=False).value
        except AmbiguousRole as exc:
            logger.warning("No second-order role for %s: %s", name, exc)
            roles[name] = "ambiguous"
    return roles


def lab_chain(config: ScenarioConfig, detectors: list[str]) -> tuple[ChainGraph, float]:
    """Detectors kept in the SDC by the outside environment ``E'``; returns the readout time.

    The isolated variant walls the detectors and the photon off at t=0 and reads
    out at the moment their membership lapses.
    """
    graph = ChainGraph.declare(prime=[LAB], others=[*detectors, "S"], stability=config.stability)
    if config.lab_open:
        readout = 1.0
        for name in detectors:
            graph = record_value_determination(graph, LAB, name, readout)
        return graph, readout
    for name in detectors:
        graph = record_value_determination(graph, LAB, name, 0.0)
    boundary = [*detectors, "S"]
    graph = isolate(graph, boundary, 0.0)
    lapsed = lapse_time(graph, boundary)
    readout = config.stability.window_length if lapsed is None else lapsed
    for name in detectors:
        graph = record_value_determination(graph, LAB, name, readout)
    return graph, readout


def run_interferometer(config: ScenarioConfig) -> ScenarioReport:
    phase = -1j if config.inject_bs_sign_error else 1j
    run = InterferometerRun(config.d3_present, phase)
    states = run.states()
    report = ScenarioReport(scenario=config.scenario, config=config)

    report.expectations.append(
        check(
            "bs1_state",
            states["after_bs1"].equal_up_to_phase(expected_after_bs1(config.d3_present)),
            expected="(1/sqrt2)|0010> + (i/sqrt2)|0001>",
        )
    )
    report.expectations.append(
        check(
            "final_state",
            states["final"].equal_up_to_phase(expected_final(config.d3_present)),
            expected="|0001>" if not config.d3_present else "(1/sqrt2)|1000>E1 - (1/2)|0010>E0 + (i/2)|0001>E0",
        )
    )

    roles = device_roles(phase)
    report.tables["roles"] = roles
    report.expectations.append(
        check(
            "bs1_role",
            roles["BS1"] == InteractionRole.SECOND_ORDER_UNSTABLE_UNDIFFERENTIATOR.value,
            InteractionRole.SECOND_ORDER_UNSTABLE_UNDIFFERENTIATOR.value,
            roles["BS1"],
        )
    )
    report.expectations.append(
        check(
            "bs2_role",
            roles["BS2"] == InteractionRole.SECOND_ORDER_UNSTABLE_DIFFERENTIATOR.value,
            InteractionRole.SECOND_ORDER_UNSTABLE_DIFFERENTIATOR.value,
            roles["BS2"],
        )
    )

    branches = run.branches()
    analytic = {str(b.outcome): b.probability for b in branches}
    closed_form = {"D1": 0.25, "D2": 0.25, "D3": 0.5} if config.d3_present else {"D1": 0.0, "D2": 1.0}
    for name, p in closed_form.items():
        report.expectations.append(close(f"analytic[{name}]", analytic[name], p, ANALYTIC_TOL))
    report.tables["click_probabilities"] = analytic

    detectors = sorted(closed_form)
    graph, readout = lab_chain(config, detectors)
    gates = {name: determinacy_gate(graph, "S", name, readout) for name in detectors}
    report.tables["gates"] = {name: gate.value for name, gate in gates.items()}
    sampler = BranchSampler(lambda path: branches if not path else [])

    records: list[TrialRecord] = []
    for trial in range(config.trials):
        (click,) = sampler.sample(trial_rng(config.seed, trial, config.streams.outcomes))
        name = str(click)
        if gates.get(name) is Gate.PERMIT:
            value = ValueProperty.determinate(1.0)
            outcome = name
        else:
            value = ValueProperty.indeterminate(0.0)
            outcome = INDETERMINATE
        records.append(
            TrialRecord(
                trial=trial,
                outcome=outcome,
                values={"branch": name, "value_kind": value.kind, "value": value.value},
            )
        )

    first = next((record for record in records if record.values["value_kind"] == "determinate"), None)
    if first is not None:
        # One click stands in for the run: the firing detector determines S once.
        graph = record_value_determination(graph, str(first.values["branch"]), "S", readout)

    determinate = sum(1 for record in records if record.values["value_kind"] == "determinate")
    if config.lab_open:
        expected = dict(closed_form)
    else:
        expected = {INDETERMINATE: 1.0}
        report.expectations.append(check("determinate_records_inside_lab", determinate == 0, 0, determinate))
    report.records = records
    report.frequencies = tabulate(records, expected)
    report.expectations.extend(frequency_checks(report.frequencies))
    record_slices(report, graph, sorted({0.0, readout}))
    logger.info("Interferometer run (D3=%s, open=%s) finished", config.d3_present, config.lab_open)
    return report


__all__ = [
    "DETECTOR_MODES",
    "InterferometerRun",
    "device_roles",
    "expected_after_bs1",
    "expected_final",
    "lab_chain",
    "run_interferometer",
]
