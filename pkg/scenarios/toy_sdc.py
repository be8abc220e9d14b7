"""Toy universe whose chain grows from the blueprint A -> B into A -> B -> C -> D."""

from __future__ import annotations

import logging
import math
from typing import cast

import networkx as nx
import numpy as np

from chains.graph import record_value_determination, structure
from chains.models import ChainGraph
from differentiation.coupling import PointerCoupling
from differentiation.dynamics import Trajectory, run_differentiation
from differentiation.models import QuantumProperty
from differentiation.roles import classify_role
from quantum_core.gates import number_observable
from quantum_core.models import HilbertSpace, PureState
from quantum_core.operations import (
    Branch,
    born_branches,
    embed,
    embed_unitary,
    evolve,
    expectation,
    local_projectors,
    partial_trace,
    tensor,
)
from quantum_core.rng import trial_rng

from .errors import InvalidConfig
from .models import (
    Mode,
    ScenarioConfig,
    ScenarioReport,
    TrialRecord,
    check,
    close,
    frequency_checks,
    tabulate,
)
from .sampling import BranchSampler, Path
from .slices import record_slices

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-9
ANALYTIC_TOL = 1e-9
SYSTEMS = ("A", "B", "C", "D")
# history -> (value of B, value of D)
HISTORIES = {"alpha": (0, 0), "beta": (1, 0), "gamma": (0, 1), "delta": (1, 1)}
HISTORY_OF = {values: name for name, values in HISTORIES.items()}
SLICES = (0.0, 1.0, 2.0)


def levels(path: Path) -> tuple[int, ...]:
    return tuple(cast(int, value) for value in path)


def _record_coupling(system: str, environment: str) -> PointerCoupling:
    """``environment`` flips iff ``system`` holds 1, after ``pi/2``."""
    return PointerCoupling.bath(number_observable(system), (1.0,), labels=(environment,))


def _superposed(label: str, weights: tuple[float, float]) -> PureState:
    return PureState(HilbertSpace.qubits(label), np.sqrt(np.asarray(weights, dtype=float)))


def _history_weights(config: ScenarioConfig) -> dict[str, float]:
    weights = config.amplitudes.weights()
    total = sum(weights.values())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise InvalidConfig(f"History amplitudes are not normalized (sum of squares {total:.12g}).")
    return weights


def _marginal_b(weights: dict[str, float]) -> tuple[float, float]:
    return (
        sum(w for name, w in weights.items() if HISTORIES[name][0] == 0),
        sum(w for name, w in weights.items() if HISTORIES[name][0] == 1),
    )


def _conditional_d(weights: dict[str, float], b: int) -> tuple[float, float]:
    joint = [weights[HISTORY_OF[(b, d)]] for d in (0, 1)]
    total = sum(joint)
    return joint[0] / total, joint[1] / total


def replay_chain(config: ScenarioConfig) -> ChainGraph:
    """Edge sequence shared by every mode.

    t=1: A blueprint-ticks B while C only unstably differentiates D.
    t=2: A keeps ticking B, B ticks C, and C ticks D.
    """
    graph = ChainGraph.declare(
        prime=["A"], subordinate=["B"], others=["C", "D"], stability=config.stability
    )
    graph = record_value_determination(graph, "A", "B", 1.0, blueprint=True)
    graph = record_value_determination(graph, "C", "D", 1.0)
    for source, target in (("A", "B"), ("B", "C"), ("C", "D")):
        graph = record_value_determination(graph, source, target, 2.0, blueprint=source == "A")
    return graph


class StagedSampler:
    """Probabilistic mode: B's value is drawn at the blueprint tick, D's once C joins."""

    def __init__(self, weights: dict[str, float], steps: int, seed: int, stream: int):
        self.weights = weights
        self.steps = steps
        self.seed = seed
        self.stream = stream
        self.ab = _record_coupling("B", "A")
        self.cd = _record_coupling("D", "C")
        self.tree = BranchSampler(self._expand)

    def _expand(self, path: Path) -> list[Branch]:
        if len(path) == 0:
            joint = self._differentiated(_superposed("B", _marginal_b(self.weights)), self.ab)
            return self._branches(joint, "B")
        if len(path) == 1:
            (b,) = levels(path)
            joint = self._differentiated(_superposed("D", _conditional_d(self.weights, b)), self.cd)
            return self._branches(joint, "D")
        return []

    @staticmethod
    def _differentiated(system: PureState, coupling: PointerCoupling) -> PureState:
        joint = tensor(system, coupling.ready_state())
        return evolve(joint, embed_unitary(coupling.unitary(coupling.orthogonalization_time()), joint.space))

    @staticmethod
    def _branches(joint: PureState, label: str) -> list[Branch]:
        branches = born_branches(joint, local_projectors(number_observable(label), joint.space))
        return [Branch(round(cast(float, b.outcome)), b.probability, b.updated) for b in branches]

    def trajectory(self, label: str, chain_connected: bool) -> Trajectory:
        """One recorded run per stage; D is prepared for B's likelier value."""
        if label == "B":
            state, coupling = _superposed("B", _marginal_b(self.weights)), self.ab
        else:
            marginal = _marginal_b(self.weights)
            b = int(np.argmax(marginal))
            state, coupling = _superposed("D", _conditional_d(self.weights, b)), self.cd
        return run_differentiation(
            QuantumProperty(state, number_observable(label)),
            coupling,
            env_chain_connected=chain_connected,
            duration=coupling.orthogonalization_time(),
            steps=self.steps,
            rng=trial_rng(self.seed, 0, self.stream),
        )


def global_state(weights: dict[str, float]) -> PureState:
    """``sum_h a_h |E_0>_A |b_h>_B |E'_0>_C |d_h>_D`` before any interaction."""
    space = HilbertSpace.qubits(*SYSTEMS)
    terms = [
        (math.sqrt(weight), {"B": HISTORIES[name][0], "D": HISTORIES[name][1]})
        for name, weight in weights.items()
        if weight > 0
    ]
    return PureState.superposition(space, terms)


def global_evolution(state: PureState) -> PureState:
    """``U_CD`` and ``U_AB`` on the whole toy universe; both are pointer-diagonal records."""
    for coupling in (_record_coupling("D", "C"), _record_coupling("B", "A")):
        state = evolve(state, embed_unitary(coupling.unitary(coupling.orthogonalization_time()), state.space))
    return state


def _history_projectors(space: HilbertSpace) -> dict[str, np.ndarray]:
    sub = HilbertSpace.qubits("B", "D")
    projectors = {}
    for name, (b, d) in HISTORIES.items():
        vector = np.zeros(sub.total_dim, dtype=complex)
        vector[sub.basis_index({"B": b, "D": d})] = 1.0
        projectors[name] = embed(np.outer(vector, vector.conj()), sub, space)
    return projectors


def _readout(state: PureState) -> dict[str, int]:
    return {
        label: int(round(expectation(partial_trace(state, {label}), number_observable(label))))
        for label in SYSTEMS
    }


def run_toy_sdc(config: ScenarioConfig) -> ScenarioReport:
    weights = _history_weights(config)
    report = ScenarioReport(scenario=config.scenario, config=config)
    outcomes_stream = config.streams.outcomes
    records: list[TrialRecord] = []

    if config.mode is Mode.PROBABILISTIC:
        staged = StagedSampler(weights, config.steps, config.seed, config.streams.preparation)
        analytic = {HISTORY_OF[levels(path)]: p for path, p in staged.tree.distribution().items()}
        for trial in range(config.trials):
            b, d = levels(staged.tree.sample(trial_rng(config.seed, trial, outcomes_stream)))
            records.append(TrialRecord(trial=trial, outcome=HISTORY_OF[(b, d)], values={"B": b, "D": d}))
        ab = staged.trajectory("B", chain_connected=True)
        cd = staged.trajectory("D", chain_connected=False)
        report.tables["trajectories"] = {
            "A->B": ab.to_frame().to_dict(orient="list"),
            "C->D": cd.to_frame().to_dict(orient="list"),
        }
        report.tables["roles"] = {
            "A->B": classify_role(staged.ab, ab.overlaps, env_chain_connected=True).value,
            "C->D": classify_role(staged.cd, cd.overlaps, env_chain_connected=False).value,
        }
        report.expectations.append(check("blueprint_value_determined", ab.outcome.is_determinate))
        report.expectations.append(
            check(
                "unstable_stage_indeterminate",
                not any(point.value.is_determinate for point in cd.points) and cd.licensed_updates == 0,
            )
        )
    else:
        evolved = global_evolution(global_state(weights))
        branches = born_branches(evolved, _history_projectors(evolved.space))
        analytic = {str(branch.outcome): branch.probability for branch in branches}
        finals = {
            name: _readout(global_evolution(global_state({name: 1.0}))) for name in HISTORIES if weights[name] > 0
        }
        if config.mode is Mode.DETERMINISTIC_CHANCY:
            tree = BranchSampler(lambda path: branches if not path else [])
            stream = outcomes_stream
        else:
            hidden = [Branch(f"lambda_{name}", weights[name], None) for name in HISTORIES]
            tree = BranchSampler(lambda path: hidden if not path else [])
            stream = config.streams.preparation
        for trial in range(config.trials):
            (label,) = tree.sample(trial_rng(config.seed, trial, stream))
            name = str(label).removeprefix("lambda_")
            values: dict[str, str | int | float | None] = dict(finals[name])
            if config.mode is Mode.DETERMINISTIC_EARLY_HV:
                values["lambda"] = str(label)
            records.append(TrialRecord(trial=trial, outcome=name, values=values))
        report.expectations.append(
            check(
                "records_match_values",
                all(final["A"] == final["B"] and final["C"] == final["D"] for final in finals.values()),
            )
        )

    expected = {name: weights[name] for name in HISTORIES}
    for name in HISTORIES:
        report.expectations.append(
            close(f"analytic[{name}]", analytic.get(name, 0.0), expected[name], ANALYTIC_TOL)
        )
    report.records = records
    report.frequencies = tabulate(records, expected)
    report.expectations.extend(frequency_checks(report.frequencies))
    report.tables["analytic"] = expected

    graph = replay_chain(config)
    final = structure(graph)
    path = sorted(final.edges)
    report.expectations.append(
        check(
            "chain_path",
            path == [("A", "B"), ("B", "C"), ("C", "D")] and nx.has_path(final, "A", "D"),
            expected=["A->B", "B->C", "C->D"],
            observed=[f"{s}->{t}" for s, t in path],
        )
    )
    record_slices(report, graph, SLICES)
    logger.info("Toy SDC run finished with %d trials in %s mode", config.trials, config.mode.value)
    return report


__all__ = ["HISTORIES", "StagedSampler", "global_evolution", "global_state", "replay_chain", "run_toy_sdc"]
