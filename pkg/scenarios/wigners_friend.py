"""Wigner's friend with the friend's lab either chain-connected or isolated.

Alice's spin ``S`` shares a singlet with Bob's spin ``S'``. The friend's device
``E1`` records ``S`` in the z basis; outside the lab the chain runs
``E4 -> E3 -> E2 -> E1`` and ``E3 -> EB -> S'`` for Bob's device ``EB``.
"""

from __future__ import annotations

import logging
import math
from typing import cast

from chains.graph import Gate, determinacy_gate, isolate, record_value_determination
from chains.models import ChainGraph
from differentiation.coupling import PointerCoupling
from differentiation.dynamics import Trajectory, reverse, run_differentiation
from differentiation.errors import IrreversibleContext
from differentiation.models import QuantumProperty
from quantum_core.gates import singlet, spin_observable
from quantum_core.models import DensityOperator, PureState
from quantum_core.operations import (
    Branch,
    born_branches,
    born_probabilities,
    embed_unitary,
    evolve,
    fidelity,
    local_projectors,
    partial_trace,
    tensor,
)
from quantum_core.rng import trial_rng

from .models import ScenarioConfig, ScenarioReport, TrialRecord, check, close, frequency_checks, tabulate
from .sampling import BranchSampler, Path
from .slices import record_slices

logger = logging.getLogger(__name__)

ALICE, BOB, FRIEND, OUTSIDE = "S", "S'", "E1", "E2"
LAB = ("E1", "S")
OUTCOME_TOL = 1e-9
MARGINAL_TOL = 1e-12
CONTRADICTION_GAP = 0.49
SLICES = (0.0, 1.0)


def spin_label(value: float) -> str:
    return "+1/2" if value > 0 else "-1/2"


def friend_coupling() -> PointerCoupling:
    return PointerCoupling.bath(spin_observable(ALICE), (1.0,), labels=(FRIEND,))


def outside_coupling() -> PointerCoupling:
    """``E2`` reads the friend's record, which lies in ``E1``'s x basis."""
    return PointerCoupling.bath(spin_observable(FRIEND, math.pi / 2), (1.0,), labels=(OUTSIDE,))


def _run(coupling: PointerCoupling, state: PureState) -> PureState:
    return evolve(state, embed_unitary(coupling.unitary(coupling.orthogonalization_time()), state.space))


class FriendLab:
    """Amplitudes shared by the open and isolated descriptions."""

    def __init__(self, config: ScenarioConfig):
        self.bob_angle = config.bob_angles[0]
        self.coupling = friend_coupling()
        self.initial = tensor(singlet(ALICE, BOB), self.coupling.ready_state())
        self.after = _run(self.coupling, self.initial)
        self.forward = embed_unitary(
            self.coupling.unitary(self.coupling.orthogonalization_time()), self.initial.space
        )

    def differentiation(self, chain_connected: bool, steps: int, rng_seed: int, stream: int) -> Trajectory:
        return run_differentiation(
            QuantumProperty(singlet(ALICE, BOB), spin_observable(ALICE)),
            self.coupling,
            env_chain_connected=chain_connected,
            duration=self.coupling.orthogonalization_time(),
            steps=steps,
            rng=trial_rng(rng_seed, 0, stream),
        )

    def alice_branches(self, state: PureState) -> list[Branch]:
        """The friend reads S in the z basis."""
        return born_branches(state, local_projectors(spin_observable(ALICE), state.space))

    def bob_branches(self, state: PureState | DensityOperator, angle: float = 0.0) -> list[Branch]:
        return born_branches(state, local_projectors(spin_observable(BOB, angle), state.space))

    def open_tree(self) -> BranchSampler:
        """Alice's outcome, then Bob's matched-basis outcome on the updated state."""
        alice = self.alice_branches(self.after)

        def expand(path: Path) -> list[Branch]:
            if not path:
                return alice
            if len(path) == 1:
                chosen = next(b for b in alice if b.outcome == path[0])
                assert chosen.updated is not None
                return self.bob_branches(chosen.updated)
            return []

        return BranchSampler(expand)

    def bob_marginal(self, state: PureState) -> dict[str, float]:
        reduced = partial_trace(state, {BOB})
        return {
            spin_label(value): p
            for value, p in born_probabilities(reduced, spin_observable(BOB, self.bob_angle)).items()
        }

    def reversal_attempt_open(self) -> str:
        """Once ``E2`` holds the record, the lab alone cannot be reversed."""
        outside = outside_coupling()
        spread = _run(outside, tensor(self.after, outside.ready_state()))
        retained = partial_trace(spread, set(self.initial.space.labels))
        try:
            reverse(retained, self.forward)
        except IrreversibleContext as exc:
            logger.info("Reversal refused in the open lab: %s", exc)
            return "IrreversibleContext"
        return "reversed"


def open_chain(config: ScenarioConfig) -> ChainGraph:
    graph = ChainGraph.declare(
        prime=["E4"], subordinate=["E3"], others=["E2", "E1", "S", "EB", "S'"], stability=config.stability
    )
    for source, target in (("E4", "E3"), ("E3", "E2"), ("E2", "E1"), ("E3", "EB"), ("E1", "S"), ("EB", "S'")):
        graph = record_value_determination(graph, source, target, 1.0, blueprint=source == "E4")
    return graph


def isolated_chain(config: ScenarioConfig) -> ChainGraph:
    """The lab is sealed at t=0; by t=1 its membership has lapsed and E1 only unstably differentiates S."""
    graph = ChainGraph.declare(
        prime=["E4"], subordinate=["E3"], others=["E2", "E1", "S", "EB", "S'"], stability=config.stability
    )
    outside = (("E4", "E3"), ("E3", "E2"), ("E2", "E1"), ("E3", "EB"), ("EB", "S'"))
    for source, target in outside:
        graph = record_value_determination(graph, source, target, 0.0, blueprint=source == "E4")
    graph = isolate(graph, LAB, 0.0)
    t = config.stability.window_length
    for source, target in (*outside, ("E1", "S")):
        graph = record_value_determination(graph, source, target, t, blueprint=source == "E4")
    return graph


def _open_records(lab: FriendLab, config: ScenarioConfig) -> tuple[list[TrialRecord], dict[str, float]]:
    sampler = lab.open_tree()
    analytic = {_cell(path): 0.0 for path in ((0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5))}
    analytic.update({_cell(path): p for path, p in sampler.distribution().items()})
    records = []
    for trial in range(config.trials):
        path = sampler.sample(trial_rng(config.seed, trial, config.streams.outcomes))
        alice, bob = (cast(float, value) for value in path)
        records.append(
            TrialRecord(
                trial=trial,
                outcome=_cell(path),
                values={"alice": spin_label(alice), "bob": spin_label(bob), "alice_kind": "determinate"},
            )
        )
    return records, analytic


def _cell(path: Path) -> str:
    alice, bob = (cast(float, value) for value in path)
    return f"alice={spin_label(alice)},bob={spin_label(bob)}"


def _isolated_records(lab: FriendLab, config: ScenarioConfig) -> tuple[list[TrialRecord], dict[str, float]]:
    bob = lab.bob_branches(lab.after, lab.bob_angle)
    sampler = BranchSampler(lambda path: bob if not path else [])
    analytic = {f"alice=indeterminate,bob={spin_label(cast(float, b.outcome))}": b.probability for b in bob}
    records = []
    for trial in range(config.trials):
        (value,) = sampler.sample(trial_rng(config.seed, trial, config.streams.outcomes))
        label = spin_label(cast(float, value))
        records.append(
            TrialRecord(
                trial=trial,
                outcome=f"alice=indeterminate,bob={label}",
                values={"alice": None, "bob": label, "alice_kind": "indeterminate"},
            )
        )
    return records, analytic


def conditioning_tables(lab: FriendLab) -> dict[str, dict[str, dict[str, float]]]:
    """Bob's matched-basis predictions given Alice's outcome, in both frames.

    Frame 2 treats the friend's outcome as absolute and conditions on it; frame 1
    keeps the lab unitary, so Bob's prediction is his marginal whatever Alice saw.
    """
    frame_2: dict[str, dict[str, float]] = {}
    frame_1: dict[str, dict[str, float]] = {}
    marginal = {
        spin_label(value): p
        for value, p in born_probabilities(
            partial_trace(lab.after, {BOB}), spin_observable(BOB)
        ).items()
    }
    for branch in lab.alice_branches(singlet(ALICE, BOB)):
        alice = spin_label(cast(float, branch.outcome))
        if branch.updated is None:
            continue
        frame_2[alice] = {
            spin_label(cast(float, b.outcome)): b.probability for b in lab.bob_branches(branch.updated)
        }
        frame_1[alice] = dict(marginal)
    return {"frame_1": frame_1, "frame_2": frame_2}


def run_wigners_friend(config: ScenarioConfig) -> ScenarioReport:
    lab = FriendLab(config)
    report = ScenarioReport(scenario=config.scenario, config=config)
    preparation = config.streams.preparation

    opened = open_chain(config)
    open_gate = determinacy_gate(opened, "S", "E1", 1.0)
    open_run = lab.differentiation(open_gate is Gate.PERMIT, config.steps, config.seed, preparation)
    anticorrelated = sum(p for path, p in lab.open_tree().distribution().items() if path[0] != path[1])
    reversal_open = lab.reversal_attempt_open()

    isolated = isolated_chain(config)
    closed_gate = determinacy_gate(isolated, "S", "E1", config.stability.window_length)
    closed_run = lab.differentiation(closed_gate is Gate.PERMIT, config.steps, config.seed, preparation)
    restored = reverse(closed_run.final_state, lab.forward)
    restored_fidelity = fidelity(restored, lab.initial)
    marginal_plain = lab.bob_marginal(lab.after)
    marginal_reversed = lab.bob_marginal(restored)
    marginal_gap = max(abs(marginal_plain[k] - marginal_reversed[k]) for k in marginal_plain)

    tables = conditioning_tables(lab)
    gap = max(
        abs(tables["frame_2"][a][b] - tables["frame_1"][a][b]) for a in tables["frame_2"] for b in tables["frame_2"][a]
    )

    report.tables["open_lab"] = {
        "gate": open_gate.value,
        "licensed_updates": open_run.licensed_updates,
        "outcome": open_run.outcome.model_dump(mode="json"),
        "anticorrelation": anticorrelated,
        "reversal": reversal_open,
    }
    report.tables["isolated_lab"] = {
        "gate": closed_gate.value,
        "licensed_updates": closed_run.licensed_updates,
        "values": [point.value.kind for point in closed_run.points],
        "reversal_fidelity": restored_fidelity,
        "bob_marginal": marginal_plain,
        "bob_marginal_after_reversal": marginal_reversed,
    }
    report.tables["contradiction"] = {
        **tables,
        "max_disagreement": gap,
        "resolution": {"gate": closed_gate.value, "conditioning_on_alice": "forbidden"},
    }

    report.expectations.extend(
        [
            check("open_gate_permits", open_gate is Gate.PERMIT, Gate.PERMIT.value, open_gate.value),
            check("open_value_determinate", open_run.outcome.is_determinate),
            close("open_anticorrelation", anticorrelated, 1.0, OUTCOME_TOL),
            check("open_reversal_refused", reversal_open == "IrreversibleContext", "IrreversibleContext", reversal_open),
            check("isolated_gate_denies", closed_gate is Gate.DENY, Gate.DENY.value, closed_gate.value),
            check(
                "isolated_no_licensed_updates",
                closed_run.licensed_updates == 0 and not any(p.value.is_determinate for p in closed_run.points),
            ),
            close("isolated_reversal_fidelity", restored_fidelity, 1.0, OUTCOME_TOL),
            close("bob_marginal_invariant", marginal_gap, 0.0, MARGINAL_TOL),
            check("frames_disagree", gap >= CONTRADICTION_GAP, f">= {CONTRADICTION_GAP}", gap),
            check("conditioning_forbidden", closed_gate is Gate.DENY),
        ]
    )
    for label, p in marginal_plain.items():
        report.expectations.append(close(f"bob_marginal[{label}]", p, 0.5, OUTCOME_TOL))

    if config.lab_open:
        records, analytic = _open_records(lab, config)
        graph = opened
    else:
        records, analytic = _isolated_records(lab, config)
        graph = isolated
        determinate = sum(1 for record in records if record.values["alice_kind"] == "determinate")
        report.expectations.append(check("determinate_records_inside_lab", determinate == 0, 0, determinate))
    report.records = records
    report.frequencies = tabulate(records, analytic)
    report.expectations.extend(frequency_checks(report.frequencies))
    record_slices(report, graph, SLICES)
    logger.info("Wigner's friend run finished (lab open: %s)", config.lab_open)
    return report


__all__ = [
    "FriendLab",
    "conditioning_tables",
    "friend_coupling",
    "isolated_chain",
    "open_chain",
    "run_wigners_friend",
]
