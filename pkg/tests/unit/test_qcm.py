from __future__ import annotations

import itertools
import math
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd

from qcm.bell import (
    LAMBDA_IN,
    LAMBDA_OUT,
    OUTCOMES,
    bell_nodes,
    bell_process,
    chsh,
    correlation,
    direct_table,
    qcm_table,
    spin_family,
)
from qcm.choi import (
    ChoiMatrix,
    apply_choi,
    choi_of_classical,
    choi_of_kraus,
    choi_of_unitary,
    dephasing,
    no_influence,
    state_factor,
)
from qcm.classical import classical_limit
from qcm.errors import IncompleteInterventionSet, InvalidProcess, NotDiagonal
from qcm.process import (
    InterventionMap,
    ProcessNode,
    ProcessOperator,
    check_qmc,
    instrument_is_complete,
    intervention_operator,
    normalization,
    process_to_json,
    qcm_born,
)
from quantum_core.errors import InvalidState
from quantum_core.gates import HALF, SIGMA_X, controlled_shift, singlet
from quantum_core.models import DensityOperator, HilbertSpace, PureState, UnitaryEvolution
from quantum_core.operations import partial_trace, tensor

STANDARD_ALICE = (0.0, math.pi / 2)
STANDARD_BOB = (5 * math.pi / 4, 7 * math.pi / 4)
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)


def _qubit(label: str, amplitudes) -> PureState:
    vector = np.asarray(amplitudes, dtype=complex)
    return PureState(HilbertSpace.qubits(label), vector / np.linalg.norm(vector))


class ChoiTest(unittest.TestCase):
    def test_unitary_channel_is_cptp_and_applies(self) -> None:
        space = HilbertSpace.qubits("x")
        flip = UnitaryEvolution(space, SIGMA_X)
        choi = choi_of_unitary(flip, ["x"], ["y"])
        self.assertTrue(choi.is_cptp())
        self.assertEqual(choi.rank(), 1)
        out = apply_choi(choi, PureState.basis(space).density())
        self.assertEqual(out.space.labels, ("y",))
        np.testing.assert_allclose(out.matrix, np.diag([0, 1]), atol=1e-12)

    def test_kraus_matches_unitary(self) -> None:
        inp, out = HilbertSpace.qubits("x"), HilbertSpace.qubits("y")
        from_kraus = choi_of_kraus([SIGMA_X], inp, out)
        from_unitary = choi_of_unitary(UnitaryEvolution(inp, SIGMA_X), ["x"], ["y"])
        np.testing.assert_allclose(from_kraus.matrix, from_unitary.matrix)

    def test_random_unitary_choi_matches_conjugation(self) -> None:
        rng = np.random.default_rng(41)
        space = HilbertSpace.of(("x", 2), ("z", 3))
        for _ in range(5):
            q, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
            choi = choi_of_unitary(UnitaryEvolution(space, q), ["x", "z"], ["x2", "z2"])
            self.assertTrue(choi.is_cptp())
            a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
            rho = a @ a.conj().T
            rho = DensityOperator(space, rho / np.trace(rho))
            np.testing.assert_allclose(apply_choi(choi, rho).matrix, q @ rho.matrix @ q.conj().T, atol=1e-10)

    def test_dephasing_kills_coherence(self) -> None:
        space = HilbertSpace.qubits("x")
        plus = PureState(space, np.array([HALF, HALF])).density()
        out = apply_choi(dephasing(space, ["y"]), plus)
        np.testing.assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-12)

    def test_classical_channel_validation(self) -> None:
        inp, out = HilbertSpace.qubits("x"), HilbertSpace.qubits("y")
        with self.assertRaises(InvalidState):
            choi_of_classical(np.array([[0.5, 0.5], [0.6, 0.5]]), inp, out)
        lossy = ChoiMatrix(out, inp, np.diag([1.0, 0.0, 1.0, 0.0]))
        self.assertFalse(lossy.is_cptp())

    def test_no_influence_through_controlled_shift(self) -> None:
        space = HilbertSpace.qubits("a", "b")
        choi = choi_of_unitary(controlled_shift(("a", 2), ("b", 2), space), ["a", "b"], ["a2", "b2"])
        self.assertFalse(no_influence(choi, ["a"], ["b2"]))
        # Phase kickback: the target's x-basis state flips the control's.
        self.assertFalse(no_influence(choi, ["b"], ["a2"]))
        plus = PureState(HilbertSpace.qubits("a"), np.array([HALF, HALF])).density()
        outputs = [
            partial_trace(apply_choi(choi, tensor(plus, _qubit("b", amplitudes).density())), {"a2"}).matrix
            for amplitudes in ([HALF, HALF], [HALF, -HALF])
        ]
        self.assertGreater(float(np.abs(outputs[0] - outputs[1]).max()), 0.4)

    def test_product_unitary_has_no_cross_influence(self) -> None:
        space = HilbertSpace.qubits("a", "b")
        product = UnitaryEvolution(space, np.kron(HADAMARD, SIGMA_X))
        choi = choi_of_unitary(product, ["a", "b"], ["a2", "b2"])
        self.assertTrue(no_influence(choi, ["b"], ["a2"]))
        self.assertTrue(no_influence(choi, ["a"], ["b2"]))
        self.assertFalse(no_influence(choi, ["a"], ["a2"]))
        rng = np.random.default_rng(12)
        plus = PureState(HilbertSpace.qubits("a"), np.array([HALF, HALF])).density()
        reference = None
        for _ in range(5):
            other = _qubit("b", rng.normal(size=2) + 1j * rng.normal(size=2)).density()
            marginal = partial_trace(apply_choi(choi, tensor(plus, other)), {"a2"}).matrix
            if reference is None:
                reference = marginal
            np.testing.assert_allclose(marginal, reference, atol=1e-12)
        np.testing.assert_allclose(reference, np.diag([1.0, 0.0]), atol=1e-12)


class ProcessTest(unittest.TestCase):
    def test_cycle_rejected(self) -> None:
        space_a, space_b = HilbertSpace.qubits("a.in"), HilbertSpace.qubits("b.in")
        a = ProcessNode("A", space_a, HilbertSpace.qubits("a.out"), parents=("B",))
        b = ProcessNode("B", space_b, HilbertSpace.qubits("b.out"), parents=("A",))
        factors = {
            "A": dephasing(HilbertSpace.qubits("b.out"), ["a.in"]),
            "B": dephasing(HilbertSpace.qubits("a.out"), ["b.in"]),
        }
        with self.assertRaises(InvalidProcess):
            ProcessOperator((a, b), factors)

    def test_factor_must_read_parents_only(self) -> None:
        lam, alice, bob = bell_nodes()
        process = bell_process()
        factors = dict(process.factors)
        factors["A"] = dephasing(HilbertSpace.qubits("elsewhere"), ["A.in"])
        with self.assertRaises(InvalidProcess):
            ProcessOperator((lam, alice, bob), factors)

    def test_bell_process_satisfies_qmc(self) -> None:
        report = check_qmc(bell_process())
        self.assertTrue(report.ok)
        self.assertEqual(report.product_error, 0.0)

    def test_qmc_flags_candidate_mismatch(self) -> None:
        process = bell_process()
        report = check_qmc(process, sigma=np.zeros_like(process.sigma))
        self.assertFalse(report.ok)

    def test_born_rule_ignores_factor_order(self) -> None:
        process = bell_process()
        lam, alice, bob = process.nodes
        chosen = {
            "L": InterventionMap.identity(lam),
            "A": spin_family(alice, 0.4, 0)[0],
            "B": spin_family(bob, 2.1, 0)[1],
        }
        tau = intervention_operator(process, chosen)
        expected = qcm_born(process, chosen)
        for order in itertools.permutations(["L", "A", "B"]):
            value = float(np.real(np.trace(process.sigma_for_order(order) @ tau)))
            self.assertAlmostEqual(value, expected, places=12)

    def test_overlapping_non_commuting_factors_fail_qmc(self) -> None:
        root = ProcessNode("R", HilbertSpace.qubits("R.in"), HilbertSpace.qubits("R.out"))
        left = ProcessNode("P", HilbertSpace.qubits("P.in"), parents=("R",))
        right = ProcessNode("Q", HilbertSpace.qubits("Q.in"), parents=("R",))
        plus = PureState(HilbertSpace.qubits("R.in"), np.array([HALF, HALF])).density()
        wire = HilbertSpace.qubits("R.out")
        factors = {
            "R": state_factor(plus),
            "P": dephasing(wire, ["P.in"]),
            "Q": choi_of_unitary(UnitaryEvolution(wire, HADAMARD), ["R.out"], ["Q.in"]),
        }
        report = check_qmc(ProcessOperator((root, left, right), factors))
        self.assertFalse(report.ok)
        self.assertEqual([pair[:2] for pair in report.non_commuting], [("P", "Q")])
        self.assertGreater(report.non_commuting[0][2], 0.1)

    def test_missing_intervention(self) -> None:
        process = bell_process()
        lam, alice, _ = process.nodes
        chosen = {"L": InterventionMap.identity(lam), "A": spin_family(alice, 0.0, 0)[0]}
        with self.assertRaises(IncompleteInterventionSet):
            qcm_born(process, chosen)

    def test_instruments_normalize(self) -> None:
        process = bell_process()
        lam, alice, bob = process.nodes
        families = {
            "L": [InterventionMap.identity(lam)],
            "A": spin_family(alice, 0.3, 0),
            "B": spin_family(bob, 1.1, 0),
        }
        self.assertTrue(instrument_is_complete(families["A"], alice))
        self.assertTrue(instrument_is_complete(families["L"], lam))
        self.assertAlmostEqual(normalization(process, families), 1.0, places=9)

    def test_kraus_intervention_on_source(self) -> None:
        lam, _, _ = bell_nodes()
        identity = np.eye(4)
        via_kraus = InterventionMap.from_kraus(lam, [identity], "k", "pass")
        np.testing.assert_allclose(via_kraus.tau, InterventionMap.identity(lam).tau)
        with self.assertRaises(InvalidProcess):
            InterventionMap.from_povm_element(lam, identity, 0, 1)

    def test_process_json_lists_nodes(self) -> None:
        payload = process_to_json(bell_process())
        self.assertEqual([node["name"] for node in payload["nodes"]], ["L", "A", "B"])


class BellTest(unittest.TestCase):
    def test_pipelines_agree_on_every_cell(self) -> None:
        via_process = qcm_table(bell_process(), STANDARD_ALICE, STANDARD_BOB)
        via_state = direct_table(STANDARD_ALICE, STANDARD_BOB)
        self.assertEqual(len(via_process), 16)
        for key, value in via_state.items():
            self.assertAlmostEqual(via_process[key], value, delta=1e-8)

    def test_singlet_correlation_oracle(self) -> None:
        rng = np.random.default_rng(5)
        for _ in range(10):
            a, b = rng.uniform(0, 2 * math.pi, size=2)
            table = qcm_table(bell_process(), [a], [b])
            self.assertAlmostEqual(correlation(table, 0, 0), -math.cos(a - b), places=9)

    def test_matched_settings_anticorrelate(self) -> None:
        table = qcm_table(bell_process(), [0.7], [0.7])
        self.assertAlmostEqual(sum(p for (_, _, x, y), p in table.items() if x != y), 1.0, places=9)

    def test_chsh_violation_at_standard_angles(self) -> None:
        value = chsh(direct_table(STANDARD_ALICE, STANDARD_BOB))
        self.assertAlmostEqual(value, 2 * math.sqrt(2), places=9)
        flipped = chsh(direct_table(STANDARD_ALICE, (math.pi / 4, 3 * math.pi / 4)))
        self.assertAlmostEqual(flipped, -2 * math.sqrt(2), places=9)
        self.assertAlmostEqual(chsh(qcm_table(bell_process(), STANDARD_ALICE, STANDARD_BOB)), value, delta=1e-8)

    def test_decohered_process_is_classical(self) -> None:
        decohered = bell_process(decohered=True)
        value = chsh(qcm_table(decohered, STANDARD_ALICE, STANDARD_BOB))
        self.assertLessEqual(abs(value), 2 + 1e-8)
        model = classical_limit(decohered)
        lam, alice, bob = decohered.nodes
        through = InterventionMap.identity(lam)
        for s, t in itertools.product(range(2), range(2)):
            for tau_a, tau_b in itertools.product(
                spin_family(alice, STANDARD_ALICE[s], s), spin_family(bob, STANDARD_BOB[t], t)
            ):
                chosen = {"L": through, "A": tau_a, "B": tau_b}
                self.assertAlmostEqual(model.joint(chosen), qcm_born(decohered, chosen), delta=1e-8)

    def test_singlet_has_no_classical_limit(self) -> None:
        with self.assertRaises(NotDiagonal) as ctx:
            classical_limit(bell_process())
        self.assertGreater(ctx.exception.max_off_diagonal, 0.1)

    def test_classical_tables_export(self) -> None:
        model = classical_limit(bell_process(decohered=True))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "cpt.csv"
            model.to_csv(path)
            frame = pd.read_csv(path)
        root = frame[frame["node"] == "L"]
        self.assertAlmostEqual(root["probability"].sum(), 1.0)
        self.assertEqual(set(frame["node"]), {"L", "A", "B"})

    def test_outcomes_and_labels(self) -> None:
        self.assertEqual(OUTCOMES, (1, -1))
        self.assertEqual(len(LAMBDA_IN), len(LAMBDA_OUT))
        rho = singlet(*LAMBDA_IN).density()
        np.testing.assert_allclose(state_factor(rho).matrix, rho.matrix)
        self.assertIsInstance(rho, DensityOperator)


if __name__ == "__main__":
    unittest.main()
