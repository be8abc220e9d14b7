from __future__ import annotations

import math
import unittest

from scenarios import InvalidConfig, run_scenario
from scenarios.models import Amplitudes, Mode, Scenario, ScenarioConfig, ScenarioReport, StreamConfig

TRIALS = 2000
# Frequencies sit within three sigma of the analytic value; checked here at a looser radius.
LOOSE = 0.05


def analytic_failures(report: ScenarioReport) -> list[str]:
    return [
        item.name
        for item in report.failures()
        if not item.name.startswith("frequency[") and item.name != "setting_independence"
    ]


def frequencies(report: ScenarioReport) -> dict[str, float]:
    return {row.outcome: row.frequency for row in report.frequencies}


class ToySdcTest(unittest.TestCase):
    def test_every_mode_matches_history_weights(self) -> None:
        for mode in Mode:
            with self.subTest(mode=mode.value):
                report = run_scenario(ScenarioConfig(scenario=Scenario.TOY_SDC, mode=mode, trials=TRIALS))
                self.assertEqual(analytic_failures(report), [])
                for outcome, frequency in frequencies(report).items():
                    self.assertAlmostEqual(frequency, 0.25, delta=LOOSE, msg=outcome)
                self.assertEqual(report.expectation("chain_path").observed, ["A->B", "B->C", "C->D"])

    def test_single_history_passes_outright(self) -> None:
        config = ScenarioConfig(
            scenario=Scenario.TOY_SDC,
            trials=300,
            amplitudes=Amplitudes(alpha=1.0, beta=0.0, gamma=0.0, delta=0.0),
        )
        for mode in Mode:
            with self.subTest(mode=mode.value):
                report = run_scenario(config.model_copy(update={"mode": mode}))
                self.assertTrue(report.passed, [item.name for item in report.failures()])
                self.assertEqual({record.outcome for record in report.records}, {"alpha"})

    def test_probabilistic_roles(self) -> None:
        report = run_scenario(ScenarioConfig(scenario=Scenario.TOY_SDC, trials=100))
        self.assertEqual(report.tables["roles"]["C->D"], "UnstableDifferentiator")
        self.assertTrue(report.expectation("unstable_stage_indeterminate").passed)

    def test_hidden_variable_mode_records_labels(self) -> None:
        report = run_scenario(
            ScenarioConfig(scenario=Scenario.TOY_SDC, mode=Mode.DETERMINISTIC_EARLY_HV, trials=50)
        )
        for record in report.records:
            self.assertEqual(record.values["lambda"], f"lambda_{record.outcome}")

    def test_chain_snapshots(self) -> None:
        report = run_scenario(ScenarioConfig(scenario=Scenario.TOY_SDC, trials=10))
        self.assertEqual(sorted(report.snapshots), ["0", "1", "2"])
        final = report.snapshots["2"]
        for edge in ('"A" -> "B"', '"B" -> "C"', '"C" -> "D"'):
            self.assertIn(edge, final)
        self.assertNotIn('"C" -> "D"', report.snapshots["1"])

    def test_unnormalized_amplitudes_rejected(self) -> None:
        config = ScenarioConfig(scenario=Scenario.TOY_SDC, amplitudes=Amplitudes(alpha=1.0, beta=1.0))
        with self.assertRaises(InvalidConfig):
            run_scenario(config)

    def test_reports_are_reproducible(self) -> None:
        config = ScenarioConfig(scenario=Scenario.TOY_SDC, mode=Mode.DETERMINISTIC_CHANCY, trials=200, seed=11)
        self.assertEqual(run_scenario(config).model_dump_json(), run_scenario(config).model_dump_json())


class InterferometerTest(unittest.TestCase):
    def test_without_d3_every_photon_reaches_d2(self) -> None:
        report = run_scenario(ScenarioConfig(scenario=Scenario.INTERFEROMETER, d3_present=False, trials=500))
        self.assertTrue(report.passed, [item.name for item in report.failures()])
        self.assertEqual(frequencies(report), {"D1": 0.0, "D2": 1.0})

    def test_d3_splits_clicks(self) -> None:
        report = run_scenario(ScenarioConfig(scenario=Scenario.INTERFEROMETER, trials=TRIALS))
        self.assertEqual(analytic_failures(report), [])
        self.assertAlmostEqual(report.tables["click_probabilities"]["D3"], 0.5, places=9)
        observed = frequencies(report)
        self.assertAlmostEqual(observed["D3"], 0.5, delta=LOOSE)
        self.assertAlmostEqual(observed["D1"], 0.25, delta=LOOSE)
        self.assertEqual(report.tables["roles"]["BS1"], "SecondOrderUnstableUndifferentiator")

    def test_isolated_lab_records_nothing_determinate(self) -> None:
        report = run_scenario(ScenarioConfig(scenario=Scenario.INTERFEROMETER, lab_open=False, trials=300))
        self.assertTrue(report.passed, [item.name for item in report.failures()])
        self.assertTrue(all(record.outcome == "indeterminate" for record in report.records))
        self.assertEqual(set(report.tables["gates"].values()), {"deny"})

    def test_firing_detector_ticks_system_once(self) -> None:
        report = run_scenario(ScenarioConfig(scenario=Scenario.INTERFEROMETER, d3_present=False, trials=50))
        final = report.snapshots["1"]
        self.assertEqual(final.count('-> "S"'), 1)
        self.assertIn('"D2" -> "S"', final)
        isolated = run_scenario(ScenarioConfig(scenario=Scenario.INTERFEROMETER, lab_open=False, trials=50))
        self.assertNotIn('-> "S"', isolated.snapshots["1"])

    def test_sign_error_only_breaks_first_splitter(self) -> None:
        report = run_scenario(
            ScenarioConfig(
                scenario=Scenario.INTERFEROMETER, d3_present=False, inject_bs_sign_error=True, trials=200
            )
        )
        self.assertEqual([item.name for item in report.failures()], ["bs1_state"])


class WignersFriendTest(unittest.TestCase):
    NAMED = (
        "open_gate_permits",
        "open_value_determinate",
        "open_anticorrelation",
        "open_reversal_refused",
        "isolated_gate_denies",
        "isolated_no_licensed_updates",
        "isolated_reversal_fidelity",
        "bob_marginal_invariant",
        "frames_disagree",
        "conditioning_forbidden",
    )

    def test_open_lab(self) -> None:
        report = run_scenario(ScenarioConfig(scenario=Scenario.WIGNERS_FRIEND, trials=TRIALS))
        for name in self.NAMED:
            self.assertTrue(report.expectation(name).passed, name)
        self.assertEqual(analytic_failures(report), [])
        for record in report.records:
            self.assertNotEqual(record.values["alice"], record.values["bob"])

    def test_isolated_lab(self) -> None:
        report = run_scenario(ScenarioConfig(scenario=Scenario.WIGNERS_FRIEND, lab_open=False, trials=TRIALS))
        self.assertEqual(analytic_failures(report), [])
        self.assertTrue(report.expectation("determinate_records_inside_lab").passed)
        self.assertEqual(report.tables["isolated_lab"]["licensed_updates"], 0)
        for frequency in frequencies(report).values():
            self.assertAlmostEqual(frequency, 0.5, delta=LOOSE)


class EprBellTest(unittest.TestCase):
    def test_named_expectations(self) -> None:
        report = run_scenario(ScenarioConfig(scenario=Scenario.EPR_BELL, trials=TRIALS))
        self.assertEqual(analytic_failures(report), [])
        self.assertAlmostEqual(report.tables["chsh"]["singlet"], 2 * math.sqrt(2), places=9)
        self.assertTrue(report.expectation("chsh_violation").passed)
        self.assertTrue(report.expectation("decohered_hidden_variable_model").passed)
        self.assertEqual(len(report.tables["decohered_frequencies"]), 16)
        self.assertLessEqual(abs(report.tables["chsh"]["decohered"]), 2.0 + 1e-9)
        self.assertEqual(len(report.frequencies), 16)
        self.assertGreater(report.tables["independence"]["p_value"], 1e-4)

    def test_hidden_variable_conditions_decohered_outcomes(self) -> None:
        config = ScenarioConfig(
            scenario=Scenario.EPR_BELL, alice_angles=(0.0, math.pi / 2), bob_angles=(0.0, math.pi / 2), trials=600
        )
        report = run_scenario(config)
        self.assertTrue(report.expectation("decohered_hidden_variable_model").passed)
        labels = [record.values["lambda"] for record in report.records]
        self.assertEqual(set(labels), {"lambda=01", "lambda=10"})
        self.assertAlmostEqual(labels.count("lambda=01") / len(labels), 0.5, delta=LOOSE + 0.02)
        for record in report.records:
            if record.values["s"] == record.values["t"] == 0:
                expected = 1 if record.values["lambda"] == "lambda=01" else -1
                self.assertEqual(record.values["x_decohered"], expected)
                self.assertEqual(record.values["y_decohered"], -expected)

    def test_matched_settings_never_agree(self) -> None:
        config = ScenarioConfig(scenario=Scenario.EPR_BELL, alice_angles=(0.3, 1.2), bob_angles=(0.3, 1.2), trials=400)
        report = run_scenario(config)
        for record in report.records:
            if record.values["s"] == record.values["t"]:
                self.assertNotEqual(record.values["x"], record.values["y"])

    def test_shared_streams_rejected(self) -> None:
        config = ScenarioConfig(scenario=Scenario.EPR_BELL, streams=StreamConfig(outcomes=2, preparation=2))
        with self.assertRaises(InvalidConfig):
            run_scenario(config)


if __name__ == "__main__":
    unittest.main()
