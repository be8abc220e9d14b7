"""Bell trials through the process operator, checked against the direct Born rule."""

from __future__ import annotations

import logging
import math
from typing import cast

import numpy as np
import pandas as pd
from scipy.stats import chi2_contingency

from chains.graph import record_value_determination
from chains.models import ChainGraph
from qcm.bell import (
    OUTCOMES,
    ProbabilityTable,
    bell_nodes,
    bell_process,
    chsh,
    direct_table,
    qcm_table,
    spin_family,
)
from qcm.classical import ClassicalModel, classical_limit
from qcm.errors import NotDiagonal
from qcm.process import InterventionMap, check_qmc, qcm_born
from quantum_core.models import HilbertSpace
from quantum_core.operations import Branch, draw
from quantum_core.rng import trial_rng

from .errors import InvalidConfig
from .models import ScenarioConfig, ScenarioReport, TrialRecord, check, close, frequency_checks, tabulate
from .sampling import BranchSampler, Path
from .slices import record_slices

logger = logging.getLogger(__name__)

PIPELINE_TOL = 1e-8
ANALYTIC_TOL = 1e-9
CLASSICAL_BOUND = 2.0
SIGNIFICANCE = 0.01
SLICES = (0.0, 1.0)


def _check_streams(config: ScenarioConfig) -> None:
    streams = config.streams
    used = (streams.outcomes, streams.preparation, streams.settings_a, streams.settings_b)
    if len(set(used)) != len(used):
        raise InvalidConfig(f"Random streams must be pairwise independent, got {used}.")


def cell_label(s: int, t: int, x: int, y: int) -> str:
    return f"s={s},t={t},x={x:+d},y={y:+d}"


def table_json(table: ProbabilityTable) -> dict[str, float]:
    return {cell_label(*key): value for key, value in sorted(table.items())}


def max_difference(a: ProbabilityTable, b: ProbabilityTable) -> float:
    return max(abs(a[key] - b[key]) for key in a)


def factorization_error(
    model: ClassicalModel, alice_angles: tuple[float, float], bob_angles: tuple[float, float]
) -> float:
    """Largest gap between the classical model's factorized sum and the process Born rule."""
    p = model.process
    lam, alice, bob = p.nodes
    through = InterventionMap.identity(lam)
    worst = 0.0
    for s, theta_a in enumerate(alice_angles):
        for t, theta_b in enumerate(bob_angles):
            for tau_a in spin_family(alice, theta_a, s):
                for tau_b in spin_family(bob, theta_b, t):
                    chosen = {"L": through, "A": tau_a, "B": tau_b}
                    worst = max(worst, abs(model.joint(chosen) - qcm_born(p, chosen)))
    return worst


def singlet_chsh(alice_angles: tuple[float, float], bob_angles: tuple[float, float]) -> float:
    """CHSH combination of ``E(a, b) = -cos(a - b)``."""
    (a0, a1), (b0, b1) = alice_angles, bob_angles
    return -math.cos(a0 - b0) + math.cos(a0 - b1) - math.cos(a1 - b0) - math.cos(a1 - b1)


def lambda_label(space: HilbertSpace, index: int) -> str:
    levels = space.levels_of(index)
    return "lambda=" + "".join(str(levels[label]) for label in space.labels)


def _wing(model: ClassicalModel, node: str, family: list[InterventionMap], source_level: int) -> list[Branch]:
    conditional = model.tables[node].probabilities[:, source_level]
    return [
        Branch(
            outcome,
            float(sum(conditional[level] * np.real(item.tau[level, level]) for level in range(len(conditional)))),
            None,
        )
        for outcome, item in zip(OUTCOMES, family, strict=True)
    ]


def hidden_variable_sampler(
    model: ClassicalModel, alice_family: list[InterventionMap], bob_family: list[InterventionMap]
) -> BranchSampler:
    """Tree ``lambda -> x -> y`` read off the classical tables for one setting pair.

    The source passes ``lambda`` through unchanged, so each wing's outcome depends
    only on its own half of ``lambda`` and its own setting.
    """
    source = model.tables["L"]
    alice_in, bob_in = source.child_space.labels

    def expand(path: Path) -> list[Branch]:
        if not path:
            return [Branch(index, float(p), None) for index, p in enumerate(source.probabilities[:, 0])]
        levels = source.child_space.levels_of(cast(int, path[0]))
        if len(path) == 1:
            return _wing(model, "A", alice_family, levels[alice_in])
        if len(path) == 2:
            return _wing(model, "B", bob_family, levels[bob_in])
        return []

    return BranchSampler(expand)


def hidden_variable_error(
    samplers: dict[tuple[int, int], BranchSampler], table: ProbabilityTable
) -> float:
    """Largest gap between the lambda-marginalized hidden-variable tree and ``table``."""
    worst = 0.0
    for (s, t), sampler in samplers.items():
        marginal = dict.fromkeys(((x, y) for x in OUTCOMES for y in OUTCOMES), 0.0)
        for (_, x, y), p in sampler.distribution().items():
            marginal[(cast(int, x), cast(int, y))] += p
        for (x, y), p in marginal.items():
            worst = max(worst, abs(p - table[(s, t, x, y)]))
    return worst


def independence_test(records: list[TrialRecord]) -> dict[str, float]:
    """Chi-square test of setting pairs against preparation labels."""
    frame = pd.DataFrame(
        [{"settings": f"{r.values['s']},{r.values['t']}", "lambda": r.values["lambda"]} for r in records]
    )
    counts = pd.crosstab(frame["settings"], frame["lambda"]).to_numpy()
    if min(counts.shape) < 2:
        return {"statistic": 0.0, "p_value": 1.0, "dof": 0.0}
    result = chi2_contingency(counts, correction=False)
    return {"statistic": float(result[0]), "p_value": float(result[1]), "dof": float(result[2])}


def _flat_sampler(branches: list[Branch]) -> BranchSampler:
    return BranchSampler(lambda path: branches if not path else [])


def bell_chain(config: ScenarioConfig) -> ChainGraph:
    """Source, both devices and both particles, all kept in the SDC by the source."""
    graph = ChainGraph.declare(
        prime=["L"], others=["A", "B", "S_A", "S_B"], stability=config.stability, chain_id="SDC'"
    )
    for source, target in (("L", "A"), ("L", "B"), ("A", "S_A"), ("B", "S_B")):
        graph = record_value_determination(graph, source, target, 1.0)
    return graph


def run_epr_bell(config: ScenarioConfig) -> ScenarioReport:
    _check_streams(config)
    report = ScenarioReport(scenario=config.scenario, config=config)
    alice_angles, bob_angles = config.alice_angles, config.bob_angles

    p = bell_process(decohered=False)
    qmc = check_qmc(p)
    via_process = qcm_table(p, alice_angles, bob_angles)
    via_state = direct_table(alice_angles, bob_angles)
    pipeline_gap = max_difference(via_process, via_state)
    value = chsh(via_state)
    matched = qcm_table(p, alice_angles[:1], alice_angles[:1])
    anticorrelation = sum(prob for (_, _, x, y), prob in matched.items() if x != y)

    decohered = bell_process(decohered=True)
    decohered_table = qcm_table(decohered, alice_angles, bob_angles)
    decohered_value = chsh(decohered_table)
    model: ClassicalModel | None
    try:
        model = classical_limit(decohered)
        limit_error = factorization_error(model, alice_angles, bob_angles)
    except NotDiagonal as exc:
        logger.warning("Decohered process has no classical limit: %s", exc)
        model, limit_error = None, float("inf")
    try:
        classical_limit(p)
        singlet_classical = True
    except NotDiagonal:
        singlet_classical = False

    report.expectations.extend(
        [
            check("qmc_holds", qmc.ok, [], qmc.non_commuting),
            close("pipelines_agree", pipeline_gap, 0.0, PIPELINE_TOL),
            close("matched_anticorrelation", anticorrelation, 1.0, ANALYTIC_TOL),
            close("chsh_singlet_value", value, singlet_chsh(alice_angles, bob_angles), ANALYTIC_TOL),
            check("chsh_violation", value > CLASSICAL_BOUND, f"> {CLASSICAL_BOUND}", value),
            close("chsh_process_matches_direct", chsh(via_process), value, PIPELINE_TOL),
            check(
                "decohered_chsh_bounded",
                abs(decohered_value) <= CLASSICAL_BOUND + PIPELINE_TOL,
                f"<= {CLASSICAL_BOUND}",
                decohered_value,
            ),
            check("decohered_classical_limit", model is not None),
            close("decohered_factorization", limit_error if model is not None else 1.0, 0.0, PIPELINE_TOL),
            check("singlet_not_factorizable", not singlet_classical),
        ]
    )
    report.tables["qcm"] = table_json(via_process)
    report.tables["direct"] = table_json(via_state)
    report.tables["decohered"] = table_json(decohered_table)
    report.tables["chsh"] = {"singlet": value, "decohered": decohered_value, "bound": CLASSICAL_BOUND}
    report.tables["nodes"] = [node.name for node in bell_nodes()]

    lam, alice, bob = decohered.nodes
    settings = [(s, t) for s in range(len(alice_angles)) for t in range(len(bob_angles))]
    cells = {
        (s, t): _flat_sampler(
            [Branch((x, y), via_process[(s, t, x, y)], None) for x in OUTCOMES for y in OUTCOMES]
        )
        for s, t in settings
    }
    hidden: dict[tuple[int, int], BranchSampler] = {}
    if model is not None:
        hidden = {
            (s, t): hidden_variable_sampler(
                model, spin_family(alice, alice_angles[s], s), spin_family(bob, bob_angles[t], t)
            )
            for s, t in settings
        }
        report.expectations.append(
            close("decohered_hidden_variable_model", hidden_variable_error(hidden, decohered_table), 0.0, PIPELINE_TOL)
        )

    records: list[TrialRecord] = []
    decohered_records: list[TrialRecord] = []
    streams = config.streams
    lambda_space = lam.in_space
    for trial in range(config.trials):
        s = int(trial_rng(config.seed, trial, streams.settings_a).integers(len(alice_angles)))
        t = int(trial_rng(config.seed, trial, streams.settings_b).integers(len(bob_angles)))
        outcome_rng = trial_rng(config.seed, trial, streams.outcomes)
        ((x, y),) = cells[(s, t)].sample(outcome_rng)
        x, y = cast(int, x), cast(int, y)
        values: dict[str, str | int | float | None] = {"s": s, "t": t, "x": x, "y": y, "lambda": None}
        if hidden:
            tree = hidden[(s, t)]
            index = cast(int, draw(tree.branches(), trial_rng(config.seed, trial, streams.preparation)).outcome)
            xd = cast(int, draw(tree.branches((index,)), outcome_rng).outcome)
            yd = cast(int, draw(tree.branches((index, xd)), outcome_rng).outcome)
            values.update({"lambda": lambda_label(lambda_space, index), "x_decohered": xd, "y_decohered": yd})
            decohered_records.append(TrialRecord(trial=trial, outcome=cell_label(s, t, xd, yd), values={}))
        records.append(TrialRecord(trial=trial, outcome=cell_label(s, t, x, y), values=values))

    setting_weight = 1.0 / len(settings)
    expected = {cell_label(*key): setting_weight * prob for key, prob in sorted(via_process.items())}
    report.records = records
    report.frequencies = tabulate(records, expected)
    report.expectations.extend(frequency_checks(report.frequencies))

    if decohered_records:
        decohered_expected = {
            cell_label(*key): setting_weight * prob for key, prob in sorted(decohered_table.items())
        }
        decohered_rows = tabulate(decohered_records, decohered_expected)
        report.tables["decohered_frequencies"] = {row.outcome: row.frequency for row in decohered_rows}
        report.expectations.extend(
            check(f"frequency[decohered {row.outcome}]", row.within, row.expected, row.frequency, row.radius)
            for row in decohered_rows
        )
        independence = independence_test(records)
        report.tables["independence"] = independence
        report.expectations.append(
            check(
                "setting_independence",
                independence["p_value"] > SIGNIFICANCE,
                f"p > {SIGNIFICANCE}",
                independence["p_value"],
            )
        )
    record_slices(report, bell_chain(config), SLICES)
    logger.info("Bell run finished: CHSH %.6f over %d trials", value, config.trials)
    return report


__all__ = [
    "bell_chain",
    "cell_label",
    "factorization_error",
    "hidden_variable_error",
    "hidden_variable_sampler",
    "independence_test",
    "lambda_label",
    "max_difference",
    "run_epr_bell",
    "singlet_chsh",
    "table_json",
]
