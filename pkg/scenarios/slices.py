"""Chain snapshots recorded by scenario runs."""

from __future__ import annotations

from collections.abc import Iterable

from chains.export import events_json, to_dot
from chains.models import ChainGraph
from chains.validation import validate

from .models import Expectation, ScenarioReport, check


def slice_key(t: float) -> str:
    return f"{t:g}"


def record_slices(report: ScenarioReport, graph: ChainGraph, times: Iterable[float]) -> None:
    """Attach DOT snapshots, the event log and a validation check per time slice."""
    checks: list[Expectation] = []
    for t in times:
        key = slice_key(t)
        report.snapshots[key] = to_dot(graph, t)
        result = validate(graph, t)
        checks.append(
            check(
                f"chain_valid[t={key}]",
                result.ok,
                expected=[],
                observed=sorted(result.kinds()),
            )
        )
    report.events = events_json(graph)
    report.expectations.extend(checks)


__all__ = ["record_slices", "slice_key"]
