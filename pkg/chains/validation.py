"""Structural validation of chain graphs; violations are data, not faults."""

from __future__ import annotations

from typing import Literal

import networkx as nx
from pydantic import BaseModel, Field

from .graph import sdc_members, structure
from .models import ChainGraph, RoleClass

ViolationKind = Literal[
    "no_prime",
    "cycle",
    "edge_into_prime",
    "disconnected_member",
    "time_order",
    "co_location",
    "no_udc",
]


class Violation(BaseModel):
    kind: ViolationKind
    nodes: list[str] = Field(default_factory=list)
    detail: str = ""


class ValidationReport(BaseModel):
    violations: list[Violation] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {violation.kind for violation in self.violations}


def validate(
    graph: ChainGraph, t: float | None = None, actual_universe: bool = False
) -> ValidationReport:
    """Check the structure constraints at time slice ``t`` (default: all ticks).

    ``actual_universe`` additionally requires at least one UDC system.
    """
    report = ValidationReport()
    digraph = structure(graph, t)
    primes = graph.primes

    if not primes:
        report.violations.append(Violation(kind="no_prime", detail="No prime initiator declared."))

    for cycle in nx.simple_cycles(digraph):
        report.violations.append(
            Violation(kind="cycle", nodes=list(cycle), detail=" -> ".join([*cycle, cycle[0]]))
        )

    for source, target in digraph.edges:
        if graph.nodes[target].role_class is RoleClass.PRIME_INITIATOR:
            report.violations.append(
                Violation(kind="edge_into_prime", nodes=[source, target], detail=f"{source} -> {target}")
            )

    reachable = set(primes)
    for prime in primes:
        reachable |= nx.descendants(digraph, prime)
    for name, node in graph.nodes.items():
        if (
            node.role_class is RoleClass.SUBORDINATE_INITIATOR
            and digraph.number_of_edges()
            and name not in reachable
        ):
            report.violations.append(
                Violation(kind="disconnected_member", nodes=[name], detail="Subordinate unreachable from a prime.")
            )
    for source in sorted({source for source, _ in digraph.edges}):
        if not graph.nodes[source].is_initiator and source not in reachable:
            report.violations.append(
                Violation(kind="disconnected_member", nodes=[source], detail="Ticking system unreachable from a prime.")
            )

    times = [event.time for event in graph.events if t is None or event.time <= t]
    for earlier, later in zip(times, times[1:], strict=False):
        if later < earlier:
            report.violations.append(
                Violation(kind="time_order", detail=f"Event at t={later} recorded after t={earlier}.")
            )
            break

    for source, target in digraph.edges:
        here, there = graph.nodes[source].position, graph.nodes[target].position
        if here is not None and there is not None and here != there:
            report.violations.append(
                Violation(kind="co_location", nodes=[source, target], detail=f"{here} != {there}")
            )

    if actual_universe:
        at = t if t is not None else (graph.clock or 0.0)
        if set(graph.nodes) <= sdc_members(graph, at):
            report.violations.append(Violation(kind="no_udc", detail="Every system belongs to the SDC."))
    return report


__all__ = ["ValidationReport", "Violation", "ViolationKind", "validate"]
