"""Membership, value-determination ticks, isolation and the determinacy gate."""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Iterable
from enum import Enum

import networkx as nx

from .errors import CycleRejected, PrimeTargeted, TemporalOrderViolation
from .models import (
    ChainEvent,
    ChainGraph,
    Isolation,
    Membership,
    RoleClass,
    ValueDeterminationEdge,
)

logger = logging.getLogger(__name__)


class Gate(str, Enum):
    PERMIT = "permit"
    DENY = "deny"


def structure(graph: ChainGraph, t: float | None = None) -> nx.DiGraph:
    """Directed graph of every edge with at least one tick (up to ``t`` when given)."""
    digraph = nx.DiGraph()
    digraph.add_nodes_from(graph.nodes)
    for edge in graph.edges:
        ticks = len(edge.tick_times) if t is None else edge.ticks_until(t)
        if ticks:
            digraph.add_edge(edge.source, edge.target, ticks=ticks, blueprint=edge.blueprint)
    return digraph


def active_edges(graph: ChainGraph, t: float) -> list[ValueDeterminationEdge]:
    """Edges ticked at least ``min_ticks`` times in the trailing window ``(t - dt, t]``."""
    window = graph.stability.window_length
    return [
        edge
        for edge in graph.edges
        if edge.ticks_between(t - window, t) >= graph.stability.min_ticks
    ]


def sdc_members(graph: ChainGraph, t: float) -> set[str]:
    """Initiators plus everything reachable from any initiator along active edges.

    A subordinate stays a member by declaration after its own prime link lapses,
    so the systems it ticks are members too.
    """
    adjacency: dict[str, list[str]] = {}
    for edge in active_edges(graph, t):
        adjacency.setdefault(edge.source, []).append(edge.target)
    members = {name for name, node in graph.nodes.items() if node.is_initiator}
    queue = deque(sorted(members))
    seen = set(queue)
    while queue:
        current = queue.popleft()
        for nxt in adjacency.get(current, ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return members | seen


def membership(graph: ChainGraph, system: str, t: float) -> Membership:
    graph.node(system)
    if system in sdc_members(graph, t):
        return Membership(kind="SDC", chain_id=graph.chain_id)
    return Membership(kind="UDC")


def _append(graph: ChainGraph, event: ChainEvent, **changes: object) -> ChainGraph:
    return graph.model_copy(update={"events": (*graph.events, event), **changes})


def _check_clock(graph: ChainGraph, t: float) -> None:
    clock = graph.clock
    if clock is not None and t < clock:
        raise TemporalOrderViolation(f"Event at t={t} precedes the latest event at t={clock}.")


def blocking_isolation(graph: ChainGraph, source: str, target: str, t: float) -> Isolation | None:
    return next(
        (iso for iso in graph.isolations if iso.active_at(t) and iso.crosses(source, target)),
        None,
    )


def record_value_determination(
    graph: ChainGraph, source: str, target: str, t: float, blueprint: bool = False
) -> ChainGraph:
    """Append a tick ``source -> target`` at ``t``.

    A non-member source produces an unstable-differentiation event instead of
    an edge; ticks across an active isolation boundary are logged as blocked.
    """
    graph.node(source)
    target_node = graph.node(target)
    _check_clock(graph, t)

    isolation = blocking_isolation(graph, source, target, t)
    if isolation is not None:
        logger.warning("Tick %s -> %s at t=%s blocked by isolation", source, target, t)
        return _append(graph, ChainEvent(kind="blocked", time=t, source=source, target=target))

    if not membership(graph, source, t).is_sdc:
        logger.info("Unstable differentiation %s -> %s at t=%s", source, target, t)
        return _append(
            graph,
            ChainEvent(kind="unstable", time=t, source=source, target=target, detail="source is UDC"),
        )

    if target_node.role_class is RoleClass.PRIME_INITIATOR:
        raise PrimeTargeted(f"{source} -> {target}: prime initiators are never value-determined.")
    existing = graph.edge(source, target)
    if existing is None:
        digraph = structure(graph)
        if source == target or (target in digraph and nx.has_path(digraph, target, source)):
            raise CycleRejected(f"Tick {source} -> {target} would close a cycle.")
        window = graph.stability.window_length
        edge = ValueDeterminationEdge(
            source=source,
            target=target,
            window_start=t,
            window_end=t + window,
            tick_times=(t,),
            blueprint=blueprint,
        )
        edges = (*graph.edges, edge)
    else:
        updated = existing.with_tick(t, graph.stability.window_length)
        edges = tuple(updated if e.key == existing.key else e for e in graph.edges)
    event = ChainEvent(kind="tick", time=t, source=source, target=target)
    return _append(graph, event, edges=edges)


def isolate(graph: ChainGraph, boundary: Iterable[str], t: float) -> ChainGraph:
    """Stop crossing edges from accruing ticks; inside members lapse at ``t + dt`` at the latest."""
    inside = frozenset(boundary)
    if not inside:
        raise ValueError("Isolation boundary must be non-empty.")
    for system in inside:
        graph.node(system)
    _check_clock(graph, t)
    if not any((e.source in inside) != (e.target in inside) for e in graph.edges):
        return graph
    isolation = Isolation(boundary=inside, start=t, lapse_time=t + graph.stability.window_length)
    logger.info("Isolated %s at t=%s; lapse at t=%s", sorted(inside), t, isolation.lapse_time)
    event = ChainEvent(kind="isolate", time=t, systems=tuple(sorted(inside)))
    return _append(graph, event, isolations=(*graph.isolations, isolation))


def reopen(graph: ChainGraph, boundary: Iterable[str], t: float) -> ChainGraph:
    """End the active isolation of ``boundary`` at ``t``."""
    inside = frozenset(boundary)
    _check_clock(graph, t)
    updated = []
    found = False
    for iso in graph.isolations:
        if iso.boundary == inside and iso.active_at(t):
            iso = iso.model_copy(update={"end": t})
            found = True
        updated.append(iso)
    if not found:
        return graph
    event = ChainEvent(kind="reopen", time=t, systems=tuple(sorted(inside)))
    return _append(graph, event, isolations=tuple(updated))


def lapse_time(graph: ChainGraph, boundary: Iterable[str]) -> float | None:
    inside = frozenset(boundary)
    return next(
        (iso.lapse_time for iso in reversed(graph.isolations) if iso.boundary == inside),
        None,
    )


def determinacy_gate(graph: ChainGraph, system: str, env: str, t: float) -> Gate:
    """Permit iff ``env`` belongs to the SDC at ``t``."""
    graph.node(system)
    if membership(graph, env, t).is_sdc:
        return Gate.PERMIT
    return Gate.DENY


__all__ = [
    "Gate",
    "active_edges",
    "blocking_isolation",
    "determinacy_gate",
    "isolate",
    "lapse_time",
    "membership",
    "record_value_determination",
    "reopen",
    "sdc_members",
    "structure",
]
