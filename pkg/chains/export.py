"""Time-slice snapshots of a chain graph, rendered as DOT or JSON."""

from __future__ import annotations

import json
from typing import Literal

from pydantic import BaseModel, Field

from .graph import active_edges, sdc_members
from .models import ChainGraph


class EdgeView(BaseModel):
    source: str
    target: str
    ticks: int
    active: bool
    blueprint: bool = False


class ChainSnapshot(BaseModel):
    chain_id: str
    time: float
    members: dict[str, Literal["SDC", "UDC"]] = Field(default_factory=dict)
    edges: list[EdgeView] = Field(default_factory=list)


def snapshot(graph: ChainGraph, t: float) -> ChainSnapshot:
    members = sdc_members(graph, t)
    active = {edge.key for edge in active_edges(graph, t)}
    edges = [
        EdgeView(
            source=edge.source,
            target=edge.target,
            ticks=edge.ticks_until(t),
            active=edge.key in active,
            blueprint=edge.blueprint,
        )
        for edge in graph.edges
        if edge.ticks_until(t)
    ]
    return ChainSnapshot(
        chain_id=graph.chain_id,
        time=t,
        members={name: "SDC" if name in members else "UDC" for name in sorted(graph.nodes)},
        edges=sorted(edges, key=lambda e: (e.source, e.target)),
    )


def _quote(name: str) -> str:
    return json.dumps(name)


def to_dot(view: ChainGraph | ChainSnapshot, t: float | None = None) -> str:
    """DOT text: SDC nodes filled black, UDC nodes grey, edges labeled with tick counts."""
    if isinstance(view, ChainGraph):
        if t is None:
            raise ValueError("A time slice is required to render a chain graph.")
        view = snapshot(view, t)
    lines = [
        f"digraph {_quote(view.chain_id)} {{",
        f'  label={_quote(f"t={view.time:g}")};',
        "  node [shape=circle, style=filled];",
    ]
    for name, kind in view.members.items():
        colors = "fillcolor=black, fontcolor=white" if kind == "SDC" else "fillcolor=grey"
        lines.append(f"  {_quote(name)} [{colors}];")
    for edge in view.edges:
        style = "solid" if edge.active else "dashed"
        lines.append(
            f'  {_quote(edge.source)} -> {_quote(edge.target)} [label="{edge.ticks}", style={style}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def events_json(graph: ChainGraph) -> list[dict[str, object]]:
    return [event.model_dump(mode="json") for event in graph.events]


__all__ = ["ChainSnapshot", "EdgeView", "events_json", "snapshot", "to_dot"]
