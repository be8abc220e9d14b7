"""Data models for stable differentiation chains."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import UnknownSystem


class RoleClass(str, Enum):
    PRIME_INITIATOR = "PrimeInitiator"
    SUBORDINATE_INITIATOR = "SubordinateInitiator"
    NON_INITIATOR = "NonInitiator"


class StabilityParams(BaseModel):
    """Operationalizes "frequently": ``min_ticks`` per trailing window of ``window_length``."""

    model_config = ConfigDict(frozen=True)

    window_length: float = Field(default=1.0, gt=0.0, description="Trailing window length.")
    min_ticks: int = Field(default=1, ge=1, description="Ticks needed inside the window.")


class ChainNode(BaseModel):
    model_config = ConfigDict(frozen=True)

    system: str
    position: str | None = Field(default=None, description="Optional spatial tag.")
    role_class: RoleClass = RoleClass.NON_INITIATOR

    @property
    def is_initiator(self) -> bool:
        return self.role_class is not RoleClass.NON_INITIATOR


class ValueDeterminationEdge(BaseModel):
    """``source`` value-determines ``target`` at each of ``tick_times``."""

    model_config = ConfigDict(frozen=True)

    source: str
    target: str
    window_start: float
    window_end: float
    tick_times: tuple[float, ...] = ()
    blueprint: bool = Field(default=False, description="Prime-to-subordinate blueprint link.")

    @model_validator(mode="after")
    def _check_window(self) -> ValueDeterminationEdge:
        if not self.window_start < self.window_end:
            raise ValueError("Edge window must satisfy start < end.")
        if list(self.tick_times) != sorted(self.tick_times):
            raise ValueError("Tick times must be sorted.")
        if any(not self.window_start <= tick <= self.window_end for tick in self.tick_times):
            raise ValueError("Tick times must lie inside the edge window.")
        return self

    @property
    def key(self) -> tuple[str, str]:
        return (self.source, self.target)

    def ticks_between(self, start: float, end: float) -> int:
        """Ticks in the half-open interval ``(start, end]``."""
        return sum(1 for tick in self.tick_times if start < tick <= end)

    def ticks_until(self, t: float) -> int:
        return sum(1 for tick in self.tick_times if tick <= t)

    def with_tick(self, t: float, window_length: float) -> ValueDeterminationEdge:
        ticks = tuple(sorted((*self.tick_times, t)))
        return self.model_copy(
            update={
                "tick_times": ticks,
                "window_start": min(self.window_start, t),
                "window_end": max(self.window_end, t + window_length),
            }
        )


EventKind = Literal["tick", "unstable", "blocked", "isolate", "reopen"]


class ChainEvent(BaseModel):
    """One entry of the chain's structured event log."""

    model_config = ConfigDict(frozen=True)

    kind: EventKind
    time: float
    source: str | None = None
    target: str | None = None
    systems: tuple[str, ...] = ()
    detail: str | None = None


class Isolation(BaseModel):
    model_config = ConfigDict(frozen=True)

    boundary: frozenset[str]
    start: float
    lapse_time: float
    end: float | None = None

    def active_at(self, t: float) -> bool:
        return self.start <= t and (self.end is None or t < self.end)

    def crosses(self, source: str, target: str) -> bool:
        return (source in self.boundary) != (target in self.boundary)


class Membership(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["SDC", "UDC"]
    chain_id: str | None = None

    @property
    def is_sdc(self) -> bool:
        return self.kind == "SDC"


class ChainGraph(BaseModel):
    """Persistent value: every mutation returns a new graph."""

    model_config = ConfigDict(frozen=True)

    chain_id: str = "SDC'"
    nodes: dict[str, ChainNode] = Field(default_factory=dict)
    edges: tuple[ValueDeterminationEdge, ...] = ()
    stability: StabilityParams = Field(default_factory=StabilityParams)
    events: tuple[ChainEvent, ...] = ()
    isolations: tuple[Isolation, ...] = ()

    @classmethod
    def declare(
        cls,
        prime: Iterable[str],
        subordinate: Iterable[str] = (),
        others: Iterable[str] = (),
        positions: Mapping[str, str] | None = None,
        stability: StabilityParams | None = None,
        chain_id: str = "SDC'",
    ) -> ChainGraph:
        """Graph whose initiator 2-tuple is ``(prime, subordinate)``."""
        positions = positions or {}
        nodes: dict[str, ChainNode] = {}
        for names, role in (
            (prime, RoleClass.PRIME_INITIATOR),
            (subordinate, RoleClass.SUBORDINATE_INITIATOR),
            (others, RoleClass.NON_INITIATOR),
        ):
            for name in names:
                if name in nodes:
                    raise ValueError(f"System {name!r} declared twice.")
                nodes[name] = ChainNode(system=name, position=positions.get(name), role_class=role)
        return cls(
            chain_id=chain_id,
            nodes=nodes,
            stability=stability or StabilityParams(),
        )

    def node(self, system: str) -> ChainNode:
        try:
            return self.nodes[system]
        except KeyError as exc:
            raise UnknownSystem(f"System {system!r} is not part of chain {self.chain_id}.") from exc

    def edge(self, source: str, target: str) -> ValueDeterminationEdge | None:
        return next((e for e in self.edges if e.key == (source, target)), None)

    @property
    def primes(self) -> list[str]:
        return [n.system for n in self.nodes.values() if n.role_class is RoleClass.PRIME_INITIATOR]

    @property
    def clock(self) -> float | None:
        """Time of the latest recorded event."""
        return max((event.time for event in self.events), default=None)

    def with_system(
        self, system: str, position: str | None = None, role_class: RoleClass = RoleClass.NON_INITIATOR
    ) -> ChainGraph:
        if system in self.nodes:
            raise ValueError(f"System {system!r} already declared.")
        node = ChainNode(system=system, position=position, role_class=role_class)
        return self.model_copy(update={"nodes": {**self.nodes, system: node}})


__all__ = [
    "ChainEvent",
    "ChainGraph",
    "ChainNode",
    "EventKind",
    "Isolation",
    "Membership",
    "RoleClass",
    "StabilityParams",
    "ValueDeterminationEdge",
]
