"""JSON codec for states and operators: nested ``[re, im]`` pairs plus labels."""

from __future__ import annotations

from typing import Any

import numpy as np

from .errors import InvalidState
from .models import DensityOperator, HilbertSpace, Observable, PureState, UnitaryEvolution

_KINDS: dict[str, type] = {
    "pure_state": PureState,
    "density_operator": DensityOperator,
    "observable": Observable,
    "unitary": UnitaryEvolution,
}


def complex_pairs(array: np.ndarray) -> Any:
    if array.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in array]
    return [complex_pairs(row) for row in array]


def _complex(data: Any) -> np.ndarray:
    array = np.asarray(data, dtype=float)
    if array.shape[-1] != 2:
        raise InvalidState("Serialized entries must be [re, im] pairs.")
    return array[..., 0] + 1j * array[..., 1]


def to_json(carrier: PureState | DensityOperator | Observable | UnitaryEvolution) -> dict[str, Any]:
    kind = next(name for name, cls in _KINDS.items() if isinstance(carrier, cls))
    data = carrier.amplitudes if isinstance(carrier, PureState) else carrier.matrix
    return {
        "kind": kind,
        "labels": list(carrier.space.labels),
        "dims": list(carrier.space.dims),
        "data": complex_pairs(np.asarray(data)),
    }


def from_json(payload: dict[str, Any]) -> PureState | DensityOperator | Observable | UnitaryEvolution:
    try:
        cls = _KINDS[payload["kind"]]
        space = HilbertSpace(tuple(zip(payload["labels"], payload["dims"], strict=True)))
        return cls(space, _complex(payload["data"]))
    except (KeyError, ValueError) as exc:
        raise InvalidState(f"Malformed carrier payload: {exc}") from exc


__all__ = ["complex_pairs", "from_json", "to_json"]
