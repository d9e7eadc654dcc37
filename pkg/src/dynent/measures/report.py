"""Result record shared by all measures."""
from __future__ import annotations

import dataclasses
import json
import math

__all__ = ["BOUND_KINDS", "MeasureReport", "encode_value", "decode_value"]

BOUND_KINDS = ("exact", "lower-bound-via-PPT", "upper-bound-via-sampling", "heuristic")


def encode_value(v):
    """JSON-safe scalar: infinities become the strings ``"+inf"`` / ``"-inf"``."""
    if v is None:
        return None
    v = float(v)
    if math.isinf(v):
        return "+inf" if v > 0 else "-inf"
    if math.isnan(v):
        raise ValueError("NaN is not a reportable value")
    return v


def decode_value(v):
    if v in ("+inf", "inf"):
        return math.inf
    if v == "-inf":
        return -math.inf
    return None if v is None else float(v)


@dataclasses.dataclass
class MeasureReport:
    """A computed quantity with its bound type and solver certificate.

    :param name: measure identifier.
    :param value: the number (``math.inf`` allowed, ``None`` when not applicable).
    :param bound_kind: one of :data:`BOUND_KINDS`, stating how ``value`` relates
        to the quantity defined over separable channels.
    :param epsilon: smoothing radius used (0 when unsmoothed).
    :param residuals: solver residual summary (empty for closed forms).
    :param status: ``ok``, ``inapplicable`` or a solver status.
    :param details: extra JSON-serializable numbers.
    :param artifacts: Python objects (optimal channels, operators) that are not serialized.
    """

    name: str
    value: float | None
    bound_kind: str
    epsilon: float = 0.0
    residuals: dict = dataclasses.field(default_factory=dict)
    status: str = "ok"
    details: dict = dataclasses.field(default_factory=dict)
    artifacts: dict = dataclasses.field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.bound_kind not in BOUND_KINDS:
            raise ValueError(f"unknown bound kind {self.bound_kind!r}")

    def __float__(self):
        if self.value is None:
            raise ValueError(f"{self.name} has no value (status {self.status})")
        return float(self.value)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": encode_value(self.value),
            "bound_kind": self.bound_kind,
            "epsilon": float(self.epsilon),
            "residuals": {k: encode_value(v) for k, v in sorted(self.residuals.items())},
            "status": self.status,
            "details": _jsonable(self.details),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "MeasureReport":
        return cls(d["name"], decode_value(d["value"]), d["bound_kind"], float(d.get("epsilon", 0.0)),
                   {k: decode_value(v) for k, v in d.get("residuals", {}).items()},
                   d.get("status", "ok"), d.get("details", {}))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items())}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    try:
        return encode_value(x)
    except TypeError:
        return str(x)
