"""Structured pass/fail records for numerical checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"

_RELATIONS = ("<=", ">=", "==")


def _judge(lhs: float, relation: str, rhs: float, tol: float) -> bool:
    if math.isnan(lhs) or math.isnan(rhs):
        return False
    if relation == "<=":
        return lhs <= rhs + tol
    if relation == ">=":
        return lhs >= rhs - tol
    if math.isinf(lhs) or math.isinf(rhs):
        return lhs == rhs
    return abs(lhs - rhs) <= tol


@dataclass(frozen=True)
class Certificate:
    """A computed inequality or identity together with its verdict.

    The status is derived from ``lhs``, ``relation``, ``rhs`` and ``tol`` only,
    except for certificates built with :meth:`not_applicable`.
    """

    name: str
    anchor: str
    lhs: float | None
    relation: str
    rhs: float | None
    tol: float
    status: str
    witness: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def check(
        cls,
        name: str,
        anchor: str,
        lhs: float,
        relation: str,
        rhs: float,
        tol: float,
        witness: dict[str, Any] | None = None,
    ) -> "Certificate":
        if relation not in _RELATIONS:
            raise ValueError(f"unknown relation {relation!r}")
        lhs = float(lhs)
        rhs = float(rhs)
        status = PASS if _judge(lhs, relation, rhs, tol) else FAIL
        return cls(name, anchor, lhs, relation, rhs, float(tol), status, dict(witness or {}))

    @classmethod
    def not_applicable(
        cls, name: str, anchor: str, reason: str, witness: dict[str, Any] | None = None
    ) -> "Certificate":
        payload = {"reason": reason}
        payload.update(witness or {})
        return cls(name, anchor, None, "<=", None, 0.0, NOT_APPLICABLE, payload)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "lhs": _json_float(self.lhs),
            "relation": self.relation,
            "rhs": _json_float(self.rhs),
            "tol": self.tol,
            "status": self.status,
            "witness": _jsonable(self.witness),
        }


def _json_float(x: float | None) -> float | str | None:
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def _jsonable(obj: Any) -> Any:
    """Convert numpy scalars, tuples and sets into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_jsonable(v) for v in obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return int(obj)
    try:
        value = float(obj)
    except (TypeError, ValueError):
        return str(obj)
    if float(value).is_integer() and hasattr(obj, "dtype") and obj.dtype.kind in "iu":
        return int(value)
    return _json_float(value)


def summarize(certs: list[Certificate]) -> dict[str, int]:
    counts = {PASS: 0, FAIL: 0, NOT_APPLICABLE: 0}
    for c in certs:
        counts[c.status] += 1
    return counts


def relative_gap(a: float, b: float) -> float:
    """|a - b| / max(1, |a|, |b|), the error measure used by identity checks."""
    return abs(a - b) / max(1.0, abs(a), abs(b))
