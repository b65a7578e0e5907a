"""Verification reports and their JSON / text rendering."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from .diffalg import DiffPoly, RationalDiffExpr, render_poly

__all__ = ["Report", "REPORT_VERSION", "emit_report", "exit_code", "jsonable"]

REPORT_VERSION = "1.0"
STATUSES = ("pass", "fail", "discrepancy")


@dataclass
class Report:
    check_id: str
    status: str
    paper_anchor: str
    details: dict = field(default_factory=dict)
    witness: str | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")

    @property
    def ok(self) -> bool:
        """Mathematics verified (a transcription discrepancy still counts)."""
        return self.status != "fail"

    def to_dict(self) -> dict:
        d = {"check_id": self.check_id, "status": self.status,
             "paper_anchor": self.paper_anchor, "details": jsonable(self.details)}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


def jsonable(obj: Any) -> Any:
    """Convert exact objects into JSON-safe values (fractions become strings)."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.15g}")
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, complex):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if isinstance(obj, DiffPoly):
        return render_poly(obj)
    if isinstance(obj, RationalDiffExpr):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if hasattr(obj, "item"):
        return jsonable(obj.item())
    return str(obj)


def _summary(reports: list[Report]) -> dict:
    s = {k: 0 for k in STATUSES}
    for r in reports:
        s[r.status] += 1
    return s


def emit_report(reports: Iterable[Report], fmt: str = "json") -> bytes:
    """Byte-stable rendering, ordered by check id."""
    rs = sorted(reports, key=lambda r: r.check_id)
    if fmt == "json":
        doc = {"version": REPORT_VERSION, "checks": [r.to_dict() for r in rs],
               "summary": _summary(rs)}
        return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = []
    for r in rs:
        lines.append(f"[{r.status.upper():>11}] {r.check_id}  ({r.paper_anchor})")
        for k in sorted(r.details):
            lines.append(f"    {k}: {_text_value(jsonable(r.details[k]))}")
        if r.witness is not None:
            lines.append(f"    witness: {r.witness}")
    s = _summary(rs)
    lines.append(f"summary: {s['pass']} pass, {s['fail']} fail, {s['discrepancy']} discrepancy")
    return ("\n".join(lines) + "\n").encode()


def _text_value(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, ensure_ascii=False)
    return str(v)


def exit_code(reports: Iterable[Report]) -> int:
    """0 all pass, 1 any failure, 3 passes with transcription discrepancies."""
    statuses = {r.status for r in reports}
    if "fail" in statuses:
        return 1
    if "discrepancy" in statuses:
        return 3
    return 0
