"""Verification reports: per-check statuses with witnesses, serialized as JSON lines.

Output is deterministic for fixed inputs: keys are sorted, witnesses keep
their discovery order (itself deterministic), and wall-clock time is only
included when explicitly requested.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA = "structlogic-report-v1"

PASS = "pass"
FAIL = "fail"
NOT_FINITELY_TESTABLE = "not-finitely-testable"


@dataclass
class CheckResult:
    name: str
    status: str
    counts: dict[str, int] = field(default_factory=dict)
    witnesses: list[dict] = field(default_factory=list)
    note: str = ""

    def __post_init__(self):
        if self.status == FAIL and not self.witnesses:
            raise ValueError(f"failing check {self.name!r} must carry a witness")

    @property
    def ok(self) -> bool:
        return self.status != FAIL


@dataclass
class VerificationReport:
    command: str
    caps: dict[str, int] = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    wall_ms: int | None = None

    def add(
        self,
        name: str,
        status: str,
        counts: dict[str, int] | None = None,
        witnesses: list[dict] | None = None,
        note: str = "",
    ) -> CheckResult:
        result = CheckResult(name, status, counts or {}, witnesses or [], note)
        self.checks.append(result)
        return result

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_lines(self, timing: bool = False) -> list[str]:
        header = {"caps": self.caps, "command": self.command, "schema": SCHEMA}
        if timing and self.wall_ms is not None:
            header["wall_ms"] = self.wall_ms
        lines = [json.dumps(header, sort_keys=True)]
        for c in self.checks:
            record = {
                "check": c.name,
                "counts": c.counts,
                "status": c.status,
                "witnesses": c.witnesses,
            }
            if c.note:
                record["note"] = c.note
            lines.append(json.dumps(record, sort_keys=True))
        lines.append(json.dumps({"result": PASS if self.ok else FAIL}, sort_keys=True))
        return lines

    def render(self, timing: bool = False) -> str:
        return "\n".join(self.to_lines(timing)) + "\n"


def structure_witness(label: str, s) -> dict:
    from .formats import print_structure

    return {"kind": "structure", "label": label, "value": print_structure(s)}


def formula_witness(label: str, phi) -> dict:
    from .formats import print_formula

    return {"kind": "formula", "label": label, "value": print_formula(phi)}


def subset_witness(label: str, elems) -> dict:
    return {"kind": "subset", "label": label, "value": sorted(elems)}


def assignment_witness(label: str, items) -> dict:
    return {"kind": "assignment", "label": label, "value": [list(kv) for kv in sorted(items)]}
