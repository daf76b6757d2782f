"""Structured pass/fail records for every verification battery."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


@dataclass
class CheckResult:
    """Outcome of one checked inequality or identity.

    `anchor` is the statement label the check certifies ("lemma_2_13a",
    "eq_2_1_3", ...) or "plumbing" for artifact-level checks.
    """

    check_id: str
    anchor: str
    status: str
    worst_residual: float | None = None
    witness: object = None
    note: str = ""

    def to_dict(self):
        return {
            "id": self.check_id,
            "anchor": self.anchor,
            "status": self.status,
            "worst_residual": _jsonable(self.worst_residual),
            "witness": _jsonable(self.witness),
            "note": self.note,
        }


@dataclass
class VerifyReport:
    """One battery run: checks plus the grid/tolerances that scope its claims."""

    suite: str
    checks: list = field(default_factory=list)
    grid: dict | None = None
    tolerances: dict = field(default_factory=dict)
    wall_time: float = 0.0
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    @property
    def n_failed(self) -> int:
        return sum(1 for c in self.checks if c.status == FAIL)

    def add(self, check_id, anchor, ok, residual=None, witness=None, note="", skipped=False):
        status = SKIPPED if skipped else (PASS if ok else FAIL)
        res = None if residual is None else float(residual)
        self.checks.append(CheckResult(check_id, anchor, status, res, witness, note))
        return self.checks[-1]

    def extend(self, other: "VerifyReport", prefix: str = ""):
        for c in other.checks:
            cid = f"{prefix}{c.check_id}" if prefix else c.check_id
            self.checks.append(CheckResult(cid, c.anchor, c.status, c.worst_residual,
                                           c.witness, c.note))
        self.tolerances.update(other.tolerances)

    def check(self, check_id):
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def to_dict(self):
        return {
            "suite": self.suite,
            "checks": [c.to_dict() for c in self.checks],
            "grid": _jsonable(self.grid),
            "tolerances": _jsonable(self.tolerances),
            "wall_time": self.wall_time,
            "seed": self.seed,
            "meta": _jsonable(self.meta),
            "passed": self.passed,
        }

    def to_json(self, path=None):
        doc = json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(doc)
        return doc

    def rows(self):
        """Flat (suite, id, anchor, status, residual) rows for CSV hand-off."""
        out = []
        for c in self.checks:
            res = "" if c.worst_residual is None else repr(c.worst_residual)
            out.append((self.suite, c.check_id, c.anchor, c.status, res))
        return out

    def summary_line(self) -> str:
        n = len(self.checks)
        bad = self.n_failed
        state = "PASS" if bad == 0 else f"FAIL ({bad}/{n})"
        return f"{self.suite}: {state} [{n} checks, {self.wall_time:.2f}s]"
