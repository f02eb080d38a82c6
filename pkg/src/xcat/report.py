"""Pass/fail reports shared by the identity suite, the axiom checkers and the theorem verifiers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

MAX_DETAILS = 25


@dataclass
class CheckTally:
    instances: int = 0
    failures: int = 0
    details: list[str] = field(default_factory=list)


@dataclass
class Report:
    """Counts of checked instances per named check, with located counterexamples.

    ``record`` is called once per checked instance; a failing instance must
    carry a detail string naming where it failed (weight, indices, ...).
    """

    tag: str
    inputs: dict = field(default_factory=dict)
    checks: dict[str, CheckTally] = field(default_factory=dict)

    def record(self, check: str, ok: bool, detail: str = "") -> bool:
        tally = self.checks.setdefault(check, CheckTally())
        tally.instances += 1
        if not ok:
            tally.failures += 1
            if len(tally.details) < MAX_DETAILS:
                tally.details.append(detail or f"{check} failed")
        return ok

    def touch(self, check: str) -> None:
        """Register a check with zero instances (vacuous pass)."""
        self.checks.setdefault(check, CheckTally())

    def merge(self, other: Report, prefix: str = "") -> None:
        for name, tally in other.checks.items():
            mine = self.checks.setdefault(prefix + name, CheckTally())
            mine.instances += tally.instances
            mine.failures += tally.failures
            room = MAX_DETAILS - len(mine.details)
            mine.details.extend(tally.details[:room])

    @property
    def passed(self) -> bool:
        return all(t.failures == 0 for t in self.checks.values())

    @property
    def instance_count(self) -> int:
        return sum(t.instances for t in self.checks.values())

    @property
    def failure_lines(self) -> list[str]:
        return [f"{name}: {d}" for name, t in self.checks.items() for d in t.details]

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        head = f"[{status}] {self.tag}"
        if self.inputs:
            head += " " + " ".join(f"{k}={v}" for k, v in self.inputs.items())
        lines = [head]
        for name, t in self.checks.items():
            mark = "ok" if t.failures == 0 else "FAIL"
            lines.append(f"  {name}: {t.instances} checked, {t.failures} failed [{mark}]")
            lines.extend(f"    - {d}" for d in t.details)
        return "\n".join(lines)

    def to_records(self) -> list[dict]:
        return [
            {
                "tag": self.tag,
                "inputs": self.inputs,
                "check": name,
                "instances": t.instances,
                "failures": t.failures,
                "passed": t.failures == 0,
                "details": list(t.details),
            }
            for name, t in self.checks.items()
        ]

    def to_json(self) -> str:
        return json.dumps(
            {"tag": self.tag, "passed": self.passed, "inputs": self.inputs, "checks": self.to_records()},
            sort_keys=True,
        )

    def __str__(self) -> str:
        return self.to_text()


TheoremReport = Report
