"""Check findings shared by all validators and verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

PASS = "pass"
FAIL = "fail"
SKIP = "skip"


@dataclass(frozen=True)
class Finding:
    check: str
    status: str
    witness: str = ""

    def __str__(self) -> str:
        tail = f"  {self.witness}" if self.witness else ""
        return f"[{self.status}] {self.check}{tail}"


@dataclass
class CheckReport:
    """Ordered list of findings; a report is ``ok`` when nothing failed."""

    findings: list[Finding] = field(default_factory=list)

    def add(self, check: str, status: str, witness: str = "") -> None:
        self.findings.append(Finding(check, status, witness))

    def fail(self, check: str, witness: str) -> None:
        self.add(check, FAIL, witness)

    def extend(self, other: "CheckReport | Iterable[Finding]") -> None:
        items = other.findings if isinstance(other, CheckReport) else other
        self.findings.extend(items)

    @property
    def failures(self) -> list[Finding]:
        return [f for f in self.findings if f.status == FAIL]

    @property
    def ok(self) -> bool:
        return not self.failures

    def count(self, status: str) -> int:
        return sum(1 for f in self.findings if f.status == status)

    def __iter__(self):
        return iter(self.findings)

    def __len__(self) -> int:
        return len(self.findings)
