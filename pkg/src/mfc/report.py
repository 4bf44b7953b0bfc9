"""Named lists of symbolic checks with pass/fail and residuals."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from .superalg import SuperSeries


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: Optional[SuperSeries] = None
    note: str = ""

    def rename(self, name: str) -> "CheckResult":
        return CheckResult(name, self.passed, self.residual, self.note)

    def render(self) -> str:
        line = f"CHECK {self.name} {'PASS' if self.passed else 'FAIL'}"
        if not self.passed and self.residual is not None:
            from .textio import serialize
            line += f" residual={serialize(self.residual)}"
        if self.note:
            line += f" [{self.note}]"
        return line


@dataclass
class Report:
    name: str
    checks: List[CheckResult] = field(default_factory=list)

    def add(self, name: str, passed: bool, residual: Optional[SuperSeries] = None,
            note: str = "") -> CheckResult:
        r = CheckResult(name, passed, residual, note)
        self.checks.append(r)
        return r

    def append(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def check_zero(self, name: str, residual: SuperSeries, note: str = "") -> CheckResult:
        return self.add(name, residual.is_zero(), residual, note)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        return "\n".join(c.render() for c in self.checks)

    def extend(self, other: "Report"):
        self.checks.extend(other.checks)
