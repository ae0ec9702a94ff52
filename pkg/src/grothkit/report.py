"""Structured pass/fail reports shared by every verifier in the package."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    """One verified law: a name, a verdict, and a witness when refuted."""

    name: str
    passed: bool
    counterexample: str | None = None

    def describe(self) -> str:
        mark = "ok  " if self.passed else "FAIL"
        tail = "" if self.counterexample is None else f" -- {self.counterexample}"
        return f"[{mark}] {self.name}{tail}"


@dataclass
class Report:
    """A bundle of checks about one subject, plus optional search bookkeeping."""

    title: str
    checks: list[Check] = field(default_factory=list)
    witnesses: list[str] = field(default_factory=list)
    budget_used: int = 0
    budget_limit: int | None = None
    budget_exceeded: bool = False

    def ok(self, name: str) -> None:
        self.checks.append(Check(name, True))

    def fail(self, name: str, counterexample: str) -> None:
        self.checks.append(Check(name, False, counterexample))

    def record(self, name: str, counterexample: str | None) -> None:
        """Pass when `counterexample` is None, fail with it otherwise."""
        if counterexample is None:
            self.ok(name)
        else:
            self.fail(name, counterexample)

    def absorb(self, sub: "Report", prefix: str = "") -> None:
        for c in sub.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.counterexample))
        self.witnesses.extend(sub.witnesses)
        self.budget_used += sub.budget_used
        self.budget_exceeded = self.budget_exceeded or sub.budget_exceeded

    @property
    def passed(self) -> bool:
        return not self.budget_exceeded and all(c.passed for c in self.checks)

    @property
    def verdict(self) -> str:
        if self.budget_exceeded:
            return "budget"
        return "pass" if self.passed else "fail"

    def counterexamples(self) -> list[str]:
        return [c.counterexample for c in self.checks if c.counterexample is not None]

    def first_failure(self) -> Check | None:
        for c in self.checks:
            if not c.passed:
                return c
        return None

    def describe(self) -> str:
        lines = [f"{self.title}: {self.verdict}"]
        lines += ["  " + c.describe() for c in self.checks]
        lines += [f"  witness: {w}" for w in self.witnesses]
        if self.budget_limit is not None:
            lines.append(f"  budget: {self.budget_used}/{self.budget_limit}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "verdict": self.verdict,
            "checks": [
                {"name": c.name, "passed": c.passed, "counterexample": c.counterexample}
                for c in self.checks
            ],
            "witnesses": list(self.witnesses),
            "counterexamples": self.counterexamples(),
            "budget": {"used": self.budget_used, "limit": self.budget_limit},
        }


class ValidationError(Exception):
    """Raised when raw tables violate the laws of the structure they claim to be."""

    def __init__(self, report: Report):
        super().__init__(report.describe())
        self.report = report
