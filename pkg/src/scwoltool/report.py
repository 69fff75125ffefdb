"""Violation reports shared by every validator in the package."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    rule: str
    witness: tuple
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.message}"


@dataclass
class ValidationReport:
    """Collected axiom violations; an empty report means the object is valid.

    Violations are data, not errors: validators never raise on a broken
    input, they describe it.
    """

    subject: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, witness: tuple, message: str) -> None:
        self.violations.append(Violation(rule, tuple(witness), message))

    def extend(self, other: "ValidationReport", prefix: str = "") -> None:
        for v in other.violations:
            self.violations.append(Violation(prefix + v.rule, v.witness, v.message))

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def lines(self) -> list[str]:
        if self.ok:
            return [f"{self.subject}: ok"]
        return [f"{self.subject}: {len(self.violations)} violation(s)"] + [
            f"  {v}" for v in self.violations
        ]

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "violations": [
                {"rule": v.rule, "witness": [str(w) for w in v.witness], "message": v.message}
                for v in self.violations
            ],
        }
