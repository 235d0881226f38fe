"""Residual-vs-tolerance reporting shared by all verification passes.

Verifiers never raise on a failed check; they measure residuals and return a
report so callers (tests, CLI) can decide.  Every verdict therefore always
travels with the number that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)
    # free-form diagnostic values (ranks, dims, which constraint set was used)
    context: dict = field(default_factory=dict)

    def add(self, name: str, residual: float, tolerance: float) -> None:
        self.checks.append(Check(name, float(residual), float(tolerance)))

    def merge(self, other: "ValidationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.residual, c.tolerance))
        self.context.update(other.context)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "residual": c.residual,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
            "context": dict(self.context),
        }

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            verdict = "PASS" if c.passed else "FAIL"
            lines.append(f"{verdict}  {c.name}: residual {c.residual:.3e} (tol {c.tolerance:.3e})")
        return "\n".join(lines)
