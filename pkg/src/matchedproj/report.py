"""Named residual checks shared by the analysis modules and the CLI."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Check:
    """One verified identity: its residual, the gate it was held to, pass/fail."""

    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "passed": bool(self.passed),
        }


def boolean_check(name: str, ok: bool, tolerance: float = 0.5) -> Check:
    """Encode a yes/no condition as a residual (0 pass, 1 fail)."""
    return Check(name=name, residual=0.0 if ok else 1.0, tolerance=tolerance)


def all_passed(checks: list[Check]) -> bool:
    return all(c.passed for c in checks)


def failures(checks: list[Check]) -> list[Check]:
    return [c for c in checks if not c.passed]
