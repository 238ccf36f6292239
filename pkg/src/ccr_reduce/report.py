"""Check results shared by the checkers and the command-line reports."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class CheckResult:
    """Outcome of one verification.

    ``residual`` is the worst observed violation measure and ``tolerance`` the
    threshold it is compared with; ``details`` holds per-item records sorted
    into a deterministic order.
    """

    id: str
    passed: bool
    residual: float = 0.0
    tolerance: float = 0.0
    details: list = field(default_factory=list)
    message: str = ""

    def __bool__(self) -> bool:
        return self.passed

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def failures(self) -> list:
        return [d for d in self.details if not d.get("pass", True)]

    def summary(self) -> str:
        return f"{self.status} {self.id} residual={fmt(self.residual)} tol={fmt(self.tolerance)}"


def fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float) and (math.isinf(x) or math.isnan(x)):
        return str(x)
    return f"{x:.3e}"


def worst(values, default: float = 0.0) -> float:
    vals = [float(v) for v in values]
    return max(vals) if vals else default
