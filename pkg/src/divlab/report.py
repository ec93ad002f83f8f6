"""Structured verification records shared by every module.

A report is a named bundle of checks.  Each check carries the measured
value, the tolerance it was held to, the signed margin (nonnegative means
satisfied), and a verdict.  Reports serialize to JSON deterministically:
two runs with the same scenario and seed produce byte-identical output
except for the timestamp field.
"""

from __future__ import annotations

import datetime
import json
import os
from dataclasses import dataclass, field

PASS = "PASS"
FAIL = "FAIL"
SKIPPED = "SKIPPED"
INFO = "INFO"


def worker_count() -> int:
    """Worker pool size: DIVLAB_WORKERS env var, else available parallelism."""
    raw = os.environ.get("DIVLAB_WORKERS", "")
    if raw.strip():
        n = int(raw)
        if n < 1:
            raise ValueError(f"DIVLAB_WORKERS must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    margin: float
    verdict: str
    detail: str = ""

    @staticmethod
    def from_margin(name: str, value: float, tolerance: float,
                    margin: float, detail: str = "") -> "CheckResult":
        """Margin check: passes when margin >= -tolerance."""
        verdict = PASS if margin >= -tolerance else FAIL
        return CheckResult(name, float(value), float(tolerance),
                           float(margin), verdict, detail)

    @staticmethod
    def from_residual(name: str, residual: float, tolerance: float,
                      detail: str = "") -> "CheckResult":
        """Residual check: passes when |residual| <= tolerance."""
        r = abs(float(residual))
        verdict = PASS if r <= tolerance else FAIL
        return CheckResult(name, float(residual), float(tolerance),
                           tolerance - r, verdict, detail)

    @staticmethod
    def info(name: str, value: float, detail: str = "") -> "CheckResult":
        """Informational record; never gates the report verdict."""
        return CheckResult(name, float(value), 0.0, 0.0, INFO, detail)

    @staticmethod
    def skipped(name: str, detail: str = "") -> "CheckResult":
        return CheckResult(name, 0.0, 0.0, 0.0, SKIPPED, detail)


@dataclass
class VerificationReport:
    scenario: str
    checks: list[CheckResult] = field(default_factory=list)
    environment: dict = field(default_factory=dict)
    timestamp: str = ""

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = datetime.datetime.now(
                datetime.timezone.utc).isoformat()
        self.environment.setdefault("precision", "float64")
        self.environment.setdefault("workers", worker_count())

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    @property
    def verdict(self) -> str:
        if any(c.verdict == FAIL for c in self.checks):
            return FAIL
        return PASS

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.verdict == FAIL]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "timestamp": self.timestamp,
            "verdict": self.verdict,
            "checks": [
                {
                    "name": c.name,
                    "value": c.value,
                    "tolerance": c.tolerance,
                    "margin": c.margin,
                    "verdict": c.verdict,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
            "environment": self.environment,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")
