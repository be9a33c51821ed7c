"""Serializable verification reports (JSON via pydantic)."""
from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class _ReportModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)


class Witness(_ReportModel):
    """Both sides of a failed check at one prime, as exact strings."""

    p: int
    id: str
    lhs: str
    rhs: str
    gap: Optional[str] = None
    detail: Optional[str] = None


class Tally(_ReportModel):
    passed: int = Field(0, alias="pass")
    failed: int = Field(0, alias="fail")


class CheckSummary(_ReportModel):
    id: str
    description: str
    applicable: int = 0
    passed: int = Field(0, alias="pass")
    failed: int = Field(0, alias="fail")
    witnesses: List[Witness] = Field(default_factory=list)


class ClaimSummary(CheckSummary):
    relation: str
    by_class: Dict[str, Dict[str, Tally]] = Field(default_factory=dict)


class GapStat(_ReportModel):
    eps: float
    selector: str
    residue_class: str = Field(alias="class")
    count: int
    min: float
    max: float
    mean: float
    min_abs: float
    argmin_abs_p: int


class ReportConfig(_ReportModel):
    identities: List[str]
    claims: List[str]
    eps_grid: List[float]
    witness_cap: int
    max_k: int


class Timing(_ReportModel):
    elapsed_seconds: float
    jobs: int


class VerificationReport(_ReportModel):
    """Everything a range run found; identical inputs give identical JSON."""

    bounds: List[int] = Field(alias="range")
    config: ReportConfig
    primes_evaluated: int = 0
    identities: List[CheckSummary] = Field(default_factory=list)
    claims: List[ClaimSummary] = Field(default_factory=list)
    gap_stats: List[GapStat] = Field(default_factory=list)
    timing: Optional[Timing] = None

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, by_alias=True)

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.model_validate_json(text)

    def identity_failures(self) -> int:
        return sum(summary.failed for summary in self.identities)

    def claim_failures(self) -> int:
        return sum(summary.failed for summary in self.claims)

    def summary_text(self) -> str:
        lo, hi = self.bounds
        if not self.primes_evaluated:
            return f"No primes in [{lo}, {hi})."

        lines: List[str] = [f"Range [{lo}, {hi}): {self.primes_evaluated} primes"]
        if self.identities:
            lines.append("Identities:")
            for summary in self.identities:
                lines.append(
                    f" - {summary.id}: {summary.passed}/{summary.applicable} pass,"
                    f" {summary.failed} fail"
                )
        if self.claims:
            lines.append("Claims (as stated):")
            for summary in self.claims:
                line = f" - {summary.id}: {summary.passed}/{summary.applicable} pass"
                if summary.failed:
                    failing = [
                        f"{key}={residue}"
                        for key, classes in summary.by_class.items()
                        for residue, tally in classes.items()
                        if tally.failed and key == "r8"
                    ]
                    line += f", {summary.failed} fail"
                    if failing:
                        line += f" (failing classes: {', '.join(failing)})"
                lines.append(line)
        return "\n".join(lines)
