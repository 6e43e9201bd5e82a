from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator

from src.core.config import Settings
from src.core.constants import Verdict
from src.core.schemas import FrozenModel
from src.problem.schemas import ParabolicProblem
from src.regularity.schemas import RegularityClaim

SAMPLE_KEYS = {
    "INTERIOR_SAMPLES",
    "BOUNDARY_POINTS",
    "TIME_VALUES",
    "XI_DIRECTIONS",
    "TANGENT_DIRECTIONS",
    "ARC_POINTS",
    "SAMPLING_SEED",
}
TOLERANCE_KEYS = {
    name
    for name, info in Settings.model_fields.items()
    if info.annotation is float
}


def _normalize_keys(values: dict, allowed: set[str], kind: str) -> dict:
    normalized = {}
    for key, value in values.items():
        name = key.upper()
        if name not in allowed:
            raise ValueError(f"unknown {kind} option {key!r}; expected one of {sorted(allowed)}")
        normalized[name] = value
    return normalized


class CheckOptions(FrozenModel):
    """Per-run overrides of sampling densities and tolerances."""

    samples: dict[str, int] = Field(default_factory=dict)
    tolerances: dict[str, float] = Field(default_factory=dict)
    delta1: float | None = Field(default=None, gt=0)
    convention: Literal["standard", "time-integral"] = "standard"

    @field_validator("samples", mode="before")
    @classmethod
    def _sample_keys(cls, value: dict) -> dict:
        return _normalize_keys(value or {}, SAMPLE_KEYS, "sampling")

    @field_validator("samples")
    @classmethod
    def _sample_counts(cls, value: dict[str, int]) -> dict[str, int]:
        for key, count in value.items():
            lower = 0 if key == "SAMPLING_SEED" else 1
            if count < lower:
                raise ValueError(f"{key.lower()} must be at least {lower}, got {count}")
        return value

    @field_validator("tolerances", mode="before")
    @classmethod
    def _tolerance_keys(cls, value: dict) -> dict:
        return _normalize_keys(value or {}, TOLERANCE_KEYS, "tolerance")

    def merged(self, other: "CheckOptions") -> "CheckOptions":
        """Options from other take precedence."""
        return CheckOptions(
            samples={**self.samples, **other.samples},
            tolerances={**self.tolerances, **other.tolerances},
            delta1=other.delta1 if other.delta1 is not None else self.delta1,
            convention=other.convention if other.convention != "standard" else self.convention,
        )

    def overrides(self) -> dict[str, Any]:
        return {**self.samples, **self.tolerances}


class ProblemSpec(FrozenModel):
    problem: ParabolicProblem
    claims: list[RegularityClaim] = Field(default_factory=list)
    options: CheckOptions = Field(default_factory=CheckOptions)
    has_claims: bool = False


class ReportSection(BaseModel):
    name: str
    verdict: Verdict
    tolerances: dict[str, float] = Field(default_factory=dict)
    witnesses: dict[str, Any] = Field(default_factory=dict)
    notes: list[str] = Field(default_factory=list)


class ReportDocument(BaseModel):
    schema_version: int
    tool_version: str
    command: str
    input_digest: str
    sections: list[ReportSection]
    overall: Verdict
    defaults: dict[str, Any]
    unchecked_hypotheses: list[str]
