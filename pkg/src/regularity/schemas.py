from enum import Enum
from typing import Literal

from pydantic import Field, computed_field, model_validator

from src.core.schemas import ExactFraction, FrozenModel
from src.hormander.schemas import FunctionParameter


class RegionTag(str, Enum):
    INTERIOR = "interior"
    LATERAL_COLLAR = "lateral-collar"
    BOTTOM_COLLAR = "bottom-collar"
    LATERAL_BOUNDARY = "lateral-boundary"


F_REGIONS = (RegionTag.INTERIOR, RegionTag.LATERAL_COLLAR, RegionTag.BOTTOM_COLLAR)


class RegularityClaim(FrozenModel):
    """Declared membership of one data component in a localized Hormander space; trusted as given."""

    kind: Literal["f", "g"]
    index: int = Field(ge=1)
    region: RegionTag
    sigma: ExactFraction
    phi: FunctionParameter

    @model_validator(mode="after")
    def _check_region(self):
        if self.kind == "g" and self.region is not RegionTag.LATERAL_BOUNDARY:
            raise ValueError("g claims live on the lateral boundary only")
        if self.kind == "f" and self.region is RegionTag.LATERAL_BOUNDARY:
            raise ValueError("f claims cannot live on the lateral boundary")
        return self

    @property
    def target(self) -> str:
        return f"{self.kind}{self.index}"


class SigmaThresholds(FrozenModel):
    b: int
    n: int
    sigma0: ExactFraction
    sigma1: ExactFraction
    sigma2: ExactFraction
    sigma3: ExactFraction

    @computed_field
    @property
    def sigma2_gt_sigma0(self) -> bool:
        return self.sigma2 > self.sigma0

    @computed_field
    @property
    def sigma3_gt_sigma0(self) -> bool:
        return self.sigma3 > self.sigma0


class HypothesisReport(FrozenModel):
    passed: bool
    thresholds: SigmaThresholds
    unmet: list[str] = Field(default_factory=list)
    dini: dict[str, str] = Field(default_factory=dict)


class ConditionDetail(FrozenModel):
    k: int
    condition: Literal["a", "b", "c"]
    region: RegionTag
    required_order: int
    budget: int | None
    passed: bool
    vacuous: bool = False


class ClassicalityVerdict(FrozenModel):
    overall: Literal["guaranteed-classical", "not-guaranteed"]
    conditions: list[ConditionDetail]
    failed_hypotheses: list[str] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    @property
    def guaranteed(self) -> bool:
        return self.overall == "guaranteed-classical"
