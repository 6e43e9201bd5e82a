from pydantic import ConfigDict, Field

from src.core.config import settings
from src.core.constants import Verdict
from src.core.schemas import FrozenModel, JudgedResult

ComplexPair = tuple[float, float]


class SamplingConfig(FrozenModel):
    model_config = ConfigDict(validate_default=True)

    xi_directions: int = Field(default_factory=lambda: settings.XI_DIRECTIONS, ge=1)
    tangent_directions: int = Field(default_factory=lambda: settings.TANGENT_DIRECTIONS, ge=1)
    arc_points: int = Field(default_factory=lambda: settings.ARC_POINTS, ge=1)
    seed: int = Field(default_factory=lambda: settings.SAMPLING_SEED)


class RootWitness(FrozenModel):
    x: tuple[float, ...]
    t: float
    xi: tuple[float, ...]
    root: ComplexPair


class Condition1Result(JudgedResult):
    passed: bool
    delta_estimate: float
    samples_checked: int
    worst_witness: RootWitness | None = None


class NormalizationViolation(FrozenModel):
    j: int
    k: int
    x: tuple[float, ...]
    t: float
    value: ComplexPair


class Condition2Result(JudgedResult):
    passed: bool
    samples_checked: int
    violations: list[NormalizationViolation] = Field(default_factory=list)


class CoveringWitness(FrozenModel):
    x: tuple[float, ...]
    t: float
    xi: tuple[float, ...]
    p: ComplexPair
    rank: int


class CoveringResult(JudgedResult):
    passed: bool
    samples_checked: int
    min_rank_margin: float
    delta1: float
    worst_witness: CoveringWitness | None = None


class HomogeneityResult(JudgedResult):
    passed: bool
    max_relative_error: float
    samples_checked: int


class CheckReport(FrozenModel):
    condition_i: Condition1Result
    condition_ii: Condition2Result
    condition_iii: CoveringResult | None = None
    verdicts: dict[str, Verdict]
    notes: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v is Verdict.PASS for v in self.verdicts.values())
