from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from pydantic import Field

from src.core.exceptions import InputError
from src.core.expression import BinOp, Call, Node, Num, Var, phi_grammar, to_text
from src.core.schemas import FrozenModel, JudgedResult, instance_schema


def _log_shift(node: Node) -> float | None:
    """a for nodes of the form a + ln(r) or ln(r) + a."""
    match node:
        case Call("ln" | "log", Var("r")):
            return 0.0
        case BinOp("+", Num(a), Call("ln" | "log", Var("r"))) if isinstance(a, float):
            return a
        case BinOp("+", Call("ln" | "log", Var("r")), Num(a)) if isinstance(a, float):
            return a
    return None


def _log_power(node: Node) -> tuple[float, float, float] | None:
    match node:
        case Num(c) if isinstance(c, float):
            return (c, 1.0, 0.0)
        case BinOp("^", base, Num(theta)):
            shift = _log_shift(base)
            return None if shift is None else (1.0, shift, float(theta))
        case BinOp("*", Num(c), rest) | BinOp("*", rest, Num(c)) if isinstance(c, float):
            inner = _log_power(rest)
            return None if inner is None else (c * inner[0], inner[1], inner[2])
        case BinOp("/", rest, Num(c)) if isinstance(c, float) and c != 0:
            inner = _log_power(rest)
            return None if inner is None else (inner[0] / c, inner[1], inner[2])
    shift = _log_shift(node)
    return None if shift is None else (1.0, shift, 1.0)


@dataclass(frozen=True)
class FunctionParameter:
    """Slowly varying weight phi(r), r >= 1, written in the function grammar."""

    text: str
    node: Node = field(compare=False)

    @classmethod
    def parse(cls, text: str) -> FunctionParameter:
        node = phi_grammar.parse(text)
        return cls(to_text(node), node)

    @classmethod
    def one(cls) -> FunctionParameter:
        return cls.parse("1")

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        value = phi_grammar.evaluate(self.node, {"r": r})
        return np.broadcast_to(np.asarray(value, dtype=float), r.shape).copy()

    def log_power_form(self) -> tuple[float, float, float] | None:
        """(c, a, theta) when phi = c * (a + ln r)^theta with c > 0, a > 0."""
        form = _log_power(self.node)
        if form is None:
            return None
        c, a, theta = form
        if c <= 0 or (theta != 0 and a <= 0):
            return None
        return form

    def __str__(self) -> str:
        return self.text

    @classmethod
    def __get_pydantic_core_schema__(cls, source, handler):
        return instance_schema(cls, str)


class SpaceTag(FrozenModel):
    s: float
    gamma: float = Field(gt=0, le=1)
    phi: FunctionParameter

    def label(self) -> str:
        return f"H^{{{self.s:g}, {self.s * self.gamma:g}; {self.phi}}}"


@dataclass(frozen=True)
class AnisoGridFunction:
    """Complex samples of w(x, t) on a rectangular grid; the last axis is time."""

    spacings: tuple[float, ...]
    extents: tuple[int, ...]
    samples: np.ndarray = field(compare=False)
    origin: tuple[float, ...] | None = None
    support: Literal["plus", "full"] = "full"

    def __post_init__(self):
        if len(self.spacings) != len(self.extents) or len(self.extents) < 2:
            raise InputError(
                "need one spacing per axis and at least one spatial axis",
                spacings=len(self.spacings),
                extents=len(self.extents),
            )
        if any(h <= 0 for h in self.spacings) or any(e < 1 for e in self.extents):
            raise InputError("grid spacings and extents must be positive")
        samples = np.asarray(self.samples, dtype=complex)
        if samples.size != math.prod(self.extents):
            raise InputError(
                "sample count does not match the grid extents",
                samples=samples.size,
                expected=math.prod(self.extents),
            )
        if self.origin is not None and len(self.origin) != len(self.extents):
            raise InputError("origin must have one entry per axis")
        if self.support not in ("plus", "full"):
            raise InputError("support must be 'plus' or 'full'", support=self.support)
        object.__setattr__(self, "samples", samples.reshape(self.extents))

    @property
    def spatial_dim(self) -> int:
        return len(self.extents) - 1

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacings)


class BoundsWitness(FrozenModel):
    upper: float
    phi_min: float
    phi_max: float


class SlowVariationWitness(FrozenModel):
    scale: float
    r: float
    ratio: float
    index_limit: float


class ClassMReport(JudgedResult):
    consistent: bool
    bounds: list[BoundsWitness]
    slow_variation: list[SlowVariationWitness]
    witness: SlowVariationWitness | None = None
    reason: str = ""

    @property
    def verdict(self) -> str:
        return "consistent with M" if self.consistent else "violates M"


class DiniResult(JudgedResult):
    verdict: Literal["converges", "diverges", "inconclusive"]
    value_estimate: float | None = None
    method: Literal["closed-form", "dyadic-blocks"]
    blocks: list[float] = Field(default_factory=list)


class EmbeddingResult(FrozenModel):
    inside: bool
    reason: str


class NormReport(JudgedResult):
    value: float
    space: str
    upper_bound: bool = False
