from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from pydantic import Field, model_validator

from src.core.config import settings
from src.core.exceptions import CoefficientEvaluationError, InputError, OrderBoundError
from src.core.expression import Node, coefficient_grammar, to_text
from src.core.logger import logger
from src.core.schemas import FrozenModel, instance_schema


@dataclass(frozen=True)
class CoefficientExpression:
    """Coefficient a(x, t) written in the coefficient grammar."""

    text: str
    node: Node
    n: int

    @classmethod
    def parse(cls, text: str, n: int) -> CoefficientExpression:
        return cls(text, coefficient_grammar(n).parse(text), n)

    @classmethod
    def constant(cls, value: complex, n: int) -> CoefficientExpression:
        value = complex(value)
        if value.imag == 0:
            text = repr(value.real)
        elif value.real == 0:
            text = f"{value.imag!r}i"
        else:
            text = f"{value.real!r} + {value.imag!r}i"
        return cls.parse(text, n)

    def evaluate(self, x: Sequence[float], t: float) -> complex:
        env = {f"x{i + 1}": value for i, value in enumerate(x)}
        env["t"] = t
        value = complex(coefficient_grammar(self.n).evaluate(self.node, env))
        if not np.isfinite(value.real) or not np.isfinite(value.imag):
            raise CoefficientEvaluationError(
                f"coefficient {self.text!r} is not finite", x=tuple(x), t=t
            )
        return value

    def canonical_text(self) -> str:
        return to_text(self.node)

    @classmethod
    def __get_pydantic_core_schema__(cls, source, handler):
        return instance_schema(cls, lambda value: value.text)


@dataclass(frozen=True)
class PDOTerm:
    """coeff(x, t) * D_x^alpha * d_t^beta."""

    alpha: tuple[int, ...]
    beta: int
    coeff: CoefficientExpression

    def __post_init__(self):
        if any(a < 0 for a in self.alpha) or self.beta < 0:
            raise InputError("multi-index entries must be nonnegative", alpha=self.alpha, beta=self.beta)

    def order(self, b: int) -> int:
        return sum(self.alpha) + 2 * b * self.beta

    @classmethod
    def __get_pydantic_core_schema__(cls, source, handler):
        return instance_schema(
            cls,
            lambda term: {"alpha": list(term.alpha), "beta": term.beta, "coeff": term.coeff.text},
        )


class InteriorSample(FrozenModel):
    x: tuple[float, ...]
    t: float


class BoundarySample(FrozenModel):
    x: tuple[float, ...]
    t: float
    normal: tuple[float, ...]
    tangents: tuple[tuple[float, ...], ...]


class OrderConstants(FrozenModel):
    m: int
    sigma0: int
    l0: int


TermTable = tuple[tuple[tuple[PDOTerm, ...], ...], ...]


class ParabolicProblem(FrozenModel):
    n: int = Field(ge=2)
    N: int = Field(ge=1)
    b: int = Field(ge=1)
    tau: float = Field(gt=0)
    kappa: tuple[int, ...]
    ell: tuple[int, ...]
    A_terms: TermTable
    B_terms: TermTable
    interior_samples: tuple[InteriorSample, ...] = ()
    boundary_samples: tuple[BoundarySample, ...] = ()
    sample_notes: tuple[str, ...] = ()

    @property
    def m(self) -> int:
        return self.b * sum(self.kappa)

    @property
    def validation_notes(self) -> list[str]:
        notes = []
        if self.N == 1:
            notes.append(
                "N = 1: scalar problem; the theory is stated for systems with N >= 2, "
                "the scalar case is its standard specialization"
            )
        notes.extend(self.sample_notes)
        return notes

    @model_validator(mode="after")
    def _check_orders(self) -> ParabolicProblem:
        if len(self.kappa) != self.N or any(k < 1 for k in self.kappa):
            raise InputError("kappa must list N positive integers", N=self.N, kappa=self.kappa)
        if len(self.ell) != self.m:
            raise InputError(
                "ell must have m = b*(kappa_1+...+kappa_N) entries", m=self.m, given=len(self.ell)
            )
        if len(self.A_terms) != self.N or any(len(row) != self.N for row in self.A_terms):
            raise InputError("A term table must be N x N", N=self.N)
        if len(self.B_terms) != self.m or any(len(row) != self.N for row in self.B_terms):
            raise InputError("B term table must be m x N", m=self.m, N=self.N)

        for j, row in enumerate(self.A_terms, start=1):
            for k, terms in enumerate(row, start=1):
                self._check_terms(f"A[{j}][{k}]", terms, 2 * self.b * self.kappa[k - 1])
        for j, row in enumerate(self.B_terms, start=1):
            for k, terms in enumerate(row, start=1):
                bound = self.ell[j - 1] + 2 * self.b * self.kappa[k - 1]
                if bound < 0 and terms:
                    raise OrderBoundError(
                        f"B[{j}][{k}] must be empty because l_{j} + 2b*kappa_{k} = {bound} < 0"
                    )
                self._check_terms(f"B[{j}][{k}]", terms, bound)

        self._check_samples()
        for note in self.validation_notes:
            logger.warning(note)
        return self

    def _check_terms(self, label: str, terms: Sequence[PDOTerm], bound: int) -> None:
        for index, term in enumerate(terms, start=1):
            if len(term.alpha) != self.n:
                raise InputError(f"{label} term {index}: alpha must have n = {self.n} entries")
            if term.coeff.n != self.n:
                raise InputError(f"{label} term {index}: coefficient parsed for n = {term.coeff.n}")
            order = term.order(self.b)
            if order > bound:
                raise OrderBoundError(
                    f"{label} term {index} has anisotropic order {order} exceeding bound {bound}",
                    alpha=term.alpha,
                    beta=term.beta,
                )

    def _check_samples(self) -> None:
        for sample in self.interior_samples:
            if len(sample.x) != self.n or not 0.0 <= sample.t <= self.tau:
                raise InputError("interior sample outside the cylinder", x=sample.x, t=sample.t)
        for sample in self.boundary_samples:
            if len(sample.x) != self.n or len(sample.normal) != self.n:
                raise InputError("boundary sample has wrong dimension", x=sample.x)
            if not 0.0 <= sample.t <= self.tau:
                raise InputError("boundary sample time outside [0, tau]", t=sample.t)
            normal = np.asarray(sample.normal)
            if abs(np.linalg.norm(normal) - 1.0) > settings.ORTHO_TOL:
                raise InputError("boundary normal is not a unit vector", x=sample.x)
            if len(sample.tangents) != self.n - 1:
                raise InputError("tangent frame must have n - 1 vectors", x=sample.x)
            frame = np.asarray(sample.tangents)
            if np.max(np.abs(frame @ normal)) > settings.ORTHO_TOL:
                raise InputError("tangent frame is not orthogonal to the normal", x=sample.x)
            if np.max(np.abs(frame @ frame.T - np.eye(self.n - 1))) > settings.ORTHO_TOL:
                raise InputError("tangent frame is not orthonormal", x=sample.x)
