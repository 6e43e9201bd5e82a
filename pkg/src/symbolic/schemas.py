from __future__ import annotations

import numbers
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.polynomial.polynomial as npoly

from src.core.config import settings


@dataclass(frozen=True, order=True)
class ExponentKey:
    """Powers of (xi_1..xi_n, p, zeta) in a single monomial."""

    xi: tuple[int, ...]
    p: int = 0
    zeta: int = 0

    def __post_init__(self):
        if any(e < 0 for e in self.xi) or self.p < 0 or self.zeta < 0:
            raise ValueError(f"negative exponent in {self}")

    def __mul__(self, other: ExponentKey) -> ExponentKey:
        return ExponentKey(
            tuple(a + b for a, b in zip(self.xi, other.xi, strict=True)),
            self.p + other.p,
            self.zeta + other.zeta,
        )

    def anisotropic_order(self, b: int) -> int:
        return sum(self.xi) + self.zeta + 2 * b * self.p


@dataclass(frozen=True, eq=True)
class PolySymbol:
    """Polynomial with complex coefficients in xi_1..xi_n, p and zeta."""

    num_spatial_vars: int
    terms: Mapping[ExponentKey, complex] = field(default_factory=dict)

    def __post_init__(self):
        pruned = {}
        for key, coeff in self.terms.items():
            if len(key.xi) != self.num_spatial_vars:
                raise ValueError(
                    f"exponent key {key} does not match n={self.num_spatial_vars}"
                )
            if abs(coeff) > settings.PRUNE_TOL:
                pruned[key] = complex(coeff)
        object.__setattr__(self, "terms", pruned)

    __hash__ = None

    @classmethod
    def zero(cls, n: int) -> PolySymbol:
        return cls(n)

    @classmethod
    def constant(cls, n: int, value: complex) -> PolySymbol:
        return cls(n, {ExponentKey((0,) * n): value})

    @classmethod
    def monomial(
        cls,
        n: int,
        xi: Sequence[int] | None = None,
        p: int = 0,
        zeta: int = 0,
        coeff: complex = 1.0,
    ) -> PolySymbol:
        key = ExponentKey(tuple(xi) if xi is not None else (0,) * n, p, zeta)
        return cls(n, {key: coeff})

    @classmethod
    def xi_var(cls, n: int, i: int) -> PolySymbol:
        """The variable xi_i, 1-based."""
        exponents = [0] * n
        exponents[i - 1] = 1
        return cls.monomial(n, exponents)

    @classmethod
    def p_var(cls, n: int) -> PolySymbol:
        return cls.monomial(n, p=1)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def _coerce(self, other) -> PolySymbol:
        if isinstance(other, PolySymbol):
            if other.num_spatial_vars != self.num_spatial_vars:
                raise ValueError("symbols over different numbers of variables")
            return other
        if isinstance(other, numbers.Number):
            return PolySymbol.constant(self.num_spatial_vars, complex(other))
        return NotImplemented

    def __add__(self, other) -> PolySymbol:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms.get(key, 0j) + coeff
        return PolySymbol(self.num_spatial_vars, terms)

    __radd__ = __add__

    def __neg__(self) -> PolySymbol:
        return PolySymbol(self.num_spatial_vars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> PolySymbol:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> PolySymbol:
        return (-self) + other

    def __mul__(self, other) -> PolySymbol:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict[ExponentKey, complex] = {}
        for key_a, coeff_a in self.terms.items():
            for key_b, coeff_b in other.terms.items():
                key = key_a * key_b
                terms[key] = terms.get(key, 0j) + coeff_a * coeff_b
        return PolySymbol(self.num_spatial_vars, terms)

    __rmul__ = __mul__

    def evaluate(self, xi: Sequence[complex], p: complex = 0.0, zeta: complex = 0.0) -> complex:
        total = 0j
        for key, coeff in self.terms.items():
            value = coeff * p**key.p * zeta**key.zeta
            for x, e in zip(xi, key.xi, strict=True):
                if e:
                    value *= x**e
            total += value
        return total

    def p_degree(self) -> int:
        return max((key.p for key in self.terms), default=-1)

    def orders(self, b: int) -> set[int]:
        return {key.anisotropic_order(b) for key in self.terms}

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for key in sorted(self.terms):
            factors = [f"xi{i + 1}^{e}" if e > 1 else f"xi{i + 1}" for i, e in enumerate(key.xi) if e]
            if key.p:
                factors.append(f"p^{key.p}" if key.p > 1 else "p")
            if key.zeta:
                factors.append(f"zeta^{key.zeta}" if key.zeta > 1 else "zeta")
            coeff = self.terms[key]
            parts.append("*".join([f"({coeff:g})", *factors]))
        return " + ".join(parts)


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial, coefficients in ascending degree."""

    coefficients: tuple[complex, ...] = ()

    def __post_init__(self):
        coeffs = [complex(c) for c in self.coefficients]
        scale = max((abs(c) for c in coeffs), default=0.0)
        while coeffs and abs(coeffs[-1]) <= settings.PRUNE_TOL * scale:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_roots(cls, roots: Sequence[complex]) -> UniPoly:
        if not roots:
            return cls((1.0,))
        return cls(tuple(npoly.polyfromroots(np.asarray(roots, dtype=complex))))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def leading(self) -> complex:
        return self.coefficients[-1] if self.coefficients else 0j

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=complex)

    def monic(self) -> UniPoly:
        if self.is_zero:
            raise ValueError("zero polynomial has no monic normalization")
        return UniPoly(tuple(self.as_array() / self.leading))

    def evaluate(self, z):
        if self.is_zero:
            return np.zeros_like(np.asarray(z, dtype=complex))
        return npoly.polyval(z, self.as_array())

    def __add__(self, other: UniPoly) -> UniPoly:
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        return UniPoly(tuple(npoly.polyadd(self.as_array(), other.as_array())))

    def __sub__(self, other: UniPoly) -> UniPoly:
        return self + UniPoly(tuple(-other.as_array()))

    def __mul__(self, other: UniPoly) -> UniPoly:
        if self.is_zero or other.is_zero:
            return UniPoly()
        return UniPoly(tuple(npoly.polymul(self.as_array(), other.as_array())))

    def padded(self, length: int) -> np.ndarray:
        """Coefficients zero-padded to the given length."""
        out = np.zeros(length, dtype=complex)
        out[: len(self.coefficients)] = self.coefficients
        return out


@dataclass(frozen=True)
class RootSet:
    """Distinct roots with multiplicities, plus the reconstruction residual."""

    roots: tuple[tuple[complex, int], ...]
    residual: float

    @property
    def degree(self) -> int:
        return sum(mult for _, mult in self.roots)

    def values(self) -> list[complex]:
        """Roots repeated according to multiplicity."""
        return [value for value, mult in self.roots for _ in range(mult)]

    def monic_poly(self) -> UniPoly:
        return UniPoly.from_roots(self.values())
