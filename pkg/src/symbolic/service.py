import functools
from collections.abc import Sequence

import numpy as np
import numpy.polynomial.polynomial as npoly
import scipy.linalg

from src.core.config import settings
from src.core.exceptions import InputError
from src.symbolic.root_utils import poly_roots
from src.symbolic.schemas import PolySymbol, UniPoly

PolyMatrix = Sequence[Sequence[PolySymbol]]

__all__ = [
    "adjugate_poly_matrix",
    "det_poly_matrix",
    "matmul_poly",
    "numeric_rank",
    "poly_mod",
    "poly_roots",
    "singular_values",
    "specialize_to_p",
    "specialize_to_zeta",
]


def _check_square(matrix: PolyMatrix) -> tuple[int, int]:
    size = len(matrix)
    if size == 0:
        raise InputError("matrix must have at least one row")
    if any(len(row) != size for row in matrix):
        raise InputError("matrix is not square", rows=size, cols=[len(r) for r in matrix])
    n = matrix[0][0].num_spatial_vars
    if any(entry.num_spatial_vars != n for row in matrix for entry in row):
        raise InputError("matrix entries disagree on the number of spatial variables")
    return size, n


def det_poly_matrix(matrix: PolyMatrix) -> PolySymbol:
    """Determinant by cofactor expansion along rows, memoized on column subsets."""
    size, n = _check_square(matrix)

    @functools.cache
    def minor_det(row: int, cols: frozenset[int]) -> PolySymbol:
        if row == size:
            return PolySymbol.constant(n, 1.0)
        total = PolySymbol.zero(n)
        for position, col in enumerate(sorted(cols)):
            entry = matrix[row][col]
            if entry.is_zero:
                continue
            cofactor = minor_det(row + 1, cols - {col})
            term = entry * cofactor
            total = total - term if position % 2 else total + term
        return total

    return minor_det(0, frozenset(range(size)))


def adjugate_poly_matrix(matrix: PolyMatrix) -> list[list[PolySymbol]]:
    """Transposed cofactor matrix: M * adj(M) = det(M) * I."""
    size, n = _check_square(matrix)
    if size == 1:
        return [[PolySymbol.constant(n, 1.0)]]

    adjugate = [[PolySymbol.zero(n)] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            minor = [
                [matrix[r][c] for c in range(size) if c != i] for r in range(size) if r != j
            ]
            cofactor = det_poly_matrix(minor)
            adjugate[i][j] = -cofactor if (i + j) % 2 else cofactor
    return adjugate


def matmul_poly(left: PolyMatrix, right: PolyMatrix) -> list[list[PolySymbol]]:
    if not left or not right or len(left[0]) != len(right):
        raise InputError("matrix dimensions do not agree for multiplication")
    n = left[0][0].num_spatial_vars
    product = []
    for row in left:
        out_row = []
        for col in range(len(right[0])):
            total = PolySymbol.zero(n)
            for k, entry in enumerate(row):
                if not entry.is_zero and not right[k][col].is_zero:
                    total = total + entry * right[k][col]
            out_row.append(total)
        product.append(out_row)
    return product


def _linear_power(constant: float, slope: float, power: int, cache: dict) -> np.ndarray:
    key = (constant, slope, power)
    if key not in cache:
        cache[key] = npoly.polypow(np.array([constant, slope], dtype=complex), power)
    return cache[key]


def specialize_to_zeta(
    P: PolySymbol, xi0: Sequence[float], nu: Sequence[float], p_value: complex
) -> UniPoly:
    """Substitute xi := xi0 + zeta * nu and p := p_value; the result is a polynomial in zeta."""
    n = P.num_spatial_vars
    if len(xi0) != n or len(nu) != n:
        raise InputError("xi0 and nu must have n components", n=n)
    if abs(float(np.linalg.norm(nu)) - 1.0) > settings.UNIT_TOL:
        raise InputError("nu must be a unit vector", norm=float(np.linalg.norm(nu)))

    cache: dict = {}
    result = np.zeros(1, dtype=complex)
    for key, coeff in P.terms.items():
        poly = np.array([coeff * p_value**key.p], dtype=complex)
        for x0, direction, e in zip(xi0, nu, key.xi):
            if e:
                poly = npoly.polymul(poly, _linear_power(float(x0), float(direction), e, cache))
        if key.zeta:
            poly = np.concatenate([np.zeros(key.zeta, dtype=complex), poly])
        result = npoly.polyadd(result, poly)
    return UniPoly(tuple(result))


def specialize_to_p(P: PolySymbol, xi: Sequence[float]) -> UniPoly:
    """Substitute a numeric xi (and zeta = 0); the result is a polynomial in p."""
    if len(xi) != P.num_spatial_vars:
        raise InputError("xi must have n components", n=P.num_spatial_vars)
    coeffs = np.zeros(P.p_degree() + 1, dtype=complex)
    for key, coeff in P.terms.items():
        if key.zeta:
            continue
        value = coeff
        for x, e in zip(xi, key.xi):
            if e:
                value *= x**e
        coeffs[key.p] += value
    return UniPoly(tuple(coeffs))


def poly_mod(row: UniPoly, modulus: UniPoly) -> UniPoly:
    """Remainder of row on division by a monic modulus."""
    if modulus.degree < 1:
        raise InputError("modulus must have degree at least 1", degree=modulus.degree)
    if abs(modulus.leading - 1.0) > settings.MONIC_TOL:
        raise InputError("modulus must be monic", leading=str(modulus.leading))
    if row.is_zero or row.degree < modulus.degree:
        return row
    _, remainder = npoly.polydiv(row.as_array(), modulus.as_array())
    return UniPoly(tuple(remainder[: modulus.degree]))


def singular_values(matrix) -> np.ndarray:
    array = np.atleast_2d(np.asarray(matrix, dtype=complex))
    if array.size == 0:
        raise InputError("matrix must be nonempty")
    return scipy.linalg.svd(array, compute_uv=False)


def numeric_rank(matrix, tol: float | None = None) -> int:
    tol = settings.RANK_TOL if tol is None else tol
    values = singular_values(matrix)
    largest = float(values[0]) if values.size else 0.0
    if largest == 0.0:
        return 0
    return int(np.sum(values > tol * largest))
