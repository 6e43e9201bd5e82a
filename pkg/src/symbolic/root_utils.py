"""Simultaneous-iteration root finding for univariate complex polynomials."""

import numpy as np
import numpy.polynomial.polynomial as npoly

from src.core.config import settings
from src.core.exceptions import DegeneracyError
from src.core.logger import logger
from src.symbolic.schemas import RootSet, UniPoly

_EPS = np.finfo(float).eps
# Rotation of the starting circle; keeps starts off symmetry axes of real polynomials
_START_ANGLE = 0.4


def aberth_ehrlich(coeffs: np.ndarray, max_iter: int) -> np.ndarray:
    """
    Approximate all roots of a monic polynomial by Aberth-Ehrlich iteration

    Args:
        coeffs: Monic coefficients in ascending degree
        max_iter: Iteration cap

    Returns:
        Array of root approximations (one per degree, unclustered)
    """
    degree = len(coeffs) - 1
    deriv = npoly.polyder(coeffs)
    abs_coeffs = np.abs(coeffs)

    # Cauchy bound for roots
    radius = 1.0 + np.max(abs_coeffs[:-1])
    angles = 2 * np.pi * np.arange(degree) / degree + _START_ANGLE
    z = radius * np.exp(1j * angles)

    for _ in range(max_iter):
        pv = npoly.polyval(z, coeffs)
        dpv = npoly.polyval(z, deriv)

        # Roots already at rounding-error level stay put
        bound = 8 * degree * _EPS * npoly.polyval(np.abs(z), abs_coeffs)
        done = np.abs(pv) <= bound
        if done.all():
            break

        with np.errstate(all="ignore"):
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            ratio = pv / dpv
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
        step = np.where(np.isfinite(step) & ~done, step, 0.0)
        z = z - step

        if np.all(np.abs(step) <= 4 * _EPS * (1.0 + np.abs(z))):
            break
    return z


def cluster_roots(approximations: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    """Merge approximations closer than tol (single linkage); cluster value is the mean."""
    count = len(approximations)
    parent = list(range(count))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(count):
        for j in range(i + 1, count):
            if abs(approximations[i] - approximations[j]) <= tol:
                parent[find(i)] = find(j)

    groups: dict[int, list[complex]] = {}
    for i in range(count):
        groups.setdefault(find(i), []).append(complex(approximations[i]))

    clusters = [(complex(np.mean(members)), len(members)) for members in groups.values()]
    clusters.sort(key=lambda item: (round(item[0].real, 12), round(item[0].imag, 12)))
    return clusters


def poly_roots(q: UniPoly, tol: float | None = None) -> RootSet:
    tol = settings.ROOT_CLUSTER_TOL if tol is None else tol
    if q.is_zero or q.degree < 1:
        raise DegeneracyError("polynomial has no roots to find", degree=q.degree)
    if abs(q.leading) <= tol:
        raise DegeneracyError(
            "leading coefficient vanishes (degree collapse)",
            degree=q.degree,
            leading=abs(q.leading),
        )

    monic = q.monic().as_array()
    approximations = aberth_ehrlich(monic, settings.ROOT_MAX_ITER)
    clusters = cluster_roots(approximations, tol)

    rebuilt = npoly.polyfromroots([value for value, mult in clusters for _ in range(mult)])
    residual = float(np.max(np.abs(rebuilt - monic)))
    logger.debug("roots found", degree=q.degree, clusters=len(clusters), residual=residual)
    return RootSet(tuple(clusters), residual)
