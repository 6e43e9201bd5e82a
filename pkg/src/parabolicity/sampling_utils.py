import math
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.core.config import settings

# Levels of |xi|^{2b} on the anisotropic unit sphere, besides the p = 0 point
_ARC_LEVELS = (0.75, 0.5, 0.25)


def map_samples(func: Callable, items: Iterable) -> list:
    """Evaluate func over samples in worker threads, keeping the input order."""
    items = list(items)
    if settings.WORKERS <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=settings.WORKERS) as executor:
        return list(executor.map(func, items))


def unit_directions(n: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Unit vectors in R^n: evenly spaced on the circle for n = 2, seeded random otherwise."""
    if n == 2:
        angles = 2 * np.pi * np.arange(count) / count
        return [np.array([math.cos(a), math.sin(a)]) for a in angles]
    raw = rng.standard_normal((count, n))
    return list(raw / np.linalg.norm(raw, axis=1, keepdims=True))


def tangent_directions(
    frame: Sequence[Sequence[float]], count: int, rng: np.random.Generator
) -> list[np.ndarray]:
    """Unit vectors in the span of an orthonormal tangent frame."""
    basis = np.asarray(frame, dtype=float)
    if len(basis) == 1:
        return [basis[0], -basis[0]][:count]
    return [c @ basis for c in unit_directions(len(basis), count, rng)]


def arc_points(b: int, delta1: float, count: int) -> list[tuple[float, complex]]:
    """
    Points (|xi|, p) on |xi|^{2b} + |p| = 1 with Re p >= -delta1 * |xi|^{2b}

    The first point is p = 0 with |xi| = 1; the rest are spread over a few
    levels of |xi|^{2b}, each covering its admissible arc of arguments.
    """
    points = [(1.0, 0j)]
    remaining = count - 1
    for index, level in enumerate(_ARC_LEVELS):
        share = remaining // len(_ARC_LEVELS) + (index < remaining % len(_ARC_LEVELS))
        if share == 0:
            continue
        bound = max(-1.0, -delta1 * level / (1.0 - level))
        theta_max = math.acos(bound)
        thetas = np.linspace(-theta_max, theta_max, share) if share > 1 else np.zeros(1)
        radius = level ** (1.0 / (2 * b))
        points.extend((radius, (1.0 - level) * complex(math.cos(th), math.sin(th))) for th in thetas)
    return points


def pure_p_points() -> list[complex]:
    """xi = 0, |p| = 1, Re p >= 0."""
    return [-1j, 1 + 0j, 1j]
