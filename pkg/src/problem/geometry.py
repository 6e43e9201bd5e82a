"""Sample generators for the built-in domains G.

Each generator returns interior points (x, t) in the closed cylinder and
boundary points with a unit inward normal and an orthonormal tangent frame.
Randomness is seeded, so a given configuration always yields the same samples.
"""

from collections.abc import Callable, Mapping, Sequence

import numpy as np

from src.core.config import settings
from src.core.exceptions import InputError
from src.core.logger import logger
from src.problem.schemas import BoundarySample, InteriorSample

Samples = tuple[tuple[InteriorSample, ...], tuple[BoundarySample, ...]]


def tangent_frame(normal: Sequence[float]) -> tuple[tuple[float, ...], ...]:
    """Orthonormal basis of the hyperplane orthogonal to normal."""
    nu = np.asarray(normal, dtype=float)
    q, _ = np.linalg.qr(np.column_stack([nu, np.eye(len(nu))]))
    return tuple(tuple(float(v) for v in column) for column in q[:, 1:].T)


def _directions(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    if n == 2:
        angles = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(angles), np.sin(angles)])
    raw = rng.standard_normal((count, n))
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def _interior(points: np.ndarray, tau: float) -> tuple[InteriorSample, ...]:
    times = np.linspace(0.0, tau, len(points))
    return tuple(
        InteriorSample(x=tuple(float(v) for v in x), t=float(t)) for x, t in zip(points, times)
    )


def _boundary(
    points: np.ndarray, normals: np.ndarray, tau: float, time_values: int
) -> tuple[BoundarySample, ...]:
    samples = []
    for x, nu in zip(points, normals):
        nu = nu / np.linalg.norm(nu)
        frame = tangent_frame(nu)
        for t in np.linspace(0.0, tau, time_values):
            samples.append(
                BoundarySample(
                    x=tuple(float(v) for v in x),
                    t=float(t),
                    normal=tuple(float(v) for v in nu),
                    tangents=frame,
                )
            )
    return tuple(samples)


def half_space(
    n: int, tau: float, interior: int, boundary_points: int, time_values: int, rng: np.random.Generator
) -> Samples:
    """Collar of the half-space x_n > 0 near the plane x_n = 0."""
    inner = np.column_stack(
        [rng.uniform(-1.0, 1.0, (interior, n - 1)), rng.uniform(0.1, 1.0, interior)]
    )
    edge = np.column_stack([rng.uniform(-1.0, 1.0, (boundary_points, n - 1)), np.zeros(boundary_points)])
    normals = np.tile(np.eye(n)[-1], (boundary_points, 1))
    return _interior(inner, tau), _boundary(edge, normals, tau, time_values)


def unit_ball(
    n: int, tau: float, interior: int, boundary_points: int, time_values: int, rng: np.random.Generator
) -> Samples:
    radii = 0.9 * rng.uniform(0.0, 1.0, interior) ** (1.0 / n)
    inner = _directions(n, interior, rng) * radii[:, None]
    edge = _directions(n, boundary_points, rng)
    return _interior(inner, tau), _boundary(edge, -edge, tau, time_values)


def smoothed_square(
    n: int, tau: float, interior: int, boundary_points: int, time_values: int, rng: np.random.Generator
) -> Samples:
    """Cube with rounded corners: x_1^4 + ... + x_n^4 < 1."""

    def project(directions: np.ndarray) -> np.ndarray:
        return directions / np.sum(directions**4, axis=1, keepdims=True) ** 0.25

    radii = 0.9 * rng.uniform(0.0, 1.0, interior) ** (1.0 / n)
    inner = project(_directions(n, interior, rng)) * radii[:, None]
    edge = project(_directions(n, boundary_points, rng))
    return _interior(inner, tau), _boundary(edge, -(edge**3), tau, time_values)


DOMAINS: Mapping[str, Callable[..., Samples]] = {
    "half-space": half_space,
    "ball": unit_ball,
    "smoothed-square": smoothed_square,
}


def generate_samples(
    domain: str,
    n: int,
    tau: float,
    interior: int | None = None,
    boundary_points: int | None = None,
    time_values: int | None = None,
    seed: int | None = None,
) -> Samples:
    if domain not in DOMAINS:
        raise InputError(f"unknown domain {domain!r}", known=sorted(DOMAINS))
    interior = settings.INTERIOR_SAMPLES if interior is None else interior
    boundary_points = settings.BOUNDARY_POINTS if boundary_points is None else boundary_points
    time_values = settings.TIME_VALUES if time_values is None else time_values
    if min(interior, boundary_points, time_values) < 1:
        raise InputError("sample densities must be positive")
    rng = np.random.default_rng(settings.SAMPLING_SEED if seed is None else seed)
    logger.debug(
        "Generating samples",
        domain=domain,
        interior=interior,
        boundary=boundary_points * time_values,
    )
    return DOMAINS[domain](n, tau, interior, boundary_points, time_values, rng)


def explicit_samples(
    interior: Sequence[Mapping], boundary: Sequence[Mapping], notes: list[str] | None = None
) -> Samples:
    """
    Samples supplied as point lists; missing tangent frames are completed from the normal

    Normals that are not unit vectors are rescaled, and each rescaling is
    recorded in notes when a list is given.
    """
    inner = tuple(InteriorSample(x=tuple(p["x"]), t=p["t"]) for p in interior)
    edge = []
    for point in boundary:
        nu = np.asarray(point["normal"], dtype=float)
        length = np.linalg.norm(nu)
        if length == 0.0:
            raise InputError("boundary normal must be nonzero", x=point["x"])
        if abs(length - 1.0) > settings.ORTHO_TOL:
            note = f"boundary normal at x = {tuple(point['x'])} normalized from length {length:.6g}"
            if notes is None:
                logger.warning(note)
            else:
                notes.append(note)
        nu = nu / length
        tangents = point.get("tangents") or tangent_frame(nu)
        edge.append(
            BoundarySample(
                x=tuple(point["x"]),
                t=point["t"],
                normal=tuple(float(v) for v in nu),
                tangents=tuple(tuple(v) for v in tangents),
            )
        )
    return inner, tuple(edge)
