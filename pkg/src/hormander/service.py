import functools
import math
from collections.abc import Sequence

import numpy as np
import scipy.integrate

from src.core.config import settings
from src.core.exceptions import InputError, TruncationError
from src.core.logger import logger
from src.hormander.grid_utils import angular_frequencies, edge_magnitude
from src.hormander.schemas import (
    AnisoGridFunction,
    BoundsWitness,
    ClassMReport,
    DiniResult,
    EmbeddingResult,
    FunctionParameter,
    SlowVariationWitness,
    SpaceTag,
)

BOUND_RANGES = (10.0, 1e3)
SCALES = (2.0, 10.0, 0.5)
SLOW_VARIATION_RADII = (1e3, 1e4, 1e5, 1e6)
EMBEDDING_RADII = (1.0, 10.0, 1e3, 1e6, 1e9)
# Parameters must stay finite and positive on [1, MAX_RADIUS]
MAX_RADIUS = 1e12


def weight_r_gamma(xi: Sequence[float] | np.ndarray, eta, gamma: float):
    """(1 + |xi|^2 + |eta|^{2 gamma})^{1/2}; xi may carry the vector on its first axis."""
    if gamma <= 0:
        raise InputError("gamma must be positive", gamma=gamma)
    xi = np.asarray(xi, dtype=float)
    xi_sq = np.sum(xi**2, axis=0) if xi.ndim else xi**2
    return np.sqrt(1.0 + xi_sq + np.abs(eta) ** (2 * gamma))


def _evaluate_checked(phi: FunctionParameter, r: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        values = phi(r)
    if not np.all(np.isfinite(values)):
        bad = float(r[~np.isfinite(values)][0])
        raise InputError(f"phi = {phi} does not evaluate to a finite number", r=bad)
    return values


def _index_limit(indices: np.ndarray) -> float:
    """Extrapolate the local index to r = infinity by a quadratic fit in 1 / ln r."""
    x = 1.0 / np.log(np.asarray(SLOW_VARIATION_RADII))
    return float(np.polyval(np.polyfit(x, indices, 2), 0.0))


def check_class_M(phi: FunctionParameter) -> ClassMReport:
    """
    Heuristic screen for the class M of slowly varying weights

    phi and 1/phi must be bounded on [1, d] for the sampled d, and the local
    index ln(phi(lam r) / phi(r)) / ln(lam) must shrink toward zero as r grows.
    Finite sampling cannot prove membership, so the report is always heuristic.
    """
    tolerances = {"slow_variation_tol": settings.SLOW_VARIATION_TOL}
    values = _evaluate_checked(phi, np.logspace(0, math.log10(MAX_RADIUS), 241))
    if np.any(values <= 0):
        return ClassMReport(
            consistent=False,
            bounds=[],
            slow_variation=[],
            reason=f"phi = {phi} is not positive on [1, {MAX_RADIUS:g}]",
            tolerances=tolerances,
            heuristic=True,
        )

    bounds = []
    for upper in BOUND_RANGES:
        sampled = _evaluate_checked(phi, np.logspace(0, math.log10(upper), 200))
        bounds.append(
            BoundsWitness(upper=upper, phi_min=float(sampled.min()), phi_max=float(sampled.max()))
        )

    radii = np.asarray(SLOW_VARIATION_RADII)
    base = _evaluate_checked(phi, radii)
    witnesses, failures = [], []
    for scale in SCALES:
        ratios = _evaluate_checked(phi, scale * radii) / base
        indices = np.log(ratios) / math.log(scale)
        magnitude = np.abs(indices)
        limit = _index_limit(indices)
        witness = SlowVariationWitness(
            scale=scale, r=float(radii[-1]), ratio=float(ratios[-1]), index_limit=limit
        )
        witnesses.append(witness)

        negligible = magnitude.max() <= settings.SLOW_VARIATION_TOL * 1e-6
        decaying = bool(np.all(np.diff(magnitude) < 0))
        if not negligible and not decaying:
            failures.append((abs(limit), witness, "local index does not decay"))
        elif abs(limit) >= settings.SLOW_VARIATION_TOL:
            failures.append((abs(limit), witness, "local index does not tend to zero"))

    if failures:
        worst = max(size for size, _, _ in failures)
        _, witness, reason = next(f for f in failures if f[0] >= worst - 1e-9)
        logger.info("Weight fails slow variation screen", phi=str(phi), scale=witness.scale)
        return ClassMReport(
            consistent=False,
            bounds=bounds,
            slow_variation=witnesses,
            witness=witness,
            reason=f"{reason}: phi({witness.scale:g} r) / phi(r) = {witness.ratio:.6g} at r = {witness.r:g}",
            tolerances=tolerances,
            heuristic=True,
        )
    return ClassMReport(
        consistent=True,
        bounds=bounds,
        slow_variation=witnesses,
        reason="bounded on compact ranges and slowly varying at the sampled radii",
        tolerances=tolerances,
        heuristic=True,
    )


@functools.lru_cache(maxsize=128)
def _screen_cached(phi: FunctionParameter, tolerance: float) -> ClassMReport:
    return check_class_M(phi)


def screen_class_M(phi: FunctionParameter) -> ClassMReport:
    """check_class_M, memoized per parameter and tolerance."""
    return _screen_cached(phi, settings.SLOW_VARIATION_TOL)


def make_space_tag(s: float, gamma: float, phi: FunctionParameter) -> SpaceTag:
    if not (0 < gamma <= 1 and math.isfinite(s)):
        raise InputError("need 0 < gamma <= 1 and a finite s", s=s, gamma=gamma)
    report = screen_class_M(phi)
    if not report.consistent:
        raise InputError(f"phi = {phi} is not a valid function parameter: {report.reason}")
    return SpaceTag(s=s, gamma=gamma, phi=phi)


def _dyadic_blocks() -> list[tuple[float, float]]:
    edges = [0.0] + [2.0**i for i in range(settings.DINI_MAX_BLOCKS)]
    return list(zip(edges[:-1], edges[1:]))


def dini_integral(phi: FunctionParameter) -> DiniResult:
    """
    Decide whether the integral of dr / (r phi(r)^2) over [1, inf) converges

    After r = e^u the integrand is 1 / phi(e^u)^2 on [0, inf). Log-power
    parameters c (a + ln r)^theta are decided in closed form; anything else
    is integrated block by block over [0, 1], [1, 2], [2, 4], ... and judged by
    the decay of the block contributions.
    """
    tolerances = {"dini_ratio": settings.DINI_RATIO}
    form = phi.log_power_form()
    if form is not None:
        c, a, theta = form
        if theta > 0.5:
            value = a ** (1 - 2 * theta) / (c**2 * (2 * theta - 1))
            return DiniResult(verdict="converges", value_estimate=value, method="closed-form", tolerances=tolerances)
        return DiniResult(verdict="diverges", value_estimate=math.inf, method="closed-form", tolerances=tolerances)

    def integrand(u: float) -> float:
        value = float(phi(math.exp(u)))
        if not math.isfinite(value) or value <= 0:
            raise InputError(f"phi = {phi} is not positive and finite", r=math.exp(u))
        return 1.0 / value**2

    blocks = [scipy.integrate.quad(integrand, lo, hi, limit=200)[0] for lo, hi in _dyadic_blocks()]
    logger.debug("Dini blocks", phi=str(phi), blocks=blocks)
    run = settings.DINI_DIVERGENCE_RUN
    tail = np.asarray(blocks[-run:])
    if len(tail) == run and np.all(np.diff(tail) >= 0):
        return DiniResult(verdict="diverges", value_estimate=math.inf, method="dyadic-blocks", blocks=blocks, tolerances=tolerances)

    total = float(sum(blocks))
    last = np.asarray(blocks[-4:])
    if last[-1] == 0.0:
        return DiniResult(verdict="converges", value_estimate=total, method="dyadic-blocks", blocks=blocks, tolerances=tolerances)
    if np.all(last > 0):
        ratio = float(np.exp(np.polyfit(np.arange(len(last)), np.log(last), 1)[0]))
        if ratio < settings.DINI_RATIO:
            value = total + blocks[-1] * ratio / (1 - ratio)
            return DiniResult(
                verdict="converges", value_estimate=value, method="dyadic-blocks", blocks=blocks, tolerances=tolerances
            )
    return DiniResult(verdict="inconclusive", value_estimate=None, method="dyadic-blocks", blocks=blocks, tolerances=tolerances)


def spectral_weight(w: AnisoGridFunction, tag: SpaceTag) -> np.ndarray:
    """r_gamma^{2s} phi(r_gamma)^2 at the continuum frequency of every DFT bin."""
    axes = np.meshgrid(*angular_frequencies(w), indexing="ij")
    r = weight_r_gamma(np.stack(axes[:-1]), axes[-1], tag.gamma)
    return r ** (2 * tag.s) * _evaluate_checked(tag.phi, r) ** 2


def norm_full_space(w: AnisoGridFunction, tag: SpaceTag) -> float:
    """
    Norm of the sampled w in the full-space Hormander space of tag

    The forward DFT is scaled by the grid cell volume, so that with unit
    weights the result is exactly the discrete L2 norm of the samples.
    """
    peak = float(np.max(np.abs(w.samples)))
    if peak == 0.0:
        return 0.0
    edge, index = edge_magnitude(w)
    if edge > settings.EDGE_DECAY_TOL * peak:
        raise TruncationError(
            "grid function does not decay at the grid edges",
            edge_value=edge,
            relative=edge / peak,
            index=index,
        )

    spectrum = w.cell_volume * np.fft.fftn(w.samples)
    weighted = spectral_weight(w, tag) * np.abs(spectrum) ** 2
    # (2 pi)^{-d} times the frequency cell 2 pi / (N h) per axis
    norm_sq = math.fsum(weighted.ravel()) / (w.cell_volume * w.samples.size)
    return math.sqrt(norm_sq)


def embedding_order(tag_a: SpaceTag, tag_b: SpaceTag) -> EmbeddingResult:
    """Whether the space of tag_a embeds continuously into that of tag_b."""
    if abs(tag_a.gamma - tag_b.gamma) > 1e-12:
        raise InputError("tags must share gamma", gamma_a=tag_a.gamma, gamma_b=tag_b.gamma)
    if tag_a.s > tag_b.s:
        return EmbeddingResult(inside=True, reason=f"s = {tag_a.s:g} > {tag_b.s:g}")
    if tag_a.s < tag_b.s:
        return EmbeddingResult(inside=False, reason=f"s = {tag_a.s:g} < {tag_b.s:g}")
    if tag_a.phi == tag_b.phi:
        return EmbeddingResult(inside=True, reason="identical tags")

    radii = np.asarray(EMBEDDING_RADII)
    ratio = _evaluate_checked(tag_b.phi, radii) / _evaluate_checked(tag_a.phi, radii)
    bounded = ratio[-1] <= ratio[:-1].max() * (1 + 1e-9)
    verdict = "bounded" if bounded else "unbounded"
    return EmbeddingResult(
        inside=bool(bounded),
        reason=f"equal s, ratio {tag_b.phi} / {tag_a.phi} {verdict} on sampled r (last {ratio[-1]:.6g})",
    )
