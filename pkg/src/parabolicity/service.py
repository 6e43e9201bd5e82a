import math
from collections.abc import Sequence

import numpy as np

from src.core.config import settings
from src.core.constants import Verdict
from src.core.exceptions import DegeneracyError, InputError, SeparationError
from src.core.logger import logger
from src.parabolicity.sampling_utils import (
    arc_points,
    map_samples,
    pure_p_points,
    tangent_directions,
    unit_directions,
)
from src.parabolicity.schemas import (
    CheckReport,
    Condition1Result,
    Condition2Result,
    CoveringResult,
    CoveringWitness,
    HomogeneityResult,
    NormalizationViolation,
    RootWitness,
    SamplingConfig,
)
from src.problem.schemas import BoundarySample, ParabolicProblem
from src.problem.service import symbol_matrix_A, symbol_matrix_B
from src.symbolic.schemas import PolySymbol, RootSet, UniPoly
from src.symbolic.service import (
    adjugate_poly_matrix,
    det_poly_matrix,
    matmul_poly,
    numeric_rank,
    poly_mod,
    poly_roots,
    singular_values,
    specialize_to_p,
    specialize_to_zeta,
)


def _pair(z: complex) -> tuple[float, float]:
    return (float(z.real), float(z.imag))


def _floats(values) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


def check_condition_i(
    problem: ParabolicProblem, sampling: SamplingConfig | None = None, xi_scale: float = 1.0
) -> Condition1Result:
    """
    Sample the roots p of det A0(x, t, xi, p) over interior points and directions of xi

    delta_estimate is the smallest (-Re p) / |xi|^{2b} seen; homogeneity of the
    roots in xi makes the sphere |xi| = xi_scale representative of all xi.
    """
    sampling = sampling or SamplingConfig()
    rng = np.random.default_rng(sampling.seed)
    directions = [xi_scale * d for d in unit_directions(problem.n, sampling.xi_directions, rng)]
    if not directions:
        raise InputError("no xi directions to sample", xi_directions=sampling.xi_directions)
    weight = xi_scale ** (2 * problem.b)
    logger.info("Checking root condition", samples=len(problem.interior_samples))

    def per_sample(sample) -> tuple[float, RootWitness | None]:
        det = det_poly_matrix(symbol_matrix_A(problem, sample.x, sample.t))
        expected = det.p_degree()
        best = (math.inf, None)
        for xi in directions:
            q = specialize_to_p(det, xi)
            if expected < 1 or q.degree < expected:
                raise DegeneracyError(
                    "leading coefficient in p vanishes", x=sample.x, t=sample.t, xi=_floats(xi)
                )
            for root in poly_roots(q).values():
                delta = -root.real / weight
                if delta < best[0]:
                    best = (delta, RootWitness(x=sample.x, t=sample.t, xi=_floats(xi), root=_pair(root)))
        logger.debug("Root sample done", x=sample.x, t=sample.t, delta=best[0])
        return best

    results = map_samples(per_sample, problem.interior_samples)
    if not results:
        raise InputError("no interior samples to check")
    delta, witness = min(results, key=lambda item: item[0])
    return Condition1Result(
        passed=delta > settings.DELTA_FLOOR,
        delta_estimate=float(delta),
        samples_checked=len(results) * len(directions),
        worst_witness=witness,
        tolerances={"delta_floor": settings.DELTA_FLOOR, "root_cluster_tol": settings.ROOT_CLUSTER_TOL},
        heuristic=True,
    )


def check_condition_ii(problem: ParabolicProblem) -> Condition2Result:
    """The pure time derivative of order kappa_k in entry (j, k) must carry coefficient delta_jk."""
    violations = []
    for sample in problem.interior_samples:
        for j, row in enumerate(problem.A_terms, start=1):
            for k, terms in enumerate(row, start=1):
                kappa = problem.kappa[k - 1]
                value = sum(
                    (
                        term.coeff.evaluate(sample.x, sample.t)
                        for term in terms
                        if term.beta == kappa and not any(term.alpha)
                    ),
                    0j,
                )
                expected = 1.0 if j == k else 0.0
                if abs(value - expected) > settings.NORMALIZATION_TOL:
                    violations.append(
                        NormalizationViolation(j=j, k=k, x=sample.x, t=sample.t, value=_pair(value))
                    )
    return Condition2Result(
        passed=not violations,
        samples_checked=len(problem.interior_samples),
        violations=violations,
        tolerances={"normalization_tol": settings.NORMALIZATION_TOL},
        heuristic=True,
    )


def compute_zeta_split(
    problem: ParabolicProblem,
    boundary_sample: BoundarySample,
    xi_tangent: Sequence[float],
    p_value: complex,
    det: PolySymbol | None = None,
) -> tuple[RootSet, RootSet]:
    """Roots of det A0(x, t, xi + zeta*nu, p) in zeta, split into Im > 0 and Im < 0."""
    nu = np.asarray(boundary_sample.normal)
    xi = np.asarray(xi_tangent, dtype=float)
    if abs(float(xi @ nu)) > settings.ORTHO_TOL * max(1.0, float(np.linalg.norm(xi))):
        raise InputError("xi must be tangent to the boundary", xi=_floats(xi))
    if det is None:
        det = det_poly_matrix(symbol_matrix_A(problem, boundary_sample.x, boundary_sample.t))

    q = specialize_to_zeta(det, xi, nu, p_value)
    if q.degree != 2 * problem.m:
        raise DegeneracyError(
            f"polynomial in zeta has degree {q.degree}, expected {2 * problem.m}",
            x=boundary_sample.x,
            t=boundary_sample.t,
            xi=_floats(xi),
            p=str(p_value),
        )
    roots = poly_roots(q)
    plus = tuple((z, mult) for z, mult in roots.roots if z.imag >= settings.IM_FLOOR)
    minus = tuple((z, mult) for z, mult in roots.roots if z.imag <= -settings.IM_FLOOR)
    if len(plus) + len(minus) != len(roots.roots):
        raise SeparationError(
            "root on or near the real axis",
            x=boundary_sample.x,
            t=boundary_sample.t,
            xi=_floats(xi),
            p=str(p_value),
        )
    plus_set, minus_set = RootSet(plus, roots.residual), RootSet(minus, roots.residual)
    if plus_set.degree != problem.m or minus_set.degree != problem.m:
        raise SeparationError(
            f"root counts ({plus_set.degree}, {minus_set.degree}) differ from ({problem.m}, {problem.m})",
            x=boundary_sample.x,
            t=boundary_sample.t,
            xi=_floats(xi),
            p=str(p_value),
        )
    return plus_set, minus_set


def _covering_matrix(
    rows: Sequence[Sequence[PolySymbol]], xi: np.ndarray, nu: np.ndarray, p: complex, modulus: UniPoly
) -> np.ndarray:
    m = modulus.degree
    return np.array(
        [
            np.concatenate(
                [poly_mod(specialize_to_zeta(entry, xi, nu, p), modulus).padded(m) for entry in row]
            )
            for row in rows
        ]
    )


def check_condition_iii(
    problem: ParabolicProblem, delta1: float, sampling: SamplingConfig | None = None
) -> CoveringResult:
    """
    Rows of B0 * adj(A0) must stay independent modulo the product of (zeta - zeta_plus)

    Sampled at every boundary point, tangent direction and admissible point of
    the anisotropic unit sphere, plus the pure-p points with xi = 0.
    """
    if delta1 <= 0:
        raise InputError("delta1 must be positive", delta1=delta1)
    sampling = sampling or SamplingConfig()
    m = problem.m
    arc = arc_points(problem.b, delta1, sampling.arc_points)
    logger.info("Checking covering condition", samples=len(problem.boundary_samples), delta1=delta1)

    def per_sample(indexed) -> tuple[float, int, CoveringWitness | None]:
        index, sample = indexed
        rng = np.random.default_rng([sampling.seed, index])
        a0 = symbol_matrix_A(problem, sample.x, sample.t)
        det = det_poly_matrix(a0)
        rows = matmul_poly(symbol_matrix_B(problem, sample.x, sample.t), adjugate_poly_matrix(a0))
        nu = np.asarray(sample.normal)

        points = [
            (radius * e, p)
            for e in tangent_directions(sample.tangents, sampling.tangent_directions, rng)
            for radius, p in arc
        ]
        points += [(np.zeros(problem.n), p) for p in pure_p_points()]

        worst = (math.inf, None)
        for xi, p in points:
            zeta_plus, _ = compute_zeta_split(problem, sample, xi, p, det=det)
            matrix = _covering_matrix(rows, xi, nu, p, zeta_plus.monic_poly())
            values = singular_values(matrix)
            margin = float(values[m - 1] / values[0]) if values[0] > 0 and len(values) >= m else 0.0
            if margin < worst[0]:
                rank = numeric_rank(matrix)
                worst = (
                    margin,
                    CoveringWitness(x=sample.x, t=sample.t, xi=_floats(xi), p=_pair(p), rank=rank),
                )
        logger.debug("Covering sample done", x=sample.x, t=sample.t, margin=worst[0])
        return worst[0], len(points), worst[1]

    results = map_samples(per_sample, enumerate(problem.boundary_samples))
    if not results:
        raise InputError("no boundary samples to check")
    margin, _, witness = min(results, key=lambda item: item[0])
    return CoveringResult(
        passed=witness is not None and witness.rank == m,
        samples_checked=sum(count for _, count, _ in results),
        min_rank_margin=margin,
        delta1=delta1,
        worst_witness=witness,
        tolerances={"rank_tol": settings.RANK_TOL, "im_floor": settings.IM_FLOOR},
        heuristic=True,
    )


def check_parabolicity(
    problem: ParabolicProblem, delta1: float | None = None, sampling: SamplingConfig | None = None
) -> CheckReport:
    sampling = sampling or SamplingConfig()
    condition_i = check_condition_i(problem, sampling)
    condition_ii = check_condition_ii(problem)
    notes = [
        "Verdicts are sampled evidence at finitely many points, not a proof.",
        *problem.validation_notes,
    ]
    verdicts = {
        "condition (i)": Verdict.PASS if condition_i.passed else Verdict.FAIL,
        "condition (ii)": Verdict.PASS if condition_ii.passed else Verdict.FAIL,
    }

    condition_iii = None
    if condition_i.passed:
        if delta1 is None:
            delta1 = condition_i.delta_estimate / 2
        elif not 0 < delta1 < condition_i.delta_estimate:
            raise InputError(
                "delta1 must lie strictly between 0 and the estimated delta",
                delta1=delta1,
                delta=condition_i.delta_estimate,
            )
        condition_iii = check_condition_iii(problem, delta1, sampling)
        verdicts["condition (iii)"] = Verdict.PASS if condition_iii.passed else Verdict.FAIL
        notes.append(
            f"Covering condition checked for delta1 = {delta1:.6g}; a smaller delta1 "
            "only shrinks the sampled set of p."
        )
    else:
        verdicts["condition (iii)"] = Verdict.SKIPPED
        notes.append("Covering condition skipped because the root condition failed.")

    return CheckReport(
        condition_i=condition_i,
        condition_ii=condition_ii,
        condition_iii=condition_iii,
        verdicts=verdicts,
        notes=notes,
    )


def _relative_error(lhs: complex, rhs: complex) -> float:
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale > 0 else 0.0


def _scaling_error(symbol: PolySymbol, order: int, b: int, lam: float, xi: np.ndarray, p: complex) -> float:
    scaled = symbol.evaluate(lam * xi, lam ** (2 * b) * p)
    return _relative_error(scaled, lam**order * symbol.evaluate(xi, p))


def check_homogeneity(
    problem: ParabolicProblem,
    lambdas: Sequence[float] = (2.0, 3.0),
    points: int = 10,
    tolerance: float = 1e-10,
    seed: int | None = None,
) -> HomogeneityResult:
    """P(x, t, lam*xi, lam^{2b}*p) = lam^order * P(x, t, xi, p) for every sampled principal symbol."""
    rng = np.random.default_rng(settings.SAMPLING_SEED if seed is None else seed)
    b, n = problem.b, problem.n
    trials = [
        (rng.standard_normal(n), complex(*rng.standard_normal(2))) for _ in range(points)
    ]
    worst, checked = 0.0, 0

    def scan(symbol: PolySymbol, order: int) -> None:
        nonlocal worst, checked
        for lam in lambdas:
            for xi, p in trials:
                worst = max(worst, _scaling_error(symbol, order, b, lam, xi, p))
                checked += 1

    for sample in problem.interior_samples:
        a0 = symbol_matrix_A(problem, sample.x, sample.t)
        for row in a0:
            for k, entry in enumerate(row):
                scan(entry, 2 * b * problem.kappa[k])
        scan(det_poly_matrix(a0), 2 * problem.m)
    for sample in problem.boundary_samples:
        for j, row in enumerate(symbol_matrix_B(problem, sample.x, sample.t)):
            for k, entry in enumerate(row):
                scan(entry, problem.ell[j] + 2 * b * problem.kappa[k])

    return HomogeneityResult(
        passed=worst < tolerance,
        max_relative_error=worst,
        samples_checked=checked,
        tolerances={"relative": tolerance},
    )
