import functools
import math
from collections.abc import Iterable
from fractions import Fraction

from src.core.config import settings
from src.core.exceptions import IncompleteInputError, InputError
from src.core.logger import logger
from src.hormander.schemas import FunctionParameter
from src.hormander.service import dini_integral, screen_class_M
from src.problem.schemas import ParabolicProblem
from src.problem.service import derived_orders
from src.regularity.schemas import (
    F_REGIONS,
    ClassicalityVerdict,
    ConditionDetail,
    HypothesisReport,
    RegionTag,
    RegularityClaim,
    SigmaThresholds,
)

HALF = Fraction(1, 2)

LOCALIZATION_NOTE = (
    "Claims are trusted inputs (assumed, not verified). Strict excess of sigma is "
    "taken to embed localized spaces as it does full-space ones."
)
SUFFICIENCY_NOTE = "The criterion is sufficient only; not-guaranteed does not mean non-classical."


@functools.lru_cache(maxsize=128)
def _dini_cached(phi: FunctionParameter, ratio: float, blocks: int, run: int) -> bool:
    return dini_integral(phi).verdict == "converges"


def _dini_converges(phi: FunctionParameter) -> bool:
    return _dini_cached(
        phi, settings.DINI_RATIO, settings.DINI_MAX_BLOCKS, settings.DINI_DIVERGENCE_RUN
    )


def sigma_thresholds(problem: ParabolicProblem) -> SigmaThresholds:
    orders = derived_orders(problem)
    half_n = Fraction(problem.n, 2)
    return SigmaThresholds(
        b=problem.b,
        n=problem.n,
        sigma0=Fraction(orders.sigma0),
        sigma1=problem.b + half_n,
        sigma2=orders.l0 + problem.b + half_n,
        sigma3=-problem.b + half_n,
    )


def sobolev_thresholds(problem: ParabolicProblem) -> dict[str, Fraction]:
    """With phi = 1 every claim must exceed these orders strictly."""
    thresholds = sigma_thresholds(problem)
    required = {
        RegionTag.INTERIOR.value: thresholds.sigma1,
        RegionTag.LATERAL_COLLAR.value: thresholds.sigma2,
        RegionTag.BOTTOM_COLLAR.value: thresholds.sigma3,
    }
    for j, l in enumerate(problem.ell, start=1):
        required[f"g{j}"] = thresholds.sigma2 - l - HALF
    return required


def _index_claims(
    problem: ParabolicProblem, claims: Iterable[RegularityClaim]
) -> dict[tuple[str, RegionTag], RegularityClaim]:
    indexed = {}
    for claim in claims:
        limit = problem.N if claim.kind == "f" else problem.m
        if claim.index > limit:
            raise InputError(f"claim {claim.target} exceeds the number of components", limit=limit)
        key = (claim.target, claim.region)
        if key in indexed:
            raise InputError(f"duplicate claim for {claim.target} on {claim.region.value}")
        indexed[key] = claim

    missing = [
        f"f{j} on {region.value}"
        for region in F_REGIONS
        for j in range(1, problem.N + 1)
        if (f"f{j}", region) not in indexed
    ]
    missing += [
        f"g{j}" for j in range(1, problem.m + 1) if (f"g{j}", RegionTag.LATERAL_BOUNDARY) not in indexed
    ]
    if missing:
        raise IncompleteInputError("missing regularity claims", missing=", ".join(missing))
    return indexed


def _dominance_failure(claim: RegularityClaim, sigma: Fraction, label: str) -> str | None:
    """Why claim fails to dominate (sigma, phi) for every Dini-convergent phi, or None."""
    if not screen_class_M(claim.phi).consistent:
        return f"{claim.target} on {claim.region.value}: phi = {claim.phi} is not in M"
    if claim.sigma > sigma:
        return None
    if claim.sigma < sigma:
        return f"{claim.target} on {claim.region.value}: sigma = {claim.sigma} < {label} = {sigma}"
    if not _dini_converges(claim.phi):
        return f"{claim.target} on {claim.region.value}: Dini integral diverges for phi = {claim.phi}"
    return None


def check_theorem_hypotheses(
    problem: ParabolicProblem, claims: Iterable[RegularityClaim]
) -> HypothesisReport:
    indexed = _index_claims(problem, claims)
    thresholds = sigma_thresholds(problem)
    unmet = []
    if not thresholds.sigma2_gt_sigma0:
        unmet.append(f"σ₂ > σ₀ violated ({thresholds.sigma2} <= {thresholds.sigma0})")
    if not thresholds.sigma3_gt_sigma0:
        unmet.append(f"σ₃ > σ₀ violated ({thresholds.sigma3} <= {thresholds.sigma0})")

    required = {
        RegionTag.INTERIOR: (thresholds.sigma1, "σ₁"),
        RegionTag.LATERAL_COLLAR: (thresholds.sigma2, "σ₂"),
        RegionTag.BOTTOM_COLLAR: (thresholds.sigma3, "σ₃"),
    }
    for (target, region), claim in sorted(indexed.items(), key=lambda item: (item[0][1].value, item[0][0])):
        if claim.kind == "f":
            sigma, label = required[region]
        else:
            sigma, label = thresholds.sigma2 - problem.ell[claim.index - 1] - HALF, "σ₂ - l_j - 1/2"
        failure = _dominance_failure(claim, sigma, label)
        if failure:
            unmet.append(failure)

    dini = {str(c.phi): dini_integral(c.phi).verdict for c in indexed.values()}
    logger.info("Theorem hypotheses checked", unmet=len(unmet))
    return HypothesisReport(passed=not unmet, thresholds=thresholds, unmet=unmet, dini=dict(sorted(dini.items())))


def _claim_budget(claim: RegularityClaim, offset: Fraction) -> int | None:
    """Largest p with claim dominating sigma(p) = p + offset, or None if the claim cannot contribute."""
    if not screen_class_M(claim.phi).consistent:
        return None
    excess = claim.sigma - offset
    if excess.denominator == 1:
        return int(excess) if _dini_converges(claim.phi) else int(excess) - 1
    return math.floor(excess)


def derivative_budget(
    problem: ParabolicProblem,
    k: int,
    claims: Iterable[RegularityClaim],
    region: RegionTag,
) -> int | None:
    """
    Largest p >= 0 such that the data claims on region give continuous
    derivatives of u_k up to anisotropic order p there
    """
    if region not in F_REGIONS:
        raise InputError("budget regions are interior, lateral-collar and bottom-collar", region=region.value)
    if not 1 <= k <= problem.N:
        raise InputError(f"k must lie in 1..{problem.N}", k=k)
    claims = list(claims)
    indexed = {(c.target, c.region): c for c in claims}
    kappa = problem.kappa[k - 1]
    sigma_offset = problem.b + Fraction(problem.n, 2) - 2 * problem.b * kappa

    required = []
    for j in range(1, problem.N + 1):
        if (f"f{j}", region) not in indexed:
            raise IncompleteInputError(f"missing claim for f{j} on {region.value}")
        required.append((indexed[(f"f{j}", region)], sigma_offset))
    if region is RegionTag.LATERAL_COLLAR:
        for j, l in enumerate(problem.ell, start=1):
            if (f"g{j}", RegionTag.LATERAL_BOUNDARY) not in indexed:
                raise IncompleteInputError(f"missing claim for g{j}")
            required.append((indexed[(f"g{j}", RegionTag.LATERAL_BOUNDARY)], sigma_offset - l - HALF))

    budgets = [_claim_budget(claim, offset) for claim, offset in required]
    if any(p is None for p in budgets):
        return None
    p_max = min(budgets)
    sigma0 = derived_orders(problem).sigma0
    lower = sigma0 + 2 * problem.b * kappa - problem.b - Fraction(problem.n, 2)
    if p_max < 0 or p_max <= lower:
        return None
    return p_max


def classify_solution(
    problem: ParabolicProblem, claims: Iterable[RegularityClaim]
) -> ClassicalityVerdict:
    claims = list(claims)
    indexed = _index_claims(problem, claims)
    l0 = derived_orders(problem).l0
    failed = sorted(
        {
            f"{c.target} on {c.region.value}: phi = {c.phi} is not in M"
            for c in indexed.values()
            if not screen_class_M(c.phi).consistent
        }
    )

    conditions = []
    for k in range(1, problem.N + 1):
        order = 2 * problem.b * problem.kappa[k - 1]
        targets = [
            ("a", RegionTag.INTERIOR, order),
            ("b", RegionTag.LATERAL_COLLAR, l0 + order),
            ("c", RegionTag.BOTTOM_COLLAR, order - 2 * problem.b),
        ]
        for name, region, required in targets:
            budget = derivative_budget(problem, k, claims, region)
            vacuous = required < 0
            conditions.append(
                ConditionDetail(
                    k=k,
                    condition=name,
                    region=region,
                    required_order=required,
                    budget=budget,
                    passed=vacuous or (budget is not None and budget >= required),
                    vacuous=vacuous,
                )
            )

    passed = all(c.passed for c in conditions)
    logger.info("Solution classified", guaranteed=passed)
    return ClassicalityVerdict(
        overall="guaranteed-classical" if passed else "not-guaranteed",
        conditions=conditions,
        failed_hypotheses=failed,
        notes=[LOCALIZATION_NOTE, SUFFICIENCY_NOTE],
    )
