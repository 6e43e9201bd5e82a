import math
from collections.abc import Sequence
from fractions import Fraction
from typing import Literal

from src.core.exceptions import CoefficientEvaluationError, InputError
from src.problem.schemas import OrderConstants, ParabolicProblem, PDOTerm
from src.symbolic.schemas import ExponentKey, PolySymbol

OrderConvention = Literal["standard", "time-integral"]


def _check_index(name: str, value: int, upper: int) -> None:
    if not 1 <= value <= upper:
        raise InputError(f"{name} must lie in 1..{upper}", **{name: value})


def _principal_part(
    problem: ParabolicProblem,
    label: str,
    terms: Sequence[PDOTerm],
    order: int,
    x: Sequence[float],
    t: float,
) -> PolySymbol:
    collected: dict[ExponentKey, complex] = {}
    if order < 0:
        return PolySymbol.zero(problem.n)
    for index, term in enumerate(terms, start=1):
        if term.order(problem.b) != order:
            continue
        try:
            value = term.coeff.evaluate(x, t)
        except CoefficientEvaluationError as exc:
            raise CoefficientEvaluationError(
                f"{label} term {index}: {exc.detail}", term=term.coeff.text, **exc.context
            ) from exc
        key = ExponentKey(term.alpha, term.beta)
        collected[key] = collected.get(key, 0j) + value
    return PolySymbol(problem.n, collected)


def principal_symbol_A(
    problem: ParabolicProblem, j: int, k: int, x: Sequence[float], t: float
) -> PolySymbol:
    """Terms of A_jk with anisotropic order exactly 2b*kappa_k, as a polynomial in (xi, p)."""
    _check_index("j", j, problem.N)
    _check_index("k", k, problem.N)
    order = 2 * problem.b * problem.kappa[k - 1]
    return _principal_part(problem, f"A[{j}][{k}]", problem.A_terms[j - 1][k - 1], order, x, t)


def principal_symbol_B(
    problem: ParabolicProblem, j: int, k: int, x: Sequence[float], t: float
) -> PolySymbol:
    """Terms of B_jk with anisotropic order exactly l_j + 2b*kappa_k; zero when that is negative."""
    _check_index("j", j, problem.m)
    _check_index("k", k, problem.N)
    order = problem.ell[j - 1] + 2 * problem.b * problem.kappa[k - 1]
    return _principal_part(problem, f"B[{j}][{k}]", problem.B_terms[j - 1][k - 1], order, x, t)


def symbol_matrix_A(problem: ParabolicProblem, x: Sequence[float], t: float) -> list[list[PolySymbol]]:
    return [
        [principal_symbol_A(problem, j, k, x, t) for k in range(1, problem.N + 1)]
        for j in range(1, problem.N + 1)
    ]


def symbol_matrix_B(problem: ParabolicProblem, x: Sequence[float], t: float) -> list[list[PolySymbol]]:
    return [
        [principal_symbol_B(problem, j, k, x, t) for k in range(1, problem.N + 1)]
        for j in range(1, problem.m + 1)
    ]


def derived_orders(
    problem: ParabolicProblem, convention: OrderConvention = "standard"
) -> OrderConstants:
    """
    m, sigma0 and l0 of the problem

    The "time-integral" convention rounds sigma0 up to the next multiple of 2b,
    so that sigma0 / 2b counts whole time derivatives.
    """
    sigma0 = max(0, *(l + 1 for l in problem.ell))
    if convention == "time-integral":
        step = 2 * problem.b
        sigma0 = step * math.ceil(sigma0 / step)
    elif convention != "standard":
        raise InputError("unknown order convention", convention=convention)
    return OrderConstants(m=problem.m, sigma0=sigma0, l0=max(problem.ell))


def generalized_solution_orders(problem: ParabolicProblem) -> dict[str, list[Fraction]]:
    """Sobolev orders of the generalized solution and of the data it is paired with."""
    sigma0 = derived_orders(problem).sigma0
    return {
        "solution": [Fraction(sigma0 + 2 * problem.b * k) for k in problem.kappa],
        "interior_data": [Fraction(sigma0)] * problem.N,
        "boundary_data": [Fraction(sigma0) - l - Fraction(1, 2) for l in problem.ell],
    }
