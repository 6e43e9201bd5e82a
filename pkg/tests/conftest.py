from pathlib import Path

import numpy as np
import pytest

from src.cli.spec_parser import parse_problem
from src.problem.geometry import generate_samples
from src.problem.schemas import CoefficientExpression, ParabolicProblem, PDOTerm

FIXTURES = Path(__file__).parent / "fixtures"

# Small sample densities keep the sampled checks quick
SMALL = {"interior": 3, "boundary_points": 3, "time_values": 2}


def term(alpha, beta=0, coeff="1") -> PDOTerm:
    return PDOTerm(
        alpha=tuple(alpha), beta=beta, coeff=CoefficientExpression.parse(str(coeff), len(alpha))
    )


def heat_terms(n: int, time="1", space="1") -> list[tuple]:
    """d_t u + space * (D_1^2 + ... + D_n^2) u as (alpha, beta, coeff) triples."""
    return [((0,) * n, 1, time)] + [
        (tuple(2 if i == j else 0 for j in range(n)), 0, space) for i in range(n)
    ]


def build_problem(
    n: int,
    kappa: tuple[int, ...],
    ell: tuple[int, ...],
    A: dict,
    B: dict | None = None,
    b: int = 1,
    domain: str = "half-space",
    tau: float = 1.0,
    samples: dict | None = None,
) -> ParabolicProblem:
    N, m = len(kappa), b * sum(kappa)

    def table(entries: dict, rows: int) -> tuple:
        cells = [[() for _ in range(N)] for _ in range(rows)]
        for (j, k), terms in entries.items():
            cells[j - 1][k - 1] = tuple(term(*t) for t in terms)
        return tuple(tuple(row) for row in cells)

    interior, boundary = generate_samples(domain, n, tau, **(SMALL if samples is None else samples))
    return ParabolicProblem(
        n=n,
        N=N,
        b=b,
        tau=tau,
        kappa=kappa,
        ell=ell,
        A_terms=table(A, N),
        B_terms=table(B or {}, m),
        interior_samples=interior,
        boundary_samples=boundary,
    )


def load_spec(name: str):
    return parse_problem((FIXTURES / name).read_text())


@pytest.fixture
def fixture_path():
    return lambda name: FIXTURES / name


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def heat_pair():
    return load_spec("heat_pair.toml").problem


@pytest.fixture
def heat_pair_n4_spec():
    return load_spec("heat_pair_n4.toml")


@pytest.fixture
def scalar_heat():
    return build_problem(2, (1,), (-2,), {(1, 1): heat_terms(2)}, {(1, 1): [((0, 0), 0, "1")]})


@pytest.fixture
def backward_heat():
    return build_problem(2, (1,), (-2,), {(1, 1): heat_terms(2, space="-1")}, {(1, 1): [((0, 0), 0, "1")]})


@pytest.fixture
def quartic():
    return load_spec("quartic.toml").problem
