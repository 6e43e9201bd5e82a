import numpy as np
import pytest
from pydantic import ValidationError

from conftest import build_problem, heat_terms
from src.core.config import override_settings
from src.core.constants import Verdict
from src.core.exceptions import DegeneracyError, InputError
from src.parabolicity.sampling_utils import arc_points
from src.parabolicity.schemas import SamplingConfig
from src.parabolicity.service import (
    check_condition_i,
    check_condition_ii,
    check_condition_iii,
    check_parabolicity,
    compute_zeta_split,
)

FAST = SamplingConfig(xi_directions=6, tangent_directions=2, arc_points=7, seed=0)


def dirichlet_scalar(coeff: str = "1"):
    return build_problem(2, (1,), (-2,), {(1, 1): heat_terms(2)}, {(1, 1): [((0, 0), 0, coeff)]})


def test_root_condition_for_the_heat_pair(heat_pair):
    result = check_condition_i(heat_pair, FAST)
    assert result.passed
    assert result.delta_estimate == pytest.approx(1.0, abs=1e-6)
    assert result.heuristic


def test_root_condition_for_the_quartic_operator(quartic):
    assert check_condition_i(quartic, FAST).delta_estimate == pytest.approx(1.0, abs=1e-6)


def test_delta_estimate_does_not_depend_on_the_radius(heat_pair):
    unit = check_condition_i(heat_pair, FAST).delta_estimate
    for scale in (0.5, 2.0, 10.0):
        assert check_condition_i(heat_pair, FAST, xi_scale=scale).delta_estimate == pytest.approx(unit, abs=1e-8)


def test_backward_heat_fails_with_a_real_positive_root(backward_heat):
    result = check_condition_i(backward_heat, FAST)
    assert not result.passed
    assert result.delta_estimate == pytest.approx(-1.0, abs=1e-6)
    assert result.worst_witness.root[0] == pytest.approx(1.0, abs=1e-6)


def test_missing_time_derivative_is_degenerate():
    problem = build_problem(2, (1,), (-2,), {(1, 1): heat_terms(2)[1:]})
    with pytest.raises(DegeneracyError):
        check_condition_i(problem, FAST)


def test_normalization_condition(heat_pair):
    assert check_condition_ii(heat_pair).passed

    coupled = build_problem(
        2,
        (1, 1),
        (-2, -2),
        {(1, 1): heat_terms(2), (2, 2): heat_terms(2), (1, 2): [((0, 0), 1, "0.1")]},
    )
    result = check_condition_ii(coupled)
    assert not result.passed
    assert {(v.j, v.k) for v in result.violations} == {(1, 2)}
    assert result.violations[0].value[0] == pytest.approx(0.1)

    scaled = build_problem(2, (1,), (-2,), {(1, 1): heat_terms(2, time="2")})
    assert not check_condition_ii(scaled).passed


def test_zeta_split_for_the_heat_pair(heat_pair):
    sample = heat_pair.boundary_samples[0]
    xi = np.asarray(sample.tangents[0])
    plus, minus = compute_zeta_split(heat_pair, sample, xi, 0.0)
    assert plus.degree == minus.degree == 2
    assert len(plus.roots) == 1
    assert plus.roots[0][0] == pytest.approx(1j, abs=1e-6)

    plus, _ = compute_zeta_split(heat_pair, sample, np.zeros(2), 1.0)
    assert plus.roots[0][0] == pytest.approx(1j, abs=1e-6)
    assert plus.roots[0][1] == 2


def test_zeta_roots_scale_with_the_anisotropic_dilation(scalar_heat):
    sample = scalar_heat.boundary_samples[0]
    xi = 0.7 * np.asarray(sample.tangents[0])
    p = 0.3 + 0.2j
    base, _ = compute_zeta_split(scalar_heat, sample, xi, p)
    for lam in (0.5, 2.0, 5.0):
        scaled, _ = compute_zeta_split(scalar_heat, sample, lam * xi, lam**2 * p)
        assert scaled.values()[0] == pytest.approx(lam * base.values()[0], abs=1e-9 * lam)


def test_real_p_gives_conjugate_halves(scalar_heat):
    sample = scalar_heat.boundary_samples[0]
    plus, minus = compute_zeta_split(scalar_heat, sample, sample.tangents[0], -0.5)
    assert plus.values()[0] == pytest.approx(np.conj(minus.values()[0]))
    assert plus.values()[0] == pytest.approx(1j * np.sqrt(0.5))


def test_zeta_split_requires_a_tangent_direction(scalar_heat):
    sample = scalar_heat.boundary_samples[0]
    with pytest.raises(InputError):
        compute_zeta_split(scalar_heat, sample, sample.normal, 0.0)


def test_covering_condition_with_dirichlet_data(heat_pair, scalar_heat, quartic):
    for problem in (heat_pair, scalar_heat, quartic):
        result = check_condition_iii(problem, 0.5, FAST)
        assert result.passed
        assert result.worst_witness.rank == problem.m
        assert result.min_rank_margin > 1e-8


def test_covering_condition_fails_without_boundary_operator():
    problem = build_problem(2, (1,), (-2,), {(1, 1): heat_terms(2)})
    result = check_condition_iii(problem, 0.5, FAST)
    assert not result.passed
    assert result.worst_witness.rank == 0


@pytest.mark.parametrize("coeff", ["2", "1i", "-3"])
def test_covering_rank_ignores_row_scaling(coeff):
    result = check_condition_iii(dirichlet_scalar(coeff), 0.5, FAST)
    assert result.passed
    assert result.min_rank_margin == pytest.approx(1.0)


def test_covering_result_is_reproducible(heat_pair):
    assert check_condition_iii(heat_pair, 0.5, FAST) == check_condition_iii(heat_pair, 0.5, FAST)


def test_arc_points_stay_in_the_admissible_set():
    for radius, p in arc_points(b=1, delta1=0.5, count=16):
        level = radius**2
        assert level + abs(p) == pytest.approx(1.0)
        assert p.real >= -0.5 * level - 1e-12


def test_full_check_on_the_heat_pair(heat_pair):
    report = check_parabolicity(heat_pair, sampling=FAST)
    assert report.passed
    assert report.condition_iii.delta1 == pytest.approx(0.5, abs=1e-6)
    assert set(report.verdicts) == {"condition (i)", "condition (ii)", "condition (iii)"}


def test_failed_root_condition_skips_covering(backward_heat):
    report = check_parabolicity(backward_heat, sampling=FAST)
    assert report.verdicts["condition (i)"] is Verdict.FAIL
    assert report.verdicts["condition (iii)"] is Verdict.SKIPPED
    assert report.condition_iii is None


def test_broken_normalization_fails_only_condition_ii():
    problem = build_problem(2, (1,), (-2,), {(1, 1): heat_terms(2, time="2")}, {(1, 1): [((0, 0), 0, "1")]})
    report = check_parabolicity(problem, sampling=FAST)
    assert report.verdicts == {
        "condition (i)": Verdict.PASS,
        "condition (ii)": Verdict.FAIL,
        "condition (iii)": Verdict.PASS,
    }


def test_delta1_must_lie_below_delta(heat_pair):
    with pytest.raises(InputError):
        check_parabolicity(heat_pair, delta1=2.0, sampling=FAST)


def test_sampling_config_rejects_zero_directions_from_settings():
    with override_settings(XI_DIRECTIONS=0), pytest.raises(ValidationError):
        SamplingConfig()
