import math

import numpy as np
import pytest

from src.core.config import override_settings
from src.core.exceptions import InputError, SpecSyntaxError, TruncationError
from src.hormander.grid_utils import read_grid_file, write_grid_file
from src.hormander.schemas import AnisoGridFunction, FunctionParameter, SpaceTag
from src.hormander.service import (
    check_class_M,
    dini_integral,
    embedding_order,
    make_space_tag,
    norm_full_space,
    screen_class_M,
    weight_r_gamma,
)


def phi(text: str) -> FunctionParameter:
    return FunctionParameter.parse(text)


def gaussian_grid(count: int = 128, h: float = 0.1, support: str = "full") -> AnisoGridFunction:
    """exp(-(x^2 + t^2)) centred in a square grid."""
    axis = h * (np.arange(count) - count // 2)
    x, t = np.meshgrid(axis, axis, indexing="ij")
    return AnisoGridFunction(
        spacings=(h, h),
        extents=(count, count),
        samples=np.exp(-(x**2) - t**2),
        origin=(axis[0], axis[0]),
        support=support,
    )


def gaussian_norm_by_quadrature(s: float, gamma: float) -> float:
    """Weighted spectrum of the Gaussian integrated on a fine frequency grid."""
    freq = np.linspace(-24.0, 24.0, 1201)
    xi, eta = np.meshgrid(freq, freq, indexing="ij")
    spectrum_sq = (np.pi * np.exp(-(xi**2 + eta**2) / 4)) ** 2
    weight = (1.0 + xi**2 + np.abs(eta) ** (2 * gamma)) ** s
    inner = np.trapezoid(weight * spectrum_sq, freq, axis=1)
    return math.sqrt(np.trapezoid(inner, freq) / (2 * np.pi) ** 2)


@pytest.mark.parametrize(
    "xi, eta, gamma, expected",
    [
        ([0.0, 0.0], 0.0, 0.5, 1.0),
        ([3.0, 0.0], 0.0, 0.5, math.sqrt(10.0)),
        ([0.0, 0.0], 16.0, 0.5, math.sqrt(17.0)),
        ([1.0, 1.0], 4.0, 0.25, math.sqrt(5.0)),
    ],
)
def test_weight_r_gamma(xi, eta, gamma, expected):
    assert weight_r_gamma(xi, eta, gamma) == pytest.approx(expected)


def test_weight_needs_positive_gamma():
    with pytest.raises(InputError):
        weight_r_gamma([1.0], 1.0, 0.0)


@pytest.mark.parametrize("text", ["1", "(1 + ln(r))^0.6", "1 + ln(r)", "2 * (1 + ln(r))^-1", "ln(e - 1 + r)"])
def test_slowly_varying_parameters_are_accepted(text):
    report = check_class_M(phi(text))
    assert report.consistent, report.reason
    assert report.heuristic


def test_power_of_r_violates_slow_variation():
    report = check_class_M(phi("r^0.1"))
    assert not report.consistent
    assert report.verdict == "violates M"
    assert report.witness.scale == 2.0
    assert report.witness.ratio == pytest.approx(2**0.1)


def test_non_positive_parameter_violates_M():
    report = check_class_M(phi("ln(r) - 1"))
    assert not report.consistent
    assert "not positive" in report.reason


def test_overflowing_parameter_is_an_input_error():
    with pytest.raises(InputError):
        check_class_M(phi("r^400"))


def test_space_tag_requires_membership_in_M():
    tag = make_space_tag(1.0, 0.5, phi("1 + ln(r)"))
    assert tag.label() == "H^{1, 0.5; 1.0 + ln(r)}"
    with pytest.raises(InputError):
        make_space_tag(1.0, 0.5, phi("r^0.1"))


@pytest.mark.parametrize("s, gamma", [(1.0, 2.0), (1.0, 0.0), (math.inf, 0.5)])
def test_space_tag_rejects_out_of_range_parameters(s, gamma):
    with pytest.raises(InputError):
        make_space_tag(s, gamma, phi("1"))


def test_screen_respects_tolerance_overrides():
    weight = phi("(1 + ln(r))^0.6")
    assert screen_class_M(weight).consistent
    with override_settings(SLOW_VARIATION_TOL=1e-12):
        assert not screen_class_M(weight).consistent
    assert screen_class_M(weight).consistent


@pytest.mark.parametrize(
    "theta, verdict",
    [(0.0, "diverges"), (0.4, "diverges"), (0.5, "diverges"), (0.6, "converges"), (1.0, "converges"), (2.0, "converges")],
)
def test_dini_integral_of_log_powers(theta, verdict):
    result = dini_integral(phi(f"(1 + ln(r))^{theta}"))
    assert result.verdict == verdict
    assert result.method == "closed-form"


def test_dini_value_for_theta_one():
    assert dini_integral(phi("1 + ln(r)")).value_estimate == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("c", [0.1, 10.0])
def test_dini_verdict_ignores_constant_factors(c):
    base = dini_integral(phi("(1 + ln(r))^0.6"))
    scaled = dini_integral(phi(f"{c} * (1 + ln(r))^0.6"))
    assert scaled.verdict == base.verdict
    assert scaled.value_estimate == pytest.approx(base.value_estimate / c**2)
    assert dini_integral(phi(f"{c}")).verdict == "diverges"


def test_dini_numeric_blocks():
    converging = dini_integral(phi("ln(e - 1 + r)"))
    assert converging.method == "dyadic-blocks"
    assert converging.verdict == "converges"
    assert converging.value_estimate > 1.0

    diverging = dini_integral(phi("ln(e - 1 + r)^0.25"))
    assert diverging.verdict == "diverges"


def test_log_power_form():
    assert phi("2 * (1 + ln(r))^0.6").log_power_form() == (2.0, 1.0, 0.6)
    assert phi("(ln(r) + 3)^2 / 4").log_power_form() == (0.25, 3.0, 2.0)
    assert phi("ln(e - 1 + r)").log_power_form() is None
    assert phi("-1 * (1 + ln(r))").log_power_form() is None


def test_norm_with_unit_weight_is_the_discrete_l2_norm():
    w = gaussian_grid()
    tag = SpaceTag(s=0.0, gamma=0.5, phi=FunctionParameter.one())
    expected = math.sqrt(w.cell_volume * np.sum(np.abs(w.samples) ** 2))
    assert norm_full_space(w, tag) == pytest.approx(expected, rel=1e-12)
    assert norm_full_space(w, tag) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-6)


def test_weighted_gaussian_norm_matches_quadrature():
    w = gaussian_grid()
    tag = SpaceTag(s=1.0, gamma=0.5, phi=FunctionParameter.one())
    value = norm_full_space(w, tag)
    assert value == pytest.approx(math.sqrt(math.pi + math.sqrt(2 * math.pi) / 2), rel=1e-2)
    assert value == pytest.approx(gaussian_norm_by_quadrature(1.0, 0.5), rel=1e-2)


def test_norm_grows_with_s():
    w = gaussian_grid(count=64, h=0.2)
    values = [
        norm_full_space(w, SpaceTag(s=s, gamma=0.5, phi=phi("1 + ln(r)"))) for s in (0.0, 0.5, 1.0, 2.0)
    ]
    assert values == sorted(values)
    assert len(set(values)) == len(values)


def test_zero_function_has_zero_norm():
    w = AnisoGridFunction(spacings=(0.1, 0.1), extents=(8, 8), samples=np.zeros(64))
    assert norm_full_space(w, SpaceTag(s=1.0, gamma=1.0, phi=FunctionParameter.one())) == 0.0


def test_truncated_function_is_rejected():
    w = gaussian_grid(count=21, h=0.1)
    with pytest.raises(TruncationError):
        norm_full_space(w, SpaceTag(s=0.0, gamma=1.0, phi=FunctionParameter.one()))


def test_plus_support_ignores_the_initial_time_face():
    count, h = 64, 0.2
    axis = h * (np.arange(count) - count // 2)
    t = h * np.arange(count)
    x, tt = np.meshgrid(axis, t, indexing="ij")
    samples = np.exp(-(x**2) - 0.5 * tt**2)
    tag = SpaceTag(s=0.0, gamma=0.5, phi=FunctionParameter.one())
    plus = AnisoGridFunction(spacings=(h, h), extents=(count, count), samples=samples, support="plus")
    assert norm_full_space(plus, tag) > 0.0
    full = AnisoGridFunction(spacings=(h, h), extents=(count, count), samples=samples)
    with pytest.raises(TruncationError):
        norm_full_space(full, tag)


def test_grid_shape_is_validated():
    with pytest.raises(InputError):
        AnisoGridFunction(spacings=(0.1, 0.1), extents=(4, 4), samples=np.zeros(15))
    with pytest.raises(InputError):
        AnisoGridFunction(spacings=(0.1,), extents=(4,), samples=np.zeros(4))


def test_grid_file_is_read_back(tmp_path):
    w = gaussian_grid(count=16, h=0.5)
    path = tmp_path / "gaussian.grid"
    write_grid_file(path, w)
    loaded = read_grid_file(path)
    assert loaded.extents == (16, 16)
    assert loaded.support == "full"
    assert np.array_equal(loaded.samples, w.samples)


def test_grid_file_reads_real_columns(tmp_path):
    path = tmp_path / "tiny.grid"
    path.write_text("# two by two\ndims 1\nspacings 0.5 0.25\nextents 2 2\ndata\n1\n2 0.5\n3\n4\n")
    w = read_grid_file(path)
    assert w.spacings == (0.5, 0.25)
    assert w.samples[0, 1] == 2 + 0.5j
    assert w.cell_volume == 0.125


@pytest.mark.parametrize(
    "text, line",
    [
        ("dims 1\nspacing 0.1 0.1\n", 2),
        ("dims 1\nspacings 0.1 x\n", 2),
        ("dims 1\nspacings 0.1 0.1\nextents 1 1\ndata\n1 2 3\n", 5),
    ],
)
def test_grid_file_errors_carry_line_numbers(tmp_path, text, line):
    path = tmp_path / "bad.grid"
    path.write_text(text)
    with pytest.raises(SpecSyntaxError) as info:
        read_grid_file(path)
    assert info.value.line == line


def test_embedding_order():
    weak = SpaceTag(s=1.0, gamma=0.5, phi=FunctionParameter.one())
    log = SpaceTag(s=1.0, gamma=0.5, phi=phi("1 + ln(r)"))
    strong = SpaceTag(s=2.0, gamma=0.5, phi=FunctionParameter.one())

    assert embedding_order(strong, weak).inside
    assert not embedding_order(weak, strong).inside
    assert embedding_order(log, weak).inside
    assert not embedding_order(weak, log).inside
    assert embedding_order(log, log).inside
    # s1 > s2 embeds whatever the weights
    assert embedding_order(strong, log).inside and embedding_order(log, weak).inside
    assert embedding_order(strong, weak).inside

    with pytest.raises(InputError):
        embedding_order(weak, SpaceTag(s=1.0, gamma=1.0, phi=FunctionParameter.one()))
