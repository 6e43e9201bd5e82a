import math

import numpy as np
import orjson
import pytest

from src.cli.report import build_report, emit_machine, parse_machine, section
from src.cli.router import run
from src.cli.schemas import CheckOptions
from src.cli.spec_parser import parse_problem
from src.core.config import override_settings
from src.core.constants import ExitStatus, Verdict
from src.core.exceptions import InputError, MissingSectionError, OrderBoundError, SpecSyntaxError
from src.hormander.grid_utils import write_grid_file
from src.hormander.schemas import AnisoGridFunction
from src.main import main

# Reduced densities for the end-to-end runs
FAST_FLAGS = [
    "--samples", "boundary_points=3",
    "--samples", "time_values=2",
    "--samples", "xi_directions=6",
    "--samples", "arc_points=7",
    "--samples", "tangent_directions=2",
]

FIXTURES = ["scalar_heat.toml", "backward_heat.toml", "quartic.toml", "heat_pair.toml", "heat_pair_n4.toml"]

SCALAR_HEAT_EXPLICIT = """
[problem]
n = 2
N = 1
b = 1
tau = 1.0
kappa = [1]
ell = [-2]

[[operators.A]]
row = 1
col = 1
terms = [
  { alpha = [0, 0], beta = 1, coeff = "1" },
  { alpha = [2, 0], beta = 0, coeff = "1" },
  { alpha = [0, 2], beta = 0, coeff = "1" },
]

[[operators.B]]
row = 1
col = 1
terms = [{ alpha = [0, 0], beta = 0, coeff = "1" }]

[geometry]
domain = "explicit"

[[geometry.interior]]
x = [0.0, 0.5]
t = 0.25

[[geometry.boundary]]
x = [0.0, 0.0]
t = 0.5
normal = [0.0, 3.0]
"""

SCALAR_HEAT_WITH_BAD_TERM = """
[problem]
n = 2
N = 1
b = 1
tau = 1.0
kappa = [1]
ell = [-2]

[[operators.A]]
row = 1
col = 1
terms = [
  { alpha = [0, 0], beta = 1, coeff = "1" },
  { alpha = [2, 0], beta = 0, coeff = "1" },
  { alpha = [3, 0], beta = 0, coeff = "1" },
]

[geometry]
domain = "half-space"
"""


def load_report(path):
    return parse_machine(path.read_bytes())


def test_parse_scalar_heat(fixture_path):
    spec = parse_problem(fixture_path("scalar_heat.toml").read_text())
    problem = spec.problem
    assert (problem.n, problem.N, problem.b, problem.m) == (2, 1, 1, 1)
    assert len(problem.A_terms[0][0]) == 3
    assert len(problem.boundary_samples) == 24
    assert not spec.has_claims


def test_parse_claims(fixture_path):
    spec = parse_problem(fixture_path("heat_pair_n4.toml").read_text())
    assert spec.has_claims
    assert len(spec.claims) == 8
    assert {c.target for c in spec.claims} == {"f1", "f2", "g1", "g2"}


def test_order_violation_is_reported_with_its_term():
    with pytest.raises(OrderBoundError, match=r"A\[1\]\[1\] term 3"):
        parse_problem(SCALAR_HEAT_WITH_BAD_TERM)


@pytest.mark.parametrize("text", ["", "[problem]\nn = 2\n", "[problem]\nn = 2\n[operators]\n"])
def test_missing_sections(text):
    with pytest.raises(MissingSectionError):
        parse_problem(text)


def test_toml_syntax_error_has_a_position():
    with pytest.raises(SpecSyntaxError) as info:
        parse_problem("[problem]\nn = = 2\n")
    assert info.value.line == 2


def test_bad_coefficient_names_the_term():
    text = SCALAR_HEAT_WITH_BAD_TERM.replace('alpha = [3, 0], beta = 0, coeff = "1"', 'alpha = [1, 0], beta = 0, coeff = "y1"')
    with pytest.raises(SpecSyntaxError, match=r"A\[1\]\[1\] term 3"):
        parse_problem(text)


def test_claim_target_must_be_well_formed(fixture_path):
    text = fixture_path("heat_pair_n4.toml").read_text().replace('target = "g2"', 'target = "h2"')
    with pytest.raises(InputError, match="target"):
        parse_problem(text)


def test_options_section_is_read(fixture_path):
    text = fixture_path("scalar_heat.toml").read_text()
    text += '\n[options]\ndelta1 = 0.25\nsamples = { interior_samples = 2 }\ntolerances = { rank_tol = 1e-9 }\n'
    options = parse_problem(text).options
    assert options.delta1 == 0.25
    assert options.overrides() == {"INTERIOR_SAMPLES": 2, "RANK_TOL": 1e-9}


def test_unknown_option_is_rejected():
    with pytest.raises(ValueError):
        CheckOptions(samples={"bogus": 1})


def test_command_line_options_take_precedence():
    file_options = CheckOptions(samples={"interior_samples": 2}, delta1=0.25)
    merged = file_options.merged(CheckOptions(samples={"interior_samples": 4}))
    assert merged.samples == {"INTERIOR_SAMPLES": 4}
    assert merged.delta1 == 0.25


def test_machine_report_round_trip():
    report = build_report(
        "check-parabolic",
        b"input",
        [section("condition (i)", Verdict.PASS, notes=["ok"]), section("condition (ii)", Verdict.FAIL)],
    )
    assert report.overall is Verdict.FAIL
    assert parse_machine(emit_machine(report)) == report
    assert orjson.loads(emit_machine(report))["schema_version"] == 1


def test_heat_pair_is_parabolic(tmp_path, fixture_path):
    report_path = tmp_path / "report.json"
    status = run(["check-parabolic", str(fixture_path("heat_pair.toml")), "--report", str(report_path), *FAST_FLAGS])
    assert status == ExitStatus.PASSED
    report = load_report(report_path)
    assert report.overall is Verdict.PASS
    names = [s.name for s in report.sections]
    assert names == ["problem", "condition (i)", "condition (ii)", "condition (iii)", "homogeneity"]
    delta = next(s for s in report.sections if s.name == "condition (i)").witnesses["delta_estimate"]
    assert delta == pytest.approx(1.0, abs=1e-6)
    # defaults record the values in effect for the run
    assert report.defaults["BOUNDARY_POINTS"] == 3


def test_quartic_problem_is_parabolic(fixture_path):
    assert main(["check-parabolic", str(fixture_path("quartic.toml")), *FAST_FLAGS]) == 0


def test_backward_heat_fails(tmp_path, fixture_path):
    report_path = tmp_path / "report.json"
    status = run(["check-parabolic", str(fixture_path("backward_heat.toml")), "--report", str(report_path), *FAST_FLAGS])
    assert status == ExitStatus.FAILED
    verdicts = {s.name: s.verdict for s in load_report(report_path).sections}
    assert verdicts["condition (i)"] is Verdict.FAIL
    assert verdicts["condition (iii)"] is Verdict.SKIPPED


REPORT_RUNS = [
    *(("check-parabolic", name) for name in FIXTURES),
    ("check-regularity", "heat_pair.toml"),
    ("check-regularity", "heat_pair_n4.toml"),
]


@pytest.mark.parametrize("command, name", REPORT_RUNS)
def test_reports_are_deterministic(tmp_path, fixture_path, command, name):
    first, second = tmp_path / "first.json", tmp_path / "second.json"
    for path in (first, second):
        run([command, str(fixture_path(name)), "--report", str(path), *FAST_FLAGS])
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.parametrize("command, name", [("check-parabolic", "quartic.toml"), ("check-regularity", "heat_pair_n4.toml")])
def test_worker_threads_do_not_change_the_results(tmp_path, fixture_path, command, name):
    reports = []
    for workers in (1, 4):
        path = tmp_path / f"workers-{workers}.json"
        with override_settings(WORKERS=workers):
            run([command, str(fixture_path(name)), "--report", str(path), *FAST_FLAGS])
        reports.append(load_report(path))
    serial, threaded = reports
    assert threaded.defaults["WORKERS"] == 4
    assert threaded.sections == serial.sections
    assert threaded.overall == serial.overall


def test_regularity_in_four_dimensions(tmp_path, fixture_path):
    report_path = tmp_path / "report.json"
    status = run(["check-regularity", str(fixture_path("heat_pair_n4.toml")), "--report", str(report_path), *FAST_FLAGS])
    assert status == ExitStatus.PASSED
    sections = {s.name: s for s in load_report(report_path).sections}
    assert sections["classicality"].verdict is Verdict.PASS
    assert sections["sigma thresholds"].witnesses["sigma1"] == "3"


def test_regularity_in_two_dimensions_is_not_guaranteed(tmp_path, fixture_path):
    report_path = tmp_path / "report.json"
    status = run(["check-regularity", str(fixture_path("heat_pair.toml")), "--report", str(report_path), *FAST_FLAGS])
    assert status == ExitStatus.FAILED
    report = load_report(report_path)
    hypotheses = next(s for s in report.sections if s.name == "theorem hypotheses")
    assert any("σ₂ > σ₀ violated" in note for note in hypotheses.notes)
    assert any("localized" in h for h in report.unchecked_hypotheses)


def test_regularity_needs_claims(fixture_path):
    assert run(["check-regularity", str(fixture_path("scalar_heat.toml")), *FAST_FLAGS]) == ExitStatus.INPUT_ERROR


@pytest.mark.parametrize(
    "theta, status, dini",
    [(0.4, ExitStatus.FAILED, "diverges"), (0.6, ExitStatus.PASSED, "converges")],
)
def test_phi_check(tmp_path, theta, status, dini):
    report_path = tmp_path / "phi.json"
    assert run(["phi-check", "--theta-form", str(theta), "--report", str(report_path)]) == status
    sections = {s.name: s for s in load_report(report_path).sections}
    assert sections["class M"].verdict is Verdict.PASS
    assert f"Dini integral {dini}" in sections["Dini integral"].notes


def test_phi_check_flags_a_power_weight(tmp_path):
    report_path = tmp_path / "phi.json"
    assert run(["phi-check", "--phi", "r^0.1", "--report", str(report_path)]) == ExitStatus.FAILED
    sections = {s.name: s for s in load_report(report_path).sections}
    assert sections["class M"].verdict is Verdict.FAIL


def test_norm_command(tmp_path):
    axis = 0.1 * (np.arange(128) - 64)
    x, t = np.meshgrid(axis, axis, indexing="ij")
    grid = tmp_path / "gaussian.grid"
    write_grid_file(grid, AnisoGridFunction(spacings=(0.1, 0.1), extents=(128, 128), samples=np.exp(-(x**2) - t**2)))
    report_path = tmp_path / "norm.json"
    status = run(["norm", str(grid), "--s", "0", "--gamma", "0.5", "--report", str(report_path)])
    assert status == ExitStatus.PASSED
    witnesses = load_report(report_path).sections[0].witnesses
    assert witnesses["value"] == pytest.approx(math.sqrt(math.pi / 2), rel=1e-6)
    assert witnesses["upper_bound"] is False


def test_truncated_grid_is_inconclusive_and_leaves_a_report(tmp_path):
    axis = 0.1 * (np.arange(16) - 8)
    x, t = np.meshgrid(axis, axis, indexing="ij")
    grid = tmp_path / "narrow.grid"
    write_grid_file(grid, AnisoGridFunction(spacings=(0.1, 0.1), extents=(16, 16), samples=np.exp(-(x**2) - t**2)))
    report_path = tmp_path / "norm.json"
    assert run(["norm", str(grid), "--s", "0", "--gamma", "1", "--report", str(report_path)]) == ExitStatus.INCONCLUSIVE
    report = load_report(report_path)
    assert report.overall is Verdict.INCONCLUSIVE
    assert report.sections[0].name == "error"


@pytest.mark.parametrize(
    "argv",
    [
        ["check-parabolic", "does-not-exist.toml"],
        ["frobnicate"],
        ["check-parabolic"],
        ["norm", "grid", "--s", "1"],
        ["phi-check", "--phi", "r +"],
    ],
)
def test_input_errors_exit_with_status_3(argv):
    assert main(argv) == 3


@pytest.mark.parametrize("gamma", ["2", "0"])
def test_out_of_range_gamma_is_an_input_error(tmp_path, gamma):
    axis = 0.1 * (np.arange(128) - 64)
    x, t = np.meshgrid(axis, axis, indexing="ij")
    grid = tmp_path / "gaussian.grid"
    write_grid_file(grid, AnisoGridFunction(spacings=(0.1, 0.1), extents=(128, 128), samples=np.exp(-(x**2) - t**2)))
    assert main(["norm", str(grid), "--s", "0", "--gamma", gamma]) == 3


def test_zero_xi_directions_is_an_input_error(fixture_path):
    argv = ["check-parabolic", str(fixture_path("backward_heat.toml")), "--samples", "xi_directions=0"]
    assert run(argv) == ExitStatus.INPUT_ERROR


def test_sample_counts_must_be_positive():
    with pytest.raises(ValueError, match="xi_directions"):
        CheckOptions(samples={"xi_directions": 0})
    assert CheckOptions(samples={"sampling_seed": 0}).samples == {"SAMPLING_SEED": 0}


def test_normalized_boundary_normals_are_noted():
    problem = parse_problem(SCALAR_HEAT_EXPLICIT).problem
    assert problem.boundary_samples[0].normal == (0.0, 1.0)
    assert any("normalized" in note for note in problem.validation_notes)


def test_unknown_sampling_override_is_an_input_error(fixture_path):
    assert run(["check-parabolic", str(fixture_path("heat_pair.toml")), "--samples", "bogus=1"]) == ExitStatus.INPUT_ERROR
