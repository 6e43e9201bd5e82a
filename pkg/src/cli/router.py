import argparse
import functools
import sys
from pathlib import Path

import better_exceptions
from rich.console import Console

from src.cli.report import (
    build_report,
    emit_machine,
    exit_status,
    render_human,
    section,
    verdict_of,
)
from src.cli.schemas import CheckOptions, ReportSection
from src.cli.spec_parser import parse_problem, read_options
from src.core.config import override_settings, settings
from src.core.constants import TOOL_NAME, TOOL_VERSION, ExitStatus, Verdict
from src.core.exceptions import InputError, MissingSectionError, ParacheckError
from src.core.logger import logger, set_log_level
from src.core.middleware import catch_exceptions, process_time
from src.hormander.grid_utils import read_grid_file
from src.hormander.schemas import FunctionParameter, NormReport
from src.hormander.service import check_class_M, dini_integral, make_space_tag, norm_full_space
from src.parabolicity.schemas import SamplingConfig
from src.parabolicity.service import check_homogeneity, check_parabolicity
from src.problem.service import derived_orders, generalized_solution_orders
from src.regularity.service import (
    LOCALIZATION_NOTE,
    check_theorem_hypotheses,
    classify_solution,
    sigma_thresholds,
    sobolev_thresholds,
)


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 3), not argparse's exit 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _pairs(values: list[str] | None, kind: str) -> dict[str, str]:
    pairs = {}
    for item in values or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"--{kind} expects key=value", value=item)
        pairs[key.strip()] = value.strip()
    return pairs


def _cli_options(args: argparse.Namespace) -> CheckOptions:
    try:
        return CheckOptions(
            samples=_pairs(getattr(args, "samples", None), "samples"),
            tolerances=_pairs(getattr(args, "tolerance", None), "tolerance"),
            delta1=getattr(args, "delta1", None),
        )
    except ValueError as exc:
        raise InputError(f"invalid option: {exc}") from exc


def _publish(report, args: argparse.Namespace) -> ExitStatus:
    if args.report:
        Path(args.report).write_bytes(emit_machine(report))
    if args.machine:
        sys.stdout.buffer.write(emit_machine(report))
        sys.stdout.flush()
    else:
        render_human(report, Console())
    return exit_status(report)


def _error_report(args: argparse.Namespace, exc: ParacheckError) -> None:
    """Failed runs still leave a report behind when one was requested."""
    if not args.report:
        return
    data = Path(args.input).read_bytes() if getattr(args, "input", None) and Path(args.input).is_file() else b""
    report = build_report(
        args.command,
        data,
        [ReportSection(name="error", verdict=Verdict.INCONCLUSIVE, notes=[str(exc)])],
        overall=Verdict.INCONCLUSIVE,
    )
    Path(args.report).write_bytes(emit_machine(report))


def _load_spec(args: argparse.Namespace) -> tuple[bytes, str, CheckOptions]:
    path = Path(args.input)
    if not path.is_file():
        raise InputError("specification file not found", path=str(path))
    data = path.read_bytes()
    text = data.decode("utf-8")
    return data, text, read_options(text).merged(_cli_options(args))


def _parabolicity_sections(problem, options: CheckOptions) -> list[ReportSection]:
    orders = derived_orders(problem, options.convention)
    result = check_parabolicity(problem, delta1=options.delta1, sampling=SamplingConfig())
    homogeneity = check_homogeneity(problem)
    sections = [
        section(
            "problem",
            Verdict.PASS,
            orders,
            notes=[
                *problem.validation_notes,
                f"order convention: {options.convention}",
                "generalized solution orders: "
                + ", ".join(
                    f"{key} = [{', '.join(str(v) for v in values)}]"
                    for key, values in generalized_solution_orders(problem).items()
                ),
            ],
        ),
        section("condition (i)", result.verdicts["condition (i)"], result.condition_i),
        section("condition (ii)", result.verdicts["condition (ii)"], result.condition_ii),
    ]
    if result.condition_iii is None:
        sections.append(section("condition (iii)", Verdict.SKIPPED, notes=result.notes[-1:]))
    else:
        sections.append(
            section("condition (iii)", result.verdicts["condition (iii)"], result.condition_iii, notes=result.notes[-1:])
        )
    sections.append(section("homogeneity", verdict_of(homogeneity.passed), homogeneity))
    return sections


@process_time
def check_parabolic_handler(args: argparse.Namespace) -> ExitStatus:
    data, text, options = _load_spec(args)
    with override_settings(**options.overrides()):
        spec = parse_problem(text)
        sections = _parabolicity_sections(spec.problem, options)
        report = build_report(args.command, data, sections)
    return _publish(report, args)


@process_time
def check_regularity_handler(args: argparse.Namespace) -> ExitStatus:
    data, text, options = _load_spec(args)
    with override_settings(**options.overrides()):
        spec = parse_problem(text)
        if not spec.has_claims:
            raise MissingSectionError("missing section [[claims]]")
        problem = spec.problem

        parabolic = _parabolicity_sections(problem, options)
        parabolic_ok = all(s.verdict in (Verdict.PASS, Verdict.SKIPPED) for s in parabolic)
        hypotheses = check_theorem_hypotheses(problem, spec.claims)
        verdict = classify_solution(problem, spec.claims)

        thresholds = sigma_thresholds(problem)
        sections = [
            *(s.model_copy(update={"name": f"parabolicity: {s.name}"}) for s in parabolic),
            section(
                "sigma thresholds",
                verdict_of(thresholds.sigma2_gt_sigma0 and thresholds.sigma3_gt_sigma0),
                thresholds,
                notes=[
                    "phi = 1 would need sigma strictly above: "
                    + ", ".join(f"{k} > {v}" for k, v in sobolev_thresholds(problem).items())
                ],
            ),
            section("theorem hypotheses", verdict_of(hypotheses.passed), hypotheses, notes=hypotheses.unmet),
            section(
                "classicality",
                verdict_of(verdict.guaranteed),
                verdict,
                notes=[
                    *verdict.failed_hypotheses,
                    *(
                        f"condition ({c.condition}) fails for k = {c.k}: budget {c.budget} < {c.required_order}"
                        for c in verdict.conditions
                        if not c.passed
                    ),
                    *verdict.notes,
                ],
            ),
        ]
        if not parabolic_ok:
            sections[-1].notes.append("The problem is not parabolic at the samples; the criterion does not apply.")
        overall = verdict_of(verdict.guaranteed and parabolic_ok)
        report = build_report(
            args.command,
            data,
            sections,
            overall=overall,
            extra_hypotheses=[LOCALIZATION_NOTE],
        )
    return _publish(report, args)


@process_time
def norm_handler(args: argparse.Namespace) -> ExitStatus:
    path = Path(args.input)
    if not path.is_file():
        raise InputError("grid file not found", path=str(path))
    with override_settings(**_cli_options(args).overrides()):
        w = read_grid_file(path)
        tag = make_space_tag(args.s, args.gamma, FunctionParameter.parse(args.phi))
        value = norm_full_space(w, tag)
        notes = []
        if w.support == "plus":
            notes.append("extension by zero for t < 0: the value bounds the quotient norm from above")
        result = NormReport(
            value=value,
            space=tag.label(),
            upper_bound=w.support == "plus",
            tolerances={"edge_decay_tol": settings.EDGE_DECAY_TOL},
        )
        report = build_report(args.command, path.read_bytes(), [section("norm", Verdict.PASS, result, notes=notes)])
    return _publish(report, args)


@process_time
def phi_check_handler(args: argparse.Namespace) -> ExitStatus:
    text = args.phi if args.phi is not None else f"(1 + ln(r))^{args.theta_form!r}"
    with override_settings(**_cli_options(args).overrides()):
        phi = FunctionParameter.parse(text)
        screen = check_class_M(phi)
        dini = dini_integral(phi)
        dini_verdict = {
            "converges": Verdict.PASS,
            "diverges": Verdict.FAIL,
            "inconclusive": Verdict.INCONCLUSIVE,
        }[dini.verdict]
        sections = [
            section("class M", verdict_of(screen.consistent), screen, notes=[screen.verdict, screen.reason]),
            section("Dini integral", dini_verdict, dini, notes=[f"Dini integral {dini.verdict}"]),
        ]
        report = build_report(args.command, phi.text.encode(), sections)
    return _publish(report, args)


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--report", metavar="PATH", help="write the machine-readable report to PATH")
    parser.add_argument("--machine", action="store_true", help="print the machine-readable report")
    parser.add_argument(
        "--tolerance", action="append", metavar="KEY=VALUE", help="override a tolerance, e.g. rank_tol=1e-9"
    )


def _add_check_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", metavar="SPEC", help="problem specification file (TOML)")
    parser.add_argument("--delta1", type=float, help="delta1 for the covering condition")
    parser.add_argument(
        "--samples", action="append", metavar="KEY=VALUE", help="override a sampling density, e.g. interior_samples=9"
    )
    _add_output_flags(parser)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog=TOOL_NAME, description="Parabolic problem and regularity checks")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    parser.add_argument("--debug", action="store_true", help="verbose logs and annotated tracebacks")
    commands = parser.add_subparsers(dest="command", required=True)

    check_parabolic = commands.add_parser("check-parabolic", help="check the parabolicity conditions")
    _add_check_flags(check_parabolic)
    check_parabolic.set_defaults(handler=check_parabolic_handler)

    check_regularity = commands.add_parser("check-regularity", help="decide classicality of the solution")
    _add_check_flags(check_regularity)
    check_regularity.set_defaults(handler=check_regularity_handler)

    norm = commands.add_parser("norm", help="full-space norm of a sampled grid function")
    norm.add_argument("input", metavar="GRID", help="grid file")
    norm.add_argument("--s", type=float, required=True)
    norm.add_argument("--gamma", type=float, required=True)
    norm.add_argument("--phi", default="1")
    _add_output_flags(norm)
    norm.set_defaults(handler=norm_handler)

    phi_check = commands.add_parser("phi-check", help="screen a function parameter")
    source = phi_check.add_mutually_exclusive_group(required=True)
    source.add_argument("--phi")
    source.add_argument("--theta-form", type=float, metavar="THETA", help="phi = (1 + ln r)^THETA")
    _add_output_flags(phi_check)
    phi_check.set_defaults(handler=phi_check_handler)
    return parser


def run(argv: list[str] | None = None) -> ExitStatus:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        logger.error(exc.detail)
        return ExitStatus.INPUT_ERROR

    if args.debug:
        better_exceptions.hook()
        set_log_level("DEBUG")

    handler = catch_exceptions(args.handler, on_error=functools.partial(_error_report, args))
    return handler(args)
