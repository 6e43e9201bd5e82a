"""Problem specification files (TOML).

    [problem]        n, N, b, tau, kappa, ell
    [[operators.A]]  row, col, terms = [{alpha, beta, coeff}, ...]
    [[operators.B]]  row, col, terms = [...]
    [geometry]       domain = "half-space" | "ball" | "smoothed-square" | "explicit"
                     densities, or [[geometry.interior]] / [[geometry.boundary]] lists
    [[claims]]       target = "f1" | "g1", region, sigma, phi
    [options]        delta1, convention, samples = {...}, tolerances = {...}

Entries of A and B that are not listed are empty.
"""

import re
import tomllib
from collections.abc import Mapping, Sequence

import pydantic

from src.cli.schemas import CheckOptions, ProblemSpec
from src.core.exceptions import InputError, MissingSectionError, SpecSyntaxError
from src.hormander.schemas import FunctionParameter
from src.problem.geometry import explicit_samples, generate_samples
from src.problem.schemas import CoefficientExpression, ParabolicProblem, PDOTerm
from src.regularity.schemas import RegionTag, RegularityClaim

_TOML_POSITION = re.compile(r"at line (\d+), column (\d+)")
_TARGET = re.compile(r"^([fg])(\d+)$")


def _section(document: Mapping, name: str) -> Mapping:
    value = document.get(name)
    if not value:
        raise MissingSectionError(f"missing section [{name}]")
    return value


def _field(section: Mapping, name: str, where: str):
    if name not in section:
        raise MissingSectionError(f"missing key {name!r} in {where}")
    return section[name]


def _terms(entry: Mapping, label: str, n: int) -> tuple[PDOTerm, ...]:
    terms = []
    for index, raw in enumerate(entry.get("terms", []), start=1):
        where = f"{label} term {index}"
        alpha = tuple(_field(raw, "alpha", where))
        try:
            coeff = CoefficientExpression.parse(str(raw.get("coeff", "1")), n)
        except SpecSyntaxError as exc:
            raise SpecSyntaxError(f"{where}: {exc.detail}", line=exc.line, column=exc.column) from exc
        terms.append(PDOTerm(alpha=alpha, beta=int(raw.get("beta", 0)), coeff=coeff))
    return tuple(terms)


def _table(entries: Sequence[Mapping], name: str, rows: int, cols: int, n: int):
    table = [[() for _ in range(cols)] for _ in range(rows)]
    for entry in entries:
        row, col = int(_field(entry, "row", name)), int(_field(entry, "col", name))
        if not (1 <= row <= rows and 1 <= col <= cols):
            raise InputError(f"{name}[{row}][{col}] is outside the {rows} x {cols} table")
        label = f"{name}[{row}][{col}]"
        table[row - 1][col - 1] += _terms(entry, label, n)
    return tuple(tuple(row) for row in table)


def _samples(geometry: Mapping, n: int, tau: float, notes: list[str]):
    domain = _field(geometry, "domain", "[geometry]")
    if domain == "explicit":
        return explicit_samples(geometry.get("interior", []), geometry.get("boundary", []), notes)
    return generate_samples(
        domain,
        n,
        tau,
        interior=geometry.get("interior"),
        boundary_points=geometry.get("boundary_points"),
        time_values=geometry.get("time_values"),
        seed=geometry.get("seed"),
    )


def _claim(raw: Mapping, index: int) -> RegularityClaim:
    where = f"claim {index}"
    target = str(_field(raw, "target", where))
    match = _TARGET.match(target)
    if not match:
        raise InputError(f"{where}: target must look like f1 or g2", target=target)
    kind, number = match.groups()
    region = raw.get("region", "lateral-boundary" if kind == "g" else None)
    if region is None:
        raise MissingSectionError(f"missing key 'region' in {where}")
    try:
        phi = FunctionParameter.parse(str(raw.get("phi", "1")))
    except SpecSyntaxError as exc:
        raise SpecSyntaxError(f"{where}: {exc.detail}", line=exc.line, column=exc.column) from exc
    return RegularityClaim(
        kind=kind,
        index=int(number),
        region=RegionTag(region),
        sigma=str(_field(raw, "sigma", where)),
        phi=phi,
    )


def load_toml(text: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        position = _TOML_POSITION.search(str(exc))
        line, column = (int(position[1]), int(position[2])) if position else (None, None)
        raise SpecSyntaxError(str(exc), line=line, column=column) from exc


def parse_problem(text: str) -> ProblemSpec:
    document = load_toml(text)
    try:
        head = _section(document, "problem")
        operators = _section(document, "operators")
        geometry = _section(document, "geometry")
        n = int(_field(head, "n", "[problem]"))
        N = int(_field(head, "N", "[problem]"))
        b = int(_field(head, "b", "[problem]"))
        tau = float(_field(head, "tau", "[problem]"))
        kappa = tuple(int(k) for k in _field(head, "kappa", "[problem]"))
        ell = tuple(int(l) for l in _field(head, "ell", "[problem]"))
        m = b * sum(kappa)

        sample_notes: list[str] = []
        interior, boundary = _samples(geometry, n, tau, sample_notes)
        problem = ParabolicProblem(
            n=n,
            N=N,
            b=b,
            tau=tau,
            kappa=kappa,
            ell=ell,
            A_terms=_table(operators.get("A", []), "A", N, N, n),
            B_terms=_table(operators.get("B", []), "B", m, N, n),
            interior_samples=interior,
            boundary_samples=boundary,
            sample_notes=tuple(sample_notes),
        )
        claims = [_claim(raw, index) for index, raw in enumerate(document.get("claims", []), start=1)]
        options = CheckOptions.model_validate(document.get("options", {}))
    except pydantic.ValidationError as exc:
        raise InputError(f"invalid specification: {exc}") from exc
    except (TypeError, ValueError, KeyError) as exc:
        raise InputError(f"invalid specification: {exc}") from exc

    return ProblemSpec(problem=problem, claims=claims, options=options, has_claims="claims" in document)


def read_options(text: str) -> CheckOptions:
    """Only the [options] section; sampling overrides must be known before samples are drawn."""
    try:
        return CheckOptions.model_validate(load_toml(text).get("options", {}))
    except pydantic.ValidationError as exc:
        raise InputError(f"invalid [options]: {exc}") from exc
