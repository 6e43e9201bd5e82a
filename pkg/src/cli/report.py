import hashlib
import math

import orjson
from pydantic import BaseModel
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from src.cli.schemas import ReportDocument, ReportSection
from src.core.config import settings
from src.core.constants import (
    REPORT_SCHEMA_VERSION,
    TOOL_VERSION,
    UNCHECKED_HYPOTHESES,
    ExitStatus,
    Verdict,
)
from src.core.schemas import JudgedResult

_VERDICT_STYLE = {
    Verdict.PASS: "green",
    Verdict.FAIL: "red",
    Verdict.INCONCLUSIVE: "yellow",
    Verdict.SKIPPED: "dim",
}

_EXIT_STATUS = {
    Verdict.PASS: ExitStatus.PASSED,
    Verdict.FAIL: ExitStatus.FAILED,
    Verdict.INCONCLUSIVE: ExitStatus.INCONCLUSIVE,
    Verdict.SKIPPED: ExitStatus.PASSED,
}


def _json_safe(value):
    """Non-finite floats become null, as orjson writes them."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_json_safe(v) for v in value]
    return value


def verdict_of(passed: bool) -> Verdict:
    return Verdict.PASS if passed else Verdict.FAIL


def section(
    name: str,
    verdict: Verdict,
    result: BaseModel | None = None,
    notes: list[str] | None = None,
    exclude: set[str] | None = None,
) -> ReportSection:
    """Report section whose witnesses are the JSON form of result."""
    tolerances, witnesses = {}, {}
    if result is not None:
        skip = {"tolerances", "heuristic", "passed"} | (exclude or set())
        witnesses = _json_safe(result.model_dump(mode="json", exclude=skip))
        if isinstance(result, JudgedResult):
            tolerances = dict(result.tolerances)
    notes = list(notes or [])
    if isinstance(result, JudgedResult) and result.heuristic:
        notes.append("heuristic: sampled evidence")
    return ReportSection(name=name, verdict=verdict, tolerances=tolerances, witnesses=witnesses, notes=notes)


def combine(sections: list[ReportSection]) -> Verdict:
    verdicts = {s.verdict for s in sections}
    if Verdict.FAIL in verdicts:
        return Verdict.FAIL
    if Verdict.INCONCLUSIVE in verdicts:
        return Verdict.INCONCLUSIVE
    return Verdict.PASS


def build_report(
    command: str,
    input_data: bytes,
    sections: list[ReportSection],
    overall: Verdict | None = None,
    extra_hypotheses: list[str] | None = None,
) -> ReportDocument:
    return ReportDocument(
        schema_version=REPORT_SCHEMA_VERSION,
        tool_version=TOOL_VERSION,
        command=command,
        input_digest=hashlib.sha256(input_data).hexdigest(),
        sections=sections,
        overall=overall if overall is not None else combine(sections),
        defaults=settings.model_dump(mode="json"),
        unchecked_hypotheses=[*UNCHECKED_HYPOTHESES, *(extra_hypotheses or [])],
    )


def exit_status(report: ReportDocument) -> ExitStatus:
    return _EXIT_STATUS[report.overall]


def emit_machine(report: ReportDocument) -> bytes:
    return orjson.dumps(
        report.model_dump(mode="json"),
        option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE,
    )


def parse_machine(data: bytes | str) -> ReportDocument:
    return ReportDocument.model_validate(orjson.loads(data))


def _summarize(witnesses: dict) -> str:
    parts = []
    for key, value in witnesses.items():
        if isinstance(value, (dict, list)) and len(orjson.dumps(value)) > 120:
            value = f"<{type(value).__name__}, {len(value)} entries>"
        parts.append(f"{key} = {value}")
    return "\n".join(parts)


def render_human(report: ReportDocument, console: Console | None = None) -> None:
    console = console or Console()
    table = Table(title=f"{report.command} ({report.tool_version})", show_lines=True)
    table.add_column("Check", style="bold")
    table.add_column("Verdict")
    table.add_column("Details")
    table.add_column("Tolerances")
    for item in report.sections:
        style = _VERDICT_STYLE[item.verdict]
        details = _summarize(item.witnesses)
        if item.notes:
            details = "\n".join(filter(None, [details, *item.notes]))
        tolerances = "\n".join(f"{k} = {v:g}" for k, v in sorted(item.tolerances.items()))
        table.add_row(item.name, f"[{style}]{item.verdict.value}[/{style}]", details, tolerances)
    console.print(table)

    style = _VERDICT_STYLE[report.overall]
    console.print(Panel(f"[{style}]{report.overall.value}[/{style}]", title="Overall"))
    console.print(
        Panel(
            "\n".join(f"- {h}" for h in report.unchecked_hypotheses),
            title="Unchecked hypotheses",
        )
    )
