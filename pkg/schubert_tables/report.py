"""Berichte: Zusammenfassung über Fälle, Text- und strukturierte Ausgabe."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .constants import OUTPUT_FORMATS, SCHEMA_VERSION
from .intlat import IntMatrix
from .pipeline import BootstrapOutcome, DiffReport, TableResult

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Report:
    cases: Tuple[DiffReport, ...]
    bootstrap: Optional[BootstrapOutcome] = None
    extended: bool = False
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        bootstrap_ok = self.bootstrap is None or self.bootstrap.passed
        return bootstrap_ok and all(case.passed for case in self.cases)

    @property
    def passed_cases(self) -> int:
        return sum(1 for case in self.cases if case.passed)

    def _tables(self, *statuses: str) -> List[TableResult]:
        return [t for case in self.cases for t in case.tables if t.status in statuses]

    @property
    def table_count(self) -> int:
        return len(self._tables("match", "mismatch"))

    @property
    def mismatch_count(self) -> int:
        return sum(case.mismatch_count for case in self.cases)

    @property
    def skipped_count(self) -> int:
        return len(self._tables("skipped", "skipped-extended"))

    def summary(self) -> str:
        return f"{self.passed_cases}/{len(self.cases)} cases, {self.table_count} tables, {self.mismatch_count} mismatches"

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "passed": self.passed,
            "extended": self.extended,
            "summary": {
                "cases": len(self.cases),
                "passed_cases": self.passed_cases,
                "tables": self.table_count,
                "mismatches": self.mismatch_count,
                "skipped": self.skipped_count,
            },
            "bootstrap": self.bootstrap.to_dict() if self.bootstrap is not None else None,
            "cases": [case.to_dict(include_timings) for case in self.cases],
        }
        if include_timings:
            data["seconds"] = self.seconds
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Report":
        bootstrap = data.get("bootstrap")
        return cls(
            cases=tuple(DiffReport.from_dict(c) for c in data.get("cases", [])),
            bootstrap=BootstrapOutcome.from_dict(bootstrap) if bootstrap else None,
            extended=bool(data.get("extended", False)),
            seconds=float(data.get("seconds", 0.0)),
        )


def render_matrix(M: IntMatrix, title: str = "") -> str:
    """Matrix mit Zeilen- und Spaltenbeschriftung, rechtsbündig."""
    lines = [title] if title else []
    if M.rows == 0 or M.cols == 0:
        lines.append(f"  ({M.rows}x{M.cols}, leer)")
        return "\n".join(lines)
    label_width = max(len(label) for label in M.row_labels)
    widths = [
        max(len(M.col_labels[j]), *(len(str(M[i, j])) for i in range(M.rows))) for j in range(M.cols)
    ]
    header = " " * label_width + "  " + "  ".join(lbl.rjust(w) for lbl, w in zip(M.col_labels, widths))
    lines.append("  " + header.rstrip())
    for i in range(M.rows):
        cells = "  ".join(str(M[i, j]).rjust(w) for j, w in enumerate(widths))
        lines.append(f"  {M.row_labels[i].ljust(label_width)}  {cells}")
    return "\n".join(lines)


def _format_value(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return json.dumps(value)
    return str(value)


def _render_table(case_id: str, table: TableResult, include_timings: bool) -> List[str]:
    timing = f" ({table.seconds:.2f}s)" if include_timings else ""
    if table.status == "match":
        return []
    if table.status in ("skipped", "skipped-extended"):
        reason = f": {'; '.join(table.notes)}" if table.notes else ""
        return [f"  [{table.status.upper()}] {case_id} {table.name}{reason}{timing}"]
    lines = [f"  [MISMATCH] {case_id} {table.name}{timing}"]
    for m in table.mismatches:
        lines.append(
            f"    {m.location}: berechnet {_format_value(m.computed)}, Fixture {_format_value(m.expected)}"
        )
    return lines


def _render_text(report: Report, include_timings: bool) -> str:
    lines: List[str] = []
    if report.bootstrap is not None:
        b = report.bootstrap
        state = "ok" if b.passed else "FEHLER"
        conventions = ", ".join(f"{k}={v}" for k, v in b.conventions)
        lines.append(f"Konventionen [{state}]: {b.note} ({conventions})")
    for case in report.cases:
        state = "ok" if case.passed else "MISMATCH"
        timing = f" ({case.seconds:.1f}s)" if include_timings else ""
        counted = sum(1 for t in case.tables if t.status in ("match", "mismatch"))
        lines.append(f"{case.case_id}: {state}, {counted} Tabellen{timing}")
        for table in case.tables:
            lines.extend(_render_table(case.case_id, table, include_timings))
            if table.family == "ring" and table.notes:
                lines.extend(f"    {note}" for note in table.notes)
    summary = report.summary()
    if report.skipped_count:
        summary += f", {report.skipped_count} skipped"
    if include_timings:
        summary += f" ({report.seconds:.1f}s)"
    lines.append(summary)
    return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str = "text", include_timings: bool = False) -> bytes:
    """Deterministische Ausgabe; Zeitangaben nur auf Wunsch."""
    if fmt not in OUTPUT_FORMATS:
        raise ValueError(f"Unbekanntes Format {fmt!r}; erlaubt: {', '.join(OUTPUT_FORMATS)}")
    if fmt == "structured":
        text = json.dumps(report.to_dict(include_timings), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    else:
        text = _render_text(report, include_timings)
    return text.encode("utf-8")


def emit_document(data: Any, fmt: str, text_lines: Sequence[str]) -> bytes:
    """Ausgabe einzelner Befehle: JSON-Dokument oder vorbereitete Textzeilen."""
    if fmt == "structured":
        return (json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")
    return ("\n".join(text_lines) + "\n").encode("utf-8")
