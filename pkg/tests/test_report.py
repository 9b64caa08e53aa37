import json

import pytest

from schubert_tables.intlat import IntMatrix
from schubert_tables.pipeline import BootstrapOutcome, DiffReport, Mismatch, TableResult, convention_bootstrap
from schubert_tables.report import Report, emit_document, emit_report, render_matrix


def _bootstrap(passed=True):
    return BootstrapOutcome(
        passed=passed,
        flipped_passed=False,
        conventions=(("cartan_row_is_root", "True"), ("coset_side", "right"), ("word_order", "left-to-right")),
        matrices=((5, ((1, 2), (0, 1))),),
        flipped_matrices=((5, ((1, 1), (0, 1))),),
        note="A_2..A_5 reproduziert",
    )


@pytest.fixture
def report():
    good = DiffReport(
        "F4:B3",
        (
            TableResult("cosets", "cosets", "match", notes=("24 Nebenklassen",)),
            TableResult("euler", "A_5", "match", seconds=0.25),
            TableResult("ring", "ring", "match", notes=("zusätzlich: s̄4,1^2 = [1]",)),
        ),
        seconds=1.5,
    )
    bad = DiffReport(
        "E8:E7",
        (
            TableResult("euler", "A_5", "mismatch", (Mismatch("cell (1,2)", 2, 3),)),
            TableResult("structure", "M(pi_15)", "match"),
            TableResult("structure", "M(pi_24)", "skipped-extended", notes=("nur mit --extended",)),
            TableResult("nullspace", "N(pi_24)", "skipped-extended", notes=("nur mit --extended",)),
            TableResult("additive", "additive", "mismatch", (Mismatch("H^23", [[2, -1]], [-2, 1]),)),
        ),
        seconds=30.0,
    )
    return Report((good, bad), bootstrap=_bootstrap(), seconds=31.5)


class TestCounts:
    def test_counts(self, report):
        assert not report.passed
        assert report.passed_cases == 1
        assert report.table_count == 6
        assert report.mismatch_count == 2
        assert report.skipped_count == 2
        assert report.summary() == "1/2 cases, 6 tables, 2 mismatches"

    def test_failed_bootstrap_fails_report(self, report):
        only_good = Report(report.cases[:1], bootstrap=_bootstrap(passed=False))
        assert only_good.cases[0].passed
        assert not only_good.passed
        assert Report(report.cases[:1]).passed


class TestText:
    def test_lists_mismatches_and_skips(self, report):
        text = emit_report(report).decode("utf-8")
        lines = text.splitlines()
        assert lines[0].startswith("Konventionen [ok]: A_2..A_5 reproduziert")
        assert "F4:B3: ok, 3 Tabellen" in lines
        assert "E8:E7: MISMATCH, 3 Tabellen" in lines
        assert "  [MISMATCH] E8:E7 A_5" in lines
        assert "    cell (1,2): berechnet 2, Fixture 3" in lines
        assert "    H^23: berechnet [[2, -1]], Fixture [-2, 1]" in lines
        assert "  [SKIPPED-EXTENDED] E8:E7 M(pi_24): nur mit --extended" in lines
        assert "    zusätzlich: s̄4,1^2 = [1]" in lines
        assert lines[-1] == "1/2 cases, 6 tables, 2 mismatches, 2 skipped"

    def test_timings_only_on_request(self, report):
        assert "(30.0s)" not in emit_report(report).decode("utf-8")
        timed = emit_report(report, include_timings=True).decode("utf-8")
        assert "E8:E7: MISMATCH, 3 Tabellen (30.0s)" in timed
        assert timed.rstrip().endswith("(31.5s)")

    def test_unknown_format(self, report):
        with pytest.raises(ValueError):
            emit_report(report, "yaml")


class TestStructured:
    def test_document(self, report):
        data = json.loads(emit_report(report, "structured"))
        assert data["schema_version"] == 1
        assert data["passed"] is False
        assert data["summary"] == {"cases": 2, "passed_cases": 1, "tables": 6, "mismatches": 2, "skipped": 2}
        a5 = data["cases"][1]["tables"][0]
        assert a5["mismatches"] == [{"location": "cell (1,2)", "computed": 2, "expected": 3}]
        assert "seconds" not in data and "seconds" not in a5

    def test_round_trip(self, report):
        without_times = Report(
            tuple(DiffReport(c.case_id, tuple(TableResult(t.family, t.name, t.status, t.mismatches, t.notes)
                                              for t in c.tables)) for c in report.cases),
            bootstrap=report.bootstrap,
        )
        data = json.loads(emit_report(without_times, "structured"))
        assert Report.from_dict(data) == without_times

    def test_deterministic_bytes(self, report):
        assert emit_report(report, "structured") == emit_report(report, "structured")
        assert emit_report(report, "structured", include_timings=True) != emit_report(report, "structured")

    def test_real_bootstrap_serializes(self):
        outcome = convention_bootstrap()
        data = json.loads(emit_report(Report((), bootstrap=outcome), "structured"))
        assert BootstrapOutcome.from_dict(data["bootstrap"]) == outcome


class TestRendering:
    def test_render_matrix(self):
        M = IntMatrix.from_rows([[1, 12], [0, 1]], row_labels=("s4,1", "s4,2"), col_labels=("s5,1", "s5,2"))
        assert render_matrix(M, "A_5").splitlines() == [
            "A_5",
            "        s5,1  s5,2",
            "  s4,1     1    12",
            "  s4,2     0     1",
        ]

    def test_render_empty(self):
        assert render_matrix(IntMatrix.from_rows([], cols=1)) == "  (0x1, leer)"

    def test_emit_document(self):
        assert emit_document({"b": 1, "a": [1]}, "structured", []) == b'{\n  "a": [\n    1\n  ],\n  "b": 1\n}\n'
        assert emit_document({}, "text", ["x", "y"]) == b"x\ny\n"
