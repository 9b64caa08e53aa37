"""Kommandozeile: ``python -m schubert_tables <befehl> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Any, BinaryIO, Callable, Dict, List, Optional, Sequence, Tuple

from .config import EngineConfig, Settings, apply_env_overrides
from .constants import CASE_IDS, EXTENDED_DEGREES, LOCALIZATION_MODES, OUTPUT_FORMATS
from .fixtures import FixtureError, fixture_filename, load_fixtures, write_case_fixture
from .pipeline import (
    CaseContext,
    UnknownCaseError,
    UnknownDegreeError,
    additive_table,
    case_spec,
    convention_bootstrap,
    describe_structure,
    load_case,
    regenerate_fixture,
    ring_table,
    verify_all,
)
from .report import Report, emit_document, emit_report, render_matrix
from .weyl import (
    CartanMatrixError,
    CosetLabelError,
    WeylError,
    cartan_matrix,
    minimal_coset_reps,
    positive_roots,
)

LOGGER = logging.getLogger(__name__)

Output = Tuple[Any, List[str], int]


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise argparse.ArgumentTypeError(f"muss positiv sein: {raw}")
    return value


def _class_ref(raw: str) -> Tuple[int, int]:
    try:
        degree, ordinal = (int(x) for x in raw.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"Klasse als GRAD,ORDINAL erwartet, nicht {raw!r}") from None
    return degree, ordinal


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fixtures", help="Verzeichnis mit den Fixture-Dokumenten")
    common.add_argument("--format", choices=OUTPUT_FORMATS, help="Ausgabeformat")
    common.add_argument("--extended", action="store_true", default=None, help="E8 m = 24, 30 mitrechnen")
    common.add_argument("--threads", type=_positive_int, help="Anzahl paralleler Prozesse")
    common.add_argument("--max-degree", type=int, help="Tabellen oberhalb dieses Grades überspringen")
    common.add_argument("--timings", action="store_true", default=None, help="Laufzeiten ausgeben")
    common.add_argument("--localization", choices=LOCALIZATION_MODES, help="Lokalisierung: Punkt oder Polynome")

    parser = argparse.ArgumentParser(
        prog="schubert_tables",
        description="Schubert-Tabellen verallgemeinerter Graßmann-Mannigfaltigkeiten aus Cartan-Matrizen",
    )
    sub = parser.add_subparsers(dest="command", metavar="BEFEHL", required=True)

    p = sub.add_parser("cartan", parents=[common], help="Cartan-Matrix ausgeben")
    p.add_argument("label")

    p = sub.add_parser("roots", parents=[common], help="positive Wurzeln und Kowurzeln")
    p.add_argument("label")

    p = sub.add_parser("cosets", parents=[common], help="minimale Nebenklassenvertreter")
    p.add_argument("target", nargs="+", metavar="FALL | GRUPPE KNOTEN")
    p.add_argument("--canonical", action="store_true", help="lexikographisch minimale Wörter, interne Ordinale")

    p = sub.add_parser("euler", parents=[common], help="Euler-Matrizen A_k")
    p.add_argument("case")
    p.add_argument("k", nargs="?", type=int)

    p = sub.add_parser("additive", parents=[common], help="additive Kohomologie")
    p.add_argument("case")

    p = sub.add_parser("ring", parents=[common], help="Ringtabelle auf H^even")
    p.add_argument("case")

    p = sub.add_parser("mpi", parents=[common], help="Strukturmatrix M(pi_m) und N(pi_m)")
    p.add_argument("case")
    p.add_argument("m", type=int)

    p = sub.add_parser("verify", parents=[common], help="alle Tabellen gegen die Fixtures prüfen")
    p.add_argument("--case", action="append", dest="cases", metavar="FALL")

    p = sub.add_parser("product", parents=[common], help="Produkt zweier Schubert-Klassen")
    p.add_argument("case")
    p.add_argument("left", type=_class_ref, metavar="I,J")
    p.add_argument("right", type=_class_ref, metavar="K,L")

    p = sub.add_parser("export", parents=[common], help="Fixture-Dokument aus der Rechnung schreiben")
    p.add_argument("case")
    p.add_argument("--output", required=True, help="Zielverzeichnis")
    return parser


def _merge_settings(settings: Settings, args: argparse.Namespace) -> Settings:
    updates: Dict[str, Any] = {}
    for attr, value in (
        ("fixtures_dir", args.fixtures),
        ("output_format", args.format),
        ("extended", args.extended),
        ("threads", args.threads),
        ("max_degree", args.max_degree),
        ("timings", args.timings),
    ):
        if value is not None:
            updates[attr] = value
    engine = settings.engine
    if args.localization is not None:
        engine = EngineConfig(localization=args.localization, cache_size=engine.cache_size)
    return replace(settings, engine=engine, **updates)


# BEFEHLE


def _cmd_cartan(args: argparse.Namespace, settings: Settings) -> Output:
    C = cartan_matrix(args.label)
    lines = [f"{C.label} (Rang {C.n})"] + ["  " + " ".join(f"{x:>2}" for x in row) for row in C.entries]
    return {"label": C.label, "matrix": C.entries}, lines, 0


def _cmd_roots(args: argparse.Namespace, settings: Settings) -> Output:
    C = cartan_matrix(args.label)
    roots = positive_roots(C)
    lines = [f"{C.label}: {len(roots)} positive Wurzeln"]
    data = []
    for k, root in enumerate(roots, start=1):
        lines.append(f"  {k:>3}  Höhe {root.height:>2}  {list(root.root_coords)}  Kowurzel {list(root.coroot_coords)}")
        data.append({"root": root.root_coords, "coroot": root.coroot_coords, "height": root.height})
    return {"label": C.label, "roots": data}, lines, 0


def _find_case(group: str, node: int, settings: Settings) -> Optional[str]:
    """Fall mit Fixture zu (Gruppe, Knoten), falls vorhanden."""
    label = cartan_matrix(group).label
    for case_id in CASE_IDS:
        try:
            spec = case_spec(case_id, settings=settings)
        except FixtureError as exc:
            LOGGER.warning("%s: Fixture nicht lesbar (%s)", case_id, exc)
            continue
        if (spec.group, spec.excluded_node) == (label, node):
            return case_id
    return None


def _cmd_cosets(args: argparse.Namespace, settings: Settings) -> Output:
    target = args.target
    if len(target) == 1:
        ctx = load_case(target[0], settings=settings)
        table = ctx.table
        if args.canonical:
            table = minimal_coset_reps(ctx.table.cartan, ctx.table.excluded_node, ctx.case_id)
    elif len(target) == 2:
        group, raw_node = target
        if raw_node.lower() == "borel":
            node = None
        elif raw_node.isdigit():
            node = int(raw_node)
        else:
            raise UnknownCaseError(f"Knoten {raw_node!r}: Zahl oder \"borel\" erwartet")
        case_id = None if node is None or args.canonical else _find_case(group, node, settings)
        if case_id is not None:
            table = load_case(case_id, settings=settings).table
        else:
            table = minimal_coset_reps(cartan_matrix(group), node)
    else:
        raise UnknownCaseError("cosets erwartet FALL oder GRUPPE KNOTEN")
    lines = [f"{table.case_id}: {len(table)} Nebenklassen, L = {table.top_length}"]
    rows = []
    for row in table.rows:
        lines.append(f"  {row.label:>8}  {list(row.word.letters)}")
        rows.append({"degree": row.degree, "ordinal": row.ordinal, "word": row.word.letters})
    data = {"case_id": table.case_id, "count": len(table), "top_length": table.top_length, "cosets": rows}
    return data, lines, 0


def _matrix_data(M) -> Dict[str, Any]:
    return {"rows": M.row_labels, "cols": M.col_labels, "matrix": M.entries}


def _cmd_euler(args: argparse.Namespace, settings: Settings) -> Output:
    ctx = load_case(args.case, settings=settings)
    top = ctx.ring.top_length
    ks = [args.k] if args.k is not None else list(range(1, top + 2))
    cap = settings.max_degree
    lines: List[str] = []
    data = {"case_id": ctx.case_id, "matrices": {}}
    for k in ks:
        if not 0 <= k <= top + 1:
            raise UnknownDegreeError(f"k = {k} außerhalb von 0..{top + 1}")
        if cap is not None and k > cap:
            lines.append(f"A_{k}: übersprungen (k > {cap})")
            continue
        M = ctx.ring.euler_matrix(k)
        lines.append(render_matrix(M, f"A_{k} ({M.rows}x{M.cols})"))
        data["matrices"][str(k)] = _matrix_data(M)
    return data, lines, 0


def _cmd_additive(args: argparse.Namespace, settings: Settings) -> Output:
    ctx = load_case(args.case, settings=settings)
    table = additive_table(ctx)
    lines = [f"{ctx.case_id}: nichttriviale Gruppen H^k, k = 0..{2 * table.top_length + 1}"]
    entries = []
    for entry in table.nontrivial():
        lines.append(f"  H^{entry.degree:<4} {entry.describe():<10} {', '.join(entry.labels)}")
        entries.append(
            {
                "degree": entry.degree,
                "invariant_factors": entry.invariant_factors,
                "generators": entry.generators,
                "labels": entry.labels,
            }
        )
    return {"case_id": ctx.case_id, "groups": entries}, lines, 0


def _identity_data(identity) -> Dict[str, Any]:
    return {
        "label": identity.label,
        "factors": [{"class": ref, "power": p} for ref, p in identity.factors],
        "target": identity.target,
        "expected": identity.expected,
        "computed": identity.computed,
        "group": identity.group,
        "residues": identity.residues,
        "holds": identity.holds,
    }


def _cmd_ring(args: argparse.Namespace, settings: Settings) -> Output:
    ctx = load_case(args.case, settings=settings)
    table = ring_table(ctx)
    lines = [f"{ctx.case_id}: Ringtabelle"]
    for identity in table.identities:
        group = " + ".join("Z" if d == 0 else f"Z_{d}" for d in identity.group) or "0"
        state = "ok" if identity.holds else "FEHLER"
        lines.append(f"  [{state}] {identity.label}  in {group}  (berechnet {identity.computed})")
    for extra in table.extras:
        lines.append(f"  [zusätzlich] {extra.label}")
    data = {
        "case_id": ctx.case_id,
        "identities": [_identity_data(i) for i in table.identities],
        "extras": [_identity_data(i) for i in table.extras],
    }
    return data, lines, 0 if table.all_hold else 1


def _cmd_mpi(args: argparse.Namespace, settings: Settings) -> Output:
    ctx = load_case(args.case, settings=settings)
    m = args.m
    orientation = ctx.spec.orientation(m)
    if not settings.extended and m in EXTENDED_DEGREES.get(ctx.case_id, ()):
        raise UnknownDegreeError(f"M(pi_{m}) von {ctx.case_id} nur mit --extended")
    printed, kernel = describe_structure(ctx, m)
    lines = [render_matrix(printed, f"M(pi_{m}) [{orientation}]"), f"N(pi_{m}):"]
    lines.extend(f"  {list(row)}" for row in kernel.rows)
    if not kernel.rows:
        lines.append("  0")
    data = {
        "case_id": ctx.case_id,
        "m": m,
        "orientation": orientation,
        "structure": _matrix_data(printed),
        "nullspace": kernel.rows,
    }
    return data, lines, 0


def _cmd_product(args: argparse.Namespace, settings: Settings) -> Output:
    ctx = load_case(args.case, settings=settings)
    ring = ctx.ring
    left = ring.schubert_class(*args.left)
    right = ring.schubert_class(*args.right)
    product = ring.multiply(ring.element(left), ring.element(right))
    lines = [f"{left.label} · {right.label} = {product.describe()}"]
    if product.overflow:
        lines.append(f"  (Grad {product.degree} > L = {ring.top_length})")
    data = {
        "case_id": ctx.case_id,
        "left": args.left,
        "right": args.right,
        "degree": product.degree,
        "coefficients": {str(k): v for k, v in product.coeffs.items()},
        "overflow": product.overflow,
    }
    return data, lines, 0


def _cmd_export(args: argparse.Namespace, settings: Settings) -> Output:
    ctx: CaseContext = load_case(args.case, settings=settings)
    fixture = regenerate_fixture(ctx)
    path = write_case_fixture(fixture, Path(args.output) / fixture_filename(ctx.case_id))
    LOGGER.info("%s exportiert nach %s", ctx.case_id, path)
    return {"case_id": ctx.case_id, "path": str(path)}, [f"{ctx.case_id} -> {path}"], 0


_COMMANDS: Dict[str, Callable[[argparse.Namespace, Settings], Output]] = {
    "cartan": _cmd_cartan,
    "roots": _cmd_roots,
    "cosets": _cmd_cosets,
    "euler": _cmd_euler,
    "additive": _cmd_additive,
    "ring": _cmd_ring,
    "mpi": _cmd_mpi,
    "product": _cmd_product,
    "export": _cmd_export,
}


def _verify(args: argparse.Namespace, settings: Settings, out: BinaryIO) -> int:
    case_ids = args.cases or list(CASE_IDS)
    unknown = [c for c in case_ids if c not in CASE_IDS]
    if unknown:
        raise UnknownCaseError(f"Keine Fixtures für {', '.join(unknown)}")
    started = time.perf_counter()
    fixtures = load_fixtures(settings.fixtures_dir, case_ids)
    cases = verify_all(case_ids, fixtures, settings, extended=settings.extended)
    report = Report(
        cases=tuple(cases),
        bootstrap=convention_bootstrap(),
        extended=settings.extended,
        seconds=time.perf_counter() - started,
    )
    out.write(emit_report(report, settings.output_format, settings.timings))
    return 0 if report.passed else 1


def run(argv: Optional[Sequence[str]] = None, settings: Optional[Settings] = None, out: Optional[BinaryIO] = None) -> int:
    """Führt einen Befehl aus; 0 = ok, 1 = Abweichung, 2 = Aufruf- oder Datenfehler."""
    out = out if out is not None else sys.stdout.buffer
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        return int(exc.code or 0)

    base = settings if settings is not None else apply_env_overrides(Settings())
    settings = _merge_settings(base, args)

    try:
        if args.command == "verify":
            return _verify(args, settings, out)
        data, lines, code = _COMMANDS[args.command](args, settings)
    except (UnknownCaseError, UnknownDegreeError) as exc:
        LOGGER.error("%s", exc.args[0] if exc.args else exc)
        return 2
    except (FixtureError, CartanMatrixError, CosetLabelError, WeylError) as exc:
        LOGGER.error("%s", exc)
        return 2
    out.write(emit_document(data, settings.output_format, lines))
    return code
