"""Fixture-Dokumente: eine JSON-Datei pro Fall, Schema-Version 1."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .constants import CASE_FILES, CASE_IDS, ORIENTATIONS, SCHEMA_VERSION

LOGGER = logging.getLogger(__name__)

ClassRef = Tuple[int, int]
Matrix = Tuple[Tuple[int, ...], ...]
Monomial = Tuple[Tuple[str, int], ...]


class FixtureError(ValueError):
    def __init__(self, problems: Sequence[str]):
        self.problems = tuple(problems)
        super().__init__(f"{len(self.problems)} Fixture-Probleme: " + "; ".join(self.problems))


@dataclass(frozen=True)
class CosetEntry:
    degree: int
    ordinal: int
    word: Tuple[int, ...]


@dataclass(frozen=True)
class EvenGroupEntry:
    degree: int
    order: int
    generator: Optional[ClassRef]


@dataclass(frozen=True)
class OddGroupEntry:
    degree: int
    kernel: Tuple[Tuple[ClassRef, int], ...]

    def vector(self, size: int) -> Tuple[int, ...]:
        out = [0] * size
        for (_, ordinal), coefficient in self.kernel:
            out[ordinal - 1] = coefficient
        return tuple(out)


@dataclass(frozen=True)
class RingIdentitySpec:
    factors: Tuple[Tuple[ClassRef, int], ...]
    coefficient: int
    target: ClassRef
    up_to_sign: bool = False

    @property
    def degree(self) -> int:
        return sum(ref[0] * power for ref, power in self.factors)

    def factor_key(self) -> Tuple[ClassRef, ...]:
        """Faktoren als sortiertes Multiset, unabhängig von der Schreibweise."""
        return tuple(sorted(ref for ref, power in self.factors for _ in range(power)))


@dataclass(frozen=True)
class StructureEntry:
    m: int
    orientation: str
    basis: Tuple[Monomial, ...]
    matrix: Matrix
    nullspace: Matrix
    nullspace_index: int = 1

    def basis_dicts(self) -> List[Dict[str, int]]:
        return [dict(mono) for mono in self.basis]

    def canonical_matrix(self) -> Matrix:
        """Monome x Klassen, unabhängig von der gedruckten Orientierung."""
        if self.orientation == "monomials_by_classes":
            return self.matrix
        if not self.matrix:
            return tuple(() for _ in self.basis)
        return tuple(tuple(col) for col in zip(*self.matrix))


@dataclass(frozen=True)
class CaseFixture:
    case_id: str
    group: str
    excluded_node: int
    source_section: int
    generators: Tuple[Tuple[str, ClassRef], ...]
    cosets: Tuple[CosetEntry, ...]
    euler_matrices: Tuple[Tuple[int, Matrix], ...]
    even: Tuple[EvenGroupEntry, ...]
    odd: Tuple[OddGroupEntry, ...]
    unlisted_degrees: Tuple[int, ...] = ()
    ring: Tuple[RingIdentitySpec, ...] = ()
    structure: Tuple[StructureEntry, ...] = ()
    notes: Tuple[str, ...] = ()

    @property
    def top_length(self) -> int:
        return max((c.degree for c in self.cosets), default=0)

    def coset_counts(self) -> Dict[int, int]:
        counts = {0: 1}
        for c in self.cosets:
            counts[c.degree] = counts.get(c.degree, 0) + 1
        return dict(sorted(counts.items()))

    def words(self) -> Dict[ClassRef, Tuple[int, ...]]:
        return {(c.degree, c.ordinal): c.word for c in self.cosets}

    def euler(self, k: int) -> Optional[Matrix]:
        return dict(self.euler_matrices).get(k)

    def structure_for(self, m: int) -> Optional[StructureEntry]:
        return next((s for s in self.structure if s.m == m), None)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "case_id": self.case_id,
            "group": self.group,
            "excluded_node": self.excluded_node,
            "source_section": self.source_section,
            "generators": {name: list(ref) for name, ref in self.generators},
            "cosets": [
                {"degree": c.degree, "ordinal": c.ordinal, "word": list(c.word)} for c in self.cosets
            ],
            "euler_matrices": {str(k): [list(r) for r in m] for k, m in self.euler_matrices},
            "additive": {
                "even": [
                    {
                        "degree": e.degree,
                        "order": e.order,
                        "generator": list(e.generator) if e.generator else None,
                    }
                    for e in self.even
                ],
                "odd": [
                    {
                        "degree": o.degree,
                        "kernel": [{"class": list(ref), "coefficient": c} for ref, c in o.kernel],
                    }
                    for o in self.odd
                ],
                "unlisted_degrees": list(self.unlisted_degrees),
            },
            "ring": [
                {
                    "factors": [{"class": list(ref), "power": p} for ref, p in r.factors],
                    "coefficient": r.coefficient,
                    "target": list(r.target),
                    "up_to_sign": r.up_to_sign,
                }
                for r in self.ring
            ],
            "structure": [
                {
                    "m": s.m,
                    "orientation": s.orientation,
                    "basis": [dict(mono) for mono in s.basis],
                    "matrix": [list(r) for r in s.matrix],
                    "nullspace": [list(r) for r in s.nullspace],
                    "nullspace_index": s.nullspace_index,
                }
                for s in self.structure
            ],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: Any, where: str = "") -> "CaseFixture":
        reader = _Reader(where or "Dokument")
        fixture = reader.case(data)
        if reader.problems:
            raise FixtureError(reader.problems)
        problems = fixture.validate()
        if problems:
            raise FixtureError([f"{reader.where}: {p}" for p in problems])
        return fixture

    def validate(self) -> List[str]:
        """Querverweise und Dimensionen; liefert alle Probleme, nicht nur das erste."""
        problems: List[str] = []
        counts = self.coset_counts()
        top = self.top_length
        labels = set(self.words())

        for degree, count in counts.items():
            if degree == 0:
                continue
            ordinals = sorted(o for (d, o) in labels if d == degree)
            if ordinals != list(range(1, count + 1)):
                problems.append(f"Nebenklassen Grad {degree}: Ordinale {ordinals} nicht fortlaufend")
        for c in self.cosets:
            if c.degree < 1:
                problems.append(f"w{c.degree},{c.ordinal}: Grad muss >= 1 sein")
            if len(c.word) != c.degree:
                problems.append(f"w{c.degree},{c.ordinal}: Wortlänge {len(c.word)} statt {c.degree}")
        if self.words().get((1, 1)) != (self.excluded_node,):
            problems.append(
                f"w1,1 = {list(self.words().get((1, 1), ()))} passt nicht zu Knoten {self.excluded_node}"
            )

        def known(ref: ClassRef) -> bool:
            return ref == (0, 1) or ref in labels

        for name, ref in self.generators:
            if not known(ref):
                problems.append(f"Erzeuger {name}: Klasse s{ref[0]},{ref[1]} existiert nicht")
        generator_degrees = {name: ref[0] for name, ref in self.generators}

        for k, matrix in self.euler_matrices:
            if not 1 <= k <= top + 1:
                problems.append(f"A_{k}: k außerhalb von 1..{top + 1}")
                continue
            rows, cols = counts.get(k - 1, 0), counts.get(k, 0)
            widths = sorted({len(r) for r in matrix})
            if len(matrix) != rows or (matrix and widths != [cols]):
                shape = f"{len(matrix)}x{'/'.join(map(str, widths)) or 0}"
                problems.append(f"A_{k}: Dimension {shape}, erwartet {rows}x{cols} aus den Nebenklassen")

        for e in self.even:
            if e.degree % 2 or not 0 <= e.degree <= 2 * top:
                problems.append(f"H^{e.degree}: kein gerader Grad in 0..{2 * top}")
            if e.order < 0:
                problems.append(f"H^{e.degree}: negative Ordnung {e.order}")
            if e.generator is not None:
                if not known(e.generator):
                    problems.append(f"H^{e.degree}: Erzeuger s{e.generator[0]},{e.generator[1]} existiert nicht")
                elif 2 * e.generator[0] != e.degree:
                    problems.append(f"H^{e.degree}: Erzeuger hat Grad {e.generator[0]}")
        for o in self.odd:
            if o.degree % 2 == 0 or not 1 <= o.degree <= 2 * top + 1:
                problems.append(f"H^{o.degree}: kein ungerader Grad in 1..{2 * top + 1}")
            for ref, _ in o.kernel:
                if not known(ref):
                    problems.append(f"H^{o.degree}: Klasse s{ref[0]},{ref[1]} existiert nicht")
                elif 2 * ref[0] + 1 != o.degree:
                    problems.append(f"H^{o.degree}: Klasse s{ref[0]},{ref[1]} hat falschen Grad")

        for index, identity in enumerate(self.ring, start=1):
            for ref, power in identity.factors:
                if not known(ref):
                    problems.append(f"Ring #{index}: Faktor s{ref[0]},{ref[1]} existiert nicht")
                if power < 1:
                    problems.append(f"Ring #{index}: Exponent {power}")
            if not known(identity.target):
                problems.append(f"Ring #{index}: Ziel s{identity.target[0]},{identity.target[1]} existiert nicht")
            elif identity.target[0] != identity.degree:
                problems.append(f"Ring #{index}: Ziel hat Grad {identity.target[0]}, Produkt {identity.degree}")

        for s in self.structure:
            tag = f"M(pi_{s.m})"
            if s.orientation not in ORIENTATIONS:
                problems.append(f"{tag}: unbekannte Orientierung {s.orientation!r}")
                continue
            for mono in s.basis:
                unknown = [name for name, _ in mono if name not in generator_degrees]
                if unknown:
                    problems.append(f"{tag}: unbekannte Erzeuger {unknown}")
                    continue
                degree = sum(generator_degrees[name] * p for name, p in mono)
                if degree != s.m:
                    problems.append(f"{tag}: Monom {dict(mono)} hat Grad {degree}")
            classes = counts.get(s.m, 0)
            if s.orientation == "classes_by_monomials":
                rows, cols = classes, len(s.basis)
            else:
                rows, cols = len(s.basis), classes
            if len(s.matrix) != rows or any(len(r) != cols for r in s.matrix):
                problems.append(f"{tag}: Dimension passt nicht zu {rows}x{cols}")
            for i, r in enumerate(s.nullspace, start=1):
                if len(r) != len(s.basis):
                    problems.append(f"N(pi_{s.m}) Zeile {i}: Länge {len(r)} statt {len(s.basis)}")
        return problems


@dataclass(frozen=True)
class FixtureSet:
    directory: str = field(compare=False)
    cases: Mapping[str, CaseFixture]

    def case(self, case_id: str) -> CaseFixture:
        try:
            return self.cases[case_id]
        except KeyError:
            raise KeyError(f"Kein Fixture für {case_id}") from None

    def __contains__(self, case_id: object) -> bool:
        return case_id in self.cases


class _Reader:
    """Liest ein Dokument und sammelt Schemafehler, statt beim ersten abzubrechen."""

    def __init__(self, where: str):
        self.where = where
        self.problems: List[str] = []

    def fail(self, message: str) -> None:
        self.problems.append(f"{self.where}: {message}")

    def get(self, data: Any, key: str, kind, context: str, default: Any = ...) -> Any:
        if not isinstance(data, dict):
            self.fail(f"{context}: Objekt erwartet")
            return None
        if key not in data:
            if default is not ...:
                return default
            self.fail(f"{context}: Feld {key!r} fehlt")
            return None
        value = data[key]
        if kind is int and isinstance(value, bool):
            self.fail(f"{context}.{key}: Ganzzahl erwartet")
            return None
        if not isinstance(value, kind):
            self.fail(f"{context}.{key}: {getattr(kind, '__name__', kind)} erwartet")
            return None
        return value

    def ints(self, value: Any, context: str) -> Optional[Tuple[int, ...]]:
        if not isinstance(value, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in value):
            self.fail(f"{context}: Liste ganzer Zahlen erwartet")
            return None
        return tuple(value)

    def class_ref(self, value: Any, context: str) -> Optional[ClassRef]:
        ints = self.ints(value, context)
        if ints is None:
            return None
        if len(ints) != 2:
            self.fail(f"{context}: Klassenverweis [Grad, Ordinal] erwartet")
            return None
        return ints[0], ints[1]

    def matrix(self, value: Any, context: str) -> Optional[Matrix]:
        if not isinstance(value, list):
            self.fail(f"{context}: Matrix erwartet")
            return None
        rows = [self.ints(r, f"{context}[{i}]") for i, r in enumerate(value)]
        if any(r is None for r in rows):
            return None
        return tuple(rows)

    def case(self, data: Any) -> Optional[CaseFixture]:
        version = self.get(data, "schema_version", int, "Dokument")
        if version is not None and version != SCHEMA_VERSION:
            self.fail(f"schema_version {version}, unterstützt wird {SCHEMA_VERSION}")
        case_id = self.get(data, "case_id", str, "Dokument")
        group = self.get(data, "group", str, "Dokument")
        node = self.get(data, "excluded_node", int, "Dokument")
        section = self.get(data, "source_section", int, "Dokument", default=0)

        generators: List[Tuple[str, ClassRef]] = []
        raw_gens = self.get(data, "generators", dict, "Dokument")
        for name, ref in (raw_gens or {}).items():
            parsed = self.class_ref(ref, f"generators.{name}")
            if parsed is not None:
                generators.append((name, parsed))

        cosets: List[CosetEntry] = []
        for i, raw in enumerate(self.get(data, "cosets", list, "Dokument") or []):
            ctx = f"cosets[{i}]"
            degree = self.get(raw, "degree", int, ctx)
            ordinal = self.get(raw, "ordinal", int, ctx)
            word = self.ints(raw.get("word") if isinstance(raw, dict) else None, f"{ctx}.word")
            if None not in (degree, ordinal, word):
                cosets.append(CosetEntry(degree, ordinal, word))

        euler: List[Tuple[int, Matrix]] = []
        for key, raw in (self.get(data, "euler_matrices", dict, "Dokument") or {}).items():
            try:
                k = int(key)
            except ValueError:
                self.fail(f"euler_matrices: Schlüssel {key!r} ist keine Zahl")
                continue
            matrix = self.matrix(raw, f"A_{k}")
            if matrix is not None:
                euler.append((k, matrix))
        euler.sort()

        additive = self.get(data, "additive", dict, "Dokument") or {}
        even: List[EvenGroupEntry] = []
        for i, raw in enumerate(self.get(additive, "even", list, "additive", default=[]) or []):
            ctx = f"additive.even[{i}]"
            degree = self.get(raw, "degree", int, ctx)
            order = self.get(raw, "order", int, ctx)
            generator = None
            if isinstance(raw, dict) and raw.get("generator") is not None:
                generator = self.class_ref(raw["generator"], f"{ctx}.generator")
            if degree is not None and order is not None:
                even.append(EvenGroupEntry(degree, order, generator))
        odd: List[OddGroupEntry] = []
        for i, raw in enumerate(self.get(additive, "odd", list, "additive", default=[]) or []):
            ctx = f"additive.odd[{i}]"
            degree = self.get(raw, "degree", int, ctx)
            terms = []
            for j, term in enumerate(self.get(raw, "kernel", list, ctx) or []):
                ref = self.class_ref(term.get("class") if isinstance(term, dict) else None, f"{ctx}.kernel[{j}]")
                coefficient = self.get(term, "coefficient", int, f"{ctx}.kernel[{j}]")
                if ref is not None and coefficient is not None:
                    terms.append((ref, coefficient))
            if degree is not None:
                odd.append(OddGroupEntry(degree, tuple(terms)))
        unlisted = self.ints(additive.get("unlisted_degrees", []), "additive.unlisted_degrees") or ()

        ring: List[RingIdentitySpec] = []
        for i, raw in enumerate(self.get(data, "ring", list, "Dokument", default=[]) or []):
            ctx = f"ring[{i}]"
            factors = []
            for j, factor in enumerate(self.get(raw, "factors", list, ctx) or []):
                ref = self.class_ref(
                    factor.get("class") if isinstance(factor, dict) else None, f"{ctx}.factors[{j}]"
                )
                power = self.get(factor, "power", int, f"{ctx}.factors[{j}]")
                if ref is not None and power is not None:
                    factors.append((ref, power))
            coefficient = self.get(raw, "coefficient", int, ctx)
            target = self.class_ref(raw.get("target") if isinstance(raw, dict) else None, f"{ctx}.target")
            up_to_sign = self.get(raw, "up_to_sign", bool, ctx, default=False)
            if coefficient is not None and target is not None:
                ring.append(RingIdentitySpec(tuple(factors), coefficient, target, bool(up_to_sign)))

        structure: List[StructureEntry] = []
        for i, raw in enumerate(self.get(data, "structure", list, "Dokument", default=[]) or []):
            ctx = f"structure[{i}]"
            m = self.get(raw, "m", int, ctx)
            orientation = self.get(raw, "orientation", str, ctx)
            basis: List[Monomial] = []
            for j, mono in enumerate(self.get(raw, "basis", list, ctx) or []):
                if not isinstance(mono, dict) or any(
                    isinstance(p, bool) or not isinstance(p, int) for p in mono.values()
                ):
                    self.fail(f"{ctx}.basis[{j}]: Monom {{Erzeuger: Exponent}} erwartet")
                    continue
                basis.append(tuple(mono.items()))
            matrix = self.matrix(raw.get("matrix") if isinstance(raw, dict) else None, f"{ctx}.matrix")
            nullspace = self.matrix(raw.get("nullspace", []) if isinstance(raw, dict) else None, f"{ctx}.nullspace")
            index = self.get(raw, "nullspace_index", int, ctx, default=1)
            if index is not None and index < 1:
                self.fail(f"{ctx}.nullspace_index: positive Zahl erwartet")
                index = None
            if None not in (m, orientation, matrix, nullspace, index):
                structure.append(StructureEntry(m, orientation, tuple(basis), matrix, nullspace, index))

        notes = self.get(data, "notes", list, "Dokument", default=[]) or []
        if self.problems:
            return None
        return CaseFixture(
            case_id=case_id,
            group=group,
            excluded_node=node,
            source_section=section,
            generators=tuple(generators),
            cosets=tuple(cosets),
            euler_matrices=tuple(euler),
            even=tuple(even),
            odd=tuple(odd),
            unlisted_degrees=tuple(unlisted),
            ring=tuple(ring),
            structure=tuple(structure),
            notes=tuple(str(n) for n in notes),
        )


def load_case_fixture(path: Union[str, Path]) -> CaseFixture:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise FixtureError([f"{path.name}: ungültiges JSON: {exc}"]) from exc
    except OSError as exc:
        raise FixtureError([f"{path.name}: nicht lesbar: {exc}"]) from exc
    return CaseFixture.from_dict(data, where=path.name)


def load_fixtures(directory: Union[str, Path], case_ids: Sequence[str] = CASE_IDS) -> FixtureSet:
    """Lädt und prüft alle Fälle; alle Probleme werden gemeinsam gemeldet."""
    directory = Path(directory)
    problems: List[str] = []
    cases: Dict[str, CaseFixture] = {}
    for case_id in case_ids:
        filename = CASE_FILES.get(case_id, fixture_filename(case_id))
        path = directory / filename
        if not path.is_file():
            problems.append(f"{case_id}: Datei {filename} fehlt in {directory}")
            continue
        try:
            fixture = load_case_fixture(path)
        except FixtureError as exc:
            problems.extend(exc.problems)
            continue
        if fixture.case_id != case_id:
            problems.append(f"{filename}: case_id {fixture.case_id!r}, erwartet {case_id!r}")
            continue
        cases[case_id] = fixture
    if problems:
        for problem in problems:
            LOGGER.debug("Fixture-Problem: %s", problem)
        raise FixtureError(problems)
    LOGGER.info("%s Fälle aus %s geladen", len(cases), directory)
    return FixtureSet(str(directory), cases)


def fixture_filename(case_id: str) -> str:
    if case_id in CASE_FILES:
        return CASE_FILES[case_id]
    return case_id.lower().replace(":", "_").replace("/", "_") + ".json"


def write_case_fixture(fixture: CaseFixture, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(fixture.to_dict(), f, indent=2, ensure_ascii=False)
        f.write("\n")
    return path


def dump_fixtures(fixtures: FixtureSet, directory: Union[str, Path]) -> List[Path]:
    directory = Path(directory)
    written = [
        write_case_fixture(fixture, directory / fixture_filename(case_id))
        for case_id, fixture in fixtures.cases.items()
    ]
    LOGGER.info("%s Fixture-Dateien nach %s geschrieben", len(written), directory)
    return written
