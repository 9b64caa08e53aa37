"""Schubert-Klassen auf W/W_H: Chevalley-Regel, Euler-Matrizen, Produkte, Monome."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

from .constants import DEFAULT_CACHE_SIZE
from .intlat import IntMatrix
from .localization import LocalizationEngine
from .weyl import CosetTable, WeylElement, WeylError

LOGGER = logging.getLogger(__name__)

__all__ = [
    "CohomElement",
    "IntMatrix",
    "SchubertClass",
    "SchubertRing",
    "class_label",
    "monomial_label",
]


def class_label(degree: int, ordinal: int) -> str:
    return f"s{degree},{ordinal}"


def monomial_label(exponents: Mapping[str, int]) -> str:
    """``{"y1": 3, "y3": 1}`` -> ``"y1^3 y3"``; das leere Monom ist ``"1"``."""
    parts = []
    for name, power in exponents.items():
        if power == 1:
            parts.append(name)
        elif power:
            parts.append(f"{name}^{power}")
    return " ".join(parts) or "1"


@dataclass(frozen=True)
class SchubertClass:
    case_id: str
    degree: int
    ordinal: int
    rep: WeylElement

    @property
    def label(self) -> str:
        return class_label(self.degree, self.ordinal)


@dataclass(frozen=True)
class CohomElement:
    """Homogene Kombination von Schubert-Klassen eines Grades; Schlüssel sind Ordinale."""

    case_id: str
    degree: int
    coeffs: Mapping[int, int]
    overflow: bool = False

    def __post_init__(self) -> None:
        cleaned = {int(k): int(v) for k, v in sorted(self.coeffs.items()) if v}
        object.__setattr__(self, "coeffs", cleaned)

    def __hash__(self) -> int:
        return hash((self.case_id, self.degree, tuple(self.coeffs.items()), self.overflow))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, ordinal: int) -> int:
        return self.coeffs.get(ordinal, 0)

    def vector(self, size: int) -> Tuple[int, ...]:
        """Dichter Koeffizientenvektor über die Ordinale 1..size."""
        if self.coeffs and max(self.coeffs) > size:
            raise ValueError(f"Ordinal {max(self.coeffs)} größer als {size}")
        return tuple(self.coeffs.get(j, 0) for j in range(1, size + 1))

    def __add__(self, other: "CohomElement") -> "CohomElement":
        if other.case_id != self.case_id or other.degree != self.degree:
            raise ValueError(f"Grad {self.degree} und {other.degree} nicht addierbar")
        total = dict(self.coeffs)
        for k, v in other.coeffs.items():
            total[k] = total.get(k, 0) + v
        return CohomElement(self.case_id, self.degree, total, self.overflow or other.overflow)

    def scaled(self, factor: int) -> "CohomElement":
        return CohomElement(
            self.case_id, self.degree, {k: v * factor for k, v in self.coeffs.items()}, self.overflow
        )

    def describe(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for ordinal, c in self.coeffs.items():
            name = class_label(self.degree, ordinal)
            if c == 1:
                terms.append(name)
            elif c == -1:
                terms.append(f"-{name}")
            else:
                terms.append(f"{c} {name}")
        return " + ".join(terms).replace("+ -", "- ")


class SchubertRing:
    """Multiplikation in H*(G/H) in der Schubert-Basis einer Nebenklassentabelle."""

    def __init__(self, table: CosetTable, mode: str = "point", cache_size: int = DEFAULT_CACHE_SIZE):
        self.table = table
        self.case_id = table.case_id
        self.engine = LocalizationEngine(table, mode=mode, cache_size=cache_size)
        self._chevalley: Dict[int, Dict[int, int]] = {}
        self._euler: Dict[int, IntMatrix] = {}

    @property
    def top_length(self) -> int:
        return self.table.top_length

    # Klassen

    def classes(self, degree: int) -> List[SchubertClass]:
        return [
            SchubertClass(self.case_id, row.degree, row.ordinal, row.element)
            for row in self.table.by_degree(degree)
        ]

    def schubert_class(self, degree: int, ordinal: int) -> SchubertClass:
        row = self.table.row(degree, ordinal)
        return SchubertClass(self.case_id, degree, ordinal, row.element)

    def class_of(self, element: WeylElement) -> SchubertClass:
        row = self.table.lookup(element)
        if row is None:
            raise WeylError(f"{element!r} ist kein minimaler Vertreter in {self.case_id}")
        return SchubertClass(self.case_id, row.degree, row.ordinal, row.element)

    def unit(self) -> CohomElement:
        return CohomElement(self.case_id, 0, {1: 1})

    def zero(self, degree: int, overflow: bool = False) -> CohomElement:
        return CohomElement(self.case_id, degree, {}, overflow)

    def element(self, cls: SchubertClass, coefficient: int = 1) -> CohomElement:
        return CohomElement(self.case_id, cls.degree, {cls.ordinal: coefficient})

    def _positions(self, a: CohomElement) -> Dict[int, int]:
        return {self.table.index_of(a.degree, o): c for o, c in a.coeffs.items()}

    def _from_positions(self, coeffs: Mapping[int, int], degree: int) -> CohomElement:
        rows = self.table.rows
        out: Dict[int, int] = {}
        for pos, c in coeffs.items():
            row = rows[pos]
            if row.degree != degree:
                raise WeylError(f"{row.label} liegt nicht in Grad {degree}")
            out[row.ordinal] = c
        return CohomElement(self.case_id, degree, out)

    # Euler-Klasse

    def _chevalley_row(self, pos: int) -> Dict[int, int]:
        cached = self._chevalley.get(pos)
        if cached is not None:
            return cached
        node = self.table.excluded_node
        if node is None:
            raise WeylError("Chevalley-Regel mit der Euler-Klasse braucht einen ausgeschlossenen Knoten")
        u = self.table.rows[pos].element
        system = self.table.system
        totals: Dict[int, int] = {}
        for k, root in enumerate(system.roots):
            weight = root.coroot_coords[node - 1]
            if not weight:
                continue
            t = u.times_reflection(k)
            if t.length != u.length + 1:
                continue
            row = self.table.lookup(t)
            if row is None:
                continue
            totals[row.ordinal] = totals.get(row.ordinal, 0) + weight
        self._chevalley[pos] = totals
        return totals

    def chevalley_multiply(self, u: SchubertClass) -> CohomElement:
        """omega · sigma_u als Kombination der Klassen vom Grad l(u)+1."""
        pos = self.table.index_of(u.degree, u.ordinal)
        return CohomElement(self.case_id, u.degree + 1, self._chevalley_row(pos))

    def multiply_by_euler(self, a: CohomElement) -> CohomElement:
        if a.overflow or a.degree + 1 > self.top_length:
            LOGGER.warning("%s: Grad %s übersteigt %s", self.case_id, a.degree + 1, self.top_length)
            return self.zero(a.degree + 1, overflow=True)
        total: Dict[int, int] = {}
        for pos, c in self._positions(a).items():
            for ordinal, weight in self._chevalley_row(pos).items():
                total[ordinal] = total.get(ordinal, 0) + c * weight
        return CohomElement(self.case_id, a.degree + 1, total)

    def euler_matrix(self, k: int) -> IntMatrix:
        """A_k: Zeilen = Klassen vom Grad k-1, Spalten = Klassen vom Grad k."""
        if not 0 <= k <= self.top_length + 1:
            raise ValueError(f"k = {k} außerhalb von 0..{self.top_length + 1}")
        cached = self._euler.get(k)
        if cached is not None:
            return cached
        sources = self.classes(k - 1) if k >= 1 else []
        targets = self.classes(k) if k <= self.top_length else []
        rows = []
        for cls in sources:
            image = self.chevalley_multiply(cls)
            rows.append([image.coefficient(t.ordinal) for t in targets])
        matrix = IntMatrix.from_rows(
            rows,
            cols=len(targets),
            row_labels=[c.label for c in sources],
            col_labels=[c.label for c in targets],
        )
        self._euler[k] = matrix
        return matrix

    # Produkte

    def product_constants(self, u: SchubertClass, v: SchubertClass) -> Dict[WeylElement, int]:
        degree = u.degree + v.degree
        if degree > self.top_length:
            return {}
        a = {self.table.index_of(u.degree, u.ordinal): 1}
        b = {self.table.index_of(v.degree, v.ordinal): 1}
        result = self.engine.multiply(a, b, degree)
        return {self.table.rows[pos].element: c for pos, c in result.items()}

    def multiply(self, a: CohomElement, b: CohomElement) -> CohomElement:
        degree = a.degree + b.degree
        if a.overflow or b.overflow or degree > self.top_length:
            LOGGER.warning("%s: Produktgrad %s übersteigt %s", self.case_id, degree, self.top_length)
            return self.zero(degree, overflow=True)
        if a.degree == 0:
            return b.scaled(a.coefficient(1))
        if b.degree == 0:
            return a.scaled(b.coefficient(1))
        coeffs = self.engine.multiply(self._positions(a), self._positions(b), degree)
        return self._from_positions(coeffs, degree)

    def power(self, a: CohomElement, exponent: int) -> CohomElement:
        result = self.unit()
        for _ in range(exponent):
            result = self.multiply(result, a)
        return result

    def monomial_expand(
        self, exponents: Mapping[str, int], generators: Mapping[str, SchubertClass]
    ) -> CohomElement:
        """Entwickelt ein Monom in den Erzeugern y_d; Potenzen der Euler-Klasse laufen über A_k."""
        total = 0
        for name, power in exponents.items():
            if name not in generators:
                raise ValueError(f"Unbekannter Erzeuger {name!r} in {self.case_id}")
            if power < 0:
                raise ValueError(f"Negativer Exponent {power} für {name}")
            total += power * generators[name].degree
        if total > self.top_length:
            LOGGER.warning(
                "%s: Monom %s hat Grad %s > %s", self.case_id, monomial_label(exponents), total, self.top_length
            )
            return self.zero(total, overflow=True)

        euler_power = 0
        result = self.unit()
        ordered = sorted(exponents.items(), key=lambda item: (-generators[item[0]].degree, item[0]))
        for name, power in ordered:
            gen = generators[name]
            if gen.degree == 1 and self.table.excluded_node is not None:
                euler_power += power
                continue
            factor = self.element(gen)
            for _ in range(power):
                result = self.multiply(result, factor)
        for _ in range(euler_power):
            result = self.multiply_by_euler(result)
        return result

    def structure_matrix(
        self,
        basis: Sequence[Mapping[str, int]],
        generators: Mapping[str, SchubertClass],
        m: int,
    ) -> IntMatrix:
        """M(pi_m) kanonisch: Zeilen = Monome von B(2m), Spalten = Klassen vom Grad m."""
        targets = self.classes(m)
        rows: List[Tuple[int, ...]] = []
        for monomial in basis:
            degree = sum(p * generators[name].degree for name, p in monomial.items() if name in generators)
            if degree != m:
                raise ValueError(f"Monom {monomial_label(monomial)} hat Grad {degree}, erwartet {m}")
            expanded = self.monomial_expand(monomial, generators)
            rows.append(expanded.vector(len(targets)))
        LOGGER.debug("%s: M(pi_%s) mit %s Monomen berechnet", self.case_id, m, len(rows))
        return IntMatrix.from_rows(
            rows,
            cols=len(targets),
            row_labels=[monomial_label(mono) for mono in basis],
            col_labels=[c.label for c in targets],
        )

