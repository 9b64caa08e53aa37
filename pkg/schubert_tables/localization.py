"""Lokalisierung äquivarianter Schubert-Klassen an Fixpunkten und GKM-Dreieckslösung.

Zwei Auswertungsarten teilen dieselbe Rekursion
``xi^v(s_i w) = s_i xi^v(w) + [s_i v < v] * alpha_i * s_i xi^{s_i v}(w)``:

* ``point``: alle Werte an einem generischen ganzzahligen Punkt (alpha_k = 1), der
  mit den Spiegelungen mitgeführt wird; exakte Division ganzer Zahlen.
* ``symbolic``: Werte als Polynome in den einfachen Wurzeln (``RootPolynomial``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import ZZ
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyElement, ring

from .constants import DEFAULT_CACHE_SIZE, LOCALIZATION_MODES
from .weyl import CosetTable, WeylElement, WeylError, WeylWord, bruhat_leq

LOGGER = logging.getLogger(__name__)


class InexactDivisionError(ArithmeticError):
    pass


@lru_cache(maxsize=16)
def polynomial_ring(n: int):
    R, *gens = ring(",".join(f"a{k}" for k in range(1, n + 1)), ZZ)
    return R, tuple(gens)


@dataclass(frozen=True, eq=False)
class RootPolynomial:
    n: int
    poly: PolyElement

    @classmethod
    def zero(cls, n: int) -> "RootPolynomial":
        return cls(n, polynomial_ring(n)[0].zero)

    @classmethod
    def one(cls, n: int) -> "RootPolynomial":
        return cls(n, polynomial_ring(n)[0].one)

    @classmethod
    def from_root(cls, coords: Sequence[int]) -> "RootPolynomial":
        n = len(coords)
        R, gens = polynomial_ring(n)
        poly = R.zero
        for c, g in zip(coords, gens):
            if c:
                poly += int(c) * g
        return cls(n, poly)

    @property
    def terms(self) -> Dict[Tuple[int, ...], int]:
        return {monom: int(coeff) for monom, coeff in self.poly.terms()}

    @property
    def is_zero(self) -> bool:
        return not self.poly

    @property
    def degree(self) -> Optional[int]:
        if self.is_zero:
            return None
        degrees = {sum(monom) for monom in self.terms}
        if len(degrees) != 1:
            raise ValueError(f"Polynom nicht homogen: {self.poly}")
        return degrees.pop()

    def constant(self) -> int:
        if self.is_zero:
            return 0
        if self.degree != 0:
            raise ValueError(f"Polynom ist nicht konstant: {self.poly}")
        return self.terms[(0,) * self.n]

    def _coerce(self, other) -> PolyElement:
        if isinstance(other, RootPolynomial):
            return other.poly
        return self.poly.ring(int(other))

    def __add__(self, other) -> "RootPolynomial":
        return RootPolynomial(self.n, self.poly + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "RootPolynomial":
        return RootPolynomial(self.n, self.poly - self._coerce(other))

    def __rsub__(self, other) -> "RootPolynomial":
        return RootPolynomial(self.n, self._coerce(other) - self.poly)

    def __mul__(self, other) -> "RootPolynomial":
        return RootPolynomial(self.n, self.poly * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> "RootPolynomial":
        return RootPolynomial(self.n, -self.poly)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RootPolynomial):
            return self.poly == other.poly
        if isinstance(other, int):
            return self.poly == self.poly.ring(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.poly)

    def __bool__(self) -> bool:
        return not self.is_zero

    def __repr__(self) -> str:
        return f"RootPolynomial({self.poly})"

    def exquo(self, other: "RootPolynomial") -> "RootPolynomial":
        try:
            return RootPolynomial(self.n, self.poly.exquo(self._coerce(other)))
        except (ExactQuotientFailed, ZeroDivisionError) as exc:
            raise InexactDivisionError(f"{self.poly} ist nicht durch {other} teilbar") from exc

    def reflect(self, i: int, pairings) -> "RootPolynomial":
        """Wendet s_i an: a_k -> a_k - P[i][k] * a_i (gleichzeitig)."""
        if self.is_zero:
            return self
        _, gens = polynomial_ring(self.n)
        k0 = i - 1
        substitution = [
            (gens[k], gens[k] - int(pairings[k0][k]) * gens[k0])
            for k in range(self.n)
            if int(pairings[k0][k])
        ]
        return RootPolynomial(self.n, self.poly.compose(substitution))

    def evaluate(self, point: Sequence[int]) -> int:
        total = 0
        for monom, coeff in self.terms.items():
            term = coeff
            for value, exponent in zip(point, monom):
                if exponent:
                    term *= int(value) ** exponent
            total += term
        return total


def billey_restriction(
    u: WeylElement, x: WeylElement, word: Optional[WeylWord] = None
) -> RootPolynomial:
    """xi^u(x) als Summe über reduzierte Teilwörter eines reduzierten Worts von x."""
    letters = x.canonical_word.letters if word is None else word.letters
    return _billey(u, x, letters)


def _billey(u: WeylElement, x: WeylElement, letters: Tuple[int, ...]) -> RootPolynomial:
    system = x.system
    n = system.n
    WeylWord(letters).check_rank(n)
    if len(letters) != x.length:
        raise WeylError(f"Wort {list(letters)} ist nicht reduziert für ein Element der Länge {x.length}")
    roots: List[RootPolynomial] = []
    prefix = system.identity
    for letter in letters:
        roots.append(RootPolynomial.from_root(prefix[:, letter - 1].tolist()))
        prefix = prefix @ system.simple_reflections[letter - 1]
    if prefix.tobytes() != x.key:
        raise WeylError(f"Wort {list(letters)} ergibt nicht das gegebene Element")
    if u.length > x.length:
        return RootPolynomial.zero(n)

    start = WeylElement(system, system.identity.copy())
    states: Dict[bytes, Tuple[WeylElement, RootPolynomial]] = {start.key: (start, RootPolynomial.one(n))}
    for letter, root in zip(letters, roots):
        merged = dict(states)
        for y, weight in states.values():
            z = y.right_multiply(letter)
            if z.length != y.length + 1 or z.length > u.length or not bruhat_leq(z, u):
                continue
            value = weight * root
            if z.key in merged:
                value = merged[z.key][1] + value
            merged[z.key] = (z, value)
        states = merged
    hit = states.get(u.key)
    return hit[1] if hit else RootPolynomial.zero(n)


Value = Union[int, RootPolynomial]


class LocalizationEngine:
    """Restriktionsvektoren aller Klassen einer Nebenklassentabelle und GKM-Lösung."""

    def __init__(self, table: CosetTable, mode: str = "point", cache_size: int = DEFAULT_CACHE_SIZE):
        if mode not in LOCALIZATION_MODES:
            raise ValueError(f"Unbekannter Lokalisierungsmodus: {mode!r}")
        self.table = table
        self.mode = mode
        self.system = table.system
        self.n = self.system.n
        self._pairings = self.system.pairings.tolist()
        self._down: Dict[int, Dict[int, int]] = {i: {} for i in range(1, self.n + 1)}
        for pos, row in enumerate(table.rows):
            for letter in row.element.left_descents():
                target = table.position(row.element.left_multiply(letter))
                if target is None:
                    raise WeylError(f"{row.label}: s_{letter}·w fehlt in der Tabelle")
                self._down[letter][pos] = target
        self.restrictions = lru_cache(maxsize=cache_size)(self._compute_restrictions)
        self.billey = lru_cache(maxsize=cache_size)(self._compute_billey)

    def cache_info(self):
        return self.restrictions.cache_info()

    def _compute_billey(self, v: int, w: int) -> RootPolynomial:
        """xi^v(w) nach der Teilwortformel, unabhängig vom Modus."""
        rows = self.table.rows
        return billey_restriction(rows[v].element, rows[w].element)

    def zero(self) -> Value:
        return 0 if self.mode == "point" else RootPolynomial.zero(self.n)

    def _reflect_point(self, point: List[int], letter: int) -> List[int]:
        k0 = letter - 1
        row = self._pairings[k0]
        pivot = point[k0]
        return [value - row[k] * pivot for k, value in enumerate(point)]

    def _compute_restrictions(self, pos: int) -> Tuple[Value, ...]:
        """Vektor (xi^v(w))_v für w = table.rows[pos]."""
        letters = self.table.rows[pos].element.canonical_word.letters
        size = len(self.table)
        if self.mode == "point":
            points = [[1] * self.n]
            for letter in letters:
                points.append(self._reflect_point(points[-1], letter))
            values: List[Value] = [0] * size
            values[0] = 1
            for j in range(len(letters) - 1, -1, -1):
                letter = letters[j]
                beta = points[j][letter - 1]
                updated = list(values)
                for v, dv in self._down[letter].items():
                    if values[dv]:
                        updated[v] = values[v] + beta * values[dv]
                values = updated
            return tuple(values)

        values = [RootPolynomial.zero(self.n)] * size
        values[0] = RootPolynomial.one(self.n)
        for letter in reversed(letters):
            alpha = RootPolynomial.from_root([1 if k == letter - 1 else 0 for k in range(self.n)])
            reflected = [value.reflect(letter, self._pairings) for value in values]
            updated = list(reflected)
            for v, dv in self._down[letter].items():
                if reflected[dv]:
                    updated[v] = reflected[v] + alpha * reflected[dv]
            values = updated
        return tuple(values)

    def restriction(self, v: int, w: int) -> Value:
        return self.restrictions(w)[v]

    def evaluate(self, coeffs: Mapping[int, int], w: int) -> Value:
        """Wert der Kombination sum c_v xi^v an der Stelle w."""
        xi = self.restrictions(w)
        total = self.zero()
        for v, c in coeffs.items():
            if c and xi[v]:
                total = total + xi[v] * c
        return total

    def _divide(self, numerator: Value, denominator: Value) -> Value:
        if self.mode == "point":
            q, r = divmod(numerator, denominator)
            if r:
                raise InexactDivisionError(f"{numerator} ist nicht durch {denominator} teilbar")
            return q
        return numerator.exquo(denominator)

    def solve(self, values: Callable[[int], Value], degree: int) -> Dict[int, int]:
        """GKM-Dreieckslösung: Koeffizienten der Grad-``degree``-Klassen einer Klasse mit Lokalisierung ``values``."""
        if degree > self.table.top_length:
            return {}
        coefficients: Dict[int, Value] = {}
        for w, row in enumerate(self.table.rows):
            if row.degree > degree:
                break
            xi = self.restrictions(w)
            remainder = values(w)
            for x, p in coefficients.items():
                if xi[x]:
                    remainder = remainder - p * xi[x]
            if not remainder:
                continue
            coefficients[w] = self._divide(remainder, xi[w])
        result: Dict[int, int] = {}
        for x, p in coefficients.items():
            if self.table.rows[x].degree == degree:
                result[x] = p if self.mode == "point" else p.constant()
            elif self.mode == "symbolic" and p.degree is not None and p.degree != degree - self.table.rows[x].degree:
                raise InexactDivisionError(f"Koeffizient an {self.table.rows[x].label} hat falschen Grad")
        return {x: c for x, c in sorted(result.items()) if c}

    def multiply(self, a: Mapping[int, int], b: Mapping[int, int], degree: int) -> Dict[int, int]:
        """Produkt zweier homogener Kombinationen (Positionen -> Koeffizient)."""
        if not a or not b:
            return {}

        def product_at(w: int) -> Value:
            left = self.evaluate(a, w)
            if not left:
                return self.zero()
            return left * self.evaluate(b, w)

        return self.solve(product_at, degree)
