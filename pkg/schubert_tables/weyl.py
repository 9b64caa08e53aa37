"""Wurzelsysteme, Weyl-Gruppenelemente und minimale Nebenklassenvertreter.

Elemente werden über ihre Wirkung auf die einfachen Wurzeln dargestellt: Spalte j der
Matrix ``action`` ist w(alpha_j) in Koordinaten der einfachen Wurzeln. Gleichheit von
Elementen ist Gleichheit dieser Matrizen, nie Gleichheit von Wörtern.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .constants import BOREL_SIZE_CAP, CARTAN_ROW_IS_ROOT, COSET_SIDE, ROOT_CLOSURE_CAP, WORD_ORDER

LOGGER = logging.getLogger(__name__)


class CartanMatrixError(ValueError):
    pass


class WeylError(ValueError):
    pass


class CosetLabelError(ValueError):
    def __init__(self, problems: Sequence[str]):
        self.problems = tuple(problems)
        super().__init__("; ".join(self.problems))


_EXCEPTIONAL: Dict[str, Tuple[Tuple[int, ...], ...]] = {
    "G2": ((2, -1), (-3, 2)),
    "F4": (
        (2, -1, 0, 0),
        (-1, 2, -2, 0),
        (0, -1, 2, -1),
        (0, 0, -1, 2),
    ),
    "E6": (
        (2, 0, -1, 0, 0, 0),
        (0, 2, 0, -1, 0, 0),
        (-1, 0, 2, -1, 0, 0),
        (0, -1, -1, 2, -1, 0),
        (0, 0, 0, -1, 2, -1),
        (0, 0, 0, 0, -1, 2),
    ),
    "E7": (
        (2, 0, -1, 0, 0, 0, 0),
        (0, 2, 0, -1, 0, 0, 0),
        (-1, 0, 2, -1, 0, 0, 0),
        (0, -1, -1, 2, -1, 0, 0),
        (0, 0, 0, -1, 2, -1, 0),
        (0, 0, 0, 0, -1, 2, -1),
        (0, 0, 0, 0, 0, -1, 2),
    ),
    "E8": (
        (2, 0, -1, 0, 0, 0, 0, 0),
        (0, 2, 0, -1, 0, 0, 0, 0),
        (-1, 0, 2, -1, 0, 0, 0, 0),
        (0, -1, -1, 2, -1, 0, 0, 0),
        (0, 0, 0, -1, 2, -1, 0, 0),
        (0, 0, 0, 0, -1, 2, -1, 0),
        (0, 0, 0, 0, 0, -1, 2, -1),
        (0, 0, 0, 0, 0, 0, -1, 2),
    ),
}

_CLASSICAL_MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 3}
_LABEL_PATTERN = re.compile(r"^([A-G])(\d+)$")


@dataclass(frozen=True)
class CartanMatrix:
    label: str
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        entries = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", entries)
        n = len(entries)
        if n == 0:
            raise CartanMatrixError("Cartan-Matrix ohne Zeilen")
        for i, row in enumerate(entries):
            if len(row) != n:
                raise CartanMatrixError(f"Zeile {i + 1} hat {len(row)} Einträge, erwartet {n}")
            if row[i] != 2:
                raise CartanMatrixError(f"Diagonaleintrag C[{i + 1}][{i + 1}] = {row[i]}, erwartet 2")
            for j, value in enumerate(row):
                if i == j:
                    continue
                if value > 0:
                    raise CartanMatrixError(f"C[{i + 1}][{j + 1}] = {value} ist positiv")
                if (value == 0) != (entries[j][i] == 0):
                    raise CartanMatrixError(f"C[{i + 1}][{j + 1}] und C[{j + 1}][{i + 1}] nicht beide null")

    @property
    def n(self) -> int:
        return len(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    def transpose(self) -> "CartanMatrix":
        return CartanMatrix(f"{self.label}^T", tuple(zip(*self.entries)))

    def pairing_matrix(self) -> np.ndarray:
        """P[i, j] = <alpha_j, alpha_i^vee>."""
        C = self.as_array()
        return C.T.copy() if CARTAN_ROW_IS_ROOT else C


def _classical_entries(kind: str, n: int) -> List[List[int]]:
    C = [[0] * n for _ in range(n)]
    for i in range(n):
        C[i][i] = 2
    for i in range(n - 1):
        C[i][i + 1] = C[i + 1][i] = -1
    if kind == "B":
        C[n - 2][n - 1] = -2
    elif kind == "C":
        C[n - 1][n - 2] = -2
    elif kind == "D":
        C[n - 2][n - 1] = C[n - 1][n - 2] = 0
        C[n - 3][n - 1] = C[n - 1][n - 3] = -1
    return C


def cartan_matrix(label: str) -> CartanMatrix:
    normalized = label.strip().upper().replace("_", "")
    if normalized in _EXCEPTIONAL:
        return CartanMatrix(normalized, _EXCEPTIONAL[normalized])
    match = _LABEL_PATTERN.match(normalized)
    if not match or match.group(1) not in _CLASSICAL_MIN_RANK:
        raise CartanMatrixError(f"Unbekannter Typ: {label!r}")
    kind, n = match.group(1), int(match.group(2))
    if n < _CLASSICAL_MIN_RANK[kind]:
        raise CartanMatrixError(f"Typ {kind} braucht Rang >= {_CLASSICAL_MIN_RANK[kind]}, nicht {n}")
    return CartanMatrix(normalized, tuple(tuple(row) for row in _classical_entries(kind, n)))


@dataclass(frozen=True)
class Root:
    root_coords: Tuple[int, ...]
    coroot_coords: Tuple[int, ...]

    @property
    def height(self) -> int:
        return sum(self.root_coords)

    @property
    def is_positive(self) -> bool:
        return any(c > 0 for c in self.root_coords)

    def __neg__(self) -> "Root":
        return Root(tuple(-c for c in self.root_coords), tuple(-c for c in self.coroot_coords))


def reflect(C: CartanMatrix, i: int, v: Sequence[int], basis: str = "root") -> Tuple[int, ...]:
    if not 1 <= i <= C.n:
        raise WeylError(f"Spiegelung s_{i} existiert nicht in Rang {C.n}")
    P = C.pairing_matrix()
    k = i - 1
    if basis == "root":
        pairing = sum(int(v[j]) * int(P[k, j]) for j in range(C.n))
    elif basis == "coroot":
        pairing = sum(int(v[j]) * int(P[j, k]) for j in range(C.n))
    else:
        raise ValueError(f"Unbekannte Basis: {basis!r}")
    out = [int(x) for x in v]
    out[k] -= pairing
    return tuple(out)


@lru_cache(maxsize=64)
def positive_roots(C: CartanMatrix) -> Tuple[Root, ...]:
    n = C.n
    unit = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    roots = [Root(u, u) for u in unit]
    seen = {r.root_coords for r in roots}
    cursor = 0
    while cursor < len(roots):
        root = roots[cursor]
        cursor += 1
        for i in range(1, n + 1):
            image = reflect(C, i, root.root_coords)
            if any(c < 0 for c in image) or image in seen:
                continue
            seen.add(image)
            roots.append(Root(image, reflect(C, i, root.coroot_coords, basis="coroot")))
            if len(roots) > ROOT_CLOSURE_CAP:
                raise CartanMatrixError(
                    f"Wurzelabschluss von {C.label} bricht nach {ROOT_CLOSURE_CAP} Wurzeln nicht ab"
                )
    return tuple(roots)


class RootSystem:
    """Gecachte Matrizen zu einer Cartan-Matrix."""

    def __init__(self, cartan: CartanMatrix):
        self.cartan = cartan
        self.n = cartan.n
        self.pairings = cartan.pairing_matrix()
        self.roots = positive_roots(cartan)
        self.root_matrix = np.array([r.root_coords for r in self.roots], dtype=np.int64).T
        self.root_index = {r.root_coords: k for k, r in enumerate(self.roots)}
        self.identity = np.eye(self.n, dtype=np.int64)
        self.simple_reflections = tuple(self._simple_reflection(i) for i in range(self.n))
        self.reflections = tuple(self.reflection_matrix(r) for r in self.roots)

    def _simple_reflection(self, i: int) -> np.ndarray:
        S = self.identity.copy()
        S[i, :] -= self.pairings[i, :]
        return S

    def reflection_matrix(self, root: Root) -> np.ndarray:
        beta = np.array(root.root_coords, dtype=np.int64)
        pairing = np.array(root.coroot_coords, dtype=np.int64) @ self.pairings
        return self.identity - np.outer(beta, pairing)


@lru_cache(maxsize=64)
def root_system(C: CartanMatrix) -> RootSystem:
    return RootSystem(C)


@dataclass(frozen=True)
class WeylWord:
    letters: Tuple[int, ...]

    def __post_init__(self) -> None:
        letters = tuple(int(x) for x in self.letters)
        if any(x < 1 for x in letters):
            raise WeylError(f"Ungültige Buchstaben in {list(letters)}")
        object.__setattr__(self, "letters", letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self) -> str:
        return str(list(self.letters))

    def reversed(self) -> "WeylWord":
        return WeylWord(self.letters[::-1])

    def check_rank(self, n: int) -> "WeylWord":
        """Wort für eine Gruppe vom Rang n: alle Buchstaben in 1..n."""
        for letter in self.letters:
            if letter > n:
                raise WeylError(f"Buchstabe {letter} außerhalb von 1..{n}")
        return self


@dataclass(frozen=True, eq=False)
class WeylElement:
    system: RootSystem = field(repr=False)
    action: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.action.setflags(write=False)

    @cached_property
    def key(self) -> bytes:
        return self.action.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.system.cartan == other.system.cartan and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"WeylElement({self.system.cartan.label}, {self.canonical_word})"

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(self.system, self.action @ other.action)

    @cached_property
    def length(self) -> int:
        images = self.action @ self.system.root_matrix
        return int(np.count_nonzero((images < 0).any(axis=0)))

    @property
    def is_identity(self) -> bool:
        return self.length == 0

    def _check_letter(self, i: int) -> None:
        if not 1 <= i <= self.system.n:
            raise WeylError(f"Buchstabe {i} außerhalb von 1..{self.system.n}")

    def left_multiply(self, i: int) -> "WeylElement":
        self._check_letter(i)
        return WeylElement(self.system, self.system.simple_reflections[i - 1] @ self.action)

    def right_multiply(self, i: int) -> "WeylElement":
        self._check_letter(i)
        return WeylElement(self.system, self.action @ self.system.simple_reflections[i - 1])

    def right_descents(self) -> Tuple[int, ...]:
        negative = (self.action < 0).any(axis=0)
        return tuple(int(i) + 1 for i in np.flatnonzero(negative))

    def left_descents(self) -> Tuple[int, ...]:
        return tuple(
            i for i in range(1, self.system.n + 1) if self.left_multiply(i).length < self.length
        )

    @cached_property
    def canonical_word(self) -> WeylWord:
        letters: List[int] = []
        current = self
        while current.length > 0:
            first = current.left_descents()[0]
            letters.append(first)
            current = current.left_multiply(first)
        return WeylWord(tuple(letters))

    @cached_property
    def inverse(self) -> "WeylElement":
        action = self.system.identity
        for letter in reversed(self.canonical_word.letters):
            action = action @ self.system.simple_reflections[letter - 1]
        return WeylElement(self.system, action)

    def times_reflection(self, root_position: int) -> "WeylElement":
        """w * s_beta für die positive Wurzel mit Index root_position."""
        return WeylElement(self.system, self.action @ self.system.reflections[root_position])


def identity_element(C: CartanMatrix) -> WeylElement:
    system = root_system(C)
    return WeylElement(system, system.identity.copy())


def element_of(word: Union[WeylWord, Iterable[int]], C: CartanMatrix) -> WeylElement:
    letters = (word if isinstance(word, WeylWord) else WeylWord(tuple(word))).check_rank(C.n).letters
    if WORD_ORDER == "right-to-left":
        letters = letters[::-1]
    system = root_system(C)
    action = system.identity.copy()
    for letter in letters:
        action = action @ system.simple_reflections[letter - 1]
    return WeylElement(system, action)


def coset_element(word: Union[WeylWord, Iterable[int]], C: CartanMatrix) -> WeylElement:
    """Element zu einem Tabellenwort, unter Berücksichtigung der Nebenklassenseite."""
    element = element_of(word, C)
    return element.inverse if COSET_SIDE == "left" else element


def length(e: WeylElement) -> int:
    return e.length


def reduced_words(e: WeylElement, limit: int = 16) -> List[WeylWord]:
    """Bis zu ``limit`` reduzierte Wörter von e, lexikographisch aufsteigend."""
    found: List[WeylWord] = []

    def walk(current: WeylElement, prefix: Tuple[int, ...]) -> None:
        if len(found) >= limit:
            return
        if current.length == 0:
            found.append(WeylWord(prefix))
            return
        for letter in current.left_descents():
            walk(current.left_multiply(letter), prefix + (letter,))
            if len(found) >= limit:
                return

    walk(e, ())
    return found


def bruhat_leq(u: WeylElement, w: WeylElement) -> bool:
    """Bruhat-Vergleich u <= w über die Lifting-Eigenschaft."""
    while True:
        if u.length > w.length:
            return False
        if u.length == 0:
            return True
        if u.length == w.length:
            return u == w
        descent = w.right_descents()[0]
        w = w.right_multiply(descent)
        if descent in u.right_descents():
            u = u.right_multiply(descent)


@dataclass(frozen=True)
class CosetRow:
    degree: int
    ordinal: int
    word: WeylWord
    element: WeylElement

    @property
    def label(self) -> str:
        return f"s{self.degree},{self.ordinal}"


class CosetTable:
    def __init__(
        self,
        case_id: str,
        cartan: CartanMatrix,
        excluded_node: Optional[int],
        rows: Sequence[CosetRow],
    ):
        self.case_id = case_id
        self.cartan = cartan
        self.excluded_node = excluded_node
        self.rows: Tuple[CosetRow, ...] = tuple(sorted(rows, key=lambda r: (r.degree, r.ordinal)))
        self._index = {row.element.key: pos for pos, row in enumerate(self.rows)}
        self._labels = {(row.degree, row.ordinal): pos for pos, row in enumerate(self.rows)}
        grouped: Dict[int, List[CosetRow]] = {}
        for row in self.rows:
            grouped.setdefault(row.degree, []).append(row)
        self._by_degree = {k: tuple(v) for k, v in grouped.items()}

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def system(self) -> RootSystem:
        return root_system(self.cartan)

    @property
    def top_length(self) -> int:
        return max(self._by_degree)

    def by_degree(self, k: int) -> Tuple[CosetRow, ...]:
        return self._by_degree.get(k, ())

    def count(self, k: int) -> int:
        return len(self.by_degree(k))

    def degree_counts(self) -> Dict[int, int]:
        return {k: len(v) for k, v in sorted(self._by_degree.items())}

    def lookup(self, element: WeylElement) -> Optional[CosetRow]:
        pos = self._index.get(element.key)
        return None if pos is None else self.rows[pos]

    def position(self, element: WeylElement) -> Optional[int]:
        return self._index.get(element.key)

    def index_of(self, degree: int, ordinal: int) -> int:
        try:
            return self._labels[(degree, ordinal)]
        except KeyError:
            raise KeyError(f"Klasse s{degree},{ordinal} existiert nicht in {self.case_id}") from None

    def row(self, degree: int, ordinal: int) -> CosetRow:
        return self.rows[self.index_of(degree, ordinal)]

    def is_minimal(self, element: WeylElement) -> bool:
        return _is_minimal(element, self.excluded_node)

    def relabel(self, labels: Mapping[Tuple[int, int], Sequence[int]]) -> "CosetTable":
        """Übernimmt die Nummerierung (Grad, Ordinal) -> Wort einer Tabelle."""
        problems: List[str] = []
        rows: List[CosetRow] = [row for row in self.rows if row.degree == 0]
        claimed: Dict[bytes, Tuple[int, int]] = {}
        for (degree, ordinal), word in sorted(labels.items()):
            tag = f"w{degree},{ordinal}"
            try:
                element = coset_element(word, self.cartan)
            except WeylError as exc:
                problems.append(f"{tag}: {exc}")
                continue
            if element.length != degree:
                problems.append(f"{tag}: Wort {list(word)} nicht reduziert (Länge {element.length})")
                continue
            if not self.is_minimal(element):
                problems.append(f"{tag}: {list(word)} ist kein minimaler Vertreter")
                continue
            if element.key in claimed:
                other = claimed[element.key]
                problems.append(f"{tag}: gleiches Element wie w{other[0]},{other[1]}")
                continue
            if self.lookup(element) is None:
                problems.append(f"{tag}: Element fehlt in der Aufzählung")
                continue
            claimed[element.key] = (degree, ordinal)
            rows.append(CosetRow(degree, ordinal, WeylWord(tuple(word)), element))
        for degree, count in self.degree_counts().items():
            if degree == 0:
                continue
            ordinals = sorted(o for (d, o) in labels if d == degree)
            if ordinals != list(range(1, count + 1)):
                problems.append(f"Grad {degree}: Ordinale {ordinals}, erwartet 1..{count}")
        extra = sorted({d for (d, _) in labels} - set(self.degree_counts()))
        if extra:
            problems.append(f"Grade ohne Nebenklassen: {extra}")
        if problems:
            raise CosetLabelError(problems)
        return CosetTable(self.case_id, self.cartan, self.excluded_node, rows)


def _is_minimal(element: WeylElement, excluded_node: Optional[int]) -> bool:
    if excluded_node is None:
        return True
    return all(d == excluded_node for d in element.right_descents())


def _normalize_node(C: CartanMatrix, excluded_node) -> Optional[int]:
    if excluded_node is None:
        return None
    if isinstance(excluded_node, (list, tuple, set, frozenset)):
        nodes = sorted(excluded_node)
        if len(nodes) != 1:
            raise WeylError(f"Nur ein ausgeschlossener Knoten wird unterstützt, nicht {nodes}")
        excluded_node = nodes[0]
    node = int(excluded_node)
    if not 1 <= node <= C.n:
        raise WeylError(f"Knoten {node} außerhalb von 1..{C.n}")
    return node


def minimal_coset_reps(
    C: CartanMatrix,
    excluded_node: Union[int, Sequence[int], None],
    case_id: Optional[str] = None,
) -> CosetTable:
    """Breitensuche nach Länge über die minimalen Vertreter von W/W_H.

    ``excluded_node=None`` ist der Borel-Fall (ganz W), nur für kleine Gruppen.
    """
    node = _normalize_node(C, excluded_node)
    case_id = case_id or f"{C.label}:{node if node is not None else 'borel'}"
    start = identity_element(C)
    levels: List[List[WeylElement]] = [[start]]
    total = 1
    while True:
        target = len(levels)
        found: Dict[bytes, WeylElement] = {}
        rejected = set()
        for w in levels[-1]:
            for i in range(1, C.n + 1):
                candidate = w.left_multiply(i)
                key = candidate.key
                if key in found or key in rejected:
                    continue
                if candidate.length != target or not _is_minimal(candidate, node):
                    rejected.add(key)
                    continue
                found[key] = candidate
        if not found:
            break
        level = sorted(found.values(), key=lambda el: el.canonical_word.letters)
        levels.append(level)
        total += len(level)
        if node is None and total > BOREL_SIZE_CAP:
            raise WeylError(f"Borel-Fall von {C.label} übersteigt {BOREL_SIZE_CAP} Elemente")
    rows = [
        CosetRow(degree, ordinal, el.canonical_word, el)
        for degree, level in enumerate(levels)
        for ordinal, el in enumerate(level, start=1)
    ]
    LOGGER.debug("%s: %s Nebenklassen, oberste Länge %s", case_id, total, len(levels) - 1)
    return CosetTable(case_id, C, node, rows)
