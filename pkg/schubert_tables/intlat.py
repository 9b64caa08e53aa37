"""Exakte ganzzahlige lineare Algebra: Smith- und Hermite-Normalform, Kerne, Kokerne."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

LOGGER = logging.getLogger(__name__)

Vector = Tuple[int, ...]


class SmithFormError(ArithmeticError):
    pass


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: Tuple[Vector, ...]
    row_labels: Tuple[str, ...] = ()
    col_labels: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        entries = tuple(tuple(int(x) for x in row) for row in self.entries)
        if len(entries) != self.rows or any(len(row) != self.cols for row in entries):
            raise ValueError(f"Einträge passen nicht zu {self.rows}x{self.cols}")
        object.__setattr__(self, "entries", entries)
        row_labels = tuple(self.row_labels) or tuple(f"r{i + 1}" for i in range(self.rows))
        col_labels = tuple(self.col_labels) or tuple(f"c{j + 1}" for j in range(self.cols))
        if len(row_labels) != self.rows or len(col_labels) != self.cols:
            raise ValueError("Anzahl der Beschriftungen passt nicht zu den Dimensionen")
        object.__setattr__(self, "row_labels", row_labels)
        object.__setattr__(self, "col_labels", col_labels)

    @classmethod
    def from_rows(
        cls,
        rows: Iterable[Iterable[int]],
        cols: Optional[int] = None,
        row_labels: Sequence[str] = (),
        col_labels: Sequence[str] = (),
    ) -> "IntMatrix":
        entries = tuple(tuple(int(x) for x in row) for row in rows)
        if cols is None:
            if not entries:
                raise ValueError("Spaltenzahl einer leeren Matrix muss angegeben werden")
            cols = len(entries[0])
        return cls(len(entries), cols, entries, tuple(row_labels), tuple(col_labels))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows(_identity(n), cols=n)

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i][j]

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.entries)

    def to_list(self) -> List[List[int]]:
        return [list(row) for row in self.entries]

    def transpose(self) -> "IntMatrix":
        entries = tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols))
        return IntMatrix(self.cols, self.rows, entries, self.col_labels, self.row_labels)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"{self.rows}x{self.cols} mal {other.rows}x{other.cols} nicht definiert")
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(map(tuple, _matmul(self.entries, other.entries, other.cols))),
            self.row_labels,
            other.col_labels,
        )

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)


def _identity(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], cols: int) -> List[List[int]]:
    out = []
    for row in A:
        acc = [0] * cols
        for k, a in enumerate(row):
            if a:
                for j, b in enumerate(B[k]):
                    if b:
                        acc[j] += a * b
        out.append(acc)
    return out


@dataclass(frozen=True)
class SNFResult:
    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    V_inverse: IntMatrix

    @property
    def diagonal(self) -> Vector:
        return tuple(self.S[i, i] for i in range(min(self.S.rows, self.S.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def invariant_factors(self) -> Vector:
        return tuple(d for d in self.diagonal if d != 0)


def smith_normal_form(M: IntMatrix) -> SNFResult:
    """U·M·V = S mit Pivot minimalen Betrags (bei Gleichstand kleinster Zeilen-, dann Spaltenindex)."""
    m, n = M.rows, M.cols
    A = [list(row) for row in M.entries]
    U = _identity(m)
    V = _identity(n)
    Vi = _identity(n)

    def swap_rows(i: int, j: int) -> None:
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        if i != j:
            for mat in (A, V):
                for row in mat:
                    row[i], row[j] = row[j], row[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(target: int, source: int, q: int) -> None:
        # Zeile target -= q * Zeile source
        for mat in (A, U):
            src, dst = mat[source], mat[target]
            for k, value in enumerate(src):
                if value:
                    dst[k] -= q * value

    def add_col(target: int, source: int, q: int) -> None:
        # Spalte target -= q * Spalte source
        for mat in (A, V):
            for row in mat:
                if row[source]:
                    row[target] -= q * row[source]
        src, dst = Vi[target], Vi[source]
        for k, value in enumerate(src):
            if value:
                dst[k] += q * value

    t = 0
    while t < min(m, n):
        candidates = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not candidates:
            break
        _, pi, pj = min(candidates)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            pivot = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // pivot)
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // pivot)
            leftovers = [(abs(A[i][t]), 0, i) for i in range(t + 1, m) if A[i][t]]
            leftovers += [(abs(A[t][j]), 1, j) for j in range(t + 1, n) if A[t][j]]
            if leftovers:
                _, axis, index = min(leftovers)
                if axis == 0:
                    swap_rows(t, index)
                else:
                    swap_cols(t, index)
                continue
            offender = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % pivot),
                None,
            )
            if offender is None:
                break
            add_row(t, offender, -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    result = SNFResult(
        U=IntMatrix.from_rows(U, cols=m),
        S=IntMatrix.from_rows(A, cols=n),
        V=IntMatrix.from_rows(V, cols=n),
        V_inverse=IntMatrix.from_rows(Vi, cols=n),
    )
    _check_factorization(M, result)
    return result


def _check_factorization(M: IntMatrix, result: SNFResult) -> None:
    product = _matmul(_matmul(result.U.entries, M.entries, M.cols), result.V.entries, M.cols)
    if [list(r) for r in result.S.entries] != product:
        raise SmithFormError("U·M·V stimmt nicht mit S überein")
    if _matmul(result.V.entries, result.V_inverse.entries, M.cols) != _identity(M.cols):
        raise SmithFormError("V·V^-1 ist nicht die Einheitsmatrix")
    S = result.S
    diagonal = result.diagonal
    for i in range(S.rows):
        for j in range(S.cols):
            if i != j and S[i, j]:
                raise SmithFormError(f"S[{i + 1}][{j + 1}] = {S[i, j]} außerhalb der Diagonale")
    for a, b in zip(diagonal, diagonal[1:]):
        if (a == 0 and b != 0) or (a and b % a):
            raise SmithFormError(f"Teilerkette verletzt: {diagonal}")


def hermite_normal_form(rows: Iterable[Sequence[int]], dim: int) -> Tuple[Vector, ...]:
    """Zeilen-Hermite-Form: Stufenform, positive Pivots, Einträge darüber in [0, Pivot)."""
    A = [list(int(x) for x in row) for row in rows]
    for row in A:
        if len(row) != dim:
            raise ValueError(f"Zeile der Länge {len(row)}, erwartet {dim}")
    m = len(A)
    r = 0
    for c in range(dim):
        if r == m:
            break
        while True:
            nonzero = [i for i in range(r, m) if A[i][c]]
            if not nonzero:
                break
            p = min(nonzero, key=lambda i: (abs(A[i][c]), i))
            A[r], A[p] = A[p], A[r]
            done = True
            for i in range(r + 1, m):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
        r += 1
    return tuple(tuple(row) for row in A[:r])


@dataclass(frozen=True)
class LatticeBasis:
    dim: int
    rows: Tuple[Vector, ...]

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], dim: int) -> "LatticeBasis":
        return cls(dim, hermite_normal_form(rows, dim))

    @property
    def rank(self) -> int:
        return len(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def as_matrix(self) -> IntMatrix:
        return IntMatrix.from_rows(self.rows, cols=self.dim)


def kernel_basis(M: IntMatrix, side: str = "right") -> LatticeBasis:
    """Saturierter Kern: rechts {x : M x = 0}, links {x : x M = 0}."""
    if side == "left":
        M = M.transpose()
    elif side != "right":
        raise ValueError(f"Unbekannte Seite: {side!r}")
    snf = smith_normal_form(M)
    V = snf.V
    vectors = [V.column(j) for j in range(snf.rank, M.cols)]
    return LatticeBasis.from_rows(vectors, M.cols)


def balanced_residue(value: int, modulus: int) -> int:
    """Vertreter von value mod modulus im Bereich (-d/2, d/2]."""
    r = value % modulus
    if r > modulus // 2:
        r -= modulus
    return r


@dataclass(frozen=True)
class CokerPresentation:
    """Z^ambient_rank / Zeilenraum(relations) als Summe zyklischer Gruppen."""

    ambient_rank: int
    invariant_factors: Vector
    generators: Tuple[Vector, ...]
    reduce_columns: Tuple[Vector, ...]
    relations: IntMatrix

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d == 0)

    @property
    def torsion(self) -> Vector:
        return tuple(d for d in self.invariant_factors if d)

    @property
    def order(self) -> Optional[int]:
        if self.free_rank:
            return None
        order = 1
        for d in self.torsion:
            order *= d
        return order

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    @property
    def is_cyclic(self) -> bool:
        return len(self.invariant_factors) == 1

    def describe(self) -> str:
        if self.is_trivial:
            return "0"
        return " + ".join("Z" if d == 0 else f"Z_{d}" for d in self.invariant_factors)


def cokernel(M: IntMatrix) -> CokerPresentation:
    snf = smith_normal_form(M)
    diagonal = snf.diagonal
    factors: List[int] = []
    generators: List[Vector] = []
    columns: List[Vector] = []
    for i in range(M.cols):
        d = diagonal[i] if i < len(diagonal) else 0
        if d == 1:
            continue
        factors.append(d)
        generators.append(snf.V_inverse.row(i))
        columns.append(snf.V.column(i))
    return CokerPresentation(M.cols, tuple(factors), tuple(generators), tuple(columns), M)


def reduce_mod(v: Sequence[int], P: CokerPresentation) -> Vector:
    if len(v) != P.ambient_rank:
        raise ValueError(f"Vektor der Länge {len(v)}, erwartet {P.ambient_rank}")
    out = []
    for d, column in zip(P.invariant_factors, P.reduce_columns):
        c = sum(int(a) * b for a, b in zip(v, column))
        out.append(balanced_residue(c, d) if d else c)
    return tuple(out)


def express_in(v: Sequence[int], target: Sequence[int], P: CokerPresentation) -> Optional[int]:
    """Koeffizient k mit [v] = k·[target] in einer zyklischen Gruppe; None, falls target nicht erzeugt."""
    if not P.is_cyclic:
        raise ValueError(f"Gruppe {P.describe()} ist nicht zyklisch")
    d = P.invariant_factors[0]
    rv = reduce_mod(v, P)[0]
    rt = reduce_mod(target, P)[0]
    if d == 0:
        return rv * rt if rt in (1, -1) else None
    if gcd(rt, d) != 1:
        return None
    return balanced_residue(rv * pow(rt, -1, d), d)


def saturate(L: LatticeBasis) -> LatticeBasis:
    if L.rank == 0:
        return L
    orthogonal = kernel_basis(L.as_matrix(), "right")
    return kernel_basis(IntMatrix.from_rows(orthogonal.rows, cols=L.dim), "right")


def lattice_equal(A: LatticeBasis, B: LatticeBasis) -> bool:
    if A.dim != B.dim:
        raise ValueError(f"Dimensionen verschieden: {A.dim} und {B.dim}")
    return saturate(A).rows == saturate(B).rows


def saturation_index(L: LatticeBasis) -> int:
    """[saturate(L) : L], Produkt der Elementarteiler der Basismatrix."""
    if L.rank == 0:
        return 1
    index = 1
    for d in smith_normal_form(L.as_matrix()).invariant_factors:
        index *= abs(d)
    return index


def lattice_contains(L: LatticeBasis, v: Sequence[int]) -> bool:
    if len(v) != L.dim:
        raise ValueError(f"Vektor der Länge {len(v)}, erwartet {L.dim}")
    rest = [int(x) for x in v]
    for row in L.rows:
        c = next(j for j, x in enumerate(row) if x)
        if rest[c] % row[c]:
            return False
        q = rest[c] // row[c]
        if q:
            rest = [a - q * b for a, b in zip(rest, row)]
    return not any(rest)
