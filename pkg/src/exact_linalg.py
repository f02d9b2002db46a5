"""
Exact integer linear algebra for the cohomology engines.

Smith normal form with tracked unimodular transforms, integer and modular
linear solving, kernels, Hermite bases and cokernel presentations. Everything
works on Python integers; there is no floating point anywhere.
"""

import logging
from dataclasses import dataclass
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from errors import DimensionMismatchError

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix, entries stored row-major."""

    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatchError(f"Negative matrix shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatchError(
                f"Matrix {self.rows}x{self.cols} needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, size: int) -> "IntMatrix":
        entries = [0] * (size * size)
        for i in range(size):
            entries[i * size + i] = 1
        return cls(size, size, tuple(entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        """Build from nested rows; `cols` is required when there are no rows."""
        if cols is None:
            cols = len(rows[0]) if rows else 0
        flat: List[int] = []
        for row in rows:
            if len(row) != cols:
                raise DimensionMismatchError(f"Ragged row of length {len(row)}, expected {cols}")
            flat.extend(int(e) for e in row)
        return cls(len(rows), cols, tuple(flat))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        for column in columns:
            if len(column) != rows:
                raise DimensionMismatchError(f"Column of length {len(column)}, expected {rows}")
        return cls(rows, len(columns), tuple(columns[j][i] for i in range(rows) for j in range(len(columns))))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int, cols: int) -> "IntMatrix":
        entries = [0] * (rows * cols)
        for i, value in enumerate(values):
            entries[i * cols + i] = value
        return cls(rows, cols, tuple(entries))

    @classmethod
    def block_diagonal(cls, blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = [[0] * cols for _ in range(rows)]
        r0 = c0 = 0
        for block in blocks:
            for i, row in enumerate(block.to_rows()):
                out[r0 + i][c0:c0 + block.cols] = row
            r0 += block.rows
            c0 += block.cols
        return cls.from_rows(out, cols)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> List[List[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(f"Cannot multiply {self.shape} by {other.shape}")
        other_cols = other.columns()
        out: List[int] = []
        for i in range(self.rows):
            row = self.row(i)
            out.extend(sum(a * b for a, b in zip(row, col) if a) for col in other_cols)
        return IntMatrix(self.rows, other.cols, tuple(out))

    def apply(self, vector: Sequence[int]) -> Vector:
        """Matrix times column vector."""
        if len(vector) != self.cols:
            raise DimensionMismatchError(f"Cannot apply {self.shape} matrix to vector of length {len(vector)}")
        return tuple(sum(a * b for a, b in zip(self.row(i), vector) if a) for i in range(self.rows))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise DimensionMismatchError(f"Cannot add {self.shape} and {other.shape}")
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise DimensionMismatchError(f"Cannot subtract {other.shape} from {self.shape}")
        return IntMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def scale(self, factor: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(factor * a for a in self.entries))

    def power(self, exponent: int) -> "IntMatrix":
        if self.rows != self.cols:
            raise DimensionMismatchError(f"Power of non-square matrix {self.shape}")
        if exponent < 0:
            raise DimensionMismatchError("Negative matrix powers are not supported")
        result, base = IntMatrix.identity(self.rows), self
        while exponent:
            if exponent & 1:
                result = result @ base
            base = base @ base
            exponent >>= 1
        return result

    def kron(self, other: "IntMatrix") -> "IntMatrix":
        rows, cols = self.rows * other.rows, self.cols * other.cols
        out = [0] * (rows * cols)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self[i, j]
                if not a:
                    continue
                for k in range(other.rows):
                    base = (i * other.rows + k) * cols + j * other.cols
                    for l in range(other.cols):
                        out[base + l] = a * other.entries[k * other.cols + l]
        return IntMatrix(rows, cols, tuple(out))

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise DimensionMismatchError(f"Cannot hstack {self.shape} and {other.shape}")
        return IntMatrix.from_rows([list(self.row(i)) + list(other.row(i)) for i in range(self.rows)], self.cols + other.cols)

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise DimensionMismatchError(f"Cannot vstack {self.shape} and {other.shape}")
        return IntMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def select_columns(self, indices: Iterable[int]) -> "IntMatrix":
        indices = list(indices)
        return IntMatrix.from_columns([self.column(j) for j in indices], self.rows)

    def reduce_mod(self, modulus: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(a % modulus for a in self.entries))

    def determinant(self) -> int:
        """Bareiss fraction-free elimination."""
        if self.rows != self.cols:
            raise DimensionMismatchError(f"Determinant of non-square matrix {self.shape}")
        n = self.rows
        if n == 0:
            return 1
        m = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if m[i][k]), None)
                if swap is None:
                    return 0
                m[k], m[swap] = m[swap], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """U·A·V = D with U, V unimodular and d_1 | d_2 | ... on the diagonal.

    u_inv and v_inv are the inverses of U and V; u and u_inv are None when the
    left transform was not tracked.
    """

    source: IntMatrix
    u: Optional[IntMatrix]
    d: IntMatrix
    v: IntMatrix
    u_inv: Optional[IntMatrix]
    v_inv: IntMatrix

    @property
    def diagonal(self) -> Vector:
        return tuple(self.d[i, i] for i in range(min(self.d.rows, self.d.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for value in self.diagonal if value)


@dataclass(frozen=True)
class AbelianGroupInvariants:
    """Z^free_rank ⊕ Z/t_1 ⊕ ... with t_1 | t_2 | ..., all t_i > 1."""

    free_rank: int
    torsion: Tuple[int, ...]

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = [f"Z/{t}" for t in self.torsion]
        if self.free_rank == 1:
            parts.insert(0, "Z")
        elif self.free_rank > 1:
            parts.insert(0, f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


def _identity_rows(size: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(size)] for i in range(size)]


def _smith(a: IntMatrix, track_left: bool = True) -> SmithDecomposition:
    r, c = a.rows, a.cols
    d = a.to_rows()
    u = _identity_rows(r) if track_left else None
    u_inv = _identity_rows(r) if track_left else None
    v = _identity_rows(c)
    v_inv = _identity_rows(c)

    def add_row(dst: int, src: int, q: int) -> None:
        d_dst, d_src = d[dst], d[src]
        for j in range(c):
            if d_src[j]:
                d_dst[j] += q * d_src[j]
        if track_left:
            u_dst, u_src = u[dst], u[src]
            for j in range(r):
                if u_src[j]:
                    u_dst[j] += q * u_src[j]
            for row in u_inv:
                if row[dst]:
                    row[src] -= q * row[dst]

    def add_col(dst: int, src: int, q: int) -> None:
        for row in d:
            if row[src]:
                row[dst] += q * row[src]
        for row in v:
            if row[src]:
                row[dst] += q * row[src]
        vi_src, vi_dst = v_inv[src], v_inv[dst]
        for j in range(c):
            if vi_dst[j]:
                vi_src[j] -= q * vi_dst[j]

    def swap_rows(i: int, j: int) -> None:
        if i == j:
            return
        d[i], d[j] = d[j], d[i]
        if track_left:
            u[i], u[j] = u[j], u[i]
            for row in u_inv:
                row[i], row[j] = row[j], row[i]

    def swap_cols(i: int, j: int) -> None:
        if i == j:
            return
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]
        v_inv[i], v_inv[j] = v_inv[j], v_inv[i]

    def negate_row(i: int) -> None:
        d[i] = [-x for x in d[i]]
        if track_left:
            u[i] = [-x for x in u[i]]
            for row in u_inv:
                row[i] = -row[i]

    t = 0
    while t < min(r, c):
        # Smallest nonzero magnitude pivot limits entry growth.
        best = None
        for i in range(t, r):
            row = d[i]
            for j in range(t, c):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])

        while True:
            p = d[t][t]
            clean = True
            for i in range(t + 1, r):
                if d[i][t]:
                    add_row(i, t, -(d[i][t] // p))
                    if d[i][t]:
                        clean = False
            for j in range(t + 1, c):
                if d[t][j]:
                    add_col(j, t, -(d[t][j] // p))
                    if d[t][j]:
                        clean = False
            if not clean:
                candidates = [(abs(d[i][t]), i, t) for i in range(t + 1, r) if d[i][t]]
                candidates += [(abs(d[t][j]), t, j) for j in range(t + 1, c) if d[t][j]]
                _, i, j = min(candidates)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            offender = next(
                (i for i in range(t + 1, r) if any(d[i][j] % p for j in range(t + 1, c))),
                None,
            )
            if offender is None:
                break
            add_row(t, offender, 1)
        if d[t][t] < 0:
            negate_row(t)
        t += 1

    return SmithDecomposition(
        source=a,
        u=IntMatrix.from_rows(u, r) if track_left else None,
        d=IntMatrix.from_rows(d, c),
        v=IntMatrix.from_rows(v, c),
        u_inv=IntMatrix.from_rows(u_inv, r) if track_left else None,
        v_inv=IntMatrix.from_rows(v_inv, c),
    )


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    """Smith normal form U·A·V = D of any integer matrix, empty ones included."""
    return _smith(a, track_left=True)


def rank(a: IntMatrix) -> int:
    return _smith(a, track_left=False).rank


def solve_with_smith(snf: SmithDecomposition, b: Sequence[int], modulus: Optional[int] = None) -> Optional[Vector]:
    """Solve A·x = b (or mod `modulus`) reusing a decomposition of A.

    Returns None when the system is infeasible.
    """
    a = snf.source
    if len(b) != a.rows:
        raise DimensionMismatchError(f"Right-hand side of length {len(b)} for {a.shape} system")
    if snf.u is None:
        raise DimensionMismatchError("Solving needs a decomposition with the left transform")
    if modulus is not None and modulus <= 0:
        raise DimensionMismatchError(f"Modulus must be positive, got {modulus}")
    c = snf.u.apply(b)
    diag = snf.diagonal
    y = [0] * a.cols
    for i in range(a.rows):
        di = diag[i] if i < len(diag) else 0
        if modulus is None:
            if di:
                if c[i] % di:
                    return None
                y[i] = c[i] // di
            elif c[i]:
                return None
        else:
            g = gcd(di, modulus)
            if c[i] % g:
                return None
            reduced = modulus // g
            if i < a.cols:
                y[i] = (c[i] // g) * pow(di // g, -1, reduced) % reduced if reduced > 1 else 0
    x = snf.v.apply(y)
    if modulus is not None:
        x = tuple(value % modulus for value in x)
    return x


def solve_linear(a: IntMatrix, b: Sequence[int], modulus: Optional[int] = None) -> Optional[Vector]:
    """Solve A·x = b over Z, or over Z/modulus. None means infeasible."""
    if len(b) != a.rows:
        raise DimensionMismatchError(f"Right-hand side of length {len(b)} for {a.shape} system")
    return solve_with_smith(smith_normal_form(a), b, modulus)


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of {x : A·x = 0}."""
    snf = _smith(a, track_left=False)
    return snf.v.select_columns(range(snf.rank, a.cols))


def column_lattice_basis(a: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of the lattice spanned by the columns of A."""
    snf = smith_normal_form(a)
    diag = snf.diagonal
    columns = []
    for i in range(snf.rank):
        columns.append(tuple(diag[i] * x for x in snf.u_inv.column(i)))
    return IntMatrix.from_columns(columns, a.rows)


def cokernel_presentation(a: IntMatrix) -> AbelianGroupInvariants:
    """Invariants of Z^cols modulo the row lattice of A."""
    snf = _smith(a, track_left=False)
    torsion = tuple(x for x in snf.diagonal if x > 1)
    return AbelianGroupInvariants(free_rank=a.cols - snf.rank, torsion=torsion)


def hermite_normal_form(a: IntMatrix) -> IntMatrix:
    """Row-style Hermite basis of the row lattice of A.

    Pivots are positive, strictly move right, and entries above each pivot are
    reduced into [0, pivot). Zero rows are dropped.
    """
    rows = [row for row in a.to_rows() if any(row)]
    top = 0
    for col in range(a.cols):
        if top >= len(rows):
            break
        while True:
            live = [i for i in range(top, len(rows)) if rows[i][col]]
            if not live:
                break
            pivot = min(live, key=lambda i: abs(rows[i][col]))
            rows[top], rows[pivot] = rows[pivot], rows[top]
            p = rows[top][col]
            done = True
            for i in range(top + 1, len(rows)):
                if rows[i][col]:
                    q = rows[i][col] // p
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[top])]
                    if rows[i][col]:
                        done = False
            if done:
                break
        if top < len(rows) and rows[top][col]:
            if rows[top][col] < 0:
                rows[top] = [-x for x in rows[top]]
            p = rows[top][col]
            for i in range(top):
                q = rows[i][col] // p
                if q:
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[top])]
            top += 1
    rows = [row for row in rows[:top] if any(row)]
    return IntMatrix.from_rows(rows, a.cols)


class LatticeReducer:
    """Canonical representatives modulo the row lattice of `generators`.

    With from_end the Hermite basis is taken with respect to the reversed
    coordinate order, so trailing coordinates are reduced first. The basis is
    computed once and reused for every vector.
    """

    def __init__(self, generators: IntMatrix, from_end: bool = False):
        self.dimension = generators.cols
        self.from_end = from_end
        gens = generators
        if from_end:
            gens = IntMatrix.from_rows([row[::-1] for row in generators.to_rows()], generators.cols)
        self.basis = hermite_normal_form(gens).to_rows()

    def reduce(self, vector: Sequence[int]) -> Vector:
        if len(vector) != self.dimension:
            raise DimensionMismatchError(f"Vector of length {len(vector)} against lattice in Z^{self.dimension}")
        v = list(vector)
        if self.from_end:
            v.reverse()
        for row in self.basis:
            p = next(j for j, x in enumerate(row) if x)
            q = v[p] // row[p]
            if q:
                v = [x - q * y for x, y in zip(v, row)]
        if self.from_end:
            v.reverse()
        return tuple(v)
