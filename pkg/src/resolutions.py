"""
Free resolutions of Z over Z[Z/n] and chain maps between them.

Two resolutions are built: the 2-periodic one (rank one in every degree,
differentials t - 1 and N alternating) and the normalized bar resolution,
whose rank (n - 1)^k grows fast and is guarded by a resource limit.
Differentials are stored as sparse matrices over the group ring; column j of
d_k is the boundary of the j-th basis element of P_k.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from errors import GroupMismatchError, LiftingError, ResourceLimitError, UnsupportedInputError
from exact_linalg import IntMatrix, LatticeReducer, Vector, kernel_basis, smith_normal_form, solve_with_smith
from group_model import (
    GroupHom,
    GroupRingElement,
    GroupSpec,
    compose_homs,
    generator_minus_one,
    make_cyclic_hom,
    norm_element,
)

logger = logging.getLogger(__name__)

Column = Tuple[Tuple[int, GroupRingElement], ...]


class ResolutionKind(Enum):
    PERIODIC = "periodic"
    BAR = "bar"


@dataclass(frozen=True)
class RingMatrix:
    """Sparse matrix over Z[Z/n], stored column by column as (row, entry) pairs."""

    order: int
    rows: int
    cols: int
    columns: Tuple[Column, ...]

    @classmethod
    def from_dense(cls, order: int, rows: Sequence[Sequence[GroupRingElement]], cols: Optional[int] = None) -> "RingMatrix":
        cols = len(rows[0]) if rows else (cols or 0)
        columns = tuple(
            tuple((i, rows[i][j]) for i in range(len(rows)) if not rows[i][j].is_zero()) for j in range(cols)
        )
        return cls(order, len(rows), cols, columns)

    @classmethod
    def scalar(cls, element: GroupRingElement) -> "RingMatrix":
        return cls.from_dense(element.order, [[element]])

    @classmethod
    def zeros(cls, order: int, rows: int, cols: int) -> "RingMatrix":
        return cls(order, rows, cols, tuple(() for _ in range(cols)))

    def entry(self, i: int, j: int) -> GroupRingElement:
        for row, value in self.columns[j]:
            if row == i:
                return value
        return GroupRingElement.zero(self.order)

    def element(self) -> GroupRingElement:
        """The single entry of a 1x1 matrix."""
        if (self.rows, self.cols) != (1, 1):
            raise UnsupportedInputError(f"element() needs a 1x1 matrix, got {self.rows}x{self.cols}")
        return self.entry(0, 0)

    def is_zero(self) -> bool:
        return all(v.is_zero() for column in self.columns for _, v in column)

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        if self.order != other.order:
            raise GroupMismatchError(f"Cannot multiply matrices over Z[Z/{self.order}] and Z[Z/{other.order}]")
        if self.cols != other.rows:
            raise GroupMismatchError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        columns = []
        for column in other.columns:
            acc: Dict[int, GroupRingElement] = {}
            for l, b in column:
                for i, a in self.columns[l]:
                    product = a * b
                    acc[i] = acc[i] + product if i in acc else product
            columns.append(tuple((i, v) for i, v in sorted(acc.items()) if not v.is_zero()))
        return RingMatrix(self.order, self.rows, other.cols, tuple(columns))

    def __sub__(self, other: "RingMatrix") -> "RingMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise GroupMismatchError("Cannot subtract ring matrices of different shapes")
        columns = []
        for mine, theirs in zip(self.columns, other.columns):
            acc = dict(mine)
            for i, v in theirs:
                acc[i] = acc[i] - v if i in acc else -v
            columns.append(tuple((i, v) for i, v in sorted(acc.items()) if not v.is_zero()))
        return RingMatrix(self.order, self.rows, self.cols, tuple(columns))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return (self.order, self.rows, self.cols) == (other.order, other.rows, other.cols) and (self - other).is_zero()

    def __hash__(self) -> int:
        return hash((self.order, self.rows, self.cols))

    def push_forward(self, multiplier: int, target_order: int) -> "RingMatrix":
        columns = tuple(
            tuple((i, v.push_forward(multiplier, target_order)) for i, v in column) for column in self.columns
        )
        pushed = RingMatrix(target_order, self.rows, self.cols, columns)
        return RingMatrix(target_order, self.rows, self.cols, tuple(
            tuple((i, v) for i, v in column if not v.is_zero()) for column in pushed.columns
        ))

    def to_int_matrix(self) -> IntMatrix:
        """Integer matrix acting on coefficient vectors (component-major, then powers of t)."""
        n = self.order
        width = n * self.cols
        out = [0] * (n * self.rows * width)
        for j, column in enumerate(self.columns):
            for i, value in column:
                c = value.coefficients
                for p in range(n):
                    base = (i * n + p) * width + j * n
                    for q in range(n):
                        out[base + q] = c[(p - q) % n]
        return IntMatrix(n * self.rows, width, tuple(out))

    def column_vector(self, j: int) -> Vector:
        out = [0] * (self.order * self.rows)
        for i, value in self.columns[j]:
            out[i * self.order:(i + 1) * self.order] = value.coefficients
        return tuple(out)


def ring_matrix_from_vectors(order: int, rows: int, vectors: Sequence[Sequence[int]]) -> RingMatrix:
    """Inverse of column_vector, one vector per column."""
    columns = []
    for vector in vectors:
        column = []
        for i in range(rows):
            element = GroupRingElement(order, tuple(vector[i * order:(i + 1) * order]))
            if not element.is_zero():
                column.append((i, element))
        columns.append(tuple(column))
    return RingMatrix(order, rows, len(vectors), tuple(columns))


@dataclass(frozen=True)
class Resolution:
    """Free Z[G]-resolution P_0 <- P_1 <- ... <- P_K of Z, with P_0 = Z[G]."""

    group: GroupSpec
    kind: ResolutionKind
    top_degree: int
    ranks: Tuple[int, ...]
    differentials: Tuple[RingMatrix, ...]

    @property
    def order(self) -> int:
        return self.group.order

    def rank(self, degree: int) -> int:
        return self.ranks[degree]

    def differential(self, degree: int) -> RingMatrix:
        """d_degree: P_degree -> P_(degree - 1), for 1 <= degree <= top_degree."""
        if not 1 <= degree <= self.top_degree:
            raise UnsupportedInputError(f"Differential d_{degree} outside degrees 1..{self.top_degree}")
        return self.differentials[degree - 1]

    def bar_basis(self, degree: int) -> List[Tuple[int, ...]]:
        """Normalized bar cells of a degree, in basis order."""
        if self.kind != ResolutionKind.BAR:
            raise UnsupportedInputError("Only bar resolutions carry tuple bases")
        return list(itertools.product(range(1, self.order), repeat=degree))

    def describe(self) -> str:
        return f"{self.kind.value} resolution of Z over Z[Z/{self.order}] through degree {self.top_degree}"


def periodic_resolution(group: GroupSpec, top_degree: int) -> Resolution:
    """... -N-> Z[G] -(t-1)-> Z[G] -N-> Z[G] -(t-1)-> Z[G] -> Z."""
    _check_cyclic(group, top_degree)
    n = group.order
    if n == 1:
        ranks = (1,) + (0,) * top_degree
        differentials = tuple(RingMatrix.zeros(1, ranks[k - 1], 0) for k in range(1, top_degree + 1))
    else:
        odd, even = generator_minus_one(n), norm_element(n)
        ranks = (1,) * (top_degree + 1)
        differentials = tuple(RingMatrix.scalar(odd if k % 2 else even) for k in range(1, top_degree + 1))
    return Resolution(group, ResolutionKind.PERIODIC, top_degree, ranks, differentials)


def bar_rank_estimate(order: int, degree: int) -> int:
    return (order - 1) ** degree


def bar_resolution(group: GroupSpec, top_degree: int, max_rank: Optional[int] = None) -> Resolution:
    """Normalized bar resolution; cells are tuples of nonidentity residues."""
    _check_cyclic(group, top_degree)
    n = group.order
    estimate = bar_rank_estimate(n, top_degree)
    if max_rank is not None and estimate > max_rank:
        raise ResourceLimitError(f"Bar resolution of Z/{n} through degree {top_degree}", estimate, max_rank)

    ranks = tuple(bar_rank_estimate(n, k) for k in range(top_degree + 1))
    differentials = []
    for k in range(1, top_degree + 1):
        index = {cell: i for i, cell in enumerate(itertools.product(range(1, n), repeat=k - 1))}
        columns = []
        for cell in itertools.product(range(1, n), repeat=k):
            acc: Dict[int, List[int]] = {}

            def add(face: Tuple[int, ...], power: int, sign: int) -> None:
                coefficients = acc.setdefault(index[face], [0] * n)
                coefficients[power % n] += sign

            add(cell[1:], cell[0], 1)
            for i in range(1, k):
                merged = (cell[i - 1] + cell[i]) % n
                if merged:
                    add(cell[:i - 1] + (merged,) + cell[i + 1:], 0, (-1) ** i)
            add(cell[:-1], 0, (-1) ** k)
            column = tuple(
                (row, GroupRingElement(n, tuple(c))) for row, c in sorted(acc.items()) if any(c)
            )
            columns.append(column)
        differentials.append(RingMatrix(n, ranks[k - 1], ranks[k], tuple(columns)))
    logger.debug(f"Built bar resolution of Z/{n} through degree {top_degree}, ranks {ranks}")
    return Resolution(group, ResolutionKind.BAR, top_degree, ranks, tuple(differentials))


def _check_cyclic(group: GroupSpec, top_degree: int) -> None:
    if not group.is_cyclic:
        raise UnsupportedInputError(f"Resolutions are built for cyclic groups only, got {group.describe()}")
    if top_degree < 1:
        raise UnsupportedInputError(f"Resolution top degree must be >= 1, got {top_degree}")


@dataclass(frozen=True)
class ExactnessVerdict:
    degree: int
    exact: bool
    detail: str = ""


def check_exactness(resolution: Resolution) -> List[ExactnessVerdict]:
    """Exactness at P_0 (onto Z) and at P_1 .. P_(K-1), decided by exact ranks and invariant factors."""
    n = resolution.order
    verdicts = []
    d1 = resolution.differential(1)
    augmented = all(sum(v.augmentation() for _, v in column) == 0 for column in d1.columns)
    snf = smith_normal_form(d1.to_int_matrix())
    saturated = all(x == 1 for x in snf.diagonal if x)
    exact = augmented and snf.rank == n * resolution.rank(0) - 1 and saturated
    verdicts.append(ExactnessVerdict(0, exact, f"rank d_1 = {snf.rank}"))
    for k in range(1, resolution.top_degree):
        lower, upper = resolution.differential(k), resolution.differential(k + 1)
        composite_zero = (lower @ upper).is_zero()
        upper_snf = smith_normal_form(upper.to_int_matrix())
        lower_rank = smith_normal_form(lower.to_int_matrix()).rank
        saturated = all(x == 1 for x in upper_snf.diagonal if x)
        exact = composite_zero and lower_rank + upper_snf.rank == n * resolution.rank(k) and saturated
        verdicts.append(
            ExactnessVerdict(k, exact, f"rank d_{k} + rank d_{k + 1} = {lower_rank + upper_snf.rank}")
        )
    return verdicts


@dataclass(frozen=True)
class ChainMap:
    """Chain map psi: source -> target over hom; components[k]: P_k -> P'_k."""

    source: Resolution
    target: Resolution
    hom: GroupHom
    components: Tuple[RingMatrix, ...]

    @property
    def top_degree(self) -> int:
        return len(self.components) - 1

    def component(self, degree: int) -> RingMatrix:
        return self.components[degree]

    def element(self, degree: int) -> GroupRingElement:
        """Single entry of a component between periodic resolutions."""
        return self.components[degree].element()


def _pushed(matrix: RingMatrix, hom: GroupHom) -> RingMatrix:
    return matrix.push_forward(hom.multiplier, hom.codomain.order)


def induced_chain_map(
    hom: GroupHom, source: Resolution, target: Resolution, top_degree: Optional[int] = None
) -> ChainMap:
    """Canonical lift of hom to a chain map source -> target.

    psi_0 = 1; psi_k solves d'_k psi_k = psi_(k-1) hom(d_k) column by column.
    Into periodic targets each column is reduced modulo ker d'_k with trailing
    coordinates reduced first, which makes cyclic lifts exactly periodic.
    """
    if not hom.is_cyclic_pair:
        raise UnsupportedInputError("Chain maps are lifted along cyclic -> cyclic homomorphisms only")
    if hom.domain.order != source.order or hom.codomain.order != target.order:
        raise GroupMismatchError(f"{hom.describe()} does not match the given resolutions")
    top = min(source.top_degree, target.top_degree) if top_degree is None else top_degree
    if top > min(source.top_degree, target.top_degree):
        raise UnsupportedInputError(f"Chain map through degree {top} exceeds the resolutions")

    m = target.order
    canonical = target.kind == ResolutionKind.PERIODIC
    components = [RingMatrix.scalar(GroupRingElement.one(m))]
    for k in range(1, top + 1):
        d_target = target.differential(k)
        rhs = components[k - 1] @ _pushed(source.differential(k), hom)
        if target.rank(k) == 0:
            if not rhs.is_zero():
                raise LiftingError(f"No lift in degree {k}: target module is zero")
            components.append(RingMatrix.zeros(m, 0, source.rank(k)))
            continue
        matrix = d_target.to_int_matrix()
        snf = smith_normal_form(matrix)
        reducer = LatticeReducer(kernel_basis(matrix).transpose(), from_end=True) if canonical else None
        vectors = []
        for j in range(source.rank(k)):
            x = solve_with_smith(snf, rhs.column_vector(j))
            if x is None:
                raise LiftingError(f"No lift of column {j} in degree {k} along {hom.describe()}")
            vectors.append(reducer.reduce(x) if reducer else x)
        components.append(ring_matrix_from_vectors(m, target.rank(k), vectors))
    logger.debug(f"Lifted {hom.describe()} through degree {top} ({source.kind.value} -> {target.kind.value})")
    return ChainMap(source, target, hom, tuple(components))


def comparison_maps(first: Resolution, second: Resolution) -> Tuple[ChainMap, ChainMap]:
    """Chain maps over the identity in both directions."""
    if first.group.order != second.group.order:
        raise GroupMismatchError("Comparison maps need two resolutions of the same group")
    n = first.order
    identity = make_cyclic_hom(n, n, 1)
    return induced_chain_map(identity, first, second), induced_chain_map(identity, second, first)


def verify_chain_map(chain_map: ChainMap) -> List[int]:
    """Degrees at which the chain-map identities fail; degree 0 checks augmentation."""
    failures = []
    hom = chain_map.hom
    zero = chain_map.component(0)
    augmentations = [sum(v.augmentation() for _, v in column) for column in zero.columns]
    if augmentations != [1] * chain_map.source.rank(0):
        failures.append(0)
    for k in range(1, chain_map.top_degree + 1):
        left = chain_map.target.differential(k) @ chain_map.component(k)
        right = chain_map.component(k - 1) @ _pushed(chain_map.source.differential(k), hom)
        if left != right:
            failures.append(k)
    return failures


def compose_chain_maps(outer: ChainMap, inner: ChainMap) -> ChainMap:
    """outer ∘ inner, over the composite homomorphism."""
    if inner.target.order != outer.source.order or inner.target.kind != outer.source.kind:
        raise GroupMismatchError("Chain maps do not compose: intermediate resolutions differ")
    top = min(outer.top_degree, inner.top_degree)
    components = tuple(
        outer.component(k) @ _pushed(inner.component(k), outer.hom) for k in range(top + 1)
    )
    return ChainMap(inner.source, outer.target, compose_homs(outer.hom, inner.hom), components)
