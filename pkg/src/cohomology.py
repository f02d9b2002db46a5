"""
Cochain complexes, cohomology groups, induced maps and cup products.

Cochains Hom_G(P_k, M) are identified with M^(r_k): the vector of a cochain
lists the value on each basis element of P_k in turn. Torsion coefficient
modules are handled by carrying the relation lattice of M alongside every
cochain group, so cocycle and coboundary conditions hold modulo relations.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from errors import GroupMismatchError, UnsupportedInputError
from exact_linalg import (
    AbelianGroupInvariants,
    IntMatrix,
    Vector,
    column_lattice_basis,
    kernel_basis,
    smith_normal_form,
    solve_with_smith,
)
from group_model import (
    GModule,
    GroupHom,
    GroupRingElement,
    GroupSpec,
    augmentation_coordinates,
    augmentation_ideal,
    generator_minus_one,
    make_cyclic_hom,
    tensor_power,
    tensor_product,
    trivial_module,
)
from resolutions import (
    ChainMap,
    RingMatrix,
    Resolution,
    ResolutionKind,
    bar_resolution,
    induced_chain_map,
    periodic_resolution,
)

logger = logging.getLogger(__name__)


class _ActionCache:
    """Memoized action matrices of group-ring elements on a module."""

    def __init__(self, module: GModule):
        self.module = module
        self._cache: Dict[Tuple[int, ...], IntMatrix] = {}

    def __call__(self, element: GroupRingElement) -> IntMatrix:
        key = element.coefficients
        if key not in self._cache:
            self._cache[key] = self.module.represent(element)
        return self._cache[key]


def cochain_map_matrix(matrix: RingMatrix, module: GModule, action: Optional[_ActionCache] = None) -> IntMatrix:
    """Integer matrix of f -> f ∘ matrix on cochains with values in `module`.

    `matrix` maps a free module of rank cols into one of rank rows; the result
    sends M^rows to M^cols with block (j, i) = action of matrix[i][j].
    """
    action = action or _ActionCache(module)
    g = module.rank
    out = [[0] * (g * matrix.rows) for _ in range(g * matrix.cols)]
    for j, column in enumerate(matrix.columns):
        for i, value in column:
            block = action(value)
            for p in range(g):
                row = out[j * g + p]
                for q in range(g):
                    row[i * g + q] += block.entries[p * g + q]
    return IntMatrix.from_rows(out, g * matrix.rows)


@dataclass
class CochainComplex:
    """Hom_G(P_*, M) with coboundaries delta^k: C^k -> C^(k+1)."""

    resolution: Resolution
    module: GModule
    _action: _ActionCache = field(init=False, repr=False)
    _deltas: Dict[int, IntMatrix] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.module.order != self.resolution.order:
            raise GroupMismatchError(
                f"Module over Z/{self.module.order} on a resolution of Z/{self.resolution.order}"
            )
        self._action = _ActionCache(self.module)

    def dimension(self, degree: int) -> int:
        return self.module.rank * self.resolution.rank(degree)

    def delta(self, degree: int) -> IntMatrix:
        """delta^degree, built from d_(degree + 1)."""
        if degree < 0 or degree >= self.resolution.top_degree:
            raise UnsupportedInputError(
                f"Coboundary delta^{degree} needs d_{degree + 1}, resolution stops at {self.resolution.top_degree}"
            )
        if degree not in self._deltas:
            self._deltas[degree] = cochain_map_matrix(self.resolution.differential(degree + 1), self.module, self._action)
        return self._deltas[degree]

    def relation_lattice(self, degree: int) -> IntMatrix:
        """Columns span the relations of M^(r_degree)."""
        lattice = self.module.relation_lattice()
        return IntMatrix.block_diagonal([lattice] * self.resolution.rank(degree)) if self.resolution.rank(degree) else IntMatrix.zeros(0, 0)

    def boundary_generators(self, degree: int) -> IntMatrix:
        """Columns generate B^degree + relations."""
        lattice = self.relation_lattice(degree)
        if degree == 0:
            return lattice if lattice.rows else IntMatrix.zeros(self.dimension(0), 0)
        previous = self.delta(degree - 1)
        return previous.hstack(lattice) if lattice.rows == previous.rows and lattice.cols else previous

    def is_cocycle(self, degree: int, cochain: Sequence[int]) -> bool:
        image = self.delta(degree).apply(cochain)
        lattice = self.relation_lattice(degree + 1)
        if not lattice.cols:
            return not any(image)
        return solve_with_smith(smith_normal_form(lattice), image) is not None

    def is_coboundary(self, degree: int, cochain: Sequence[int]) -> bool:
        generators = self.boundary_generators(degree)
        if not generators.cols:
            return not any(cochain)
        return solve_with_smith(smith_normal_form(generators), cochain) is not None

    @property
    def differentials(self) -> List[IntMatrix]:
        return [self.delta(k) for k in range(self.resolution.top_degree)]


def cochain_complex(resolution: Resolution, module: GModule) -> CochainComplex:
    return CochainComplex(resolution, module)


@dataclass(frozen=True)
class CohomologyClass:
    """Cocycle on a named resolution; equality of classes is decided by coboundary membership."""

    resolution: Resolution
    module: GModule
    degree: int
    cocycle: Vector

    def is_zero(self) -> bool:
        return cochain_complex(self.resolution, self.module).is_coboundary(self.degree, self.cocycle)


@dataclass
class CohomologyGroup:
    """H^k(G; M) with invariants, cocycle representatives and a coordinate map."""

    complex: CochainComplex
    degree: int
    invariants: AbelianGroupInvariants
    orders: Tuple[int, ...]
    representatives: Tuple[Vector, ...]
    _cocycle_basis: IntMatrix = field(repr=False)
    _coordinate_transform: IntMatrix = field(repr=False)
    _kept: Tuple[int, ...] = field(repr=False)

    @property
    def module(self) -> GModule:
        return self.complex.module

    @property
    def resolution(self) -> Resolution:
        return self.complex.resolution

    @property
    def is_zero(self) -> bool:
        return self.invariants.is_trivial

    def coordinates(self, cocycle: Sequence[int]) -> Tuple[int, ...]:
        """Class of a cocycle in terms of the generators, reduced modulo their orders."""
        if self._cocycle_basis.cols == 0:
            if any(cocycle):
                raise UnsupportedInputError(f"Vector is not a degree-{self.degree} cocycle")
            return ()
        c = solve_with_smith(smith_normal_form(self._cocycle_basis), cocycle)
        if c is None:
            raise UnsupportedInputError(f"Vector is not a degree-{self.degree} cocycle")
        z = self._coordinate_transform.apply(c)
        return tuple(z[i] % order if order else z[i] for i, order in zip(self._kept, self.orders))

    def describe(self) -> str:
        return f"H^{self.degree}(Z/{self.resolution.order}; {self.module.name}) = {self.invariants}"


def cohomology_group(resolution: Resolution, module: GModule, degree: int) -> CohomologyGroup:
    """H^degree of Hom_G(resolution, module); needs degree < top degree of the resolution."""
    complex_ = cochain_complex(resolution, module)
    delta = complex_.delta(degree)
    dim = complex_.dimension(degree)
    lattice = complex_.relation_lattice(degree + 1)

    if lattice.cols and delta.rows:
        joint = delta.hstack(lattice.scale(-1))
        kernel = kernel_basis(joint)
        generators = IntMatrix.from_rows(kernel.to_rows()[:dim], kernel.cols)
        cocycles = column_lattice_basis(generators)
    else:
        cocycles = kernel_basis(delta)

    boundaries = complex_.boundary_generators(degree)
    cocycle_snf = smith_normal_form(cocycles)
    rel_columns = []
    for j in range(boundaries.cols):
        c = solve_with_smith(cocycle_snf, boundaries.column(j))
        if c is None:
            raise UnsupportedInputError(f"Coboundary generator {j} in degree {degree} is not a cocycle")
        rel_columns.append(c)
    relations = IntMatrix.from_columns(rel_columns, cocycles.cols)

    snf = smith_normal_form(relations)
    diagonal = snf.diagonal
    rho = cocycles.cols
    factors = [diagonal[i] if i < len(diagonal) else 0 for i in range(rho)]
    kept = tuple(i for i, d in enumerate(factors) if d != 1)
    orders = tuple(factors[i] for i in kept)
    representatives = tuple(cocycles.apply(snf.u_inv.column(i)) for i in kept)
    invariants = AbelianGroupInvariants(
        free_rank=sum(1 for d in orders if d == 0),
        torsion=tuple(d for d in orders if d > 1),
    )
    group = CohomologyGroup(
        complex=complex_,
        degree=degree,
        invariants=invariants,
        orders=orders,
        representatives=representatives,
        _cocycle_basis=cocycles,
        _coordinate_transform=snf.u,
        _kept=kept,
    )
    logger.debug(group.describe())
    return group


@dataclass(frozen=True)
class InducedMap:
    """phi^*: H^k(Lambda; M) -> H^k(Gamma; phi^*M) as a matrix of coordinates."""

    degree: int
    source: CohomologyGroup
    target: CohomologyGroup
    matrix: IntMatrix
    is_zero: bool
    cochain_map: IntMatrix


def pullback_cochain(chain_map: ChainMap, module: GModule, degree: int, cochain: Sequence[int]) -> Vector:
    """f -> f ∘ psi_degree, for a cochain on the chain map's target."""
    return cochain_map_matrix(chain_map.component(degree), module).apply(cochain)


def induced_on_cohomology(chain_map: ChainMap, module: GModule, degree: int) -> InducedMap:
    """Matrix of phi^* on H^degree, with the zero/nonzero flag decided exactly."""
    if module.order != chain_map.target.order:
        raise GroupMismatchError(f"{module.name} is not a module over the codomain of {chain_map.hom.describe()}")
    pulled = module.pullback(chain_map.hom)
    source = cohomology_group(chain_map.target, module, degree)
    target = cohomology_group(chain_map.source, pulled, degree)
    cochain_map = cochain_map_matrix(chain_map.component(degree), module)
    columns = []
    zero = True
    for representative in source.representatives:
        image = cochain_map.apply(representative)
        columns.append(target.coordinates(image))
        if not target.complex.is_coboundary(degree, image):
            zero = False
    matrix = IntMatrix.from_columns(columns, len(target.orders))
    logger.debug(f"phi^* on H^{degree} with {module.name}: zero={zero}")
    return InducedMap(degree, source, target, matrix, zero, cochain_map)


def _same_bar_through(first: Resolution, second: Resolution, degree: int) -> bool:
    return (
        first.kind == second.kind == ResolutionKind.BAR
        and first.order == second.order
        and min(first.top_degree, second.top_degree) >= degree
    )


def to_bar(cls: CohomologyClass, bar: Resolution) -> CohomologyClass:
    """Transport a class onto a bar resolution through comparison maps."""
    if _same_bar_through(cls.resolution, bar, cls.degree):
        return CohomologyClass(bar, cls.module, cls.degree, cls.cocycle)
    if cls.resolution.order != bar.order:
        raise GroupMismatchError("Class and bar resolution live over different groups")
    top = min(bar.top_degree, cls.resolution.top_degree)
    if cls.degree > top:
        raise UnsupportedInputError(f"Cannot transport a degree-{cls.degree} class through degree {top}")
    bar_to_home = _identity_chain_map(_truncate(bar, top), _truncate(cls.resolution, top))
    cocycle = pullback_cochain(bar_to_home, cls.module, cls.degree, cls.cocycle)
    return CohomologyClass(bar, cls.module, cls.degree, cocycle)


def to_resolution(cls: CohomologyClass, resolution: Resolution) -> CohomologyClass:
    """Transport a class onto any resolution of the same group."""
    if cls.resolution == resolution:
        return cls
    top = min(resolution.top_degree, cls.resolution.top_degree)
    there_to_here = _identity_chain_map(_truncate(resolution, top), _truncate(cls.resolution, top))
    cocycle = pullback_cochain(there_to_here, cls.module, cls.degree, cls.cocycle)
    return CohomologyClass(resolution, cls.module, cls.degree, cocycle)


def _identity_chain_map(source: Resolution, target: Resolution) -> ChainMap:
    n = source.order
    return induced_chain_map(make_cyclic_hom(n, n, 1), source, target)


def _truncate(resolution: Resolution, top: int) -> Resolution:
    if top == resolution.top_degree:
        return resolution
    return Resolution(
        resolution.group,
        resolution.kind,
        top,
        resolution.ranks[: top + 1],
        resolution.differentials[:top],
    )


def cup_product(x: CohomologyClass, y: CohomologyClass, bar: Optional[Resolution] = None) -> CohomologyClass:
    """x ⌣ y on the bar resolution, values in the tensor product of the coefficient modules.

    (f ⌣ h)[g_1|...|g_(p+q)] = f[g_1|...|g_p] (x) (g_1...g_p) h[g_(p+1)|...|g_(p+q)]
    """
    if x.module.group != y.module.group:
        raise GroupMismatchError("Cup product of classes over different groups")
    p, q = x.degree, y.degree
    n = x.module.order
    if bar is None:
        if x.resolution.kind == ResolutionKind.BAR and x.resolution.top_degree >= p + q:
            bar = x.resolution
        else:
            bar = bar_resolution(x.module.group, max(p + q, 1))
    if bar.top_degree < p + q:
        raise UnsupportedInputError(f"Bar resolution through degree {bar.top_degree} cannot hold a degree-{p + q} product")
    f = to_bar(x, bar).cocycle
    h = to_bar(y, bar).cocycle
    module = tensor_product(x.module, y.module)
    g1, g2 = x.module.rank, y.module.rank
    right_rank = (n - 1) ** q

    sums = [sum(cell) % n for cell in bar.bar_basis(p)] if p else [0]
    values: List[int] = []
    for a, shift in enumerate(sums):
        left = f[a * g1:(a + 1) * g1]
        act = y.module.action_power(shift)
        for b in range(right_rank):
            right = act.apply(h[b * g2:(b + 1) * g2])
            values.extend(u * v for u in left for v in right)
    return CohomologyClass(bar, module, p + q, tuple(values))


def cup_power(x: CohomologyClass, k: int, bar: Optional[Resolution] = None) -> CohomologyClass:
    """x ⌣ ... ⌣ x (k >= 1 factors), left-nested."""
    if k < 1:
        raise UnsupportedInputError(f"Cup power must be >= 1, got {k}")
    bar = bar or bar_resolution(x.module.group, max(k * x.degree, 1))
    result = to_bar(x, bar)
    for _ in range(k - 1):
        result = cup_product(result, x, bar)
    return result


def berstein_schwarz_class(group: GroupSpec, resolution: Optional[Resolution] = None) -> CohomologyClass:
    """beta_G in H^1(G; I(G)), on the periodic resolution unless one is given.

    On the periodic resolution beta is represented by t - 1; on the bar
    resolution by [g] -> g - 1.
    """
    module = augmentation_ideal(group)
    n = group.order
    resolution = resolution or periodic_resolution(group, 2)
    if resolution.kind == ResolutionKind.BAR:
        values: List[int] = []
        for (g,) in resolution.bar_basis(1):
            values.extend(augmentation_coordinates(GroupRingElement.monomial(n, g) - GroupRingElement.one(n)))
        return CohomologyClass(resolution, module, 1, tuple(values))
    if resolution.kind == ResolutionKind.PERIODIC:
        cocycle = augmentation_coordinates(generator_minus_one(n)) if n > 1 else ()
        return CohomologyClass(resolution, module, 1, cocycle)
    raise UnsupportedInputError(f"No Berstein-Schwarz representative on {resolution.describe()}")


def is_coboundary(resolution: Resolution, module: GModule, degree: int, cochain: Sequence[int]) -> bool:
    return cochain_complex(resolution, module).is_coboundary(degree, cochain)


def class_coordinates(cls: CohomologyClass) -> Tuple[int, ...]:
    """Coordinates of a class in H^k of its own resolution (which must reach degree k + 1)."""
    return cohomology_group(cls.resolution, cls.module, cls.degree).coordinates(cls.cocycle)


def cohomology_table(group: GroupSpec, modules: Sequence[GModule], max_degree: int):
    """H^k(group; M) for every module and 0 <= k <= max_degree, as a DataFrame."""
    resolution = periodic_resolution(group, max_degree + 1)
    rows = []
    for module in modules:
        for k in range(max_degree + 1):
            h = cohomology_group(resolution, module, k)
            rows.append(
                {
                    "group": group.describe(),
                    "module": module.name,
                    "degree": k,
                    "cohomology": str(h.invariants),
                    "free_rank": h.invariants.free_rank,
                    "torsion": list(h.invariants.torsion),
                }
            )
    return pd.DataFrame(rows, columns=["group", "module", "degree", "cohomology", "free_rank", "torsion"])


def induced_hom_summary(hom: GroupHom, module: GModule, degree: int) -> InducedMap:
    """phi^* in one degree using periodic resolutions on both sides."""
    source = periodic_resolution(hom.domain, degree + 1)
    target = periodic_resolution(hom.codomain, degree + 1)
    return induced_on_cohomology(induced_chain_map(hom, source, target), module, degree)


@dataclass(frozen=True)
class PullbackWitness:
    """phi^* applied to one class of the codomain, with everything needed to recheck it.

    `lambda_cocycle` lives on the periodic resolution of the codomain,
    `gamma_cocycle` on the periodic resolution of the domain; `chain_elements`
    are a_0..a_k of the canonical periodic chain map.
    """

    hom: GroupHom
    degree: int
    module: GModule
    lambda_cocycle: Vector
    chain_elements: Tuple[GroupRingElement, ...]
    gamma_cocycle: Vector
    nonzero: bool
    source: str

    @property
    def pulled_module(self) -> GModule:
        return self.module.pullback(self.hom)

    def gamma_class(self) -> CohomologyClass:
        resolution = periodic_resolution(self.hom.domain, self.degree + 1)
        return CohomologyClass(resolution, self.pulled_module, self.degree, self.gamma_cocycle)


def _periodic_pullback(hom: GroupHom, module: GModule, degree: int, lambda_cocycle: Sequence[int], source: str) -> PullbackWitness:
    gamma_resolution = periodic_resolution(hom.domain, degree + 1)
    lambda_resolution = periodic_resolution(hom.codomain, degree + 1)
    psi = induced_chain_map(hom, gamma_resolution, lambda_resolution, top_degree=degree)
    elements = tuple(psi.element(j) for j in range(degree + 1))
    gamma_cocycle = pullback_cochain(psi, module, degree, lambda_cocycle)
    nonzero = not is_coboundary(gamma_resolution, module.pullback(hom), degree, gamma_cocycle)
    return PullbackWitness(hom, degree, module, tuple(lambda_cocycle), elements, gamma_cocycle, nonzero, source)


def bs_power_pullback(hom: GroupHom, degree: int, max_bar_rank: Optional[int] = None) -> PullbackWitness:
    """phi^*(beta^degree) on the periodic resolution of the domain.

    beta^degree is formed on the bar resolution of the codomain, moved to its
    periodic resolution, then pulled back along the canonical chain map.
    Raises ResourceLimitError when the bar rank exceeds `max_bar_rank`.
    """
    if not hom.is_cyclic_pair:
        raise UnsupportedInputError("Berstein-Schwarz pullbacks need a cyclic -> cyclic homomorphism")
    if degree < 1:
        raise UnsupportedInputError(f"Cup powers start at degree 1, got {degree}")
    codomain = hom.codomain
    if codomain.order == 1:
        return PullbackWitness(hom, degree, augmentation_ideal(codomain), (), (), (), False, "berstein_schwarz")
    module = tensor_power(augmentation_ideal(codomain), degree)

    bar = bar_resolution(codomain, degree, max_rank=max_bar_rank)
    power = cup_power(berstein_schwarz_class(codomain, bar), degree, bar)
    periodic = periodic_resolution(codomain, degree + 1)
    to_bar_map = _identity_chain_map(_truncate(periodic, degree), bar)
    lambda_cocycle = pullback_cochain(to_bar_map, module, degree, power.cocycle)
    witness = _periodic_pullback(hom, module, degree, lambda_cocycle, "berstein_schwarz")
    logger.debug(f"phi^*(beta^{degree}) along {hom.describe()}: nonzero={witness.nonzero}")
    return witness


def family_pullback(hom: GroupHom, module: GModule, degree: int) -> Optional[PullbackWitness]:
    """First generator of H^degree(codomain; module) with nonzero pullback, or None if phi^* = 0."""
    if module.order != hom.codomain.order:
        raise GroupMismatchError(f"{module.name} is not a module over {hom.codomain.describe()}")
    if hom.codomain.order == 1:
        return None
    h = cohomology_group(periodic_resolution(hom.codomain, degree + 1), module, degree)
    for representative in h.representatives:
        witness = _periodic_pullback(hom, module, degree, representative, "module_family")
        if witness.nonzero:
            return witness
    return None


def integral_pullback(hom: GroupHom, degree: int) -> Optional[PullbackWitness]:
    """family_pullback with trivial integer coefficients."""
    return family_pullback(hom, trivial_module(hom.codomain), degree)
