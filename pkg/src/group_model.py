"""
Data model for groups, homomorphisms, group rings and coefficient modules.

Cyclic groups are the fully supported backend. Free groups carry word
algorithms only, finitely presented groups carry relator checks only.
Coefficient modules are finitely generated abelian groups presented over Z
(rows of `relations` are relations) with an action matrix for the
distinguished generator acting on column vectors.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from math import gcd
from string import ascii_lowercase
from typing import Dict, List, Optional, Sequence, Tuple

from errors import GroupMismatchError, HomomorphismError, UnsupportedInputError
from exact_linalg import IntMatrix, Vector, cokernel_presentation, AbelianGroupInvariants, smith_normal_form, solve_with_smith

logger = logging.getLogger(__name__)

EPIMORPHISM_REDUCTION_NOTE = (
    "cd and cat of a homomorphism are taken equal to those of its corestriction "
    "onto the image subgroup"
)


class GroupKind(Enum):
    CYCLIC = "cyclic"
    FREE = "free"
    FINITELY_PRESENTED = "fp"


@dataclass(frozen=True)
class Word:
    """Sequence of (generator index, nonzero exponent) letters."""

    letters: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        for index, exponent in self.letters:
            if index < 0:
                raise UnsupportedInputError(f"Negative generator index {index}")
            if exponent == 0:
                raise UnsupportedInputError("Word letters must have nonzero exponents")

    @classmethod
    def generator(cls, index: int, exponent: int = 1) -> "Word":
        return cls(((index, exponent),)) if exponent else cls()

    @property
    def is_reduced(self) -> bool:
        return all(a[0] != b[0] for a, b in zip(self.letters, self.letters[1:]))

    @property
    def is_identity(self) -> bool:
        return not self.reduced().letters

    def reduced(self) -> "Word":
        stack: List[Tuple[int, int]] = []
        for index, exponent in self.letters:
            if stack and stack[-1][0] == index:
                total = stack[-1][1] + exponent
                stack.pop()
                if total:
                    stack.append((index, total))
            else:
                stack.append((index, exponent))
        return Word(tuple(stack))

    def inverse(self) -> "Word":
        return Word(tuple((index, -exponent) for index, exponent in reversed(self.letters)))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters).reduced()

    def power(self, exponent: int) -> "Word":
        base = self if exponent >= 0 else self.inverse()
        return Word(base.letters * abs(exponent)).reduced()

    def exponent_sums(self, rank: int) -> Vector:
        sums = [0] * rank
        for index, exponent in self.letters:
            if index >= rank:
                raise UnsupportedInputError(f"Generator index {index} outside rank {rank}")
            sums[index] += exponent
        return tuple(sums)

    def max_index(self) -> int:
        return max((index for index, _ in self.letters), default=-1)

    def format(self, names: Sequence[str]) -> str:
        if not self.letters:
            return "1"
        return " ".join(names[i] if e == 1 else f"{names[i]}^{e}" for i, e in self.letters)


def default_generator_names(count: int) -> Tuple[str, ...]:
    if count <= len(ascii_lowercase):
        return tuple(ascii_lowercase[:count])
    return tuple(f"x{i + 1}" for i in range(count))


@dataclass(frozen=True)
class GroupSpec:
    """Cyclic(order), Free(rank) or FinitelyPresented(generators, relators)."""

    kind: GroupKind
    generators: Tuple[str, ...]
    relators: Tuple[Word, ...] = ()
    order: Optional[int] = None

    def __post_init__(self):
        if self.kind == GroupKind.CYCLIC:
            if self.order is None or self.order < 1:
                raise UnsupportedInputError(f"Cyclic group order must be >= 1, got {self.order}")
        if len(set(self.generators)) != len(self.generators):
            raise UnsupportedInputError(f"Duplicate generator names in {self.generators}")
        for relator in self.relators:
            if relator.max_index() >= len(self.generators):
                raise UnsupportedInputError("Relator uses an undeclared generator")
            if not relator.is_reduced:
                raise UnsupportedInputError("Relators must be freely reduced words")

    @classmethod
    def cyclic(cls, order: int, generator: str = "t") -> "GroupSpec":
        return cls(GroupKind.CYCLIC, (generator,), order=order)

    @classmethod
    def free(cls, rank: int, names: Optional[Sequence[str]] = None) -> "GroupSpec":
        if rank < 0:
            raise UnsupportedInputError(f"Free rank must be >= 0, got {rank}")
        names = tuple(names) if names is not None else default_generator_names(rank)
        if len(names) != rank:
            raise UnsupportedInputError(f"Free group of rank {rank} needs {rank} names")
        return cls(GroupKind.FREE, names)

    @classmethod
    def finitely_presented(cls, generators: Sequence[str], relators: Sequence[Word]) -> "GroupSpec":
        return cls(GroupKind.FINITELY_PRESENTED, tuple(generators), tuple(r.reduced() for r in relators))

    @property
    def rank(self) -> int:
        """Number of generators."""
        return len(self.generators)

    @property
    def is_cyclic(self) -> bool:
        return self.kind == GroupKind.CYCLIC

    @property
    def is_trivial(self) -> bool:
        if self.kind == GroupKind.CYCLIC:
            return self.order == 1
        if self.kind == GroupKind.FREE:
            return self.rank == 0
        return self.rank == 0

    def defining_relators(self) -> Tuple[Word, ...]:
        if self.kind == GroupKind.CYCLIC:
            return (Word.generator(0, self.order),)
        return self.relators

    def describe(self) -> str:
        if self.kind == GroupKind.CYCLIC:
            return f"Z/{self.order}"
        if self.kind == GroupKind.FREE:
            return f"F{self.rank}"
        rels = ", ".join(r.format(self.generators) for r in self.relators)
        return f"<{', '.join(self.generators)} | {rels}>"


def surface_group(genus: int) -> GroupSpec:
    """Fundamental group of the closed orientable surface of the given genus."""
    if genus < 1:
        raise UnsupportedInputError(f"Surface genus must be >= 1, got {genus}")
    names = [n for i in range(genus) for n in (f"a{i + 1}", f"b{i + 1}")]
    letters = []
    for i in range(genus):
        a, b = 2 * i, 2 * i + 1
        letters += [(a, 1), (b, 1), (a, -1), (b, -1)]
    return GroupSpec.finitely_presented(names, [Word(tuple(letters))])


def baumslag_solitar(p: int, q: int) -> GroupSpec:
    """BS(p, q) = <a, b | b a^p b^-1 a^-q>."""
    if p == 0 or q == 0:
        raise UnsupportedInputError("Baumslag-Solitar exponents must be nonzero")
    return GroupSpec.finitely_presented(("a", "b"), [Word(((1, 1), (0, p), (1, -1), (0, -q)))])


def evaluate_in(group: GroupSpec, word: Word) -> Word:
    """Normal form of `word` in `group`: t^(e mod n) for cyclic, reduced word otherwise."""
    if group.kind == GroupKind.CYCLIC:
        exponent = word.exponent_sums(1)[0] % group.order if word.letters else 0
        return Word.generator(0, exponent)
    return word.reduced()


def is_identity_in(group: GroupSpec, word: Word) -> bool:
    if group.kind == GroupKind.CYCLIC:
        return not evaluate_in(group, word).letters
    reduced = word.reduced()
    if not reduced.letters:
        return True
    if group.kind == GroupKind.FINITELY_PRESENTED:
        return _is_relator_conjugate(group, reduced)
    return False


def _is_relator_conjugate(group: GroupSpec, word: Word) -> bool:
    # Only cyclic permutations of relators (and inverses) are recognised.
    def rotations(w: Word):
        letters = list(w.letters)
        for i in range(len(letters)):
            yield Word(tuple(letters[i:] + letters[:i])).reduced()

    for relator in group.relators:
        for candidate in (relator, relator.inverse()):
            if any(r == word for r in rotations(candidate)):
                return True
    return False


def substitute(word: Word, images: Sequence[Word]) -> Word:
    letters: List[Tuple[int, int]] = []
    for index, exponent in word.letters:
        letters.extend(images[index].power(exponent).letters)
    return Word(tuple(letters)).reduced()


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by the image word of each domain generator."""

    domain: GroupSpec
    codomain: GroupSpec
    images: Tuple[Word, ...]

    @property
    def is_cyclic_pair(self) -> bool:
        return self.domain.is_cyclic and self.codomain.is_cyclic

    @property
    def multiplier(self) -> int:
        """d in t -> s^d, reduced into [0, m)."""
        if not self.is_cyclic_pair:
            raise UnsupportedInputError("Multipliers exist only for cyclic -> cyclic homomorphisms")
        return self.images[0].exponent_sums(1)[0] % self.codomain.order if self.images[0].letters else 0

    @property
    def is_trivial(self) -> bool:
        return all(is_identity_in(self.codomain, w) for w in self.images)

    def apply(self, word: Word) -> Word:
        return evaluate_in(self.codomain, substitute(word, self.images))

    def describe(self) -> str:
        if self.is_cyclic_pair:
            return f"Z/{self.domain.order} -> Z/{self.codomain.order}, t -> s^{self.multiplier}"
        images = ", ".join(
            f"{g} -> {w.format(self.codomain.generators)}" for g, w in zip(self.domain.generators, self.images)
        )
        return f"{self.domain.describe()} -> {self.codomain.describe()}: {images}"


def make_hom(domain: GroupSpec, codomain: GroupSpec, images: Sequence[Word]) -> GroupHom:
    """Validated homomorphism: every domain relator must map to the identity."""
    if len(images) != domain.rank:
        raise HomomorphismError(f"{domain.describe()} has {domain.rank} generators, got {len(images)} images")
    for image in images:
        if image.max_index() >= codomain.rank:
            raise HomomorphismError(f"Image word uses a generator outside {codomain.describe()}")
    images = tuple(evaluate_in(codomain, w) for w in images)
    for relator in domain.defining_relators():
        image = substitute(relator, images)
        if not is_identity_in(codomain, image):
            raise HomomorphismError(
                f"Relator {relator.format(domain.generators)} maps to "
                f"{image.format(codomain.generators)} != 1 in {codomain.describe()}"
            )
    return GroupHom(domain, codomain, images)


def make_cyclic_hom(n: int, m: int, d: int) -> GroupHom:
    """t -> s^d from Z/n to Z/m; needs m | d*n."""
    if n < 1 or m < 1:
        raise HomomorphismError(f"Cyclic orders must be >= 1, got {n} and {m}")
    if (d * n) % m:
        raise HomomorphismError(f"t -> s^{d} is not a homomorphism Z/{n} -> Z/{m}: {m} does not divide {d * n}")
    hom = make_hom(GroupSpec.cyclic(n), GroupSpec.cyclic(m), [Word.generator(0, d % m)])
    logger.debug(f"Built {hom.describe()} (epimorphism={is_epimorphism(hom)})")
    return hom


def is_epimorphism(hom: GroupHom) -> bool:
    codomain = hom.codomain
    if codomain.is_trivial:
        return True
    if codomain.kind == GroupKind.CYCLIC:
        g = codomain.order
        for image in hom.images:
            g = gcd(g, image.exponent_sums(1)[0] if image.letters else 0)
        return g == 1
    if codomain.kind == GroupKind.FREE:
        from freegroups import is_surjective_free

        return is_surjective_free(hom.images, codomain.rank)
    raise UnsupportedInputError(f"Surjectivity onto {codomain.describe()} is not decidable here")


def compose_homs(outer: GroupHom, inner: GroupHom) -> GroupHom:
    """outer ∘ inner."""
    if inner.codomain != outer.domain:
        raise GroupMismatchError(f"Cannot compose {outer.describe()} after {inner.describe()}")
    return make_hom(inner.domain, outer.codomain, [outer.apply(w) for w in inner.images])


def restrict_to_image(hom: GroupHom) -> GroupHom:
    """Corestriction of a cyclic -> cyclic homomorphism onto its image."""
    if not hom.is_cyclic_pair:
        raise UnsupportedInputError("Corestriction is implemented for cyclic -> cyclic homomorphisms only")
    n, m, d = hom.domain.order, hom.codomain.order, hom.multiplier
    g = gcd(d, m)
    image_order = m // g
    restricted = make_cyclic_hom(n, image_order, (d // g) % image_order)
    logger.info(f"Corestricted {hom.describe()} to {restricted.describe()}")
    return restricted


@dataclass(frozen=True)
class GroupRingElement:
    """Element of Z[Z/n]; coefficients[i] is the coefficient of t^i."""

    order: int
    coefficients: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coefficients) != self.order:
            raise GroupMismatchError(f"Element of Z[Z/{self.order}] needs {self.order} coefficients")

    @classmethod
    def zero(cls, n: int) -> "GroupRingElement":
        return cls(n, (0,) * n)

    @classmethod
    def monomial(cls, n: int, power: int, coefficient: int = 1) -> "GroupRingElement":
        coefficients = [0] * n
        coefficients[power % n] = coefficient
        return cls(n, tuple(coefficients))

    @classmethod
    def one(cls, n: int) -> "GroupRingElement":
        return cls.monomial(n, 0)

    @classmethod
    def constant(cls, n: int, value: int) -> "GroupRingElement":
        return cls.monomial(n, 0, value)

    @property
    def group(self) -> GroupSpec:
        return GroupSpec.cyclic(self.order)

    def augmentation(self) -> int:
        return sum(self.coefficients)

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def _check(self, other: "GroupRingElement") -> None:
        if self.order != other.order:
            raise GroupMismatchError(f"Z[Z/{self.order}] and Z[Z/{other.order}] elements cannot be combined")

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check(other)
        return GroupRingElement(self.order, tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check(other)
        return GroupRingElement(self.order, tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self) -> "GroupRingElement":
        return self.scale(-1)

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        return ring_multiply(self, other)

    def scale(self, factor: int) -> "GroupRingElement":
        return GroupRingElement(self.order, tuple(factor * a for a in self.coefficients))

    def push_forward(self, multiplier: int, target_order: int) -> "GroupRingElement":
        """Image under Z[Z/n] -> Z[Z/m] induced by t -> s^multiplier."""
        out = [0] * target_order
        for i, c in enumerate(self.coefficients):
            if c:
                out[(i * multiplier) % target_order] += c
        return GroupRingElement(target_order, tuple(out))

    def regular_matrix(self) -> IntMatrix:
        """Matrix of multiplication by this element on Z[Z/n] = Z^n."""
        n, c = self.order, self.coefficients
        return IntMatrix(n, n, tuple(c[(p - q) % n] for p in range(n) for q in range(n)))

    def format(self, generator: str = "t") -> str:
        terms = []
        for i, c in enumerate(self.coefficients):
            if not c:
                continue
            mono = "1" if i == 0 else (generator if i == 1 else f"{generator}^{i}")
            if mono == "1":
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else ("-" + mono if c == -1 else f"{c}{mono}"))
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def ring_multiply(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    """Cyclic convolution modulo t^n = 1."""
    a._check(b)
    n = a.order
    out = [0] * n
    for i, x in enumerate(a.coefficients):
        if not x:
            continue
        for j, y in enumerate(b.coefficients):
            if y:
                out[(i + j) % n] += x * y
    return GroupRingElement(n, tuple(out))


def norm_element(n: int) -> GroupRingElement:
    """N = 1 + t + ... + t^(n-1)."""
    if n < 1:
        raise UnsupportedInputError(f"Group order must be >= 1, got {n}")
    return GroupRingElement(n, (1,) * n)


def generator_minus_one(n: int) -> GroupRingElement:
    """t - 1 (zero for the trivial group)."""
    return GroupRingElement.monomial(n, 1) - GroupRingElement.one(n)


@dataclass(frozen=True)
class GModule:
    """Z/n-module: cokernel of `relations` with `action` for the generator."""

    group: GroupSpec
    relations: IntMatrix
    action: IntMatrix
    name: str = "M"
    provenance: str = ""
    _powers: Dict[int, IntMatrix] = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if not self.group.is_cyclic:
            raise UnsupportedInputError("Coefficient modules are supported over cyclic groups only")
        if self.action.rows != self.action.cols or self.action.rows != self.relations.cols:
            raise UnsupportedInputError(
                f"Action {self.action.shape} does not match {self.relations.cols} module generators"
            )

    @property
    def rank(self) -> int:
        """Number of generators of the underlying abelian group presentation."""
        return self.relations.cols

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def is_free_abelian(self) -> bool:
        return self.relations.is_zero()

    def underlying(self) -> AbelianGroupInvariants:
        return cokernel_presentation(self.relations)

    def action_power(self, exponent: int) -> IntMatrix:
        exponent %= self.order
        if exponent not in self._powers:
            self._powers[exponent] = self.action.power(exponent)
        return self._powers[exponent]

    def represent(self, element: GroupRingElement) -> IntMatrix:
        """Action matrix of a group-ring element."""
        if element.order != self.order:
            raise GroupMismatchError(f"Z[Z/{element.order}] element acting on a Z/{self.order}-module")
        out = IntMatrix.zeros(self.rank, self.rank)
        for i, c in enumerate(element.coefficients):
            if c:
                out = out + self.action_power(i).scale(c)
        return out

    def relation_lattice(self) -> IntMatrix:
        """Columns span the relation lattice inside Z^rank."""
        return self.relations.transpose()

    def validate(self) -> None:
        """Check the action is well defined on the cokernel and has order dividing n."""
        lattice = self.relation_lattice()
        snf = smith_normal_form(lattice)
        for r in range(self.relations.rows):
            image = self.action.apply(self.relations.row(r))
            if solve_with_smith(snf, image) is None:
                raise UnsupportedInputError(f"Action of {self.name} does not preserve relation {r}")
        cycle = self.action.power(self.order) - IntMatrix.identity(self.rank)
        for j in range(self.rank):
            if solve_with_smith(snf, cycle.column(j)) is None:
                raise UnsupportedInputError(
                    f"Action of {self.name} does not have order dividing {self.order} on the cokernel"
                )

    def pullback(self, hom: GroupHom) -> "GModule":
        """Restriction of scalars along a cyclic homomorphism into this module's group."""
        if not hom.is_cyclic_pair or hom.codomain.order != self.order:
            raise GroupMismatchError(f"Cannot pull {self.name} back along {hom.describe()}")
        d = hom.multiplier
        return GModule(
            group=hom.domain,
            relations=self.relations,
            action=self.action_power(d),
            name=f"{self.name}|pullback",
            provenance=f"{self.name} pulled back along t -> s^{d} ({hom.describe()})",
        )

    def describe(self) -> str:
        return f"{self.name} = {self.underlying()} over Z/{self.order}"


def trivial_module(group: GroupSpec, modulus: int = 0) -> GModule:
    """Z (modulus 0) or Z/modulus with trivial action."""
    relations = IntMatrix.zeros(0, 1) if modulus == 0 else IntMatrix.from_rows([[modulus]])
    name = "Z" if modulus == 0 else f"Z/{modulus}"
    return GModule(group, relations, IntMatrix.identity(1), name=name)


def twisted_cyclic_module(group: GroupSpec, modulus: int, unit: int) -> GModule:
    """Z/modulus with the generator acting by multiplication by `unit`."""
    module = GModule(
        group,
        IntMatrix.from_rows([[modulus]]),
        IntMatrix.from_rows([[unit % modulus]]),
        name=f"Z/{modulus}(x{unit})",
    )
    module.validate()
    return module


def group_ring_module(group: GroupSpec) -> GModule:
    """Z[G] with basis 1, t, ..., t^(n-1)."""
    n = group.order
    shift = IntMatrix(n, n, tuple(1 if p == (q + 1) % n else 0 for p in range(n) for q in range(n)))
    return GModule(group, IntMatrix.zeros(0, n), shift, name=f"Z[Z/{n}]")


def augmentation_ideal(group: GroupSpec) -> GModule:
    """I(G) with basis u_i = t^(i-1)(t - 1), i = 1..n-1.

    t maps u_i to u_(i+1) and u_(n-1) to -(u_1 + ... + u_(n-1)).
    """
    if not group.is_cyclic:
        raise UnsupportedInputError("Augmentation ideals are built for cyclic groups only")
    n = group.order
    size = n - 1
    entries = [0] * (size * size)
    for i in range(size):
        if i + 1 < size:
            entries[(i + 1) * size + i] = 1
        else:
            for p in range(size):
                entries[p * size + i] = -1
    return GModule(group, IntMatrix.zeros(0, size), IntMatrix(size, size, tuple(entries)), name=f"I(Z/{n})")


def augmentation_coordinates(element: GroupRingElement) -> Vector:
    """Coordinates of an augmentation-zero element in the u_i basis."""
    if element.augmentation() != 0:
        raise UnsupportedInputError(f"{element.format()} does not lie in the augmentation ideal")
    coordinates, running = [], 0
    for c in element.coefficients[:-1]:
        running += c
        coordinates.append(-running)
    return tuple(coordinates)


def tensor_product(left: GModule, right: GModule) -> GModule:
    """Diagonal-action tensor product of free-abelian modules."""
    if left.group != right.group:
        raise GroupMismatchError(f"Cannot tensor modules over {left.group.describe()} and {right.group.describe()}")
    if not (left.is_free_abelian and right.is_free_abelian):
        raise UnsupportedInputError("Tensor products are supported for free-abelian modules only")
    rank = left.rank * right.rank
    return GModule(
        left.group,
        IntMatrix.zeros(0, rank),
        left.action.kron(right.action),
        name=f"{left.name}(x){right.name}",
    )


def tensor_power(module: GModule, k: int) -> GModule:
    """k-fold tensor power with diagonal action; k = 0 gives trivial Z."""
    if k < 0:
        raise UnsupportedInputError(f"Tensor power must be >= 0, got {k}")
    if not module.is_free_abelian:
        raise UnsupportedInputError(f"Tensor powers of {module.name} need a free-abelian module")
    if k == 0:
        return trivial_module(module.group)
    result = module
    for _ in range(k - 1):
        result = tensor_product(result, module)
    if k > 1:
        result = GModule(result.group, result.relations, result.action, name=f"{module.name}^(x{k})")
    return result


def module_family(group: GroupSpec, entries: Optional[Sequence[Dict]] = None) -> List[GModule]:
    """Named test-module family; defaults to Z, Z/n, Z[G], I(G), Z/n^2 twisted by n+1."""
    n = group.order
    if entries is None:
        entries = [
            {"kind": "trivial_z"},
            {"kind": "trivial_zm", "modulus": n},
            {"kind": "group_ring"},
            {"kind": "augmentation_ideal"},
            {"kind": "twisted_zm", "modulus": n * n, "unit": n + 1},
        ]
    family = []
    for entry in entries:
        kind = entry["kind"]
        if kind == "trivial_z":
            family.append(trivial_module(group))
        elif kind == "trivial_zm":
            family.append(trivial_module(group, _resolve(entry.get("modulus", "n"), n)))
        elif kind == "group_ring":
            family.append(group_ring_module(group))
        elif kind == "augmentation_ideal":
            family.append(augmentation_ideal(group))
        elif kind == "twisted_zm":
            family.append(
                twisted_cyclic_module(group, _resolve(entry.get("modulus", "n^2"), n), _resolve(entry.get("unit", "n+1"), n))
            )
        else:
            raise UnsupportedInputError(f"Unknown module family entry '{kind}'")
    return family


def _resolve(value, n: int) -> int:
    """Family parameters may be integers or the symbols n, n^2, n+1."""
    if isinstance(value, int):
        return value
    symbols = {"n": n, "n^2": n * n, "n+1": n + 1}
    if value not in symbols:
        raise UnsupportedInputError(f"Unknown module parameter '{value}'")
    return symbols[value]
