"""
Free-group word algorithms and verification of factorizations through free groups.

Subgroups of F_m generated by finitely many words are decided with Stallings
folding: the folded core graph is the rose with m petals exactly when the
words generate all of F_m.
"""

import logging
from dataclasses import dataclass
from math import gcd
from typing import Dict, List, Optional, Sequence, Set, Tuple

from certificates import Certificate, CertificateKind, word_to_list
from errors import GroupCohomologyError, UnsupportedInputError
from group_model import GroupHom, GroupKind, GroupSpec, Word, evaluate_in, is_epimorphism, substitute

logger = logging.getLogger(__name__)

Edge = Tuple[int, int, int]  # (source vertex, generator index, target vertex)

FACTORIZATION_THEOREM = (
    "an epimorphism has cat = cd = 1 if and only if it factors through a free group "
    "by epimorphisms"
)


class FactorizationError(GroupCohomologyError):
    """A supplied factorization through a free group fails a named condition."""

    def __init__(self, condition: str, detail: str):
        super().__init__(f"{condition}: {detail}")
        self.condition = condition


@dataclass(frozen=True)
class CoreGraph:
    """Folded labelled graph with a base vertex; edges point along positive letters."""

    vertex_count: int
    edges: Tuple[Edge, ...]
    base: int = 0

    def is_rose(self, rank: int) -> bool:
        """True when the graph is one vertex carrying one loop per generator."""
        return self.vertex_count == 1 and sorted(label for _, label, _ in self.edges) == list(range(rank))

    def read(self, word: Word) -> Optional[int]:
        """Vertex reached by reading `word` from the base, or None if the path leaves the graph."""
        forward: Dict[Tuple[int, int], int] = {(u, g): v for u, g, v in self.edges}
        backward: Dict[Tuple[int, int], int] = {(v, g): u for u, g, v in self.edges}
        vertex = self.base
        for index, exponent in reduce_word(word).letters:
            step = forward if exponent > 0 else backward
            for _ in range(abs(exponent)):
                vertex = step.get((vertex, index))
                if vertex is None:
                    return None
        return vertex

    def contains(self, word: Word) -> bool:
        return self.read(word) == self.base

    def edge_list(self) -> List[List[int]]:
        return [list(e) for e in self.edges]


def reduce_word(word: Word) -> Word:
    """Free reduction; idempotent."""
    return word.reduced()


def fold_subgroup_graph(images: Sequence[Word], rank: int) -> CoreGraph:
    """Folded core graph of the subgroup of F_rank generated by `images`."""
    edges: Set[Edge] = set()
    next_vertex = 1
    for word in images:
        if word.max_index() >= rank:
            raise UnsupportedInputError(f"Word uses generator {word.max_index()} outside F{rank}")
        letters = [(i, 1 if e > 0 else -1) for i, e in reduce_word(word).letters for _ in range(abs(e))]
        current = 0
        for position, (index, sign) in enumerate(letters):
            last = position == len(letters) - 1
            target = 0 if last else next_vertex
            if not last:
                next_vertex += 1
            edges.add((current, index, target) if sign > 0 else (target, index, current))
            current = target

    folds = 0
    while True:
        merge = _find_fold(edges)
        if merge is None:
            break
        keep, drop = merge
        edges = {(keep if u == drop else u, g, keep if v == drop else v) for u, g, v in edges}
        folds += 1

    edges = _trim_to_core(edges)
    vertices = sorted({0} | {u for u, _, _ in edges} | {v for _, _, v in edges})
    relabel = {v: i for i, v in enumerate(vertices)}
    graph = CoreGraph(
        vertex_count=len(vertices),
        edges=tuple(sorted((relabel[u], g, relabel[v]) for u, g, v in edges)),
    )
    logger.debug(f"Folded {len(images)} words in F{rank}: {folds} folds, {graph.vertex_count} vertices")
    return graph


def _find_fold(edges: Set[Edge]) -> Optional[Tuple[int, int]]:
    outgoing: Dict[Tuple[int, int], int] = {}
    incoming: Dict[Tuple[int, int], int] = {}
    for u, g, v in sorted(edges):
        if (u, g) in outgoing and outgoing[(u, g)] != v:
            return _merge_pair(outgoing[(u, g)], v)
        outgoing[(u, g)] = v
        if (v, g) in incoming and incoming[(v, g)] != u:
            return _merge_pair(incoming[(v, g)], u)
        incoming[(v, g)] = u
    return None


def _merge_pair(a: int, b: int) -> Tuple[int, int]:
    return (min(a, b), max(a, b))


def _trim_to_core(edges: Set[Edge]) -> Set[Edge]:
    """Drop hanging trees: repeatedly remove degree-one vertices other than the base."""
    edges = set(edges)
    while True:
        degree: Dict[int, int] = {}
        for u, _, v in edges:
            degree[u] = degree.get(u, 0) + 1
            degree[v] = degree.get(v, 0) + 1
        leaves = {v for v, d in degree.items() if d == 1 and v != 0}
        if not leaves:
            return edges
        edges = {e for e in edges if e[0] not in leaves and e[2] not in leaves}


def is_surjective_free(images: Sequence[Word], rank: int) -> bool:
    """Do the words generate F_rank?"""
    if rank == 0:
        return True
    return fold_subgroup_graph(images, rank).is_rose(rank)


def _surjects_onto(codomain: GroupSpec, images: Sequence[Word]) -> bool:
    if codomain.kind == GroupKind.FREE:
        return is_surjective_free(images, codomain.rank)
    if codomain.kind == GroupKind.CYCLIC:
        g = codomain.order
        for w in images:
            g = gcd(g, w.exponent_sums(1)[0] if w.letters else 0)
        return g == 1
    raise UnsupportedInputError(f"Surjectivity onto {codomain.describe()} is not decidable here")


def verify_free_factorization(
    hom: GroupHom, q_images: Sequence[Word], r_images: Sequence[Word], n: int
) -> Certificate:
    """Check hom = r ∘ q with q: Γ ->> F_n and r: F_n ->> Λ, and certify cat = cd = 1."""
    domain, codomain = hom.domain, hom.codomain
    if codomain.kind not in (GroupKind.CYCLIC, GroupKind.FREE):
        raise UnsupportedInputError("Factorizations are verified into cyclic or free codomains only")
    if len(q_images) != domain.rank:
        raise FactorizationError("shape", f"q needs {domain.rank} images, got {len(q_images)}")
    if len(r_images) != n:
        raise FactorizationError("shape", f"r needs {n} images, got {len(r_images)}")

    for relator in domain.defining_relators():
        image = substitute(relator, q_images)
        if image.letters:
            raise FactorizationError(
                "relator not killed",
                f"q sends {relator.format(domain.generators)} to a nontrivial word of F{n}",
            )

    q_graph = fold_subgroup_graph(q_images, n)
    if not (n == 0 or q_graph.is_rose(n)):
        raise FactorizationError("q not surjective", f"q images generate a proper subgroup of F{n}")

    r_graph = fold_subgroup_graph(r_images, codomain.rank) if codomain.kind == GroupKind.FREE else None
    if not _surjects_onto(codomain, r_images):
        raise FactorizationError("r not surjective", f"r images do not generate {codomain.describe()}")

    for name, q_word, expected in zip(domain.generators, q_images, hom.images):
        composite = evaluate_in(codomain, substitute(q_word, r_images))
        if composite != evaluate_in(codomain, expected):
            raise FactorizationError("composite mismatch", f"r(q({name})) differs from the image of {name}")

    claims = {"cat": 0, "cd": 0} if codomain.is_trivial else {"cat": 1, "cd": 1}
    payload = {
        "free_rank": n,
        "q_images": [word_to_list(w) for w in q_images],
        "r_images": [word_to_list(w) for w in r_images],
        "q_graph": {"vertices": q_graph.vertex_count, "edges": q_graph.edge_list()},
        "r_graph": None if r_graph is None else {"vertices": r_graph.vertex_count, "edges": r_graph.edge_list()},
    }
    logger.info(f"Verified factorization of {hom.describe()} through F{n}")
    return Certificate(
        kind=CertificateKind.FACTORIZATION,
        hom=hom,
        claims=claims,
        payload=payload,
        assumptions=(FACTORIZATION_THEOREM,),
    )


def factorization_implies_epimorphism(hom: GroupHom) -> bool:
    """A composite of surjections is surjective; re-checked on the homomorphism itself."""
    return is_epimorphism(hom)
