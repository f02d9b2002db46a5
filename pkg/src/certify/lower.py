"""Lower bounds for cd: Berstein-Schwarz powers, the module family, and the cd = 0 test."""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

from certificates import Certificate, CertificateKind
from cohomology import PullbackWitness, bs_power_pullback, family_pullback
from errors import HomomorphismError, ResourceLimitError, UnsupportedInputError
from group_model import EPIMORPHISM_REDUCTION_NOTE, GroupHom, GroupKind, is_epimorphism, module_family
from resolutions import bar_rank_estimate

from .base import CertificateEngine
from .utils import witness_payload

logger = logging.getLogger(__name__)

CD_DEFINITION = "cd(phi) >= k whenever phi^* is nonzero on H^k for some coefficient module"
TRIVIALITY_THEOREM = "cd(phi) = 0 if and only if phi is the trivial homomorphism"


@dataclass(frozen=True)
class Refutation:
    """A claim shown false, with the certificate that refutes it when one exists."""

    hom: GroupHom
    claim: str
    reason: str
    certificate: Optional[Certificate] = None


@dataclass
class LowerBoundSearch:
    """Bookkeeping of one lower-bound search."""

    best: Optional[PullbackWitness] = None
    bs_degrees: List[int] = field(default_factory=list)
    bs_vanished_at: Optional[int] = None
    bs_stopped_by_limit: Optional[int] = None
    fallback_degrees: List[int] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return self.best.degree if self.best else 0

    def as_dict(self) -> Dict[str, Any]:
        return {
            "bs_degrees": list(self.bs_degrees),
            "bs_vanished_at": self.bs_vanished_at,
            "bs_stopped_by_limit": self.bs_stopped_by_limit,
            "fallback_degrees": list(self.fallback_degrees),
        }


class LowerBoundEngine(CertificateEngine):
    """
    cd lower bounds from nonzero pullbacks.

    phi^*(beta^k) is tried for k = 1, 2, ... on the bar resolution while
    (|codomain| - 1)^k stays within max_bar_rank; it vanishes for good once it
    vanishes. When the bar bound cuts the search short, the configured module
    family is tried on periodic resolutions from the top degree down.
    """

    def __init__(self, engine_config=None, metrics: bool = True, family_entries: Optional[Sequence[Dict]] = None):
        super().__init__(engine_config, metrics)
        self.family_entries = family_entries

    def bs_power_pullback(self, hom: GroupHom, degree: int) -> PullbackWitness:
        """phi^*(beta^degree) within the configured bar bounds."""
        if degree > self.config.max_bar_degree:
            raise ResourceLimitError(
                f"beta^{degree} needs bar degree {degree} > max_bar_degree",
                bar_rank_estimate(hom.codomain.order, degree),
                self.config.max_bar_degree,
            )
        with self._timed('bs_power_pullback', hom=hom.describe(), degree=degree) as metric:
            witness = bs_power_pullback(hom, degree, max_bar_rank=self.config.max_bar_rank)
            metric['nonzero'] = witness.nonzero
        return witness

    def is_cd_zero(self, hom: GroupHom) -> Union[Certificate, Refutation]:
        """
        CD_ZERO certificate iff the codomain is trivial, otherwise a refutation.

        For cyclic codomains the refutation carries a CD_LOWER(1) certificate
        built from the nonzero cocycle phi^*(beta).
        """
        _check_epimorphism(hom)
        if hom.codomain.is_trivial:
            self.logger.info(f"cd = 0 for {hom.describe()}: codomain is trivial")
            return Certificate(
                kind=CertificateKind.CD_ZERO,
                hom=hom,
                claims={"cd": 0, "cat": 0},
                payload={"codomain_trivial": True},
                assumptions=(TRIVIALITY_THEOREM,),
            )
        claim = "cd = 0"
        if hom.codomain.kind != GroupKind.CYCLIC:
            return Refutation(
                hom, claim, f"{hom.codomain.describe()} is nontrivial; phi is onto so phi is not trivial"
            )
        witness = self.bs_power_pullback(hom, 1)
        if not witness.nonzero:
            # contradicts the triviality theorem; surfaced rather than certified
            self.logger.error(f"phi^*(beta) vanished for nontrivial {hom.describe()}")
            return Refutation(hom, claim, "codomain nontrivial but phi^*(beta) vanished")
        return Refutation(hom, claim, "phi^*(beta) is not a coboundary", self.lower_certificate(witness))

    def lower_certificate(self, witness: PullbackWitness, search: Optional[LowerBoundSearch] = None) -> Certificate:
        if not witness.nonzero:
            raise UnsupportedInputError("A vanishing pullback does not certify a lower bound")
        payload: Dict[str, Any] = {"witness": witness_payload(witness)}
        if search is not None:
            payload["search"] = search.as_dict()
        return Certificate(
            kind=CertificateKind.CD_LOWER,
            hom=witness.hom,
            claims={"cd_lower": witness.degree},
            payload=payload,
            assumptions=(CD_DEFINITION,),
        )

    def search(self, hom: GroupHom, max_degree: Optional[int] = None) -> LowerBoundSearch:
        """Run the beta-power search and, when the bar bound stops it, the family fallback."""
        limit = self.config.max_degree if max_degree is None else max_degree
        _check_cyclic(hom)
        _check_epimorphism(hom)
        result = LowerBoundSearch()
        if hom.codomain.order == 1:
            return result

        m = hom.codomain.order
        for k in range(1, limit + 1):
            if k > self.config.max_bar_degree or bar_rank_estimate(m, k) > self.config.max_bar_rank:
                result.bs_stopped_by_limit = k
                break
            witness = self.bs_power_pullback(hom, k)
            result.bs_degrees.append(k)
            if not witness.nonzero:
                result.bs_vanished_at = k
                break
            result.best = witness

        if result.bs_stopped_by_limit is not None and self.config.lower_bound_fallback:
            modules = module_family(hom.codomain, self.family_entries)
            for k in range(limit, result.degree, -1):
                result.fallback_degrees.append(k)
                witness = next(
                    (w for w in (family_pullback(hom, module, k) for module in modules) if w is not None), None
                )
                if witness is not None:
                    result.best = witness
                    break
        return result

    def cd_lower_bound(self, hom: GroupHom, max_degree: Optional[int] = None) -> Certificate:
        """
        CD_LOWER(k) for the largest k found with a nonzero pullback.

        k = 0 (trivial codomain) yields a certificate with no witness.
        """
        with self._timed('cd_lower_bound', hom=hom.describe()) as metric:
            search = self.search(hom, max_degree)
            metric['cd_lower'] = search.degree
        if search.best is None:
            return Certificate(
                kind=CertificateKind.CD_LOWER,
                hom=hom,
                claims={"cd_lower": 0},
                payload={"witness": None, "search": search.as_dict()},
                assumptions=(CD_DEFINITION,),
            )
        self.logger.info(f"cd >= {search.degree} for {hom.describe()} ({search.best.source})")
        return self.lower_certificate(search.best, search)


def _check_cyclic(hom: GroupHom) -> None:
    if not hom.is_cyclic_pair:
        raise UnsupportedInputError(f"cd lower bounds need a cyclic -> cyclic homomorphism, got {hom.describe()}")


def _check_epimorphism(hom: GroupHom) -> None:
    if not is_epimorphism(hom):
        raise HomomorphismError(
            f"{hom.describe()} is not onto; corestrict it to its image first. {EPIMORPHISM_REDUCTION_NOTE}"
        )
