"""Chain-homotopy annihilation: upper bounds for cd of cyclic epimorphisms."""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple, Union

from certificates import Certificate, CertificateKind, ring_element_to_list
from errors import HomomorphismError, LiftingError, UnsupportedInputError
from exact_linalg import LatticeReducer, kernel_basis, smith_normal_form, solve_with_smith
from group_model import EPIMORPHISM_REDUCTION_NOTE, GroupHom, GroupRingElement, is_epimorphism
from resolutions import induced_chain_map, periodic_resolution

from .base import CertificateEngine

logger = logging.getLogger(__name__)

HOMOTOPY_CRITERION = (
    "cd(phi) <= k when the induced chain map is chain homotopic to one vanishing above degree k"
)


@dataclass(frozen=True)
class HomotopyData:
    """Homotopy b_j: P_j(domain) -> P_(j+1)(codomain) killing psi above `threshold`.

    `chain_elements` are a_0..a_top of the canonical periodic chain map,
    `homotopy` holds b_threshold..b_top.
    """

    hom: GroupHom
    threshold: int
    top_degree: int
    chain_elements: Tuple[GroupRingElement, ...]
    homotopy: Tuple[GroupRingElement, ...]
    multiplier: int
    periodic: bool

    def b(self, degree: int) -> GroupRingElement:
        """b_degree, zero below the threshold."""
        if degree < self.threshold:
            return GroupRingElement.zero(self.hom.codomain.order)
        return self.homotopy[degree - self.threshold]

    def modified_chain_map(self) -> Tuple[GroupRingElement, ...]:
        """psi'_j = a_j - (d'_(j+1) b_j + b_(j-1) phi(d_j)) for j = 0..top."""
        m = self.hom.codomain.order
        if m == 1:
            return self.chain_elements
        target = periodic_resolution(self.hom.codomain, self.top_degree + 1)
        source = periodic_resolution(self.hom.domain, self.top_degree)
        d = self.hom.multiplier
        out = []
        for j in range(self.top_degree + 1):
            value = self.chain_elements[j] - target.differential(j + 1).element() * self.b(j)
            if j >= 1:
                pushed = source.differential(j).element().push_forward(d, m)
                value = value - self.b(j - 1) * pushed
            out.append(value)
        return tuple(out)

    def to_payload(self) -> Dict[str, Any]:
        return {
            "threshold": self.threshold,
            "top_degree": self.top_degree,
            "chain_elements": [ring_element_to_list(a) for a in self.chain_elements],
            "homotopy": [ring_element_to_list(b) for b in self.homotopy],
            "multiplier": self.multiplier,
            "periodic": self.periodic,
        }


@dataclass(frozen=True)
class HomotopyInfeasible:
    """No homotopy kills psi above `threshold`; the equation in `degree` has no solution."""

    hom: GroupHom
    threshold: int
    degree: int
    detail: str


HomotopyResult = Union[HomotopyData, HomotopyInfeasible]


class HomotopyEngine(CertificateEngine):
    """
    Solves the homotopy equations over Z[codomain] through the regular representation.

    The equations are a_j = d'_(j+1) b_j + b_(j-1) phi(d_j) for j = k+1..D with
    b_(k-1) = 0. Only the first one can fail: once it holds, exactness of the
    codomain resolution makes every later right-hand side a boundary.
    """

    def homotopy_annihilate(self, hom: GroupHom, threshold: int, top_degree: Optional[int] = None) -> HomotopyResult:
        """
        Find b_k..b_D with psi'_j = 0 for k < j <= D, or report the failing degree.

        Args:
            hom: cyclic -> cyclic epimorphism
            threshold: k, the degree above which psi' must vanish
            top_degree: D (EngineConfig.homotopy_top_degree when None)

        Returns:
            HomotopyData when feasible, HomotopyInfeasible otherwise
        """
        top = self.config.homotopy_top_degree if top_degree is None else top_degree
        _check_cyclic_epimorphism(hom)
        if threshold < 0:
            raise UnsupportedInputError(f"Annihilation threshold must be >= 0, got {threshold}")
        if top <= threshold:
            raise UnsupportedInputError(f"Top degree {top} must exceed the threshold {threshold}")

        with self._timed('homotopy_annihilate', hom=hom.describe(), threshold=threshold, top_degree=top) as metric:
            result = self._solve(hom, threshold, top)
            if isinstance(result, HomotopyInfeasible):
                metric['status'] = 'infeasible'
                metric['infeasible_degree'] = result.degree
            else:
                metric['status'] = 'feasible'
                metric['periodic'] = result.periodic
        return result

    def _solve(self, hom: GroupHom, k: int, top: int) -> HomotopyResult:
        n, m = hom.domain.order, hom.codomain.order
        d = hom.multiplier
        q = d * n // m

        if m == 1:
            # P_j of the trivial group vanishes for j >= 1; nothing to kill
            zero = GroupRingElement.zero(1)
            chain = (GroupRingElement.one(1),) + (zero,) * top
            return HomotopyData(hom, k, top, chain, (zero,) * (top - k + 1), q, True)

        source = periodic_resolution(hom.domain, top + 1)
        target = periodic_resolution(hom.codomain, top + 1)
        psi = induced_chain_map(hom, source, target, top_degree=top)
        a = [psi.element(j) for j in range(top + 1)]
        boundary = [None] + [target.differential(j).element() for j in range(1, top + 2)]
        pushed = [None] + [source.differential(j).element().push_forward(d, m) for j in range(1, top + 1)]

        # Degree k+1: unknowns (b_k, b_(k+1)) jointly
        joint = pushed[k + 1].regular_matrix().hstack(boundary[k + 2].regular_matrix())
        x = solve_with_smith(smith_normal_form(joint), a[k + 1].coefficients)
        if x is None:
            detail = (
                f"{a[k + 1].format('s')} is not of the form "
                f"{boundary[k + 2].format('s')}*b_{k + 1} + ({pushed[k + 1].format('s')})*b_{k}"
            )
            self.logger.info(f"Homotopy above {k} infeasible at degree {k + 1} for {hom.describe()}")
            return HomotopyInfeasible(hom, k, k + 1, detail)
        x = LatticeReducer(kernel_basis(joint).transpose(), from_end=True).reduce(x)
        homotopy: List[GroupRingElement] = [GroupRingElement(m, x[:m]), GroupRingElement(m, x[m:])]

        for j in range(k + 2, top + 1):
            rhs = a[j] - homotopy[-1] * pushed[j]
            matrix = boundary[j + 1].regular_matrix()
            y = solve_with_smith(smith_normal_form(matrix), rhs.coefficients)
            if y is None:
                raise LiftingError(f"Homotopy equation in degree {j} unsolvable after degree {k + 1} succeeded")
            y = LatticeReducer(kernel_basis(matrix).transpose(), from_end=True).reduce(y)
            homotopy.append(GroupRingElement(m, y))

        periodic = self._is_periodic(a, homotopy, k, top, q)
        return HomotopyData(hom, k, top, tuple(a), tuple(homotopy), q, periodic)

    def _is_periodic(self, a: List[GroupRingElement], homotopy: List[GroupRingElement], k: int, top: int, q: int) -> bool:
        """b_(j+2) = q b_j on [k+1, D-2] and a_(j+2) = q a_j on [0, D-2], over enough periods."""
        if top - k < 2 * self.config.periodic_min_periods:
            return False
        chain_ok = all(a[j + 2] == a[j].scale(q) for j in range(top - 1))
        homotopy_ok = all(homotopy[j + 2 - k] == homotopy[j - k].scale(q) for j in range(k + 1, top - 1))
        return chain_ok and homotopy_ok

    def cd_upper_bound(self, hom: GroupHom, start: int = 0, max_degree: Optional[int] = None) -> Tuple[Optional[HomotopyData], List[HomotopyInfeasible]]:
        """
        Smallest threshold k in [start, max_degree] with a periodic homotopy.

        Returns:
            (HomotopyData or None, infeasibility records for the thresholds tried before it)
        """
        limit = self.config.max_degree if max_degree is None else max_degree
        top = self.config.homotopy_top_degree
        failures: List[HomotopyInfeasible] = []
        for k in range(start, limit + 1):
            result = self.homotopy_annihilate(hom, k, max(top, k + 2 * self.config.periodic_min_periods))
            if isinstance(result, HomotopyInfeasible):
                failures.append(result)
                continue
            if result.periodic:
                return result, failures
            self.logger.warning(f"Homotopy above {k} found for {hom.describe()} without periodic structure")
        return None, failures

    def upper_certificate(self, data: HomotopyData) -> Certificate:
        """CD_UPPER certificate from a periodic homotopy."""
        if not data.periodic:
            raise UnsupportedInputError("Only periodic homotopies certify an upper bound in every degree")
        return Certificate(
            kind=CertificateKind.CD_UPPER,
            hom=data.hom,
            claims={"cd_upper": data.threshold},
            payload={"homotopy": data.to_payload()},
            assumptions=(HOMOTOPY_CRITERION,),
        )


def _check_cyclic_epimorphism(hom: GroupHom) -> None:
    if not hom.is_cyclic_pair:
        raise UnsupportedInputError(f"Homotopy certificates need a cyclic -> cyclic homomorphism, got {hom.describe()}")
    if not is_epimorphism(hom):
        raise HomomorphismError(f"{hom.describe()} is not onto. {EPIMORPHISM_REDUCTION_NOTE}")
