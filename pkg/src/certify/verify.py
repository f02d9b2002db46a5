"""
Independent re-verification of certificates.

Nothing here reuses solver state: periodic differentials are rebuilt from
their closed form, chain-map squares and homotopy identities are recomputed
with ring_multiply, and (non-)coboundary claims are decided by exact
membership tests. Cyclotomic data is recomputed with sympy.
"""
import logging
from math import gcd
from typing import Any, Callable, Dict, List, Optional, Sequence

from sympy import Poly, cyclotomic_poly, rem, symbols

from certificates import (
    Certificate,
    CertificateKind,
    VerificationReport,
    module_from_dict,
    ring_element_from_list,
    word_from_list,
)
from errors import GroupCohomologyError
from exact_linalg import IntMatrix, solve_linear
from freegroups import FactorizationError, fold_subgroup_graph, verify_free_factorization
from group_model import GModule, GroupHom, GroupKind, GroupRingElement, ring_multiply

logger = logging.getLogger(__name__)


def periodic_boundary(order: int, degree: int) -> GroupRingElement:
    """d_degree of the periodic resolution: t - 1 in odd degrees, N in even ones."""
    if degree % 2:
        return GroupRingElement.monomial(order, 1) - GroupRingElement.one(order)
    return GroupRingElement(order, (1,) * order)


def _push(element: GroupRingElement, multiplier: int, target_order: int) -> GroupRingElement:
    out = [0] * target_order
    for i, c in enumerate(element.coefficients):
        out[(i * multiplier) % target_order] += c
    return GroupRingElement(target_order, tuple(out))


def _in_lattice(vector: Sequence[int], lattice: IntMatrix) -> bool:
    if not any(vector):
        return True
    if lattice.cols == 0:
        return False
    return solve_linear(lattice, vector) is not None


def _cyclic_data(hom: GroupHom, report: VerificationReport) -> Optional[tuple]:
    if not report.check("cyclic homomorphism", hom.is_cyclic_pair, hom.describe()):
        return None
    n, m, d = hom.domain.order, hom.codomain.order, hom.multiplier
    report.check("well defined", (d * n) % m == 0, f"{m} | {d}*{n}")
    report.check("epimorphism", gcd(d, m) == 1 or m == 1, f"gcd({d}, {m})")
    return n, m, d


def _check_chain_map(
    report: VerificationReport, prefix: str, chain: List[GroupRingElement], n: int, m: int, d: int
) -> None:
    report.check(f"{prefix}chain map augmentation", chain[0].augmentation() == 1, f"a_0 = {chain[0].format('s')}")
    for j in range(1, len(chain)):
        left = ring_multiply(periodic_boundary(m, j), chain[j])
        right = ring_multiply(chain[j - 1], _push(periodic_boundary(n, j), d, m))
        report.check(f"{prefix}chain map square at degree {j}", left == right)


def verify_pullback_witness(
    hom: GroupHom, witness: Dict[str, Any], degree: int, report: VerificationReport, prefix: str = ""
) -> None:
    """phi^* of the recorded class is a cocycle, equals the recorded one, and is not a coboundary."""
    data = _cyclic_data(hom, report)
    if data is None:
        return
    n, m, d = data
    report.check(f"{prefix}witness degree", witness["degree"] == degree, f"{witness['degree']} vs claim {degree}")
    module = module_from_dict(witness["module"])
    if not report.check(f"{prefix}module over codomain", module.order == m, module.name):
        return
    try:
        module.validate()
        valid = True
    except GroupCohomologyError as e:
        valid = False
        logger.debug(f"Module validation failed: {e}")
    report.check(f"{prefix}module action well defined", valid, module.name)

    k = witness["degree"]
    chain = [ring_element_from_list(m, a) for a in witness["chain_elements"]]
    if not report.check(f"{prefix}chain elements a_0..a_{k}", len(chain) == k + 1, f"{len(chain)} given"):
        return
    _check_chain_map(report, prefix, chain, n, m, d)

    f = tuple(witness["lambda_cocycle"])
    gamma = tuple(witness["gamma_cocycle"])
    g = module.rank
    if not report.check(f"{prefix}cochain sizes", len(f) == g and len(gamma) == g, f"module rank {g}"):
        return
    lattice = module.relation_lattice()
    report.check(
        f"{prefix}codomain cocycle condition",
        _in_lattice(module.represent(periodic_boundary(m, k + 1)).apply(f), lattice),
    )
    report.check(f"{prefix}domain cochain is the pullback", module.represent(chain[k]).apply(f) == gamma)

    pulled = GModule(hom.domain, module.relations, module.action.power(d), name=f"{module.name}|pullback")
    report.check(
        f"{prefix}domain cocycle condition",
        _in_lattice(pulled.represent(periodic_boundary(n, k + 1)).apply(gamma), lattice),
    )
    boundaries = pulled.represent(periodic_boundary(n, k))
    generators = boundaries.hstack(lattice) if lattice.cols else boundaries
    report.check(f"{prefix}domain cocycle is not a coboundary", not _in_lattice(gamma, generators))


def verify_homotopy(
    hom: GroupHom, homotopy: Dict[str, Any], threshold: int, report: VerificationReport, prefix: str = ""
) -> None:
    """Homotopy identities a_j = d'_(j+1) b_j + b_(j-1) phi(d_j) on (k, D] and the periodic extension."""
    data = _cyclic_data(hom, report)
    if data is None:
        return
    n, m, d = data
    k, top = homotopy["threshold"], homotopy["top_degree"]
    report.check(f"{prefix}threshold", k == threshold, f"{k} vs claim {threshold}")
    if m == 1:
        report.check(f"{prefix}codomain trivial", True)
        return

    chain = [ring_element_from_list(m, a) for a in homotopy["chain_elements"]]
    b_list = [ring_element_from_list(m, b) for b in homotopy["homotopy"]]
    shape_ok = len(chain) == top + 1 and len(b_list) == top - k + 1
    if not report.check(f"{prefix}homotopy shape", shape_ok, f"D = {top}, k = {k}"):
        return
    _check_chain_map(report, prefix, chain, n, m, d)

    def b(j: int) -> GroupRingElement:
        return b_list[j - k] if j >= k else GroupRingElement.zero(m)

    for j in range(k + 1, top + 1):
        rhs = ring_multiply(periodic_boundary(m, j + 1), b(j)) + ring_multiply(b(j - 1), _push(periodic_boundary(n, j), d, m))
        report.check(f"{prefix}homotopy identity at degree {j}", rhs == chain[j])

    q = d * n // m
    report.check(f"{prefix}periodic multiplier", homotopy["multiplier"] == q, f"q = {q}")
    report.check(f"{prefix}periodic extension flag", bool(homotopy["periodic"]))
    report.check(f"{prefix}two periods verified", top - k >= 4, f"D - k = {top - k}")
    for j in range(0, top - 1):
        report.check(f"{prefix}chain periodicity at degree {j}", chain[j + 2] == chain[j].scale(q))
    for j in range(k + 1, top - 1):
        report.check(f"{prefix}homotopy periodicity at degree {j}", b(j + 2) == b(j).scale(q))


def _verify_cd_zero(cert: Certificate, report: VerificationReport) -> None:
    report.check("claims", cert.claims.get("cd") == 0)
    report.check("codomain trivial", cert.hom.codomain.is_trivial, cert.hom.codomain.describe())


def _verify_lower(cert: Certificate, report: VerificationReport, payload=None, claim=None, prefix="") -> None:
    payload = cert.payload if payload is None else payload
    claim = cert.claims["cd_lower"] if claim is None else claim
    witness = payload.get("witness")
    if witness is None:
        report.check(f"{prefix}no witness claims only cd >= 0", claim == 0, f"claim {claim}")
        return
    verify_pullback_witness(cert.hom, witness, claim, report, prefix)


def _verify_upper(cert: Certificate, report: VerificationReport, payload=None, claim=None, prefix="") -> None:
    payload = cert.payload if payload is None else payload
    claim = cert.claims["cd_upper"] if claim is None else claim
    verify_homotopy(cert.hom, payload["homotopy"], claim, report, prefix)


def _verify_exact(cert: Certificate, report: VerificationReport) -> None:
    cd = cert.claims["cd"]
    _verify_lower(cert, report, cert.payload["lower"], cd, "lower: ")
    if report.check("upper bound present", cert.payload.get("upper") is not None):
        _verify_upper(cert, report, cert.payload["upper"], cd, "upper: ")
    if cert.payload.get("integral_witness") is not None:
        verify_pullback_witness(cert.hom, cert.payload["integral_witness"], cd, report, "integral: ")


def _verify_interval(cert: Certificate, report: VerificationReport) -> None:
    lower, upper = cert.claims["cd_lower"], cert.claims.get("cd_upper")
    _verify_lower(cert, report, cert.payload["lower"], lower, "lower: ")
    if upper is not None:
        report.check("interval ordered", lower <= upper, f"[{lower}, {upper}]")
        _verify_upper(cert, report, cert.payload["upper"], upper, "upper: ")


def _verify_cat_infinite(cert: Certificate, report: VerificationReport) -> None:
    data = _cyclic_data(cert.hom, report)
    if data is None:
        return
    n, m, d = data
    payload = cert.payload
    report.check("orders match", (payload["n"], payload["m"], payload["d"]) == (n, m, d))
    j = (d * n // m) % n
    report.check("pullback exponent", payload["exponent"] == j, f"j = {j}")

    x = symbols("x")
    phi = Poly(cyclotomic_poly(n, x), x)
    expected = [int(c) for c in reversed(phi.all_coeffs())]
    report.check("cyclotomic polynomial", payload["cyclotomic"] == expected, f"Phi_{n}")
    residue = Poly(rem(Poly(x ** j - 1, x), phi), x)
    residue_list = [int(c) for c in reversed(residue.all_coeffs())] if not residue.is_zero else []
    report.check("residue recomputed", payload["residue"] == residue_list)
    report.check("residue nonzero", bool(residue_list))

    element = GroupRingElement.monomial(n, j) - GroupRingElement.one(n)
    power = GroupRingElement.one(n)
    nonzero = True
    for _ in range(payload["direct_checks_through"]):
        power = ring_multiply(power, element)
        nonzero = nonzero and not power.is_zero()
    report.check(f"direct powers nonzero through {payload['direct_checks_through']}", nonzero)


def _verify_factorization(cert: Certificate, report: VerificationReport) -> None:
    payload = cert.payload
    rank = payload["free_rank"]
    q_images = [word_from_list(w) for w in payload["q_images"]]
    r_images = [word_from_list(w) for w in payload["r_images"]]
    try:
        recomputed = verify_free_factorization(cert.hom, q_images, r_images, rank)
    except FactorizationError as e:
        report.check(e.condition, False, str(e))
        return
    report.check("claims", recomputed.claims == cert.claims, str(cert.claims))
    q_graph = fold_subgroup_graph(q_images, rank)
    report.check("q graph refolded", q_graph.edge_list() == payload["q_graph"]["edges"])
    if cert.hom.codomain.kind == GroupKind.FREE:
        r_graph = fold_subgroup_graph(r_images, cert.hom.codomain.rank)
        report.check("r graph refolded", r_graph.edge_list() == payload["r_graph"]["edges"])


_VERIFIERS: Dict[CertificateKind, Callable[[Certificate, VerificationReport], None]] = {
    CertificateKind.CD_ZERO: _verify_cd_zero,
    CertificateKind.CD_LOWER: _verify_lower,
    CertificateKind.CD_UPPER: _verify_upper,
    CertificateKind.CD_EXACT: _verify_exact,
    CertificateKind.CD_INTERVAL: _verify_interval,
    CertificateKind.CAT_INFINITE: _verify_cat_infinite,
    CertificateKind.FACTORIZATION: _verify_factorization,
}


def verify_certificate(cert: Certificate) -> VerificationReport:
    """Recompute every identity a certificate claims; malformed payloads fail, never raise."""
    report = VerificationReport(kind=cert.kind.value)
    try:
        _VERIFIERS[cert.kind](cert, report)
    except (KeyError, IndexError, TypeError, ValueError) as e:
        report.check("payload well-formed", False, f"{type(e).__name__}: {e}")
    status = "passed" if report.passed else f"failed at {report.first_failure.name if report.first_failure else 'no checks'}"
    logger.info(f"Verified {cert.kind.value} certificate: {status}")
    return report
