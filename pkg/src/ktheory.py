"""
Representation-ring model of K^0(BZ/N) and the cyclotomic infinite-cat witness.

K^0(BZ/N) is modelled by Z[eta]/(eta^N - 1) with eta the canonical line
bundle; reduced K-theory is the augmentation ideal. For t -> s^d from Z/n
onto Z/m the pullback sends eta_m to eta_n^j with j = d*n/m. A nonzero image
of eta_n^j - 1 in Z[x]/Phi_n, an integral domain, shows every power of the
pulled-back class is nonzero.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import divisors, isprime, primitive_root

from certificates import Certificate, CertificateKind
from errors import HomomorphismError, ResourceLimitError, UnsupportedInputError
from group_model import GroupHom, is_epimorphism

logger = logging.getLogger(__name__)

Polynomial = Tuple[int, ...]  # coefficients, lowest degree first

DOMAIN_ASSUMPTION = "Z[x]/Phi_n is an integral domain (Phi_n is irreducible over Q)"
BRIDGING_FACT = (
    "external: nonvanishing reduced K-theory powers of the pulled-back class in every "
    "degree imply cat = infinity"
)


@dataclass(frozen=True)
class KRingElement:
    """Element of Z[eta]/(eta^N - 1); coefficients[i] multiplies eta^i."""

    modulus: int
    coefficients: Tuple[int, ...]

    @classmethod
    def eta_power(cls, modulus: int, exponent: int, coefficient: int = 1) -> "KRingElement":
        out = [0] * modulus
        out[exponent % modulus] = coefficient
        return cls(modulus, tuple(out))

    @classmethod
    def one(cls, modulus: int) -> "KRingElement":
        return cls.eta_power(modulus, 0)

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def rank(self) -> int:
        """Virtual dimension, the augmentation."""
        return sum(self.coefficients)

    def __add__(self, other: "KRingElement") -> "KRingElement":
        return KRingElement(self.modulus, tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "KRingElement") -> "KRingElement":
        return KRingElement(self.modulus, tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __mul__(self, other: "KRingElement") -> "KRingElement":
        return k_multiply(self, other)

    def reduce_mod(self, p: int) -> "KRingElement":
        return KRingElement(self.modulus, tuple(c % p for c in self.coefficients))

    def max_coefficient_bits(self) -> int:
        return max((abs(c).bit_length() for c in self.coefficients), default=0)


def k_multiply(a: KRingElement, b: KRingElement, p: Optional[int] = None) -> KRingElement:
    if a.modulus != b.modulus:
        raise UnsupportedInputError(f"Cannot multiply K-ring elements mod eta^{a.modulus} and eta^{b.modulus}")
    n = a.modulus
    out = [0] * n
    for i, x in enumerate(a.coefficients):
        if x:
            for j, y in enumerate(b.coefficients):
                if y:
                    out[(i + j) % n] += x * y
    if p is not None:
        out = [c % p for c in out]
    return KRingElement(n, tuple(out))


def k_power(a: KRingElement, exponent: int, p: Optional[int] = None, max_bits: Optional[int] = None) -> KRingElement:
    """Binary powering, optionally over Z/p; max_bits bounds coefficient growth."""
    result, base = KRingElement.one(a.modulus), a
    while exponent:
        if exponent & 1:
            result = k_multiply(result, base, p)
        exponent >>= 1
        if exponent:
            base = k_multiply(base, base, p)
        if max_bits is not None and max(result.max_coefficient_bits(), base.max_coefficient_bits()) > max_bits:
            raise ResourceLimitError(
                f"K-ring power of {a.coefficients} exceeds coefficient bound", result.max_coefficient_bits(), max_bits
            )
    return result


@dataclass(frozen=True)
class KRingMap:
    """phi^*: K^0(BZ/m) -> K^0(BZ/n), eta_m -> eta_n^exponent."""

    source_modulus: int
    target_modulus: int
    exponent: int

    def apply(self, element: KRingElement) -> KRingElement:
        if element.modulus != self.source_modulus:
            raise UnsupportedInputError(f"Element mod eta^{element.modulus} is not in K^0(BZ/{self.source_modulus})")
        out = [0] * self.target_modulus
        for i, c in enumerate(element.coefficients):
            if c:
                out[(i * self.exponent) % self.target_modulus] += c
        return KRingElement(self.target_modulus, tuple(out))


def pullback_exponent(hom: GroupHom) -> int:
    n, m, d = hom.domain.order, hom.codomain.order, hom.multiplier
    return (d * n // m) % n


def pullback_k(hom: GroupHom) -> KRingMap:
    """Pullback on representation rings, checked multiplicative on all basis products."""
    if not hom.is_cyclic_pair:
        raise UnsupportedInputError("K-theory pullbacks are modelled for cyclic -> cyclic homomorphisms only")
    m = hom.codomain.order
    k_map = KRingMap(m, hom.domain.order, pullback_exponent(hom))
    for a in range(m):
        for b in range(m):
            x, y = KRingElement.eta_power(m, a), KRingElement.eta_power(m, b)
            if k_map.apply(x * y) != k_map.apply(x) * k_map.apply(y):
                raise HomomorphismError(f"Pullback along {hom.describe()} is not multiplicative")
    return k_map


def pulled_back_class(hom: GroupHom) -> KRingElement:
    """phi^*(eta_m - 1) = eta_n^j - 1."""
    n = hom.domain.order
    return KRingElement.eta_power(n, pullback_exponent(hom)) - KRingElement.one(n)


def cup_length_nonzero(hom: GroupHom, power: int, max_bits: Optional[int] = None) -> Tuple[bool, KRingElement]:
    """Is (eta_n^j - 1)^power nonzero in K^0(BZ/n)?"""
    value = k_power(pulled_back_class(hom), power, max_bits=max_bits)
    return (not value.is_zero(), value)


# Integer polynomial arithmetic for cyclotomic residues.

def _trim(poly: Sequence[int]) -> Polynomial:
    poly = list(poly)
    while poly and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


def poly_mul(a: Sequence[int], b: Sequence[int]) -> Polynomial:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_divmod(a: Sequence[int], b: Sequence[int]) -> Tuple[Polynomial, Polynomial]:
    """Division by a monic integer polynomial."""
    b = _trim(b)
    if not b or b[-1] != 1:
        raise UnsupportedInputError("Exact division needs a monic divisor")
    remainder = list(_trim(a))
    quotient = [0] * max(len(remainder) - len(b) + 1, 0)
    while len(remainder) >= len(b):
        shift = len(remainder) - len(b)
        factor = remainder[-1]
        quotient[shift] = factor
        for i, c in enumerate(b):
            remainder[shift + i] -= factor * c
        remainder = list(_trim(remainder))
    return _trim(quotient), _trim(remainder)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(d: int) -> Polynomial:
    """Phi_d by exact division of x^d - 1 by Phi_e for the proper divisors e of d."""
    if d < 1:
        raise UnsupportedInputError(f"Cyclotomic index must be >= 1, got {d}")
    numerator: Polynomial = (-1,) + (0,) * (d - 1) + (1,)
    for e in divisors(d)[:-1]:
        numerator, remainder = poly_divmod(numerator, cyclotomic_polynomial(e))
        if remainder:
            raise ArithmeticError(f"Phi_{e} does not divide x^{d} - 1 exactly")
    return numerator


def cyclotomic_residue(element: KRingElement, d: int) -> Polynomial:
    """Image of an element of Z[eta]/(eta^N - 1) in Z[x]/Phi_d, for d | N."""
    if element.modulus % d:
        raise UnsupportedInputError(f"Phi_{d} does not divide eta^{element.modulus} - 1")
    _, remainder = poly_divmod(element.coefficients, cyclotomic_polynomial(d))
    return remainder


def crt_degree_check(modulus: int) -> bool:
    """The factors Phi_d, d | N, have degrees summing to N."""
    return sum(len(cyclotomic_polynomial(d)) - 1 for d in divisors(modulus)) == modulus


def prime_with_root_of_unity(d: int, start: int = 2) -> int:
    """Smallest prime q >= start with d | q - 1."""
    q = max(start, d + 1)
    q += (1 - q) % d
    while not isprime(q):
        q += d
    return q


def evaluation_check(element: KRingElement, d: int, q: Optional[int] = None) -> bool:
    """Residue mod Phi_d and direct evaluation at a primitive d-th root of unity in F_q agree."""
    q = q or prime_with_root_of_unity(d)
    if (q - 1) % d:
        raise UnsupportedInputError(f"F_{q} has no primitive {d}-th root of unity")
    omega = pow(primitive_root(q), (q - 1) // d, q)

    def evaluate(poly: Sequence[int]) -> int:
        return sum(c * pow(omega, i, q) for i, c in enumerate(poly)) % q

    return evaluate(cyclotomic_residue(element, d)) == evaluate(element.coefficients)


@dataclass(frozen=True)
class ModPowerCheck:
    """Outcome of computing (eta^j - 1)^power over F_p."""

    p: int
    power: int
    exponent: int
    is_zero: bool


def mod_p_power_check(hom: GroupHom, p: int, power: int) -> ModPowerCheck:
    value = k_power(pulled_back_class(hom).reduce_mod(p), power, p=p)
    return ModPowerCheck(p=p, power=power, exponent=pullback_exponent(hom), is_zero=value.is_zero())


def mod_p_discrepancies(hom: GroupHom) -> List[Dict[str, int]]:
    """Mod-p vanishing of low powers for p dividing j, recorded for the report.

    Over F_p, (eta^(p^2) - 1)^(p^2) = eta^(p^4) - 1, which vanishes once
    p^4 is a multiple of n, so the mod-p reduction cannot witness infinite cat
    even when the integral residue does.
    """
    n, j = hom.domain.order, pullback_exponent(hom)
    records = []
    for p in sorted({p for p in range(2, n + 1) if isprime(p) and n % p == 0}):
        for power in (p * p, p * p + 1):
            check = mod_p_power_check(hom, p, power)
            if check.is_zero:
                records.append({"p": p, "power": power, "exponent": j, "zero_mod_p": 1})
    return records


def certify_cat_infinite(hom: GroupHom, direct_check_limit: int = 32) -> Optional[Certificate]:
    """Cyclotomic witness for cat = infinity, or None when the pullback is trivial."""
    if not hom.is_cyclic_pair:
        raise UnsupportedInputError("The cyclotomic witness is built for cyclic -> cyclic homomorphisms only")
    if not is_epimorphism(hom):
        raise HomomorphismError(f"{hom.describe()} is not an epimorphism; corestrict to the image first")
    n = hom.domain.order
    j = pullback_exponent(hom)
    if j == 0:
        logger.info(f"Pullback of eta along {hom.describe()} is trivial; no cat witness")
        return None

    element = pulled_back_class(hom)
    phi_n = cyclotomic_polynomial(n)
    residue = cyclotomic_residue(element, n)
    if not residue:
        logger.info(f"eta^{j} - 1 vanishes mod Phi_{n}; no cat witness")
        return None

    direct = [cup_length_nonzero(hom, k)[0] for k in range(1, direct_check_limit + 1)]
    if not all(direct):
        raise ArithmeticError(f"Direct power check contradicts the cyclotomic residue for {hom.describe()}")

    payload = {
        "n": n,
        "m": hom.codomain.order,
        "d": hom.multiplier,
        "exponent": j,
        "cyclotomic": list(phi_n),
        "residue": list(residue),
        "direct_checks_through": direct_check_limit,
        "crt_degree_check": int(crt_degree_check(n)),
        "evaluation_check": int(evaluation_check(element, n)),
        "mod_p_discrepancies": mod_p_discrepancies(hom),
    }
    logger.info(f"Certified cat = infinity for {hom.describe()} via residue {list(residue)} mod Phi_{n}")
    return Certificate(
        kind=CertificateKind.CAT_INFINITE,
        hom=hom,
        claims={"cat": "infinite"},
        payload=payload,
        assumptions=(DOMAIN_ASSUMPTION, BRIDGING_FACT),
    )
