"""Certificate utility functions for grpcoho."""
import logging
from typing import Any, Dict, Optional

from certificates import module_to_dict, ring_element_to_list
from cohomology import PullbackWitness
from errors import UnsupportedInputError
from group_model import GroupHom

logger = logging.getLogger(__name__)


def closed_form_cd(hom: GroupHom) -> Optional[int]:
    """
    Conjectured cd of t -> s^d from Z/n onto Z/m: 2 * max{j : (n/m)^j != 0 mod n}.

    Returns None when every power of n/m survives (the bound is unbounded),
    0 for a trivial codomain. Only a cross-check; certificates never use it.

    Example:
        >>> closed_form_cd(make_cyclic_hom(16, 4, 1))
        2
    """
    if not hom.is_cyclic_pair:
        raise UnsupportedInputError("The closed form is stated for cyclic -> cyclic epimorphisms")
    n, m = hom.domain.order, hom.codomain.order
    if m == 1:
        return 0
    ratio = n // m
    value = 1
    # powers of ratio mod n either reach 0 within log2(n) steps or never do
    for j in range(n + 1):
        value = (value * ratio) % n
        if value == 0:
            return 2 * j
    return None


def witness_payload(witness: PullbackWitness) -> Dict[str, Any]:
    """Raw numbers of a pullback witness, ready for a certificate payload."""
    return {
        "degree": witness.degree,
        "source": witness.source,
        "module": module_to_dict(witness.module),
        "lambda_cocycle": list(witness.lambda_cocycle),
        "chain_elements": [ring_element_to_list(a) for a in witness.chain_elements],
        "gamma_cocycle": list(witness.gamma_cocycle),
    }


def format_cd(lower: int, upper: Optional[int]) -> str:
    """'2 (exact)', '[2, 4]' or '[8, unknown]'."""
    if upper is not None and lower == upper:
        return f"{lower} (exact)"
    return f"[{lower}, {'unknown' if upper is None else upper}]"
