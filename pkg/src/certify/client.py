"""Main certificate coordinator: exact cd verdicts and corpus surveys."""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, Optional, Sequence, Tuple

import pandas as pd

from certificates import Certificate, CertificateKind
from cohomology import integral_pullback
from config_loader import CorpusConfig, EngineConfig
from group_model import GroupHom, make_cyclic_hom
from ktheory import certify_cat_infinite

from .lower import CD_DEFINITION, LowerBoundEngine
from .upper import HOMOTOPY_CRITERION, HomotopyEngine
from .utils import closed_form_cd, witness_payload

SURVEY_COLUMNS = ["name", "n", "m", "d", "cd_lower", "cd_upper", "periodic", "cd_closed_form", "cat_infinite"]


class CdCertifier:
    """
    Coordinates the lower-bound and homotopy engines.

    This is the primary interface for cd certificates.
    """

    def __init__(
        self,
        engine_config: Optional[EngineConfig] = None,
        metrics: bool = True,
        family_entries: Optional[Sequence[Dict]] = None,
    ):
        """Initialize both engines with one shared configuration."""
        self.config = engine_config or EngineConfig()
        self.logger = logging.getLogger(self.__class__.__name__)
        self._lower = LowerBoundEngine(self.config, metrics, family_entries)
        self._upper = HomotopyEngine(self.config, metrics)

    @property
    def lower(self) -> LowerBoundEngine:
        """Access lower-bound operations."""
        return self._lower

    @property
    def upper(self) -> HomotopyEngine:
        """Access homotopy annihilation operations."""
        return self._upper

    def certify_cd(self, hom: GroupHom, max_degree: Optional[int] = None) -> Certificate:
        """
        CD_EXACT when the lower bound meets a periodic homotopy threshold, else CD_INTERVAL.

        A trivial codomain short-circuits to the CD_ZERO certificate.
        """
        if hom.is_cyclic_pair and hom.codomain.order == 1:
            return self._lower.is_cd_zero(hom)

        lower = self._lower.cd_lower_bound(hom, max_degree)
        k = lower.claims["cd_lower"]
        data, _ = self._upper.cd_upper_bound(hom, start=k, max_degree=max_degree)

        payload = {"lower": lower.payload, "upper": None, "integral_witness": None}
        if data is not None:
            payload["upper"] = {"homotopy": data.to_payload()}
        if k >= 1:
            integral = integral_pullback(hom, k)
            if integral is not None:
                payload["integral_witness"] = witness_payload(integral)

        assumptions = (CD_DEFINITION, HOMOTOPY_CRITERION)
        if data is not None and data.threshold == k:
            self.logger.info(f"cd = {k} (exact) for {hom.describe()}")
            return Certificate(CertificateKind.CD_EXACT, hom, {"cd": k}, payload, assumptions)

        upper = data.threshold if data is not None else None
        self.logger.info(f"cd in [{k}, {'unknown' if upper is None else upper}] for {hom.describe()}")
        return Certificate(CertificateKind.CD_INTERVAL, hom, {"cd_lower": k, "cd_upper": upper}, payload, assumptions)

    def survey(self, corpus: Iterable[Tuple[str, int, int, int]]) -> pd.DataFrame:
        """
        cd interval, closed-form cross-check and cat verdict for each (name, n, m, d).

        Returns:
            DataFrame with SURVEY_COLUMNS, one row per homomorphism in corpus order
        """
        entries = list(corpus)
        workers = max(1, self.config.max_workers)
        if workers > 1 and len(entries) > 1:
            # map() keeps corpus order
            with ThreadPoolExecutor(max_workers=workers) as executor:
                rows = list(executor.map(lambda entry: self._survey_row(*entry), entries))
        else:
            rows = [self._survey_row(*entry) for entry in entries]
        # object dtype keeps None as "unbounded" instead of NaN
        return pd.DataFrame(rows, columns=SURVEY_COLUMNS, dtype=object)

    def _survey_row(self, name: str, n: int, m: int, d: int) -> Dict:
        hom = make_cyclic_hom(n, m, d)
        certificate = self.certify_cd(hom)
        if certificate.kind == CertificateKind.CD_ZERO:
            lower, upper, periodic = 0, 0, True
        elif certificate.kind == CertificateKind.CD_EXACT:
            lower = upper = certificate.claims["cd"]
            periodic = True
        else:
            lower, upper = certificate.claims["cd_lower"], certificate.claims["cd_upper"]
            periodic = upper is not None
        closed = closed_form_cd(hom)
        cat = certify_cat_infinite(hom, self.config.k_theory_max_power) is not None if m > 1 else False
        if closed is not None and not (lower <= closed and (upper is None or closed <= upper)):
            self.logger.warning(f"Closed form {closed} lies outside [{lower}, {upper}] for {name}")
        return {
            "name": name,
            "n": n,
            "m": m,
            "d": d,
            "cd_lower": lower,
            "cd_upper": upper,
            "periodic": periodic,
            "cd_closed_form": closed,
            "cat_infinite": cat,
        }

    def survey_config(self, corpus: CorpusConfig) -> pd.DataFrame:
        """survey() over a CorpusConfig."""
        return self.survey((e.name, e.n, e.m, e.d) for e in corpus.entries)

    def get_stats(self) -> Dict[str, Dict]:
        """Per-engine operation statistics."""
        return {
            'lower': self._lower.get_engine_stats(),
            'upper': self._upper.get_engine_stats(),
        }
