#!/usr/bin/env python3
"""
Unit tests for cd lower bounds.
"""

import logging

import pytest

from certificates import Certificate, CertificateKind
from config_loader import EngineConfig
from certify import LowerBoundEngine, Refutation, verify_certificate
from errors import HomomorphismError, ResourceLimitError, UnsupportedInputError
from group_model import GroupSpec, Word, make_cyclic_hom, make_hom


@pytest.mark.unit
class TestCdZero:
    """Test the cd = 0 decision."""

    def test_trivial_codomain_certified(self):
        result = LowerBoundEngine(metrics=False).is_cd_zero(make_cyclic_hom(16, 1, 0))
        assert isinstance(result, Certificate)
        assert result.kind == CertificateKind.CD_ZERO
        assert result.claims == {"cd": 0, "cat": 0}

    def test_nontrivial_cyclic_refuted_with_witness(self, z16_z4):
        result = LowerBoundEngine(metrics=False).is_cd_zero(z16_z4)
        assert isinstance(result, Refutation)
        assert result.certificate.kind == CertificateKind.CD_LOWER
        assert result.certificate.claims == {"cd_lower": 1}

    def test_free_codomain_refuted_without_certificate(self):
        free = GroupSpec.free(1)
        result = LowerBoundEngine(metrics=False).is_cd_zero(make_hom(free, free, [Word.generator(0)]))
        assert isinstance(result, Refutation)
        assert result.certificate is None

    def test_non_epimorphism_rejected(self):
        with pytest.raises(HomomorphismError):
            LowerBoundEngine(metrics=False).is_cd_zero(make_cyclic_hom(8, 4, 2))

    @pytest.mark.parametrize(
        "n,m,d",
        [
            (1, 1, 0), (4, 1, 0), (7, 1, 0), (16, 1, 0),
            (2, 2, 1), (3, 3, 1), (3, 3, 2), (4, 2, 1), (4, 4, 3), (6, 2, 1),
            (6, 3, 2), (8, 2, 1), (8, 4, 1), (9, 3, 1), (9, 9, 2), (10, 5, 3),
            (12, 4, 1), (12, 6, 5), (15, 5, 2), (16, 4, 1),
        ],
    )
    def test_corpus(self, n, m, d):
        """CD_ZERO exactly for trivial codomains, otherwise a verified phi^*(beta) != 0."""
        result = LowerBoundEngine(metrics=False).is_cd_zero(make_cyclic_hom(n, m, d))
        if m == 1:
            assert isinstance(result, Certificate)
            assert result.kind == CertificateKind.CD_ZERO
        else:
            assert isinstance(result, Refutation)
            assert result.certificate.claims == {"cd_lower": 1}
            assert result.certificate.payload["witness"]["source"] == "berstein_schwarz"
        assert verify_certificate(result if m == 1 else result.certificate).passed


@pytest.mark.unit
class TestBsPowers:
    """Test the Berstein-Schwarz power search."""

    def test_degree_beyond_bar_cap(self, z16_z4):
        engine = LowerBoundEngine(EngineConfig(max_bar_degree=2), metrics=False)
        with pytest.raises(ResourceLimitError):
            engine.bs_power_pullback(z16_z4, 3)

    def test_vanishing_witness_does_not_certify(self):
        engine = LowerBoundEngine(metrics=False)
        witness = engine.bs_power_pullback(make_cyclic_hom(4, 1, 0), 1)
        with pytest.raises(UnsupportedInputError):
            engine.lower_certificate(witness)

    def test_identity_on_z2_reaches_the_cap(self, z2_identity):
        search = LowerBoundEngine(metrics=False).search(z2_identity, max_degree=3)
        assert search.degree == 3
        assert search.bs_degrees == [1, 2, 3]
        assert search.bs_vanished_at is None
        assert search.bs_stopped_by_limit is None

    def test_z8_z2(self):
        search = LowerBoundEngine(metrics=False).search(make_cyclic_hom(8, 2, 1))
        assert search.degree == 2
        assert search.bs_vanished_at == 3

    @pytest.mark.slow
    def test_z16_z4_vanishes_at_three(self, z16_z4):
        search = LowerBoundEngine(metrics=False).search(z16_z4)
        assert search.degree == 2
        assert search.bs_degrees == [1, 2, 3]
        assert search.bs_vanished_at == 3
        assert search.fallback_degrees == []

    def test_trivial_codomain(self):
        search = LowerBoundEngine(metrics=False).search(make_cyclic_hom(16, 1, 0))
        assert search.best is None
        assert search.degree == 0

    def test_non_cyclic_rejected(self, torus_group):
        hom = make_hom(torus_group, GroupSpec.cyclic(2), [Word.generator(0), Word()])
        with pytest.raises(UnsupportedInputError):
            LowerBoundEngine(metrics=False).search(hom)


@pytest.mark.unit
class TestFallback:
    """Test the module-family fallback past the bar bound."""

    def test_z27_z9(self):
        engine = LowerBoundEngine(metrics=False)
        search = engine.search(make_cyclic_hom(27, 9, 1))
        assert search.bs_stopped_by_limit == 2
        assert search.fallback_degrees == [8, 7, 6, 5, 4]
        assert search.degree == 4
        assert search.best.source == "module_family"

    def test_fallback_can_be_disabled(self):
        engine = LowerBoundEngine(EngineConfig(lower_bound_fallback=False), metrics=False)
        search = engine.search(make_cyclic_hom(27, 9, 1))
        assert search.degree == 1
        assert search.fallback_degrees == []

    def test_fallback_with_custom_family(self):
        engine = LowerBoundEngine(metrics=False, family_entries=[{"kind": "trivial_z"}])
        search = engine.search(make_cyclic_hom(27, 9, 1))
        assert search.degree == 4

    def test_fast_config_matches_full_search(self, z16_z4, fast_config):
        search = LowerBoundEngine(fast_config, metrics=False).search(z16_z4)
        assert search.bs_stopped_by_limit == 3
        assert search.fallback_degrees == [8, 7, 6, 5, 4, 3]
        assert search.degree == 2
        assert search.best.source == "berstein_schwarz"

    @pytest.mark.slow
    def test_z6_z3_grows_with_the_cap(self, z6_z3):
        engine = LowerBoundEngine(metrics=False)
        assert engine.search(z6_z3, max_degree=8).degree == 8
        assert engine.search(z6_z3, max_degree=6).degree == 6


@pytest.mark.unit
class TestLowerCertificates:
    """Test CD_LOWER certificates."""

    def test_certificate_payload(self, z16_z4, fast_config):
        certificate = LowerBoundEngine(fast_config, metrics=False).cd_lower_bound(z16_z4)
        assert certificate.kind == CertificateKind.CD_LOWER
        assert certificate.claims == {"cd_lower": 2}
        witness = certificate.payload["witness"]
        assert witness["degree"] == 2
        assert witness["source"] == "berstein_schwarz"
        assert certificate.payload["search"]["bs_degrees"] == [1, 2]

    def test_trivial_codomain_has_no_witness(self):
        certificate = LowerBoundEngine(metrics=False).cd_lower_bound(make_cyclic_hom(16, 1, 0))
        assert certificate.claims == {"cd_lower": 0}
        assert certificate.payload["witness"] is None

    def test_metrics_logged(self, z16_z4, caplog):
        engine = LowerBoundEngine()
        with caplog.at_level(logging.INFO):
            engine.bs_power_pullback(z16_z4, 1)
        assert any(r.getMessage().startswith("METRIC::") for r in caplog.records)
        assert engine.get_engine_stats()["operation_count"] == 1

    def test_resource_errors_logged_with_context(self, z16_z4, caplog):
        engine = LowerBoundEngine(EngineConfig(max_bar_rank=8), metrics=False)
        with caplog.at_level(logging.ERROR), pytest.raises(ResourceLimitError):
            engine.bs_power_pullback(z16_z4, 2)
        message = caplog.records[-1].getMessage()
        assert "Resources: rank_estimate=9, limit=8" in message
        assert "operation=bs_power_pullback" in message
