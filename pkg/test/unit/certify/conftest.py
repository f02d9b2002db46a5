#!/usr/bin/env python3
"""Fixtures for certificate engine tests."""

import pytest

from certificates import save_certificate
from config_loader import EngineConfig
from certify import CdCertifier
from freegroups import verify_free_factorization
from grammar import parse_text
from ktheory import certify_cat_infinite


@pytest.fixture(scope="module")
def fast_config():
    """Bar resolutions stop at degree 2; higher degrees go through the module family."""
    return EngineConfig(max_bar_degree=2)


@pytest.fixture(scope="module")
def exact_certificate(z16_z4, fast_config):
    """CD_EXACT certificate for Z/16 ->> Z/4."""
    return CdCertifier(fast_config, metrics=False).certify_cd(z16_z4)


@pytest.fixture(scope="module")
def cat_certificate(z16_z4):
    return certify_cat_infinite(z16_z4)


@pytest.fixture(scope="module")
def factorization_certificate():
    inputs = parse_text(
        "hom = hom{dom=fp{gens=a,b; rels=[a b a^-1 b^-1]}; cod=cyclic:2; images=[t, 1]}\n"
        "q = map{cod=free{gens=x}; images=[x, 1]}\n"
        "r = map{images=[t]}\n"
    )
    q_images, r_images, rank = inputs.factorization_maps()
    return verify_free_factorization(inputs.hom, q_images, r_images, rank)


@pytest.fixture
def saved(tmp_path):
    """Write a certificate to a temporary file and return the path."""
    def _save(certificate, name="cert.json"):
        return save_certificate(certificate, tmp_path / name)
    return _save
