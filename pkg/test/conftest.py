#!/usr/bin/env python3
"""
Global pytest configuration and shared fixtures.

This file contains fixtures that are shared between unit and integration tests.
Specific fixtures for unit tests should go in test/unit/conftest.py
Specific fixtures for integration tests should go in test/integration/conftest.py
"""

import pytest
import sys
from pathlib import Path

# Configure pytest marks
def pytest_configure(config):
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests (fast, exact arithmetic only)"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as end-to-end tests through the CLI and YAML configuration"
    )
    config.addinivalue_line(
        "markers", "slow: marks tests that take more than a few seconds"
    )

# Add src to path for all tests
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from group_model import make_cyclic_hom  # noqa: E402


# Global homomorphism fixtures that can be used by both unit and integration tests
@pytest.fixture(scope="session")
def known_cd():
    """Known cd values and intervals, keyed by (n, m, d)."""
    return {
        (16, 4, 1): (2, 2),
        (4, 2, 1): (2, 2),
        (9, 3, 1): (2, 2),
        (8, 2, 1): (2, 2),
        (27, 9, 1): (4, 4),
        (8, 4, 1): (4, 4),
    }


@pytest.fixture(scope="session")
def z16_z4():
    """Reduction Z/16 ->> Z/4, the running example."""
    return make_cyclic_hom(16, 4, 1)


@pytest.fixture(scope="session")
def z6_z3():
    """t -> s^2 from Z/6 onto Z/3; cd is not settled by a periodic homotopy."""
    return make_cyclic_hom(6, 3, 2)


@pytest.fixture(scope="session")
def z2_identity():
    return make_cyclic_hom(2, 2, 1)


@pytest.fixture(scope="session")
def project_root():
    return Path(__file__).parent.parent


@pytest.fixture(scope="session")
def config_dir(project_root):
    """Path to the shipped YAML configuration."""
    return project_root / 'config'


@pytest.fixture(scope="session")
def inputs_path(project_root):
    """Path to the sample input files."""
    return project_root / 'inputs'


# Helper fixtures for test organization
@pytest.fixture
def test_output_dir(tmp_path):
    """Create a temporary directory for test outputs."""
    output_dir = tmp_path / "test_output"
    output_dir.mkdir(exist_ok=True)
    return output_dir
