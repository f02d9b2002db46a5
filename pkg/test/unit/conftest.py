#!/usr/bin/env python3
"""
Pytest configuration for unit tests.

Unit tests exercise the engines directly, with small exact inputs.
"""

import pytest
import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent / 'src'))

from group_model import GroupSpec  # noqa: E402


@pytest.fixture
def z4():
    return GroupSpec.cyclic(4)


@pytest.fixture
def z16():
    return GroupSpec.cyclic(16)


@pytest.fixture
def trivial_group():
    return GroupSpec.cyclic(1)


@pytest.fixture
def torus_group():
    """Z^2 as <a, b | a b a^-1 b^-1>."""
    from grammar import parse_value
    return parse_value("fp{gens=a,b; rels=[a b a^-1 b^-1]}")
