"""
Certificate package for grpcoho.

Provides engines for cd lower and upper bounds and independent re-verification.
"""
from .client import CdCertifier
from .lower import LowerBoundEngine, LowerBoundSearch, Refutation
from .upper import HomotopyData, HomotopyEngine, HomotopyInfeasible
from .verify import verify_certificate
from .utils import closed_form_cd, format_cd

__all__ = [
    'CdCertifier',
    'LowerBoundEngine',
    'LowerBoundSearch',
    'Refutation',
    'HomotopyEngine',
    'HomotopyData',
    'HomotopyInfeasible',
    'verify_certificate',
    'closed_form_cd',
    'format_cd'
]
