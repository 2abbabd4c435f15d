"""
Suites Module

The four command-line suites and their entry functions.
"""

from .base_suite import BaseSuite, CheckResult
from .decay_suite import DecaySuite, cmd_decay
from .relax_suite import RelaxSuite, cmd_relax
from .spectrum_suite import SpectrumSuite, canonical_wavevectors, cmd_spectrum
from .verify_suite import VerifySuite, cmd_verify

COMMANDS = {
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "relax": cmd_relax,
    "decay": cmd_decay,
}

__all__ = [
    'BaseSuite', 'CheckResult', 'VerifySuite', 'SpectrumSuite', 'RelaxSuite', 'DecaySuite',
    'cmd_verify', 'cmd_spectrum', 'cmd_relax', 'cmd_decay', 'canonical_wavevectors', 'COMMANDS',
]
