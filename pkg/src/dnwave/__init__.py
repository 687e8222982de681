"""Dnoidal waves of the Schrodinger-KdV system and their linearized spectra.

Moduli are passed as kappa (the elliptic modulus), never as m = kappa**2.
"""

from .elliptic import complete_E, complete_K, jacobi, legendre_check
from .wavefamily import DnoidalWave, WaveParams, build_wave, residuals, validate_params
from .operators import OperatorSet
from .stability import StabilityReport, sweep, verdict

__version__ = "0.1.0"
