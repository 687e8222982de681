"""Jacobi elliptic functions and complete elliptic integrals.

Every routine here is parameterized by the *modulus* ``kappa`` and not by
the parameter ``m = kappa**2`` that scipy and many references use::

    K(kappa) = int_0^{pi/2} dtheta / sqrt(1 - kappa**2 sin(theta)**2)

so ``complete_K(0.5)`` equals ``scipy.special.ellipk(0.25)``.

K and E come from the arithmetic-geometric mean; sn, cn, dn come from the
AGM backward recurrence (descending Landen transformation).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DivergenceError, DomainError

AGM_RTOL = 1e-15
AGM_MAXITER = 64
# below this value of 1 - kappa**2 the hyperbolic limit is used for sn, cn, dn
HYPERBOLIC_SWITCH = 1e-14


class EllipticTriple(NamedTuple):
    sn: np.ndarray | float
    cn: np.ndarray | float
    dn: np.ndarray | float


def check_modulus(kappa: float, *, open_interval: bool = False) -> float:
    """Validate a modulus and return it as a float.

    With ``open_interval=True`` the endpoints 0 and 1 are rejected too.
    """
    kappa = float(kappa)
    if not math.isfinite(kappa) or kappa < 0.0 or kappa > 1.0:
        raise DomainError(f"modulus kappa={kappa!r} outside [0, 1]")
    if open_interval and (kappa == 0.0 or kappa == 1.0):
        raise DomainError(f"modulus kappa={kappa!r} outside (0, 1)")
    return kappa


def complementary(kappa: float) -> float:
    """kappa' = sqrt(1 - kappa**2), computed without cancellation near 1."""
    return math.sqrt((1.0 - kappa) * (1.0 + kappa))


def _agm_sequence(kappa: float):
    """Return the AGM sequences (a_n, c_n) started from (1, kappa', kappa)."""
    a, b, c = 1.0, complementary(kappa), kappa
    a_seq, c_seq = [a], [c]
    for _ in range(AGM_MAXITER):
        if abs(a - b) <= AGM_RTOL * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    return a_seq, c_seq


def complete_K(kappa: float) -> float:
    """Complete elliptic integral of the first kind, K(kappa) = pi / (2 AGM(1, kappa'))."""
    kappa = check_modulus(kappa)
    if kappa == 1.0:
        raise DivergenceError("K(kappa) diverges at kappa = 1")
    a_seq, _ = _agm_sequence(kappa)
    return math.pi / (2.0 * a_seq[-1])


def complete_E(kappa: float) -> float:
    """Complete elliptic integral of the second kind.

    Uses E = K * (1 - sum_n 2**(n-1) c_n**2) along the AGM sequence.
    """
    kappa = check_modulus(kappa)
    if kappa == 1.0:
        return 1.0
    a_seq, c_seq = _agm_sequence(kappa)
    s = sum(2.0 ** (n - 1) * c * c for n, c in enumerate(c_seq))
    return math.pi / (2.0 * a_seq[-1]) * (1.0 - s)


def jacobi(y, kappa: float) -> EllipticTriple:
    """Evaluate sn, cn and dn at ``y`` (scalar or array) for modulus ``kappa``."""
    kappa = check_modulus(kappa)
    scalar = np.ndim(y) == 0
    u = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError("jacobi argument must be finite")

    if kappa == 0.0:
        sn, cn, dn = np.sin(u), np.cos(u), np.ones_like(u)
    elif (1.0 - kappa) * (1.0 + kappa) < HYPERBOLIC_SWITCH:
        sech = 1.0 / np.cosh(u)
        sn, cn, dn = np.tanh(u), sech, sech
    else:
        a_seq, c_seq = _agm_sequence(kappa)
        if len(a_seq) == 1:
            # kappa so small that the AGM is already converged; force one step
            a0, b0 = 1.0, complementary(kappa)
            a_seq.append(0.5 * (a0 + b0))
            c_seq.append(0.5 * (a0 - b0))
        n = len(a_seq) - 1
        phi = (2.0**n) * a_seq[n] * u
        for j in range(n, 0, -1):
            phi = 0.5 * (phi + np.arcsin(c_seq[j] / a_seq[j] * np.sin(phi)))
        sn, cn = np.sin(phi), np.cos(phi)
        # dn > 0 for kappa < 1; the square root keeps kappa^2 sn^2 + dn^2 = 1 tight
        dn = np.sqrt((1.0 - kappa * sn) * (1.0 + kappa * sn))

    if scalar:
        return EllipticTriple(float(sn), float(cn), float(dn))
    return EllipticTriple(sn, cn, dn)


def legendre_check(kappa: float) -> float:
    """Defect of Legendre's relation E K' + E' K - K K' - pi/2 (zero in exact arithmetic)."""
    kappa = check_modulus(kappa, open_interval=True)
    kp = complementary(kappa)
    K, E = complete_K(kappa), complete_E(kappa)
    Kp, Ep = complete_K(kp), complete_E(kp)
    return E * Kp + Ep * K - K * Kp - 0.5 * math.pi
