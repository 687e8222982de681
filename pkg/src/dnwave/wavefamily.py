"""Parameters and profiles of the dnoidal traveling waves.

For speed c > 1, frequency omega > c**2/4 and dispersion
0 < alpha < (c - 1) / (4 sigma) with sigma = omega - c**2/4, the pair

    phi(x) = phi0 * dn(gamma x, kappa),   psi(x) = A * phi(x)**2

solves the profile system

    phi'' - sigma phi + phi psi = 0
    (1 - c) psi + beta psi**2 + alpha psi'' + phi**2 / 2 = b

with beta = 3 alpha.  The wave is 2T-periodic with T = K(kappa) / gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import elliptic
from .discretize import SpectralGrid, make_grid, spectral_derivative
from .errors import DegenerateModulus, DomainError, GridMismatch, InadmissibleParameters

DEFAULT_C = 2.0
DEFAULT_OMEGA = 1.5
DEFAULT_ALPHA = 0.25
DEFAULT_N = 256


def validate_params(c: float, omega: float, alpha: float) -> float:
    """Check the existence inequalities and return sigma = omega - c**2/4."""
    c, omega, alpha = float(c), float(omega), float(alpha)
    for name, value in (("c", c), ("omega", omega), ("alpha", alpha)):
        if not math.isfinite(value):
            raise InadmissibleParameters(f"{name} must be finite, got {value!r}")
    if not c > 1.0:
        raise InadmissibleParameters(f"c must exceed 1 (need c > 1), got c={c!r}")
    sigma = omega - 0.25 * c * c
    if not sigma > 0.0:
        raise InadmissibleParameters(
            f"omega must exceed c^2/4 (need omega > c^2/4 = {0.25 * c * c!r}), got omega={omega!r}"
        )
    bound = (c - 1.0) / (4.0 * sigma)
    if not 0.0 < alpha < bound:
        raise InadmissibleParameters(
            f"alpha must lie in (0, (c-1)/(4 sigma)) = (0, {bound!r}), got alpha={alpha!r}"
        )
    return sigma


@dataclass(frozen=True)
class WaveParams:
    c: float
    omega: float
    sigma: float
    alpha: float
    beta: float
    kappa: float
    A: float
    gamma: float
    phi0: float
    b: float
    T: float

    @classmethod
    def from_physical(cls, c: float, omega: float, alpha: float, kappa: float) -> "WaveParams":
        sigma = validate_params(c, omega, alpha)
        try:
            kappa = elliptic.check_modulus(kappa, open_interval=True)
        except DomainError as exc:
            raise DegenerateModulus(f"kappa must lie strictly inside (0, 1), got {kappa!r}") from exc
        c, omega, alpha = float(c), float(omega), float(alpha)
        A = 1.0 / (2.0 * (c - 1.0 - 4.0 * alpha * sigma))
        gamma2 = sigma / (2.0 - kappa * kappa)
        gamma = math.sqrt(gamma2)
        phi0 = math.sqrt(2.0 * gamma2 / A)
        b = -4.0 * alpha * (1.0 - kappa) * (1.0 + kappa) * gamma2 * gamma2
        T = elliptic.complete_K(kappa) / gamma
        return cls(c, omega, sigma, alpha, 3.0 * alpha, kappa, A, gamma, phi0, b, T)

    @property
    def key(self) -> tuple[float, float, float, float]:
        return (self.c, self.omega, self.alpha, self.kappa)

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "omega": self.omega,
            "sigma": self.sigma,
            "alpha": self.alpha,
            "beta": self.beta,
            "kappa": self.kappa,
            "A": self.A,
            "gamma": self.gamma,
            "phi0": self.phi0,
            "b": self.b,
            "T": self.T,
        }


@dataclass(frozen=True)
class DnoidalWave:
    params: WaveParams
    grid: SpectralGrid
    phi: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    dphi: np.ndarray = field(repr=False)
    dpsi: np.ndarray = field(repr=False)

    def to_dict(self, include_profiles: bool = False) -> dict:
        out = {"params": self.params.to_dict(), "grid": self.grid.to_dict()}
        if include_profiles:
            out["profiles"] = {
                "x": self.grid.nodes.tolist(),
                "phi": self.phi.tolist(),
                "psi": self.psi.tolist(),
                "dphi": self.dphi.tolist(),
                "dpsi": self.dpsi.tolist(),
            }
        return out


def sample_profiles(params: WaveParams, x) -> tuple[np.ndarray, ...]:
    """Closed-form phi, psi, phi', psi' at the points ``x``."""
    sn, cn, dn = elliptic.jacobi(params.gamma * np.asarray(x, dtype=float), params.kappa)
    phi = params.phi0 * dn
    psi = params.A * phi * phi
    dphi = -params.phi0 * params.gamma * params.kappa**2 * sn * cn
    dpsi = 2.0 * params.A * phi * dphi
    return phi, psi, dphi, dpsi


def build_wave(c: float, omega: float, alpha: float, kappa: float, N: int = DEFAULT_N) -> DnoidalWave:
    params = WaveParams.from_physical(c, omega, alpha, kappa)
    grid = make_grid(params.T, N)
    arrays = sample_profiles(params, grid.nodes)
    for a in arrays:
        a.setflags(write=False)
    return DnoidalWave(params, grid, *arrays)


def residuals(wave: DnoidalWave, grid: SpectralGrid | None = None, phi=None) -> tuple[float, float]:
    """Max-norm residuals of the two profile equations, by spectral differentiation.

    ``phi`` may replace the wave's own profile (psi is then rebuilt as A phi^2),
    which is how perturbed non-solutions are tested.
    """
    grid = wave.grid if grid is None else grid
    if not grid.same_as(wave.grid):
        raise GridMismatch(f"wave grid (N={wave.grid.N}, T={wave.grid.T}) != (N={grid.N}, T={grid.T})")
    p = wave.params
    if phi is None:
        phi, psi = wave.phi, wave.psi
    else:
        phi = np.asarray(phi, dtype=float)
        psi = p.A * phi * phi
    d2phi = spectral_derivative(phi, grid, 2)
    d2psi = spectral_derivative(psi, grid, 2)
    r1 = np.max(np.abs(d2phi - p.sigma * phi + phi * psi))
    r2 = np.max(np.abs((1.0 - p.c) * psi + p.beta * psi**2 + p.alpha * d2psi + 0.5 * phi**2 - p.b))
    return float(r1), float(r2)


def relative_residuals(wave: DnoidalWave) -> tuple[float, float]:
    r1, r2 = residuals(wave)
    return r1 / np.max(np.abs(wave.phi)), r2 / np.max(np.abs(wave.psi))


@dataclass(frozen=True)
class QuarticRoots:
    phi0: float
    phi1: float
    a: float


def quartic_roots(params: WaveParams) -> QuarticRoots:
    """Turning points of the first integral phi'^2 = (A/2)(phi0^2 - phi^2)(phi^2 - phi1^2).

    ``a`` is the integration constant of the expanded quartic
    -phi^4 + (2 sigma / A) phi^2 + a, namely a = -phi0^2 phi1^2.
    """
    phi0 = params.phi0
    kp = elliptic.complementary(params.kappa)
    phi1 = phi0 * kp
    return QuarticRoots(phi0, phi1, -(phi0 * phi1) ** 2)
