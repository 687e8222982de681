"""The scaled Lame operator behind Q and its periodic Green's function.

In the variable y = gamma x the operator Q becomes alpha gamma^2 times

    Qhat = -d^2/dy^2 + 12 kappa^2 sn(y)^2 - 4 (1 + kappa^2)

on the period [-K, K).  Its kernel is spanned by (dn^2)'.  A second
homogeneous solution with unit Wronskian against (dn^2)' is

    g(y) = 1/(2 kappa^2) [ (1 - 2 sn^2)/dn^2
                           - 3 kappa^2 sn cn dn int_0^y (1 - 2 sn^2)/dn^4 ]

and the pairing <Qhat^{-1} dn^2, dn^2> has a closed form in K and E.  All
closed forms below are checked against quadrature and against a direct
constrained solve of the discretized operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import elliptic
from .discretize import HillAction, LinOp, SpectralGrid, diff_matrix, make_grid
from .errors import DomainError
from .spectra import WeinsteinResult, solve_on_complement

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-13
ES2_KAPPA_RANGE = (0.02, 0.98)

# the two readings of the E coefficient in the second term of the closed form
ES2_VARIANTS = {"a": "2(2-k^2+k^4)E", "b": "2(1-k^2+k^4)E"}


def lame_grid(kappa: float, N: int = 256) -> SpectralGrid:
    kappa = elliptic.check_modulus(kappa, open_interval=True)
    return make_grid(elliptic.complete_K(kappa), N)


def lame_potential(y, kappa: float) -> np.ndarray:
    sn = elliptic.jacobi(y, kappa).sn
    return 12.0 * kappa**2 * sn**2 - 4.0 * (1.0 + kappa**2)


def lame_operator(kappa: float, N: int = 256) -> LinOp:
    """Qhat discretized on the N-point grid of [-K, K)."""
    grid = lame_grid(kappa, N)
    V = lame_potential(grid.nodes, kappa)
    M = -diff_matrix(grid, 2).matrix + np.diag(V)
    return LinOp(M, "symmetric", grid, HillAction(1.0, V, grid))


def lame_eigenvalues(kappa: float) -> tuple[float, float, float]:
    """Closed-form lowest three periodic eigenvalues (mu0 < 0 = mu1 < mu2)."""
    m = kappa * kappa
    root = math.sqrt(1.0 - m + 4.0 * m * m)
    return m - 2.0 - 2.0 * root, 0.0, m - 2.0 + 2.0 * root


def lame_ground_state(y, kappa: float) -> np.ndarray:
    """Positive eigenfunction for mu0: dn [1 - (1 + 2k^2 - sqrt(1 - k^2 + 4k^4)) sn^2]."""
    m = kappa * kappa
    sn, _, dn = elliptic.jacobi(y, kappa)
    return dn * (1.0 - (1.0 + 2.0 * m - math.sqrt(1.0 - m + 4.0 * m * m)) * sn**2)


def dn2_profiles(y, kappa: float):
    """dn^2 and its first two derivatives in y."""
    m = kappa * kappa
    sn, cn, dn = elliptic.jacobi(y, kappa)
    u = dn**2
    du = -2.0 * m * sn * cn * dn
    d2u = -6.0 * u**2 + 4.0 * (2.0 - m) * u - 2.0 * (1.0 - m)
    return u, du, d2u


def _check_es2_kappa(kappa: float) -> float:
    kappa = float(kappa)
    lo, hi = ES2_KAPPA_RANGE
    if not lo <= kappa <= hi:
        raise DomainError(f"kappa={kappa!r} outside [{lo}, {hi}] where the closed form is evaluated")
    return kappa


def closed_form_es2(kappa: float, variant: str = "a") -> float:
    """Closed-form <Qhat^{-1} dn^2, dn^2> over [-K, K].

    ``variant`` selects the E coefficient in the numerator of the second
    term: ``"a"`` uses 2(2 - k^2 + k^4), ``"b"`` uses 2(1 - k^2 + k^4).
    """
    if variant not in ES2_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    kappa = _check_es2_kappa(kappa)
    m = kappa * kappa
    mp = 1.0 - m
    K, E = elliptic.complete_K(kappa), elliptic.complete_E(kappa)
    D = mp * (2.0 - m) * K - 2.0 * (1.0 - m + m * m) * E
    coef = 2.0 - m + m * m if variant == "a" else 1.0 - m + m * m
    first = (2.0 - m) / (8.0 * m) * D
    second = mp**2 / (8.0 * m) * ((2.0 - m) ** 2 * K - 2.0 * coef * E) * (2.0 * mp * E - (2.0 - m) * K) / D
    return first + second


def es2_numeric(kappa: float, N: int = 256) -> WeinsteinResult:
    """<Qhat^{-1} dn^2, dn^2> by a deflated solve on the collocation grid."""
    op = lame_operator(kappa, N)
    u, du, _ = dn2_profiles(op.grid.nodes, kappa)
    return solve_on_complement(op, u, [du])


# ---------------------------------------------------------------------------
# Green's function pieces
# ---------------------------------------------------------------------------


def _green_integrand(s, kappa):
    sn, _, dn = elliptic.jacobi(s, kappa)
    return (1.0 - 2.0 * sn * sn) / dn**4


def _quad(f, a, b):
    val, _ = integrate.quad(f, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
    return val


def _green_integral(y, kappa: float) -> np.ndarray:
    """int_0^y (1 - 2 sn^2)/dn^4 at each point of ``y``, accumulated segment by segment."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty_like(y)
    f = lambda s: _green_integrand(s, kappa)  # noqa: E731
    for sign in (1.0, -1.0):
        sel = np.flatnonzero(sign * y > 0)
        order = sel[np.argsort(sign * y[sel])]
        acc, last = 0.0, 0.0
        for i in order:
            acc += _quad(f, last, y[i])
            last = y[i]
            out[i] = acc
    out[y == 0] = 0.0
    return out


def greens_phi(y, kappa: float, *, derivative: bool = False):
    """Second homogeneous solution g of Qhat g = 0 (and g' if ``derivative``)."""
    kappa = elliptic.check_modulus(kappa, open_interval=True)
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=float))
    m = kappa * kappa
    sn, cn, dn = elliptic.jacobi(y, kappa)
    I = _green_integral(y, kappa)
    scd = sn * cn * dn
    g = ((1.0 - 2.0 * sn**2) / dn**2 - 3.0 * m * scd * I) / (2.0 * m)
    if not derivative:
        return float(g[0]) if scalar else g
    d_ratio = sn * cn * (-4.0 * dn**2 + 2.0 * m * (1.0 - 2.0 * sn**2)) / dn**3
    d_scd = cn**2 * dn**2 - sn**2 * dn**2 - m * sn**2 * cn**2
    dg = (d_ratio - 3.0 * m * (d_scd * I + scd * (1.0 - 2.0 * sn**2) / dn**4)) / (2.0 * m)
    if scalar:
        return float(g[0]), float(dg[0])
    return g, dg


def wronskian(y, kappa: float):
    """det [[(dn^2)', g], [(dn^2)'', g']]; identically 1."""
    _, du, d2u = dn2_profiles(y, kappa)
    g, dg = greens_phi(y, kappa, derivative=True)
    return du * dg - d2u * g


@dataclass(frozen=True)
class Comparison:
    closed_form: float
    quadrature: float

    @property
    def rel_error(self) -> float:
        return abs(self.closed_form - self.quadrature) / max(abs(self.quadrature), 1e-300)

    def to_dict(self) -> dict:
        return {"closed_form": self.closed_form, "quadrature": self.quadrature, "rel_error": self.rel_error}


def elliptic_integral_table(kappa: float) -> dict[str, Comparison]:
    """The six elliptic integrals used to reduce the Green's function pairings."""
    kappa = elliptic.check_modulus(kappa, open_interval=True)
    m = kappa * kappa
    mp = 1.0 - m
    K, E = elliptic.complete_K(kappa), elliptic.complete_E(kappa)

    def dn_pow(p):
        return lambda s: elliptic.jacobi(s, kappa).dn ** p

    def weighted(p):
        def f(s):
            sn, _, dn = elliptic.jacobi(s, kappa)
            return (1.0 - 2.0 * sn * sn) / dn**p

        return f

    closed = {
        "int_0^K dn^-2": E / mp,
        "int_0^K dn^-4": (2.0 * (2.0 - m) * E - mp * K) / (3.0 * mp**2),
        "int_0^K dn^4": (4.0 - 2.0 * m) / 3.0 * E - mp / 3.0 * K,
        "int_0^K dn^6": (8.0 * m * m - 23.0 * m + 23.0) / 15.0 * E - 4.0 * mp * (2.0 - m) / 15.0 * K,
        "int_-K^K (1-2sn^2)/dn^2": 2.0 / (m * mp) * (2.0 * mp * K - (2.0 - m) * E),
        "int_-K^K (1-2sn^2)/dn^4": 2.0 / (3.0 * m * mp**2) * ((2.0 - m) * mp * K - 2.0 * (1.0 - m + m * m) * E),
    }
    numeric = {
        "int_0^K dn^-2": _quad(dn_pow(-2), 0.0, K),
        "int_0^K dn^-4": _quad(dn_pow(-4), 0.0, K),
        "int_0^K dn^4": _quad(dn_pow(4), 0.0, K),
        "int_0^K dn^6": _quad(dn_pow(6), 0.0, K),
        "int_-K^K (1-2sn^2)/dn^2": _quad(weighted(2), -K, K),
        "int_-K^K (1-2sn^2)/dn^4": _quad(weighted(4), -K, K),
    }
    return {name: Comparison(closed[name], numeric[name]) for name in closed}


@dataclass(frozen=True)
class GreenIdentities:
    kappa: float
    pair_dn2: Comparison  # <g, dn^2>
    pair_dn6: Comparison  # <g, dn^6>
    dg_at_K: Comparison  # g'(K)
    C_dn2: Comparison  # periodicity constant of Qhat^{-1} dn^2
    es1: float  # assembly of <Qhat^{-1} dn^2, dn^2> from quadrature values

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "pair_dn2": self.pair_dn2.to_dict(),
            "pair_dn6": self.pair_dn6.to_dict(),
            "dg_at_K": self.dg_at_K.to_dict(),
            "C_dn2": self.C_dn2.to_dict(),
            "es1": self.es1,
        }


def green_identities(kappa: float) -> GreenIdentities:
    """Closed forms of the Green's-function pairings against direct quadrature.

    Pairings run over the full period [-K, K]; g is even so each is twice
    the half-period integral.
    """
    kappa = elliptic.check_modulus(kappa, open_interval=True)
    m = kappa * kappa
    mp = 1.0 - m
    K, E = elliptic.complete_K(kappa), elliptic.complete_E(kappa)

    def paired(p):
        return lambda s: greens_phi(s, kappa) * elliptic.jacobi(s, kappa).dn ** p

    q_dn2 = 2.0 * _quad(paired(2), 0.0, K)
    q_dn6 = 2.0 * _quad(paired(6), 0.0, K)
    _, q_dgK = greens_phi(K, kappa, derivative=True)

    c_dn2 = (2.0 * mp * E - (2.0 - m) * K) / (4.0 * m)
    c_dn6 = (2.0 - m) / (8.0 * m) * (2.0 * (1.0 - m + m * m) * E - mp * (2.0 - m) * K)
    c_dgK = ((2.0 - m) * mp * K - 2.0 * (1.0 - m + m * m) * E) / (2.0 * m * mp)

    # periodicity: (Qhat^{-1} f)'(K) = 0 with f = dn^2 fixes C
    _, _, d2u_K = dn2_profiles(K, kappa)
    int_g_f = 0.5 * q_dn2
    int_du_f = _quad(lambda s: dn2_profiles(s, kappa)[1] * dn2_profiles(s, kappa)[0], 0.0, K)
    C_periodic = int_du_f - d2u_K * int_g_f / q_dgK
    C_formula = -mp * m / q_dgK * q_dn2 - (2.0 - m) * m / 2.0

    es1 = -q_dn6 + (mp**2 - m * mp / q_dgK * q_dn2) * q_dn2
    return GreenIdentities(
        kappa=kappa,
        pair_dn2=Comparison(c_dn2, q_dn2),
        pair_dn6=Comparison(c_dn6, q_dn6),
        dg_at_K=Comparison(c_dgK, q_dgK),
        C_dn2=Comparison(C_formula, C_periodic),
        es1=es1,
    )


@dataclass(frozen=True)
class Es2Point:
    kappa: float
    variant_a: float
    variant_b: float
    numeric: float
    residual: float

    @property
    def rel_error_a(self) -> float:
        return abs(self.variant_a - self.numeric) / abs(self.numeric)

    @property
    def rel_error_b(self) -> float:
        return abs(self.variant_b - self.numeric) / abs(self.numeric)

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "es2_variant_a": self.variant_a,
            "es2_variant_b": self.variant_b,
            "numeric_oracle": self.numeric,
            "rel_error_a": self.rel_error_a,
            "rel_error_b": self.rel_error_b,
        }


def es2_point(kappa: float, N: int = 256) -> Es2Point:
    res = es2_numeric(kappa, N)
    return Es2Point(
        kappa=float(kappa),
        variant_a=closed_form_es2(kappa, "a"),
        variant_b=closed_form_es2(kappa, "b"),
        numeric=res.value,
        residual=res.residual,
    )


def matching_variant(points, rtol: float = 1e-6) -> str | None:
    """Name of the closed-form variant that agrees with every numeric point, if any."""
    points = list(points)
    for name, attr in (("a", "rel_error_a"), ("b", "rel_error_b")):
        if points and all(getattr(p, attr) <= rtol for p in points):
            return name
    return None
