"""Built-in verification battery behind ``dnwave selftest``.

Covers the elliptic identities, the differentiation matrices and the
elliptic-integral table.  Quadrature here is scipy's adaptive QUADPACK,
independent of the AGM code it checks.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from . import elliptic, lame
from .discretize import diff_matrix, make_grid, symmetry_defect
from .stability import Check

KAPPAS = tuple(round(0.1 * i, 10) for i in range(1, 10))


def _quad_K(kappa):
    f = lambda t: 1.0 / math.sqrt(1.0 - (kappa * math.sin(t)) ** 2)  # noqa: E731
    return integrate.quad(f, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=1e-13, limit=200)[0]


def _quad_E(kappa):
    f = lambda t: math.sqrt(1.0 - (kappa * math.sin(t)) ** 2)  # noqa: E731
    return integrate.quad(f, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=1e-13, limit=200)[0]


def elliptic_checks(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    y = np.linspace(-20.0, 20.0, 801)
    out = []
    for k in KAPPAS:
        sn, cn, dn = elliptic.jacobi(y, k)
        out.append(Check.compare(f"sn2+cn2 k={k}", np.max(np.abs(sn**2 + cn**2 - 1)), "<=", 1e-12))
        out.append(Check.compare(f"k2sn2+dn2 k={k}", np.max(np.abs(k * k * sn**2 + dn**2 - 1)), "<=", 1e-12))
        out.append(Check.compare(f"legendre k={k}", abs(elliptic.legendre_check(k)), "<=", 1e-12))
        K, E = elliptic.complete_K(k), elliptic.complete_E(k)
        out.append(Check.compare(f"K vs quad k={k}", abs(K - _quad_K(k)) / K, "<=", 1e-10))
        out.append(Check.compare(f"E vs quad k={k}", abs(E - _quad_E(k)) / E, "<=", 1e-10))
        ys = rng.uniform(-10.0, 10.0, 100)
        per = np.max(np.abs(elliptic.jacobi(ys + 2 * K, k).dn - elliptic.jacobi(ys, k).dn))
        out.append(Check.compare(f"dn period k={k}", per, "<=", 1e-10))
        h = 1e-5
        t = rng.uniform(-5.0, 5.0, 20)
        p, m, c = elliptic.jacobi(t + h, k), elliptic.jacobi(t - h, k), elliptic.jacobi(t, k)
        fd = [(p[i] - m[i]) / (2 * h) for i in range(3)]
        exact = [c.cn * c.dn, -c.sn * c.dn, -k * k * c.sn * c.cn]
        err = max(np.max(np.abs(a - b)) for a, b in zip(fd, exact))
        out.append(Check.compare(f"derivatives k={k}", err, "<=", 1e-6))
    return out


def diffmatrix_checks() -> list[Check]:
    out = []
    for N, thr in ((64, 1e-8), (128, 1e-12)):
        g = make_grid(1.7, N)
        w = math.pi / g.T
        f = np.exp(np.sin(w * g.nodes))
        exact = w * np.cos(w * g.nodes) * f
        D1 = diff_matrix(g, 1)
        out.append(Check.compare(f"D1 exp(sin) N={N}", np.max(np.abs(D1 @ f - exact)), "<=", thr))
    g = make_grid(1.7, 128)
    for order, kind in ((1, "antisymmetric"), (2, "symmetric"), (3, "antisymmetric")):
        D = diff_matrix(g, order).matrix
        out.append(Check.compare(f"D{order} {kind}", symmetry_defect(D, kind), "<=", 1e-12))
    D1 = diff_matrix(g, 1).matrix
    out.append(Check.compare("D1 row sums", np.max(np.abs(D1 @ np.ones(g.N))) / np.linalg.norm(D1, 2), "<=", 1e-13))
    return out


def table_checks() -> list[Check]:
    out = []
    for k in KAPPAS:
        for name, cmp in lame.elliptic_integral_table(k).items():
            out.append(Check.compare(f"{name} k={k}", cmp.rel_error, "<=", 1e-10))
    return out


def run_all(seed: int = 0) -> list[Check]:
    return elliptic_checks(seed) + diffmatrix_checks() + table_checks()
