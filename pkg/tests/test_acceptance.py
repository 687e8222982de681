"""Acceptance criteria, one test per criterion, at the stated tolerances.

The terminal summary (see conftest.py) prints one PASS/FAIL line per
criterion.  Run alone with ``pytest tests/test_acceptance.py -v`` or
``python3 tests/test_acceptance.py``.
"""

import math
import subprocess
import sys

import numpy as np
import pytest
from scipy import integrate

from conftest import SWEEP_KAPPAS, label
from dnwave import elliptic, lame, stability
from dnwave.spectra import eig_sym
from dnwave.wavefamily import build_wave, relative_residuals

KAPPAS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


def _fail_if(failures):
    if failures:
        pytest.fail(f"{len(failures)} violation(s):\n" + "\n".join(failures))


def _K_quad(k):
    return integrate.quad(lambda t: 1.0 / math.sqrt(1.0 - (k * math.sin(t)) ** 2), 0.0, math.pi / 2, epsabs=0, epsrel=1e-13)[0]


def _E_quad(k):
    return integrate.quad(lambda t: math.sqrt(1.0 - (k * math.sin(t)) ** 2), 0.0, math.pi / 2, epsabs=0, epsrel=1e-13)[0]


def test_criterion_01_elliptic_foundation():
    failures = []
    y = np.linspace(-10.0, 10.0, 401)
    for k in KAPPAS:
        sn, cn, dn = elliptic.jacobi(y, k)
        d1 = np.max(np.abs(sn**2 + cn**2 - 1.0))
        d2 = np.max(np.abs(k**2 * sn**2 + dn**2 - 1.0))
        leg = abs(elliptic.legendre_check(k))
        eK = abs(elliptic.complete_K(k) - _K_quad(k)) / _K_quad(k)
        eE = abs(elliptic.complete_E(k) - _E_quad(k)) / _E_quad(k)
        for name, val, tol in (("sn2+cn2", d1, 1e-12), ("k2sn2+dn2", d2, 1e-12), ("legendre", leg, 1e-12), ("K", eK, 1e-10), ("E", eE, 1e-10)):
            if not val <= tol:
                failures.append(f"kappa={k}: {name} defect {val:.3e} > {tol:g}")
    _fail_if(failures)


def test_criterion_02_profile_exactness(sweep_rows):
    failures = []
    for row in sweep_rows:
        r1, r2 = row.residuals
        if not (r1 <= 1e-9 and r2 <= 1e-9):
            failures.append(f"{label(row)}: r1={r1:.3e} r2={r2:.3e}")
    assert len(sweep_rows) == 27
    _fail_if(failures)


def test_criterion_03_lame_spectrum(sweep_rows):
    failures = []
    for k in KAPPAS:
        closed = lame.lame_eigenvalues(k)
        low = eig_sym(lame.lame_operator(k, 256), vectors=False).eigenvalues[:3]
        err = np.max(np.abs(low - np.array(closed)))
        if not err <= 1e-8:
            failures.append(f"kappa={k}: lowest three {low} vs {closed}, err {err:.3e}")
    mu = lame.lame_eigenvalues(0.5)
    if mu != (-3.75, 0.0, 0.25):
        failures.append(f"kappa=0.5 closed-form triple {mu} is not (-3.75, 0, 0.25)")
    for row in sweep_rows:
        for name in ("Q_scaled_lame_mu0", "Q_scaled_lame_mu1", "Q_scaled_lame_mu2"):
            chk = row.prop20[name]
            if chk.value > 1e-8:
                failures.append(f"{label(row)}: {name} relative error {chk.value:.3e}")
    _fail_if(failures)


KERNEL_EXPECT = {
    "L2_negative_count": 0,
    "L2_kernel_dim": 1,
    "L_negative_count": 1,
    "L_kernel_dim": 1,
    "Q_negative_count": 1,
    "Q_kernel_dim": 1,
}


def test_criterion_04_kernel_structure(sweep_rows):
    failures = []
    for row in sweep_rows:
        for name, want in KERNEL_EXPECT.items():
            rec = row.prop15 if name.startswith("L") else row.prop20
            got = rec[name].value
            if got != want:
                failures.append(f"{label(row)}: {name} = {got:g}, expected {want}")
        for name in ("L2_kernel_is_phi", "L_kernel_is_dphi"):
            if not row.prop15[name].passed:
                failures.append(f"{label(row)}: {name} defect {row.prop15[name].value:.3e}")
        if not row.prop20["Q_kernel_is_dpsi"].passed:
            failures.append(f"{label(row)}: Q_kernel_is_dpsi defect {row.prop20['Q_kernel_is_dpsi'].value:.3e}")
    _fail_if(failures)


def test_criterion_05_weinstein_quantities(sweep_rows):
    failures = []
    for row in sweep_rows:
        s = row.scalars()
        if not s["weinstein_L"] < 0:
            failures.append(f"{label(row)}: <L^-1 phi, phi> = {s['weinstein_L']!r}")
        if not s["weinstein_Q"] < 0:
            failures.append(f"{label(row)}: <Q^-1 psi, psi> = {s['weinstein_Q']!r}")
        if not s["weinstein_ones"] > 0:
            failures.append(f"{label(row)}: <Q^-1 1, 1> = {s['weinstein_ones']!r}")
    _fail_if(failures)


def test_criterion_06_figure1():
    kappas = np.linspace(0.05, 0.95, 91)
    points = [lame.es2_point(float(k)) for k in kappas]
    failures = [f"kappa={p.kappa:.4f}: numeric oracle {p.numeric!r} not negative" for p in points if not p.numeric < 0]
    match = lame.matching_variant(points, rtol=1e-6)
    if match is None:
        worst_a = max(p.rel_error_a for p in points)
        worst_b = max(p.rel_error_b for p in points)
        failures.append(f"no variant matches to 1e-6 (worst a {worst_a:.3e}, worst b {worst_b:.3e})")
    elif match != "a":
        failures.append(f"matching variant is {match!r}")
    assert len(points) == 91
    _fail_if(failures)


def test_criterion_07_green_identities():
    failures = []
    y = np.linspace(-0.95, 0.95, 41)
    for k in KAPPAS:
        K = elliptic.complete_K(k)
        w = np.max(np.abs(lame.wronskian(y * K, k) - 1.0))
        if not w <= 1e-8:
            failures.append(f"kappa={k}: Wronskian defect {w:.3e}")
        g = lame.green_identities(k)
        for name in ("pair_dn2", "pair_dn6", "dg_at_K"):
            err = getattr(g, name).rel_error
            if not err <= 1e-8:
                failures.append(f"kappa={k}: {name} rel error {err:.3e}")
        es1_err = abs(g.es1 - lame.closed_form_es2(k)) / abs(lame.closed_form_es2(k))
        if not es1_err <= 1e-8:
            failures.append(f"kappa={k}: es1 assembly rel error {es1_err:.3e}")
    _fail_if(failures)


def test_criterion_08_projected_hamiltonian_nonnegative(sweep_rows):
    failures = []
    for row in sweep_rows:
        rec = row.prop34
        rel = rec["H_min_eig_rel"].value
        if not rel >= -1e-8:
            failures.append(f"{label(row)}: min eig(H)/|H| = {rel:.3e} (min eig {rec.values['H_min_eig']:.6e})")
        if not rec["H_kernel_dim"].value >= 4:
            failures.append(f"{label(row)}: kernel_dim(H) = {rec['H_kernel_dim'].value:g}")
        if not rec["blockL_negative_count"].value >= 1:
            failures.append(f"{label(row)}: unprojected blockL has no negative eigenvalue")
    _fail_if(failures)


def test_criterion_09_imaginary_spectrum(sweep_rows):
    failures = []
    for row in sweep_rows:
        rec = row.prop38
        rel = rec["JH_max_abs_re_rel"].value
        if not rel <= 1e-6:
            failures.append(f"{label(row)}: max|Re|/|H| = {rel:.3e}")
        for name in ("pairing_negation_rel", "pairing_conjugation_rel"):
            if not rec.values[name] <= 1e-8:
                failures.append(f"{label(row)}: {name} = {rec.values[name]:.3e}")
    broken = stability.run_point(2.0, 1.5, 0.25, 0.5, symmetry_broken=True)
    if not broken.prop38.values["max_abs_re"] > 1e-3:
        failures.append(f"symmetry-broken control max|Re| = {broken.prop38.values['max_abs_re']:.3e}")
    _fail_if(failures)


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "dnwave", *args], capture_output=True, check=False)


def _refinement_change(key, coarse, fine):
    """Change of one reported scalar under N refinement.

    Quantities that sit at the eigensolver noise floor are measured in units
    of |H|; genuine nonzero values are measured relative to themselves.
    """
    a, b = coarse.scalars()[key], fine.scalars()[key]
    H = fine.prop34.values["H_scale"]
    if key == "maxReJH" or (key == "min_eig_H" and abs(b) <= coarse.tolerances.pos * H):
        return abs(a - b) / H
    return abs(a - b) / abs(b)


REFINED_KEYS = ["min_eig_H", "maxReJH", "es2_value_variant_a", "es2_value_variant_b", "weinstein_L", "weinstein_Q", "weinstein_ones"]


def test_criterion_10_determinism_and_convergence(sweep_rows, sweep_rows_fine):
    failures = []
    sweep_args = ["sweep", "--c", "2", "--omega", "1.5", "--alpha", "0.25", "--kappa", "0.3:0.9:3", "--format", "csv"]
    first, again, par = _cli(*sweep_args), _cli(*sweep_args), _cli(*sweep_args, "--parallel", "2")
    if not first.stdout:
        failures.append("sweep produced no output")
    if first.stdout != again.stdout:
        failures.append("repeated sweep output differs")
    if first.stdout != par.stdout:
        failures.append("parallel sweep output differs from serial")
    fig = ["figure1", "--kappa", "0.1:0.9:5", "--format", "csv"]
    if _cli(*fig).stdout != _cli(*fig).stdout:
        failures.append("repeated figure1 output differs")
    for coarse, fine in zip(sweep_rows, sweep_rows_fine):
        for key in REFINED_KEYS:
            change = _refinement_change(key, coarse, fine)
            if not change <= 1e-8:
                failures.append(f"{label(coarse)}: {key} changes by {change:.3e} from N=256 to N=512")
    _fail_if(failures)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
