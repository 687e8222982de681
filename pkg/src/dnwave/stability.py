"""Spectral checks on the linearized operators and the stability verdict.

Each checker returns a :class:`CheckRecord` holding the measured numbers and
the thresholds they were compared against; nothing here raises on a failed
check.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import lame
from .discretize import LinOp
from .errors import InadmissibleParameters, DegenerateModulus
from .operators import OperatorSet, assemble_blockL, assemble_H, assemble_J
from .spectra import (
    EigensolverError,
    cosine_similarity,
    eig_general,
    eig_sym,
    hamiltonian_pairing_defect,
    restricted_min_eig,
    solve_on_complement,
)
from .wavefamily import DEFAULT_N, DnoidalWave, WaveParams, build_wave

log = logging.getLogger(__name__)

# margin by which a measurement must clear a threshold before it is called a
# failure rather than inconclusive
STRADDLE = 10.0
DEFAULT_TUPLES = ((2.0, 1.5, 0.25), (3.0, 3.0, 0.2), (1.5, 1.0, 0.25))
DEFAULT_KAPPAS = tuple(round(0.1 * i, 10) for i in range(1, 10))


@dataclass(frozen=True)
class Tolerances:
    stab: float = 1e-6  # max |Re lambda(JH)| relative to ||H||
    pos: float = 1e-8  # min eig(H) relative to ||H||
    kernel: float = 1e-7  # zero/negative classification, relative to ||op||
    residual: float = 1e-9  # profile residuals, relative to max|phi|, max|psi|
    eigvec: float = 1e-8  # 1 - cosine similarity for kernel vectors
    lame: float = 1e-8  # scaled Lame eigenvalues, relative
    pairing: float = 1e-8  # Hamiltonian symmetry of the J H spectrum, relative to spectral radius

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    relation: str  # one of "<=", ">=", "<", ">", "=="
    passed: bool

    @classmethod
    def compare(cls, name: str, value, relation: str, threshold) -> "Check":
        value, threshold = float(value), float(threshold)
        ok = {
            "<=": value <= threshold,
            ">=": value >= threshold,
            "<": value < threshold,
            ">": value > threshold,
            "==": value == threshold,
        }[relation]
        return cls(name, value, threshold, relation, bool(ok and math.isfinite(value)))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "relation": self.relation,
            "threshold": self.threshold,
            "passed": self.passed,
        }


@dataclass
class CheckRecord:
    name: str
    checks: list[Check] = field(default_factory=list)
    values: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    def add(self, name, value, relation, threshold) -> Check:
        c = Check.compare(name, value, relation, threshold)
        self.checks.append(c)
        return c

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}
        out["values"] = {k: float(v) if isinstance(v, (float, np.floating)) else v for k, v in self.values.items()}
        if self.error is not None:
            out["error"] = self.error
        return out


def _kernel_vector(report) -> np.ndarray:
    j = int(np.argmin(np.abs(report.eigenvalues)))
    return report.eigenvectors[:, j]


def check_prop15(
    wave: DnoidalWave,
    ops: OperatorSet | None = None,
    tols: Tolerances = Tolerances(),
    *,
    Lplus: LinOp | None = None,
) -> CheckRecord:
    """L2 >= 0 with kernel phi; L = L2 - 2A phi^2 has one negative direction,
    kernel phi', is positive on {phi, phi'}-perp and has <L^{-1} phi, phi> < 0."""
    rec = CheckRecord("prop15")
    ops = OperatorSet.assemble(wave) if ops is None else ops
    L2 = ops.L2
    L = ops.Lplus if Lplus is None else Lplus
    s2 = eig_sym(L2, tols.kernel)
    rec.add("L2_min_eig_rel", s2.eigenvalues[0] / s2.scale, ">=", -tols.kernel)
    rec.add("L2_negative_count", s2.negative_count, "==", 0)
    rec.add("L2_kernel_dim", s2.kernel_dim, "==", 1)
    rec.add("L2_kernel_is_phi", 1.0 - cosine_similarity(_kernel_vector(s2), wave.phi), "<=", tols.eigvec)
    rec.add("L2_restricted_min", restricted_min_eig(L2, [wave.phi]), ">", 0.0)

    sL = eig_sym(L, tols.kernel)
    rec.add("L_negative_count", sL.negative_count, "==", 1)
    rec.add("L_kernel_dim", sL.kernel_dim, "==", 1)
    rec.add("L_kernel_is_dphi", 1.0 - cosine_similarity(_kernel_vector(sL), wave.dphi), "<=", tols.eigvec)
    ground = sL.eigenvectors[:, 0]
    rec.add("L_ground_state_sign_defect", min(np.sum(ground > 0), np.sum(ground < 0)), "==", 0)
    rec.add("L_restricted_min", restricted_min_eig(L, [wave.phi, wave.dphi]), ">", 0.0)
    w = solve_on_complement(L, wave.phi, [wave.dphi])
    rec.add("weinstein_L", w.value, "<", 0.0)
    rec.add("weinstein_L_residual", w.residual, "<=", 1e-8 * wave.grid.norm(wave.phi))
    rec.values.update(
        L2_eigs=s2.eigenvalues[:4].tolist(),
        L_eigs=sL.eigenvalues[:4].tolist(),
        L2_scale=s2.scale,
        L_scale=sL.scale,
        weinstein_L=w.value,
    )
    return rec


def check_prop20(wave: DnoidalWave, ops: OperatorSet | None = None, tols: Tolerances = Tolerances()) -> CheckRecord:
    """Q = L1 - 1/(2A): one negative eigenvalue, kernel psi', the scaled Lame
    triple, <Q^{-1} psi, psi> < 0, <Q^{-1} 1, 1> > 0 and positivity on
    {psi, psi'}-perp."""
    rec = CheckRecord("prop20")
    ops = OperatorSet.assemble(wave) if ops is None else ops
    p = wave.params
    Q = ops.Q
    sQ = eig_sym(Q, tols.kernel)
    rec.add("Q_negative_count", sQ.negative_count, "==", 1)
    rec.add("Q_kernel_dim", sQ.kernel_dim, "==", 1)
    rec.add("Q_kernel_is_dpsi", 1.0 - cosine_similarity(_kernel_vector(sQ), wave.dpsi), "<=", tols.eigvec)
    ground = sQ.eigenvectors[:, 0]
    rec.add("Q_ground_state_sign_defect", min(np.sum(ground > 0), np.sum(ground < 0)), "==", 0)

    unit = p.alpha * p.gamma**2
    mus = lame.lame_eigenvalues(p.kappa)
    for n, mu in enumerate(mus):
        err = abs(sQ.eigenvalues[n] - unit * mu) / (unit * max(1.0, abs(mu)))
        rec.add(f"Q_scaled_lame_mu{n}", err, "<=", tols.lame)

    wq = solve_on_complement(Q, wave.psi, [wave.dpsi])
    rec.add("weinstein_Q", wq.value, "<", 0.0)
    rec.add("weinstein_Q_residual", wq.residual, "<=", 1e-8 * wave.grid.norm(wave.psi))
    w1 = solve_on_complement(Q, np.ones(wave.grid.N), [wave.dpsi])
    rec.add("weinstein_ones", w1.value, ">", 0.0)
    rec.add("Q_restricted_min", restricted_min_eig(Q, [wave.psi, wave.dpsi]), ">", 0.0)

    # <Q^{-1} psi, psi> = (4 gamma / alpha) <Qhat^{-1} dn^2, dn^2>
    to_x = 4.0 * p.gamma / p.alpha
    try:
        es2_a = lame.closed_form_es2(p.kappa, "a")
        es2_b = lame.closed_form_es2(p.kappa, "b")
    except Exception:  # outside the closed form's evaluation window
        es2_a = es2_b = float("nan")
    rec.values.update(
        Q_eigs=sQ.eigenvalues[:5].tolist(),
        Q_scale=sQ.scale,
        lame_unit=unit,
        weinstein_Q=wq.value,
        weinstein_ones=w1.value,
        es2_variant_a=es2_a,
        es2_variant_b=es2_b,
        es2_from_weinstein_Q=wq.value / to_x,
    )
    return rec


def check_H_nonneg(
    wave: DnoidalWave,
    ops: OperatorSet | None = None,
    tols: Tolerances = Tolerances(),
    *,
    H: LinOp | None = None,
) -> CheckRecord:
    """Projected Hamiltonian is non-negative; the raw block operator is not."""
    rec = CheckRecord("prop34")
    ops = OperatorSet.assemble(wave) if ops is None else ops
    H = ops.H if H is None else H
    if H.symmetry == "symmetric":
        sH = eig_sym(H, tols.kernel, vectors=False)
        min_eig = float(sH.eigenvalues[0])
    else:
        sH = eig_general(H, tols.kernel)
        min_eig = float(np.min(sH.eigenvalues.real))
    scale = sH.scale
    rec.add("H_min_eig_rel", min_eig / scale, ">=", -tols.pos)
    rec.add("H_kernel_dim", sH.kernel_dim, ">=", 4)
    sB = eig_sym(ops.blockL, tols.kernel, vectors=False)
    rec.add("blockL_negative_count", sB.negative_count, ">=", 1)
    rec.values.update(H_min_eig=min_eig, H_scale=scale, blockL_min_eig=float(sB.eigenvalues[0]))
    return rec


def spectrum_JH(
    wave: DnoidalWave,
    ops: OperatorSet | None = None,
    tols: Tolerances = Tolerances(),
    *,
    JH: LinOp | None = None,
    H_scale: float | None = None,
) -> CheckRecord:
    """No eigenvalue of J H leaves the imaginary axis by more than tol_stab ||H||."""
    rec = CheckRecord("prop38")
    ops = OperatorSet.assemble(wave) if ops is None else ops
    JH = ops.JH if JH is None else JH
    if H_scale is None:
        H_scale = eig_sym(ops.H, tols.kernel, vectors=False).scale
    try:
        sp = eig_general(JH, tols.kernel)
    except EigensolverError as exc:
        rec.error = str(exc)
        return rec
    w = sp.eigenvalues
    max_re = float(np.max(np.abs(w.real)))
    thr = tols.stab * H_scale
    rec.add("JH_offaxis_count", int(np.sum(np.abs(w.real) > thr)), "==", 0)
    rec.add("JH_max_abs_re_rel", max_re / H_scale, "<=", tols.stab)
    neg, conj = hamiltonian_pairing_defect(w)
    radius = float(np.max(np.abs(w)))
    rec.values.update(
        max_abs_re=max_re,
        max_re=float(np.max(w.real)),
        spectral_radius=radius,
        H_scale=H_scale,
        pairing_negation_rel=neg / radius,
        pairing_conjugation_rel=conj / radius,
    )
    return rec


def broken_operators(wave: DnoidalWave) -> tuple[LinOp, LinOp]:
    """H and J H with the (2, 1) coupling replaced by +2 phi.

    The block operator then loses its symmetry, and with it the reason for
    a purely imaginary spectrum; used to show the detector can fail.
    """
    blockL = assemble_blockL(wave, coupling_21=2.0 * wave.phi)
    H = assemble_H(wave, blockL=blockL)
    JH = LinOp(assemble_J(wave.grid).matrix @ H.matrix, "general", wave.grid)
    return H, JH


@dataclass
class StabilityReport:
    params: WaveParams
    N: int
    prop15: CheckRecord
    prop20: CheckRecord
    prop34: CheckRecord
    prop38: CheckRecord
    verdict: str
    tolerances: Tolerances
    residuals: tuple[float, float] = (float("nan"), float("nan"))
    symmetry_broken: bool = False

    @property
    def records(self) -> list[CheckRecord]:
        return [self.prop15, self.prop20, self.prop34, self.prop38]

    def scalars(self) -> dict:
        """The flat per-row quantities emitted in CSV output."""
        p = self.params
        return {
            "c": p.c,
            "omega": p.omega,
            "alpha": p.alpha,
            "kappa": p.kappa,
            "N": self.N,
            "min_eig_H": self.prop34.values.get("H_min_eig", float("nan")),
            "maxReJH": self.prop38.values.get("max_abs_re", float("nan")),
            "es2_value_variant_a": self.prop20.values.get("es2_variant_a", float("nan")),
            "es2_value_variant_b": self.prop20.values.get("es2_variant_b", float("nan")),
            "weinstein_L": self.prop15.values.get("weinstein_L", float("nan")),
            "weinstein_Q": self.prop20.values.get("weinstein_Q", float("nan")),
            "weinstein_ones": self.prop20.values.get("weinstein_ones", float("nan")),
            "verdict": self.verdict,
        }

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "N": self.N,
            "residuals": {"r1_rel": self.residuals[0], "r2_rel": self.residuals[1]},
            "prop15": self.prop15.to_dict(),
            "prop20": self.prop20.to_dict(),
            "prop34": self.prop34.to_dict(),
            "prop38": self.prop38.to_dict(),
            "verdict": self.verdict,
            "symmetry_broken": self.symmetry_broken,
            "tolerances": self.tolerances.to_dict(),
        }


def classify(prop34: CheckRecord, prop38: CheckRecord, tols: Tolerances) -> str:
    """stable / unstable / inconclusive from the H and J H records.

    ``stable`` needs both certificates: J H on the imaginary axis and H >= 0.
    ``unstable`` is reserved for eigenvalues of J H clearly off the axis
    (beyond STRADDLE times the threshold).  Everything else is
    inconclusive: an eigensolver failure, a value straddling its threshold,
    or an on-axis spectrum without the H >= 0 certificate.
    """
    if prop34.error or prop38.error or "JH_max_abs_re_rel" not in {c.name for c in prop38.checks}:
        return "inconclusive"
    max_re = prop38["JH_max_abs_re_rel"].value
    min_h = prop34["H_min_eig_rel"].value
    if max_re > STRADDLE * tols.stab:
        return "unstable"
    if max_re <= tols.stab and min_h >= -tols.pos:
        return "stable"
    return "inconclusive"


def verdict(
    wave: DnoidalWave,
    grid=None,
    tols: Tolerances = Tolerances(),
    *,
    symmetry_broken: bool = False,
) -> StabilityReport:
    """Run all four checkers and aggregate them."""
    from .wavefamily import relative_residuals

    if grid is not None and not grid.same_as(wave.grid):
        raise ValueError("grid does not match the wave's grid")
    ops = OperatorSet.assemble(wave)
    prop15 = check_prop15(wave, ops, tols)
    prop20 = check_prop20(wave, ops, tols)
    if symmetry_broken:
        H, JH = broken_operators(wave)
    else:
        H, JH = ops.H, ops.JH
    prop34 = check_H_nonneg(wave, ops, tols, H=H)
    prop38 = spectrum_JH(wave, ops, tols, JH=JH, H_scale=prop34.values["H_scale"])
    return StabilityReport(
        params=wave.params,
        N=wave.grid.N,
        prop15=prop15,
        prop20=prop20,
        prop34=prop34,
        prop38=prop38,
        verdict=classify(prop34, prop38, tols),
        tolerances=tols,
        residuals=relative_residuals(wave),
        symmetry_broken=symmetry_broken,
    )


def run_point(c, omega, alpha, kappa, N=DEFAULT_N, tols: Tolerances = Tolerances(), symmetry_broken=False):
    return verdict(build_wave(c, omega, alpha, kappa, N), tols=tols, symmetry_broken=symmetry_broken)


def _run_row(args):
    return run_point(*args)


@dataclass
class SweepResult:
    rows: list[StabilityReport]
    skipped: list[tuple[tuple, str]]

    @property
    def all_stable(self) -> bool:
        return all(r.verdict == "stable" for r in self.rows)


def admissible_points(c_range, omega_range, alpha_range, kappa_range):
    """Split the Cartesian product into admissible tuples and skipped ones (with reasons)."""
    points, skipped = [], []
    for c, omega, alpha, kappa in product(c_range, omega_range, alpha_range, kappa_range):
        try:
            WaveParams.from_physical(c, omega, alpha, kappa)
        except (InadmissibleParameters, DegenerateModulus) as exc:
            skipped.append(((c, omega, alpha, kappa), str(exc)))
            log.warning("skipping (c=%r, omega=%r, alpha=%r, kappa=%r): %s", c, omega, alpha, kappa, exc)
            continue
        points.append((float(c), float(omega), float(alpha), float(kappa)))
    return points, skipped


def sweep(
    c_range,
    omega_range,
    alpha_range,
    kappa_range,
    N: int = DEFAULT_N,
    tols: Tolerances = Tolerances(),
    parallel: int = 1,
    points=None,
) -> SweepResult:
    """One StabilityReport per admissible tuple, in Cartesian-product order.

    With ``parallel > 1`` rows are evaluated in worker processes; results are
    gathered by index so the ordering never depends on completion order.
    ``points`` bypasses the Cartesian product with an explicit tuple list.
    """
    if points is None:
        points, skipped = admissible_points(c_range, omega_range, alpha_range, kappa_range)
    else:
        skipped = []
    jobs = [(c, om, al, ka, N, tols) for c, om, al, ka in points]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            rows = list(pool.map(_run_row, jobs))
    else:
        rows = [_run_row(j) for j in jobs]
    return SweepResult(rows, skipped)


def default_points(kappas=DEFAULT_KAPPAS, tuples=DEFAULT_TUPLES):
    return [(c, om, al, ka) for (c, om, al) in tuples for ka in kappas]
