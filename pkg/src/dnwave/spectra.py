"""Eigen-decompositions, inertia counts and constrained solves."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .discretize import LinOp
from .errors import OrthogonalityError, SymmetryError
from .operators import assemble_Q
from .wavefamily import DnoidalWave

log = logging.getLogger(__name__)

KERNEL_RTOL = 1e-7
EIGEN_RESIDUAL_RTOL = 1e-10
ORTHO_RTOL = 1e-10
COND_WARN = 1e12
REFINE_STEPS = 4


class ConditioningWarning(UserWarning):
    pass


class EigensolverError(RuntimeError):
    pass


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    negative_count: int
    kernel_dim: int
    tol: float
    scale: float
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def threshold(self) -> float:
        return self.tol * self.scale

    def kernel_vectors(self) -> np.ndarray:
        """Columns spanning the numerical kernel (symmetric case only)."""
        if self.eigenvectors is None:
            raise ValueError("eigenvectors were not computed")
        mask = np.abs(self.eigenvalues) <= self.threshold
        return self.eigenvectors[:, mask]

    def to_dict(self) -> dict:
        ev = self.eigenvalues
        if np.iscomplexobj(ev):
            values = [[float(z.real), float(z.imag)] for z in ev]
        else:
            values = [float(x) for x in ev]
        return {
            "eigenvalues": values,
            "negative_count": int(self.negative_count),
            "kernel_dim": int(self.kernel_dim),
            "tol": float(self.tol),
            "scale": float(self.scale),
        }


@dataclass
class WeinsteinResult:
    value: float
    residual: float
    method: str = "constrained-solve"
    solution: np.ndarray | None = field(default=None, repr=False)
    condition: float | None = None

    def to_dict(self) -> dict:
        out = {"value": float(self.value), "residual": float(self.residual), "method": self.method}
        if self.condition is not None:
            out["condition"] = float(self.condition)
        return out


def eig_sym(op: LinOp, tol: float = KERNEL_RTOL, *, vectors: bool = True) -> SpectrumReport:
    """Full ascending spectrum of a symmetric operator with inertia counts.

    Kernel and negative directions are classified against ``tol`` times the
    largest eigenvalue magnitude.
    """
    if op.symmetry != "symmetric":
        raise SymmetryError(f"eig_sym needs a symmetric operator, got tag {op.symmetry!r}")
    A = op.matrix
    if vectors:
        w, V = sla.eigh(A)
    else:
        w, V = sla.eigh(A, eigvals_only=True), None
    scale = float(np.max(np.abs(w)))
    if V is not None and scale > 0:
        n = len(w)
        for j in sorted({0, 1, 2, n - 1} & set(range(n))):
            res = np.linalg.norm(A @ V[:, j] - w[j] * V[:, j])
            if res > EIGEN_RESIDUAL_RTOL * scale:
                raise EigensolverError(f"eigenpair {j} residual {res:.3e} exceeds {EIGEN_RESIDUAL_RTOL:g}*||A||")
    thr = tol * scale
    return SpectrumReport(
        eigenvalues=w,
        negative_count=int(np.sum(w < -thr)),
        kernel_dim=int(np.sum(np.abs(w) <= thr)),
        tol=tol,
        scale=scale,
        eigenvectors=V,
    )


def eig_general(op: LinOp, tol: float = KERNEL_RTOL) -> SpectrumReport:
    """Full complex spectrum of an arbitrary square operator.

    Eigenvalues are sorted by imaginary part then real part, so a conjugate
    pair sits symmetrically about the middle of the list.
    """
    A = op.matrix
    try:
        w = sla.eigvals(A, check_finite=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise EigensolverError(f"dense eigensolver failed on a {A.shape[0]}x{A.shape[0]} matrix: {exc}") from exc
    w = np.asarray(w, dtype=complex)
    w = w[np.lexsort((w.real, w.imag))]
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    thr = tol * scale
    return SpectrumReport(
        eigenvalues=w,
        negative_count=int(np.sum(w.real < -thr)),
        kernel_dim=int(np.sum(np.abs(w) <= thr)),
        tol=tol,
        scale=scale,
    )


def hamiltonian_pairing_defect(eigenvalues) -> tuple[float, float]:
    """Worst mismatch of the spectrum against its negation and its conjugate.

    Each reflected spectrum is matched one-to-one with the original by an
    optimal assignment; the largest matched distance is returned for both.
    """
    from scipy.optimize import linear_sum_assignment

    w = np.asarray(eigenvalues, dtype=complex)
    out = []
    for image in (-w, np.conj(w)):
        cost = np.abs(w[:, None] - image[None, :])
        rows, cols = linear_sum_assignment(cost)
        out.append(float(cost[rows, cols].max()) if w.size else 0.0)
    return out[0], out[1]


def _orthonormal_basis(vectors, n: int) -> np.ndarray:
    if vectors is None or len(vectors) == 0:
        return np.zeros((n, 0))
    B = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
    Qb, _ = np.linalg.qr(B)
    return Qb


def solve_on_complement(op: LinOp, rhs, kernel_basis=()) -> WeinsteinResult:
    """Solve op u = rhs with u orthogonal to ``kernel_basis`` and return <u, rhs>.

    The kernel is deflated by projection: the system
    (P A P + s (I - P)) u = rhs, with s the largest row sum of A, is
    nonsingular when the supplied basis spans the kernel.  Iterative
    refinement follows the LU solve: one step against the dense matrix, or,
    when the operator carries an ``action``, up to REFINE_STEPS steps with
    residuals from that (more accurate) action.
    """
    if op.symmetry != "symmetric":
        raise SymmetryError("solve_on_complement needs a symmetric operator")
    grid = op.grid
    A = op.matrix
    n = A.shape[0]
    b = np.asarray(rhs, dtype=float)
    if b.shape != (n,):
        raise ValueError(f"rhs of shape {b.shape} does not match operator size {n}")
    bnorm = np.linalg.norm(b)
    for k in kernel_basis:
        k = np.asarray(k, dtype=float)
        overlap = abs(np.dot(k, b)) / (np.linalg.norm(k) * bnorm) if bnorm > 0 else 0.0
        if overlap > ORTHO_RTOL:
            raise OrthogonalityError(f"rhs has relative overlap {overlap:.3e} with a kernel vector")
    Z = _orthonormal_basis(kernel_basis, n)
    P = np.eye(n) - Z @ Z.T
    s = float(np.max(np.sum(np.abs(A), axis=1)))
    M = P @ A @ P + s * (Z @ Z.T)
    lu = sla.lu_factor(M)
    Pb = P @ b
    u = sla.lu_solve(lu, Pb)
    if op.action is None:
        u += sla.lu_solve(lu, Pb - M @ u)
        u = P @ u
        Au = A @ u
    else:
        u = P @ u
        for _ in range(REFINE_STEPS):
            Au = op.action(u)
            r = Pb - P @ Au
            if np.linalg.norm(r) <= 4 * np.finfo(float).eps * bnorm:
                break
            u = P @ (u + sla.lu_solve(lu, r))
        Au = op.action(u)
    cond = float(np.linalg.cond(M))
    if cond > COND_WARN:
        warnings.warn(f"deflated system is ill-conditioned (cond={cond:.3e})", ConditioningWarning, stacklevel=2)
    h = grid.h
    value = h * float(np.dot(u, b))
    residual = np.sqrt(h) * float(np.linalg.norm(Au - Pb))
    return WeinsteinResult(value=value, residual=residual, solution=u, condition=cond)


def restricted_min_eig(op: LinOp, constraints) -> float:
    """Smallest eigenvalue of ``op`` on the orthogonal complement of ``constraints``."""
    n = op.shape[0]
    B = _orthonormal_basis(constraints, n)
    full, _ = np.linalg.qr(np.column_stack([B, np.eye(n)]), mode="complete")
    Z = full[:, B.shape[1] :]
    R = Z.T @ op.matrix @ Z
    return float(sla.eigh(0.5 * (R + R.T), eigvals_only=True, subset_by_index=[0, 0])[0])


def cosine_similarity(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(abs(np.dot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v)))


def weinstein_L(wave: DnoidalWave, Lplus: LinOp | None = None) -> WeinsteinResult:
    """<L^{-1} phi, phi> with the kernel span[phi'] deflated."""
    from .operators import assemble_Lplus

    L = assemble_Lplus(wave) if Lplus is None else Lplus
    return solve_on_complement(L, wave.phi, [wave.dphi])


def weinstein_Q(wave: DnoidalWave, Q: LinOp | None = None) -> WeinsteinResult:
    """<Q^{-1} psi, psi> with the kernel span[psi'] deflated."""
    Q = assemble_Q(wave) if Q is None else Q
    return solve_on_complement(Q, wave.psi, [wave.dpsi])


def weinstein_ones(wave: DnoidalWave, Q: LinOp | None = None) -> WeinsteinResult:
    """<Q^{-1} 1, 1>; positive, so the constant direction alone is not enough."""
    Q = assemble_Q(wave) if Q is None else Q
    return solve_on_complement(Q, np.ones(wave.grid.N), [wave.dpsi])
