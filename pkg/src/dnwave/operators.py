"""Linearized operators about a dnoidal wave, as dense matrices.

Perturbations are ordered (q, p1, p2): the long-wave component first,
then the real and imaginary parts of the Schrodinger perturbation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretize import HillAction, LinOp, SpectralGrid, diff_matrix
from .errors import GridMismatch
from .wavefamily import DnoidalWave


def _grid_of(wave: DnoidalWave, grid: SpectralGrid | None) -> SpectralGrid:
    if grid is None:
        return wave.grid
    if not grid.same_as(wave.grid):
        raise GridMismatch(f"wave sampled on N={wave.grid.N}, T={wave.grid.T}; got N={grid.N}, T={grid.T}")
    return grid


def _sym(M) -> np.ndarray:
    return 0.5 * (M + M.T)


def assemble_L1(wave: DnoidalWave, grid: SpectralGrid | None = None) -> LinOp:
    """L1 = -alpha d^2 + (c - 1) - 2 beta psi."""
    grid = _grid_of(wave, grid)
    p = wave.params
    D2 = diff_matrix(grid, 2).matrix
    V = (p.c - 1.0) - 2.0 * p.beta * wave.psi
    M = -p.alpha * D2 + np.diag(V)
    return LinOp(M, "symmetric", grid, HillAction(p.alpha, V, grid))


def assemble_L2(wave: DnoidalWave, grid: SpectralGrid | None = None) -> LinOp:
    """L2 = -d^2 + sigma - psi."""
    grid = _grid_of(wave, grid)
    D2 = diff_matrix(grid, 2).matrix
    V = wave.params.sigma - wave.psi
    M = -D2 + np.diag(V)
    return LinOp(M, "symmetric", grid, HillAction(1.0, V, grid))


def _Q_from(L1: LinOp, wave: DnoidalWave) -> LinOp:
    shift = -1.0 / (2.0 * wave.params.A)
    return LinOp(L1.matrix + shift * np.eye(L1.grid.N), "symmetric", L1.grid, L1.action.shifted(shift))


def _Lplus_from(L2: LinOp, wave: DnoidalWave) -> LinOp:
    extra = -2.0 * wave.params.A * wave.phi**2
    return LinOp(L2.matrix + np.diag(extra), "symmetric", L2.grid, L2.action.shifted(extra))


def assemble_Q(wave: DnoidalWave, grid: SpectralGrid | None = None) -> LinOp:
    """Q = L1 - 1/(2A)."""
    return _Q_from(assemble_L1(wave, grid), wave)


def assemble_Lplus(wave: DnoidalWave, grid: SpectralGrid | None = None) -> LinOp:
    """L = L2 - 2 A phi^2, the linearization of the cubic NLS about phi."""
    return _Lplus_from(assemble_L2(wave, grid), wave)


def assemble_blockL(
    wave: DnoidalWave,
    grid: SpectralGrid | None = None,
    *,
    coupling_21=None,
) -> LinOp:
    """Block operator [[L1, -phi, 0], [-phi, L2, 0], [0, 0, L2]].

    ``coupling_21`` overrides the (2, 1) block's multiplier; passing anything
    other than ``-phi`` produces a non-symmetric operator (tag ``general``),
    which is only useful as a negative control.
    """
    grid = _grid_of(wave, grid)
    N = grid.N
    L1 = assemble_L1(wave, grid).matrix
    L2 = assemble_L2(wave, grid).matrix
    coupling = -np.diag(wave.phi)
    lower = coupling if coupling_21 is None else np.diag(np.asarray(coupling_21, dtype=float))
    M = np.zeros((3 * N, 3 * N))
    M[:N, :N] = L1
    M[:N, N : 2 * N] = coupling
    M[N : 2 * N, :N] = lower
    M[N : 2 * N, N : 2 * N] = L2
    M[2 * N :, 2 * N :] = L2
    tag = "symmetric" if coupling_21 is None else "general"
    return LinOp(M, tag, grid)


def assemble_J(grid: SpectralGrid) -> LinOp:
    """Symplectic form [[d, 0, 0], [0, 0, 1], [0, -1, 0]]."""
    N = grid.N
    M = np.zeros((3 * N, 3 * N))
    M[:N, :N] = diff_matrix(grid, 1).matrix
    M[N : 2 * N, 2 * N :] = np.eye(N)
    M[2 * N :, N : 2 * N] = -np.eye(N)
    return LinOp(M, "antisymmetric", grid)


def projector(v, grid: SpectralGrid) -> LinOp:
    """Orthogonal projection onto the complement of ``v`` in the weighted L2 pairing."""
    v = np.asarray(v, dtype=float)
    if v.shape != (grid.N,):
        raise GridMismatch(f"vector of shape {v.shape} does not match N={grid.N}")
    nv2 = grid.inner(v, v)
    if nv2 == 0.0:
        raise ValueError("cannot project onto the complement of the zero vector")
    # uniform weights: the weighted projector coincides with the Euclidean one
    P = np.eye(grid.N) - grid.h * np.outer(v, v) / nv2
    return LinOp(_sym(P), "symmetric", grid)


def block_projector(wave: DnoidalWave, grid: SpectralGrid | None = None) -> LinOp:
    """diag(P_{1-perp}, P_{phi-perp}, P_{phi-perp})."""
    grid = _grid_of(wave, grid)
    N = grid.N
    P1 = projector(np.ones(N), grid).matrix
    Pphi = projector(wave.phi, grid).matrix
    M = np.zeros((3 * N, 3 * N))
    M[:N, :N] = P1
    M[N : 2 * N, N : 2 * N] = Pphi
    M[2 * N :, 2 * N :] = Pphi
    return LinOp(M, "symmetric", grid)


def assemble_H(wave: DnoidalWave, grid: SpectralGrid | None = None, *, blockL: LinOp | None = None) -> LinOp:
    """Projected Hamiltonian P blockL P with P = diag(P_1, P_phi, P_phi)."""
    grid = _grid_of(wave, grid)
    L = assemble_blockL(wave, grid) if blockL is None else blockL
    P = block_projector(wave, grid).matrix
    M = P @ L.matrix @ P
    if L.symmetry == "symmetric":
        return LinOp(_sym(M), "symmetric", grid)
    return LinOp(M, "general", grid)


def assemble_JH(wave: DnoidalWave, grid: SpectralGrid | None = None, *, H: LinOp | None = None) -> LinOp:
    grid = _grid_of(wave, grid)
    H = assemble_H(wave, grid) if H is None else H
    J = assemble_J(grid)
    return LinOp(J.matrix @ H.matrix, "general", grid)


def stack(*parts) -> np.ndarray:
    """Concatenate per-slot samples into one block vector."""
    return np.concatenate([np.asarray(p, dtype=float) for p in parts])


@dataclass(frozen=True)
class OperatorSet:
    L1: LinOp
    L2: LinOp
    Q: LinOp
    Lplus: LinOp
    blockL: LinOp
    J: LinOp
    H: LinOp
    JH: LinOp

    @classmethod
    def assemble(cls, wave: DnoidalWave, grid: SpectralGrid | None = None) -> "OperatorSet":
        grid = _grid_of(wave, grid)
        L1 = assemble_L1(wave, grid)
        L2 = assemble_L2(wave, grid)
        Q = _Q_from(L1, wave)
        Lplus = _Lplus_from(L2, wave)
        blockL = assemble_blockL(wave, grid)
        J = assemble_J(grid)
        H = assemble_H(wave, grid, blockL=blockL)
        JH = LinOp(J.matrix @ H.matrix, "general", grid)
        return cls(L1, L2, Q, Lplus, blockL, J, H, JH)
