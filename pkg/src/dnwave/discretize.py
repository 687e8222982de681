"""Periodic Fourier collocation on [-T, T).

Grids are uniform with the right endpoint dropped, so node j sits at
``-T + 2*T*j/N``.  Differentiation matrices are dense circulants built from
the discrete Fourier symbol ``(i k)**order``; for odd orders the Nyquist
mode is zeroed, which makes them exactly antisymmetric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from .errors import GridMismatch, SymmetryError

SYMMETRY_RTOL = 1e-10
SYMMETRY_TAGS = ("symmetric", "antisymmetric", "general")


@dataclass(frozen=True)
class SpectralGrid:
    N: int
    T: float
    nodes: np.ndarray = field(repr=False, compare=False)
    wavenumbers: np.ndarray = field(repr=False, compare=False)

    @property
    def h(self) -> float:
        """Uniform quadrature weight 2T/N."""
        return 2.0 * self.T / self.N

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.N, self.h)

    def inner(self, f, g) -> float:
        """Quadrature-weighted L2 pairing over one period."""
        return float(self.h * np.dot(f, g))

    def norm(self, f) -> float:
        return float(np.sqrt(self.inner(f, f)))

    def same_as(self, other: "SpectralGrid") -> bool:
        return self.N == other.N and self.T == other.T

    def to_dict(self) -> dict:
        return {"N": self.N, "T": self.T, "h": self.h}


def make_grid(T: float, N: int, *, min_points: int = 32) -> SpectralGrid:
    """Build the N-point periodic grid on [-T, T).

    ``min_points`` exists so that tiny grids can be used in documentation
    examples; production code keeps the default.
    """
    if int(N) != N or N % 2:
        raise ValueError(f"N must be an even integer, got {N!r}")
    N = int(N)
    if N < min_points:
        raise ValueError(f"N={N} is below the minimum of {min_points} points")
    if not T > 0:
        raise ValueError(f"half-period T must be positive, got {T!r}")
    T = float(T)
    nodes = -T + 2.0 * T * np.arange(N) / N
    wavenumbers = np.arange(-N // 2, N // 2) * np.pi / T
    nodes.setflags(write=False)
    wavenumbers.setflags(write=False)
    return SpectralGrid(N, T, nodes, wavenumbers)


@dataclass(frozen=True)
class LinOp:
    """Dense real operator with a verified symmetry tag."""

    matrix: np.ndarray = field(repr=False)
    symmetry: str
    grid: SpectralGrid
    # optional matrix-free application, used where rounding in the dense
    # product (entries of size N^2) would dominate; see HillAction
    action: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {M.shape}")
        if M.shape[0] % self.grid.N:
            raise GridMismatch(f"matrix size {M.shape[0]} is not a multiple of N={self.grid.N}")
        if self.symmetry not in SYMMETRY_TAGS:
            raise ValueError(f"unknown symmetry tag {self.symmetry!r}")
        if self.symmetry != "general":
            defect = symmetry_defect(M, self.symmetry)
            if defect > SYMMETRY_RTOL:
                raise SymmetryError(f"matrix tagged {self.symmetry} has relative defect {defect:.3e}")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def blocks(self) -> int:
        return self.matrix.shape[0] // self.grid.N

    def __matmul__(self, v):
        return self.matrix @ v

    def norm(self) -> float:
        """Spectral norm."""
        return float(np.linalg.norm(self.matrix, 2))

    def to_csv(self, path) -> None:
        np.savetxt(path, self.matrix, delimiter=",", fmt="%.17g")


def symmetry_defect(M, kind: str = "symmetric") -> float:
    """Relative Frobenius defect ||M -/+ M^T|| / ||M||."""
    scale = np.linalg.norm(M)
    if scale == 0.0:
        return 0.0
    other = M.T if kind == "symmetric" else -M.T
    return float(np.linalg.norm(M - other) / scale)


def fourier_symbol(grid: SpectralGrid, order: int) -> np.ndarray:
    """Symbol (i k)**order in FFT ordering, Nyquist zeroed for odd orders."""
    k = fft.fftfreq(grid.N, d=grid.h) * 2.0 * np.pi
    symbol = (1j * k) ** order
    if order % 2:
        symbol[grid.N // 2] = 0.0
    return symbol


def diff_matrix(grid: SpectralGrid, order: int) -> LinOp:
    """Dense Fourier differentiation matrix of order 1, 2 or 3."""
    if order not in (1, 2, 3):
        raise ValueError(f"unsupported derivative order {order!r}; expected 1, 2 or 3")
    column = fft.ifft(fourier_symbol(grid, order)).real
    idx = (np.arange(grid.N)[:, None] - np.arange(grid.N)[None, :]) % grid.N
    D = column[idx]
    if order % 2:
        D = 0.5 * (D - D.T)
        return LinOp(D, "antisymmetric", grid)
    D = 0.5 * (D + D.T)
    return LinOp(D, "symmetric", grid)


def spectral_derivative(f, grid: SpectralGrid, order: int = 1) -> np.ndarray:
    """Apply the order-``order`` Fourier derivative to samples via FFT."""
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.N,):
        raise GridMismatch(f"samples of length {f.shape} do not match N={grid.N}")
    return fft.ifft(fourier_symbol(grid, order) * fft.fft(f)).real


@dataclass(frozen=True)
class HillAction:
    """u -> coef * (-u'') + potential * u, with the derivative taken by FFT.

    For smooth u this is accurate to rounding relative to the size of u and
    u'', whereas the dense product carries errors of order eps * N^2 * |u|.
    """

    coef: float
    potential: np.ndarray = field(repr=False)
    grid: SpectralGrid

    def __call__(self, u) -> np.ndarray:
        return -self.coef * spectral_derivative(u, self.grid, 2) + self.potential * u

    def shifted(self, extra) -> "HillAction":
        return HillAction(self.coef, self.potential + extra, self.grid)


def mult_op(samples, grid: SpectralGrid) -> LinOp:
    """Multiplication by a sampled function, as a diagonal matrix."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.N,):
        raise GridMismatch(f"samples of length {samples.shape} do not match N={grid.N}")
    return LinOp(np.diag(samples), "symmetric", grid)


def identity(grid: SpectralGrid) -> LinOp:
    return LinOp(np.eye(grid.N), "symmetric", grid)
