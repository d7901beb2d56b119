"""Periodic spectral grids on the torus [-L/2, L/2)^d, d in {1, 2}.

Fields are plain numpy arrays. A scalar field on a 2D grid has shape
``(n, n)`` with axis order ``(x, y)``; a vector field carries a leading
component axis, shape ``(d, n, n)``. Transforms act on the trailing ``d``
axes so the same helpers serve scalars and vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Uniform periodic grid with wavenumber tables and a 2/3 dealias mask.

    Grid points are ``x_j = -L/2 + j L/n`` on every axis, so ``x = 0`` is a
    grid point and moment functionals use the centred coordinate directly.
    """

    dim: int
    n: int
    length: float
    modes: np.ndarray = field(init=False, repr=False)
    wavenumbers: np.ndarray = field(init=False, repr=False)
    dealias_mask: np.ndarray = field(init=False, repr=False)
    x: tuple = field(init=False, repr=False)
    k: tuple = field(init=False, repr=False)
    k2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n, L = self.n, self.length
        m = np.fft.fftfreq(n, d=1.0 / n).astype(int)
        kk = 2.0 * np.pi * m / L
        xs = -0.5 * L + L * np.arange(n) / n
        if self.dim == 1:
            x = (xs,)
            k = (kk,)
            mask = np.abs(m) <= n / 3
        else:
            x = tuple(np.meshgrid(xs, xs, indexing="ij"))
            k = tuple(np.meshgrid(kk, kk, indexing="ij"))
            mm = np.meshgrid(m, m, indexing="ij")
            mask = (np.abs(mm[0]) <= n / 3) & (np.abs(mm[1]) <= n / 3)
        k2 = sum(kj**2 for kj in k)
        for name, val in [("modes", m), ("wavenumbers", kk), ("dealias_mask", mask),
                          ("x", x), ("k", k), ("k2", k2)]:
            if isinstance(val, np.ndarray):
                val.flags.writeable = False
            object.__setattr__(self, name, val)

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def cell_volume(self) -> float:
        return self.dx**self.dim

    @property
    def axes(self) -> tuple:
        return tuple(range(-self.dim, 0))

    @property
    def r2(self) -> np.ndarray:
        """|x|^2 in the centred coordinate."""
        return sum(xj**2 for xj in self.x)

    def zeros(self, dtype=float) -> np.ndarray:
        return np.zeros(self.shape, dtype=dtype)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "n": self.n, "length": self.length}


def make_grid(dim: int, n: int, L: float) -> SpectralGrid:
    """Build a grid with ``n`` points per axis (a power of two, n >= 8) on period ``L``."""
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    if int(n) != n or n < 8 or (int(n) & (int(n) - 1)) != 0:
        raise ValueError(f"n must be a power of two >= 8, got {n}")
    if not L > 0:
        raise ValueError(f"domain length must be positive, got {L}")
    return SpectralGrid(dim=dim, n=int(n), length=float(L))


def fft(f: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    return sfft.fftn(f, axes=grid.axes)


def ifft(fh: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    return sfft.ifftn(fh, axes=grid.axes)


def _real_if(f, out):
    return out.real if np.isrealobj(f) else out


def gradient(f: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Spectral gradient of a scalar field; result has shape ``(d, *grid.shape)``."""
    fh = fft(f, grid)
    return np.stack([_real_if(f, ifft(1j * kj * fh, grid)) for kj in grid.k])


def derivative(f: np.ndarray, grid: SpectralGrid, axis: int = 0, order: int = 1) -> np.ndarray:
    """Spectral partial derivative of ``order`` along ``axis`` (0 = x, 1 = y)."""
    fh = fft(f, grid)
    return _real_if(f, ifft((1j * grid.k[axis]) ** order * fh, grid))


def divergence(vec: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    out = sum(1j * kj * fft(vj, grid) for kj, vj in zip(grid.k, vec))
    return _real_if(vec, ifft(out, grid))


def laplacian(f: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Spectral Laplacian; acts componentwise on vector fields."""
    return _real_if(f, ifft(-grid.k2 * fft(f, grid), grid))


def dealias(f: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Zero every mode with |m| > n/3 on some axis (2/3 rule)."""
    return _real_if(f, ifft(fft(f, grid) * grid.dealias_mask, grid))


def integrate(f: np.ndarray, grid: SpectralGrid):
    """Trapezoidal (spectrally accurate) quadrature over the periodic cell."""
    return np.sum(f, axis=grid.axes) * grid.cell_volume


def norms(f: np.ndarray, grid: SpectralGrid) -> dict:
    """Discrete L2, Linf and H1-seminorm of a scalar or vector field."""
    l2 = float(np.sqrt(np.sum(integrate(np.abs(f) ** 2, grid))))
    linf = float(np.max(np.abs(f)))
    if f.ndim > grid.dim:
        g2 = sum(np.abs(gradient(fj, grid)) ** 2 for fj in f)
    else:
        g2 = np.abs(gradient(f, grid)) ** 2
    h1 = float(np.sqrt(np.sum(integrate(g2, grid))))
    return {"L2": l2, "Linf": linf, "H1_seminorm": h1}


def l2_norm(f: np.ndarray, grid: SpectralGrid) -> float:
    return float(np.sqrt(np.sum(integrate(np.abs(f) ** 2, grid))))


def spectral_l2(f: np.ndarray, grid: SpectralGrid) -> float:
    """L2 norm from Fourier coefficients (Parseval); equals ``l2_norm``."""
    fh = fft(f, grid)
    return float(np.sqrt(np.sum(np.abs(fh) ** 2) * grid.length**grid.dim / grid.n ** (2 * grid.dim)))


def fourier_shift(f: np.ndarray, grid: SpectralGrid, shift: float) -> np.ndarray:
    """Trigonometric interpolant of a 1D field evaluated at ``x + shift``."""
    if grid.dim != 1:
        raise ValueError("fourier_shift is defined for 1D grids")
    fh = fft(f, grid)
    kk = grid.k[0].copy()
    # Nyquist mode has no conjugate partner; drop it so real input stays real.
    kk_nyq = grid.n // 2
    fh[kk_nyq] = 0.0
    return _real_if(f, ifft(fh * np.exp(1j * kk * shift), grid))


def antiderivative(f: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Zero-mean periodic antiderivative of the zero-mean part of a 1D field.

    The mean of ``f`` (which has no periodic primitive) is returned as a
    linear ramp added to the result, so ``derivative(result) == f`` up to the
    jump at the cell boundary.
    """
    if grid.dim != 1:
        raise ValueError("antiderivative is defined for 1D grids")
    fh = fft(f, grid)
    mean = fh[0] / grid.n
    kk = grid.k[0]
    gh = np.zeros_like(fh)
    nz = kk != 0
    gh[nz] = fh[nz] / (1j * kk[nz])
    gh[grid.n // 2] = 0.0
    out = ifft(gh, grid) + mean * grid.x[0]
    return _real_if(f, out)


def max_gradient(f: np.ndarray, grid: SpectralGrid) -> float:
    return float(np.max(np.abs(gradient(f, grid))))
