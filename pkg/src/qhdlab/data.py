"""Named initial-data families used by configs, suites and tests.

Wave families return a complex field ``psi``; hydrodynamic families return
``(rho, v)`` with ``v`` of shape (d, ...).
"""

from __future__ import annotations

import numpy as np

from .grid import SpectralGrid, gradient
from .schrodinger import mirrored_dark_soliton
from .weakqhd import vortex_dipole


def compact_bump(r):
    """exp(1 - 1/(1 - r^2)) on |r| < 1, zero outside (C-infinity)."""
    r = np.asarray(r, dtype=float)
    inside = np.abs(r) < 1.0
    q = np.where(inside, 1.0 - r * r, 1.0)
    return np.where(inside, np.exp(1.0 - 1.0 / q), 0.0)


def constant(grid: SpectralGrid, value: float = 1.0, **_):
    return np.full(grid.shape, complex(value))


def plane_wave(grid: SpectralGrid, mode: int = 1, **_):
    k = 2.0 * np.pi * mode / grid.length
    return np.exp(1j * k * grid.x[0]) if grid.dim == 1 else np.exp(1j * k * grid.x[0]) + 0 * grid.x[1]


def gaussian(grid: SpectralGrid, width: float = 1.0, momentum: float = 0.0,
             chirp: float = 0.0, tilt: float = 0.0, eps: float = 1.0, **_):
    """(1 + tilt x) exp(-|x|^2 / (2 w^2)) exp(i (momentum x + chirp x^2) / eps), localized."""
    x0 = grid.x[0]
    env = (1.0 + tilt * x0) * np.exp(-grid.r2 / (2.0 * width**2))
    return env * np.exp(1j * (momentum * x0 + chirp * x0**2) / eps)


def dark_soliton_pair(grid: SpectralGrid, **_):
    return mirrored_dark_soliton(grid)


def vortex(grid: SpectralGrid, radius: float = 3.0, strength: float = 1.0, **_):
    if grid.dim != 2:
        raise ValueError("vortex data need a 2D grid")
    return vortex_dipole(grid, radius, strength, offset=(0.5 * grid.dx, 0.5 * grid.dx))


def madelung_bump(grid: SpectralGrid, amplitude: float = 0.3, phase_amplitude: float = 0.2,
                  eps: float = 1.0, **_):
    """sqrt(1 + A sin x) exp(i B cos x / eps) on a 2 pi cell (no vacuum, potential flow)."""
    x = 2.0 * np.pi * grid.x[0] / grid.length
    return np.sqrt(1.0 + amplitude * np.sin(x)) * np.exp(1j * phase_amplitude * np.cos(x) / eps)


WAVE_FAMILIES = {
    "constant": constant,
    "plane_wave": plane_wave,
    "gaussian": gaussian,
    "dark_soliton_pair": dark_soliton_pair,
    "vortex": vortex,
    "madelung_bump": madelung_bump,
}


def density_bump(grid: SpectralGrid, amplitude: float = 0.2, width: float = 1.0,
                 velocity: float = 0.0, **_):
    """rho = 1 + A exp(-|x|^2/w^2), v = velocity * exp(-|x|^2/w^2) along x."""
    g = np.exp(-grid.r2 / width**2)
    v = np.zeros((grid.dim,) + grid.shape)
    v[0] = velocity * g
    return 1.0 + amplitude * g, v


def compact_gas(grid: SpectralGrid, radius: float = 2.0, compression: float = 1.0, **_):
    """a = sqrt(rho) a compact C-infinity bump, v = -compression x bump (converging flow)."""
    b = compact_bump(np.sqrt(grid.r2) / radius)
    v = np.stack([-compression * xj * b for xj in grid.x])
    return b * b, v


def uniform(grid: SpectralGrid, **_):
    return np.ones(grid.shape), np.zeros((grid.dim,) + grid.shape)


def sound_mode(grid: SpectralGrid, amplitude: float = 1e-6, mode: int = 1, **_):
    k = 2.0 * np.pi * mode / grid.length
    return 1.0 + amplitude * np.cos(k * grid.x[0]), np.zeros((grid.dim,) + grid.shape)


HYDRO_FAMILIES = {
    "uniform": uniform,
    "density_bump": density_bump,
    "compact_gas": compact_gas,
    "sound_mode": sound_mode,
}


def make_wave(name: str, grid: SpectralGrid, **params):
    if name in WAVE_FAMILIES:
        return WAVE_FAMILIES[name](grid, **params).astype(complex)
    if name in HYDRO_FAMILIES:
        rho, v = HYDRO_FAMILIES[name](grid, **params)
        eps = params.get("eps", 1.0)
        if grid.dim == 1 and np.any(v):
            from .grid import antiderivative
            phi = antiderivative(v[0], grid)
        else:
            phi = np.zeros(grid.shape)
        return np.sqrt(rho) * np.exp(1j * phi / eps)
    raise KeyError(f"unknown data family {name!r}")


def make_hydro(name: str, grid: SpectralGrid, **params):
    if name in HYDRO_FAMILIES:
        return HYDRO_FAMILIES[name](grid, **params)
    if name in WAVE_FAMILIES:
        psi = WAVE_FAMILIES[name](grid, **params)
        eps = params.get("eps", 1.0)
        rho = np.abs(psi) ** 2
        v = eps * np.imag(np.conj(psi) * gradient(psi, grid)) / np.maximum(rho, 1e-300)
        return rho, v
    raise KeyError(f"unknown data family {name!r}")


def family_names() -> list:
    return sorted(set(WAVE_FAMILIES) | set(HYDRO_FAMILIES))


def kdv_data(name: str, x, amplitude: float = 1.0, width: float = 2.0, c: float = 1.0,
             x0: float = 0.0, direction: str = "left", **_):
    """Initial data for the KdV solver on slow coordinates ``x``."""
    if name == "kdv_soliton":
        from .kdv import kdv_soliton
        return kdv_soliton(x, 0.0, c, direction, x0)
    if name == "sech2":
        return amplitude / np.cosh((x - x0) / width) ** 2
    raise KeyError(f"unknown KdV data family {name!r}")


def transonic_family(name: str, amplitude: float = 1.0, width: float = 2.0, **_):
    """(N0, Theta0) callables for the transonic harness."""
    from .asymptotics import right_moving_family, sech2_family
    if name == "sech2":
        return sech2_family(width, amplitude)
    if name == "right_moving":
        return right_moving_family(width, amplitude)
    raise KeyError(f"unknown transonic data family {name!r}")
