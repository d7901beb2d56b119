"""Maps between wave functions and hydrodynamic variables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import VacuumError
from .grid import SpectralGrid, derivative, gradient
from .laws import CapillarityLaw


@dataclass
class HydroState:
    rho: np.ndarray
    v: np.ndarray
    vacuum_mask: np.ndarray
    t: float
    eps: float


@dataclass
class ExtendedState:
    """Density and complex velocity z = v + i w."""

    rho: np.ndarray
    z: np.ndarray
    t: float = 0.0
    eps: float | None = None
    capillarity: CapillarityLaw | None = None

    @property
    def v(self) -> np.ndarray:
        return self.z.real

    @property
    def w(self) -> np.ndarray:
        return self.z.imag


@dataclass
class WeakVars:
    """Fields of the weak QHD formulation built from a wave function."""

    rho: np.ndarray
    Lam: np.ndarray
    J: np.ndarray
    grad_sqrt_rho: np.ndarray
    vacuum_mask: np.ndarray


def vacuum_mask(rho: np.ndarray, threshold: float, relative: bool = True) -> np.ndarray:
    cut = threshold * float(np.max(rho)) if relative else threshold
    return rho < cut


def to_hydro(psi: np.ndarray, grid: SpectralGrid, eps: float,
             vacuum_threshold: float = 1e-8, t: float = 0.0) -> HydroState:
    """Madelung variables rho = |psi|^2, v = eps Im(conj(psi) grad psi) / rho.

    ``vacuum_threshold`` is relative to max(rho); v is set to 0 on vacuum.
    """
    if not vacuum_threshold > 0:
        raise ValueError("vacuum_threshold must be positive")
    rho = np.abs(psi) ** 2
    mask = vacuum_mask(rho, vacuum_threshold)
    current = eps * np.imag(np.conj(psi) * gradient(psi, grid))
    safe = np.where(mask, 1.0, rho)
    v = np.where(mask, 0.0, current / safe)
    return HydroState(rho=rho, v=v, vacuum_mask=mask, t=t, eps=eps)


def from_hydro(rho: np.ndarray, phi: np.ndarray, eps: float) -> np.ndarray:
    """psi = sqrt(rho) exp(i phi / eps)."""
    if np.any(rho < 0):
        raise ValueError("density must be non-negative")
    return np.sqrt(rho) * np.exp(1j * phi / eps)


def _check_floor(rho, floor):
    rmin = float(np.min(rho))
    if rmin < floor:
        raise VacuumError(rmin, floor)


def extended_vars_qhd(rho: np.ndarray, v: np.ndarray, eps: float, grid: SpectralGrid,
                      floor: float = 1e-8, t: float = 0.0) -> ExtendedState:
    """z = v + i w with w = -(eps/2) grad(rho) / rho."""
    _check_floor(rho, floor)
    w = -0.5 * eps * gradient(rho, grid) / rho
    return ExtendedState(rho=rho.copy(), z=v + 1j * w, t=t, eps=eps)


def extended_vars_korteweg(rho: np.ndarray, v: np.ndarray, capillarity: CapillarityLaw,
                           grid: SpectralGrid, floor: float = 1e-8, t: float = 0.0) -> ExtendedState:
    """z = v + i w with w = -sqrt(kappa(rho)/rho) grad(rho)."""
    _check_floor(rho, floor)
    w = -capillarity.w_factor(rho) * gradient(rho, grid)
    eps = capillarity.value if capillarity.name == "qhd" else None
    return ExtendedState(rho=rho.copy(), z=v + 1j * w, t=t, eps=eps, capillarity=capillarity)


def unit_phase(psi: np.ndarray, threshold: float = 0.0) -> np.ndarray:
    """psi/|psi| off vacuum, 0 where |psi|^2 <= threshold."""
    mod = np.abs(psi)
    off = mod**2 > threshold
    return np.where(off, psi / np.where(off, mod, 1.0), 0.0)


def weak_vars(psi: np.ndarray, grid: SpectralGrid, threshold: float = 0.0) -> WeakVars:
    """rho, Lambda = Im(conj(phi) grad psi), grad sqrt(rho) = Re(conj(phi) grad psi),
    J = sqrt(rho) Lambda, with phi the unit phase (0 on vacuum)."""
    rho = np.abs(psi) ** 2
    phi = unit_phase(psi, threshold)
    g = np.conj(phi) * gradient(psi, grid)
    Lam = g.imag
    return WeakVars(rho=rho, Lam=Lam, J=np.sqrt(rho) * Lam, grad_sqrt_rho=g.real,
                    vacuum_mask=~(rho > threshold))


def vacuum_fraction(psi: np.ndarray, threshold: float) -> float:
    """Fraction of grid points with |psi|^2 < threshold (absolute)."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    return float(np.mean(np.abs(psi) ** 2 < threshold))


def mod_identity_residual(psi: np.ndarray, grid: SpectralGrid, threshold: float = 1e-8) -> float:
    """max | |grad psi|^2 - |grad sqrt rho|^2 - |Lambda|^2 | off the vacuum mask."""
    wv = weak_vars(psi, grid)
    lhs = np.sum(np.abs(gradient(psi, grid)) ** 2, axis=0)
    rhs = np.sum(wv.grad_sqrt_rho**2 + wv.Lam**2, axis=0)
    off = ~vacuum_mask(wv.rho, threshold)
    if not np.any(off):
        return 0.0
    return float(np.max(np.abs(lhs - rhs)[off]))


def curl_identity_residual(psi: np.ndarray, grid: SpectralGrid, threshold: float = 1e-8) -> float:
    """max over j<k of |d_j J^k - d_k J^j - 2(Lam^k d_j sqrt(rho) - Lam^j d_k sqrt(rho))| off vacuum.

    Zero in 1D where there is no antisymmetric pair.
    """
    if grid.dim < 2:
        return 0.0
    wv = weak_vars(psi, grid)
    off = ~vacuum_mask(wv.rho, threshold)
    worst = 0.0
    for j in range(grid.dim):
        for k in range(j + 1, grid.dim):
            lhs = derivative(wv.J[k], grid, j) - derivative(wv.J[j], grid, k)
            rhs = 2.0 * (wv.Lam[k] * wv.grad_sqrt_rho[j] - wv.Lam[j] * wv.grad_sqrt_rho[k])
            if np.any(off):
                worst = max(worst, float(np.max(np.abs(lhs - rhs)[off])))
    return worst
