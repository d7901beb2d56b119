"""Pressure and capillarity laws.

Laws are small frozen dataclasses keyed by name so they pickle cleanly into
worker processes during sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LAW_NAMES = ("cubic", "gross_pitaevskii", "power")


@dataclass(frozen=True)
class NonlinearityLaw:
    """Defocusing nonlinearity ``f`` with antiderivative ``F`` (``F(0) = 0``).

    ``cubic``: f(r) = r; ``gross_pitaevskii``: f(r) = r - 1;
    ``power``: f(r) = r**sigma.
    """

    name: str
    sigma: float = 1.0

    def __post_init__(self):
        if self.name not in LAW_NAMES:
            raise ValueError(f"unknown nonlinearity {self.name!r}; expected one of {LAW_NAMES}")
        if self.name == "power" and not self.sigma > 0:
            raise ValueError("power law needs sigma > 0")

    def f(self, r):
        if self.name == "cubic":
            return r
        if self.name == "gross_pitaevskii":
            return r - 1.0
        return np.power(r, self.sigma)

    def F(self, r):
        if self.name == "cubic":
            return 0.5 * r * r
        if self.name == "gross_pitaevskii":
            return 0.5 * r * r - r
        return np.power(r, self.sigma + 1.0) / (self.sigma + 1.0)

    def df(self, r):
        if self.name in ("cubic", "gross_pitaevskii"):
            return np.ones_like(np.asarray(r, dtype=float))
        return self.sigma * np.power(r, self.sigma - 1.0)

    def P(self, r):
        """Pressure ``r f(r) - F(r)``."""
        return r * self.f(r) - self.F(r)

    @property
    def is_affine(self) -> bool:
        """True when f(r) = r + const, so grad f(rho) = grad rho."""
        return self.name in ("cubic", "gross_pitaevskii") or (self.name == "power" and self.sigma == 1)

    def relative_F(self, r, background: float | None):
        """``F`` renormalised about a constant background density.

        ``F(r) - F(b) - f(b)(r - b)``; finite on unbounded backgrounds and
        equal to ``F`` when ``background`` is None.
        """
        if background is None:
            return self.F(r)
        b = background
        return self.F(r) - self.F(b) - self.f(b) * (r - b)

    def relative_P(self, r, background: float | None):
        if background is None:
            return self.P(r)
        return self.P(r) - self.P(background)

    def sound_speed(self, rho: float = 1.0) -> float:
        """Linear sound speed sqrt(rho f'(rho)) about a constant state."""
        return float(np.sqrt(rho * self.df(rho)))

    def to_dict(self) -> dict:
        return {"name": self.name, "sigma": self.sigma}


def cubic() -> NonlinearityLaw:
    return NonlinearityLaw("cubic")


def gross_pitaevskii() -> NonlinearityLaw:
    return NonlinearityLaw("gross_pitaevskii")


def power(sigma: float) -> NonlinearityLaw:
    return NonlinearityLaw("power", float(sigma))


def embedding_ok(sigma: float, dim: int) -> bool:
    """Whether W^{1,1}(R^d) embeds in L^{sigma+1}(R^d).

    The embedding holds for exponents up to d/(d-1): every sigma in 1D,
    sigma <= 1 in 2D.
    """
    if dim == 1:
        return True
    return sigma + 1.0 <= dim / (dim - 1.0)


@dataclass(frozen=True)
class CapillarityLaw:
    """Capillarity coefficient ``kappa(rho)`` of a Korteweg fluid.

    ``constant``: kappa = value; ``qhd``: kappa = eps^2 / (4 rho), which turns
    the Korteweg system into quantum hydrodynamics.
    """

    name: str
    value: float

    def __post_init__(self):
        if self.name not in ("constant", "qhd"):
            raise ValueError(f"unknown capillarity {self.name!r}")
        if not self.value >= 0:
            raise ValueError("capillarity parameter must be non-negative")

    def kappa(self, rho):
        if self.name == "constant":
            return np.full_like(np.asarray(rho, dtype=float), self.value)
        return self.value**2 / (4.0 * rho)

    def dkappa(self, rho):
        if self.name == "constant":
            return np.zeros_like(np.asarray(rho, dtype=float))
        return -self.value**2 / (4.0 * rho * rho)

    def rho_kappa_prime(self, rho):
        """(rho kappa)'(rho)."""
        if self.name == "constant":
            return np.full_like(np.asarray(rho, dtype=float), self.value)
        return np.zeros_like(np.asarray(rho, dtype=float))

    def a(self, rho):
        """Dispersion coefficient sqrt(rho kappa(rho))."""
        if self.name == "qhd":
            return np.full_like(np.asarray(rho, dtype=float), 0.5 * self.value)
        return np.sqrt(rho * self.kappa(rho))

    def w_factor(self, rho):
        """sqrt(kappa(rho)/rho), so that w = -w_factor * grad rho."""
        if self.name == "qhd":
            return 0.5 * self.value / rho
        return np.sqrt(self.kappa(rho) / rho)

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value}


def constant_capillarity(kappa: float) -> CapillarityLaw:
    return CapillarityLaw("constant", float(kappa))


def qhd_capillarity(eps: float) -> CapillarityLaw:
    return CapillarityLaw("qhd", float(eps))
