"""Pseudo-spectral lab for the semiclassical NLS / Gross-Pitaevskii equation,
its hydrodynamic reformulations and their asymptotic limits."""

__version__ = "0.1.0"

from .grid import SpectralGrid, make_grid
from .laws import (CapillarityLaw, NonlinearityLaw, constant_capillarity, cubic,
                   gross_pitaevskii, power, qhd_capillarity)

__all__ = ["SpectralGrid", "make_grid", "NonlinearityLaw", "CapillarityLaw", "cubic",
           "gross_pitaevskii", "power", "constant_capillarity", "qhd_capillarity", "__version__"]
