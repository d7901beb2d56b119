"""Exceptions raised by the solvers."""


class NonFiniteError(RuntimeError):
    """A solver produced NaN or Inf; ``t`` is the time of the failing step."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t={t:.6g})")
        self.t = t


class VacuumError(ValueError):
    """Density fell below the configured floor where vacuum cannot be handled."""

    def __init__(self, min_density: float, floor: float, t: float | None = None):
        where = "" if t is None else f" at t={t:.6g}"
        super().__init__(f"density minimum {min_density:.3e} below floor {floor:.3e}{where}")
        self.min_density = min_density
        self.floor = floor
        self.t = t


class LiftingError(ValueError):
    """The phase of a wave function cannot be lifted (vacuum present)."""


class BoundarySupportWarning(UserWarning):
    """A localized field reaches the outer 10% of the periodic cell, so moment
    functionals no longer approximate their whole-space values."""
