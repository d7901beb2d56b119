"""KdV solver and the transonic slow-variable rescaling of 1D Gross-Pitaevskii.

Two directions are supported:

* ``left``:  u_tau + u_xxx + u u_x = 0,
* ``right``: u_tau - u_xxx - u u_x = 0.

The dispersive term is integrated exactly in Fourier space (Lawson RK4) and
the flux u^2/2 is dealiased. The k = 0 mode is untouched, so the mean of u
is conserved to rounding.

The GP equation is taken in the normalization

    i psi_t + psi_yy + (1 - |psi|^2) psi = 0,

which is the eps = 1 NLS solver run on x = y / sqrt(2). Slow variables are
x^+ = eps (y - sqrt(2) t) (right-moving frame), x^- = eps (y + sqrt(2) t) and
tau = eps^3 t / (2 sqrt(2)), with

    N = (6/eps^2)(1 - |psi|^2),  Theta = (6 sqrt(2)/eps) phase,
    U^- = (N + d Theta)/2,       U^+ = (N - d Theta)/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import LiftingError, NonFiniteError
from .grid import SpectralGrid, antiderivative, dealias, derivative, fft, fourier_shift, ifft, make_grid
from .laws import gross_pitaevskii
from .schrodinger import SchrodingerState, default_dt, evolve

SQRT2 = np.sqrt(2.0)
DIRECTIONS = ("left", "right")


@dataclass
class KdVState:
    u: np.ndarray
    tau: float
    direction: str


@dataclass
class KdVTrajectory:
    taus: list
    snapshots: list
    direction: str
    grid: SpectralGrid

    @property
    def final(self) -> KdVState:
        return KdVState(self.snapshots[-1], self.taus[-1], self.direction)


def _sign(direction):
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    return 1.0 if direction == "left" else -1.0


class KdVStepper:
    """Lawson RK4 on u_hat with the exact linear factor exp(s i k^3 h)."""

    def __init__(self, grid: SpectralGrid, dtau: float, direction: str):
        s = _sign(direction)
        k = grid.k[0]
        self.grid, self.h = grid, dtau
        self._E2 = np.exp(0.5 * s * 1j * k**3 * dtau)
        self._E = self._E2**2
        self._c = -s * 0.5j * k * grid.dealias_mask

    def _N(self, uh):
        u = ifft(uh, self.grid).real
        return self._c * fft(u * u, self.grid)

    def __call__(self, uh):
        h, E, E2 = self.h, self._E, self._E2
        k1 = self._N(uh)
        k2 = self._N(E2 * (uh + 0.5 * h * k1))
        k3 = self._N(E2 * uh + 0.5 * h * k2)
        k4 = self._N(E * uh + h * E2 * k3)
        return E * (uh + h / 6.0 * k1) + h / 6.0 * (E2 * 2.0 * (k2 + k3) + k4)


def kdv_evolve(u0: np.ndarray, grid: SpectralGrid, tau_end: float, dtau: float,
               direction: str = "left", snapshot_every: float | None = None) -> KdVTrajectory:
    """Integrate from tau = 0 to ``tau_end``.

    ``dtau`` is shrunk so that it divides the snapshot spacing (default: the
    whole horizon), which must itself divide ``tau_end``.
    """
    if grid.dim != 1:
        raise ValueError("KdV is one-dimensional")
    spacing = tau_end if snapshot_every is None else snapshot_every
    nsnap = int(round(tau_end / spacing))
    if nsnap < 1 or abs(nsnap * spacing - tau_end) > 1e-9 * tau_end:
        raise ValueError("snapshot spacing must divide tau_end")
    every = max(1, int(np.ceil(spacing / dtau - 1e-9)))
    h = spacing / every
    nsteps = every * nsnap
    stepper = KdVStepper(grid, h, direction)
    uh = fft(np.asarray(u0, dtype=float), grid)
    taus, snaps = [0.0], [np.asarray(u0, dtype=float).copy()]
    for j in range(1, nsteps + 1):
        uh = stepper(uh)
        if j % every == 0 or j == nsteps:
            u = ifft(uh, grid).real
            if not np.all(np.isfinite(u)):
                raise NonFiniteError("non-finite KdV state", j * h)
            taus.append(j * h)
            snaps.append(u)
    return KdVTrajectory(taus, snaps, direction, grid)


def kdv_soliton(x, tau: float, c: float = 1.0, direction: str = "left", x0: float = 0.0):
    """3c sech^2(sqrt(c)(x -/+ c tau - x0)/2) for the left/right equation."""
    s = _sign(direction)
    xi = x - s * c * tau - x0
    return 3.0 * c / np.cosh(0.5 * np.sqrt(c) * xi) ** 2


def kdv_residual(u_prev, u_next, dtau, grid, direction):
    """Midpoint residual of the KdV equation (used as an oracle in tests)."""
    s = _sign(direction)
    m = 0.5 * (u_prev + u_next)
    return (u_next - u_prev) / dtau + s * (derivative(m, grid, 0, 3) + m * derivative(m, grid, 0, 1))


# ------------------------------------------------------------ slow variables


@dataclass
class TransonicSetup:
    """GP grid (on x = y/sqrt 2) and matching slow grid (X = eps y)."""

    eps: float
    gp_grid: SpectralGrid
    slow_grid: SpectralGrid

    @property
    def length_y(self) -> float:
        return self.gp_grid.length * SQRT2

    def y(self) -> np.ndarray:
        return self.gp_grid.x[0] * SQRT2

    def t_of_tau(self, tau):
        return 2.0 * SQRT2 * np.asarray(tau) / self.eps**3

    def tau_of_t(self, t):
        return self.eps**3 * np.asarray(t) / (2.0 * SQRT2)


def transonic_setup(eps: float, n: int, length_y: float) -> TransonicSetup:
    gp = make_grid(1, n, length_y / SQRT2)
    slow = make_grid(1, n, eps * length_y)
    return TransonicSetup(eps, gp, slow)


def default_length_y(eps: float, tau_end: float, margin: float = 60.0) -> float:
    """Period long enough that the two counter-propagating pulses never meet again
    before ``tau_end``: relative travel 8 tau/eps^3 plus a margin of ``margin/eps``."""
    return 8.0 * tau_end / eps**3 + margin / eps


def gp_data(setup: TransonicSetup, N0, Theta0) -> np.ndarray:
    """Long-wave data psi = sqrt(1 - eps^2 N0/6) exp(i eps Theta0 / (6 sqrt 2)),
    with N0, Theta0 callables of the slow variable X = eps y."""
    eps = setup.eps
    X = eps * setup.y()
    rho = 1.0 - eps**2 * N0(X) / 6.0
    if np.min(rho) <= 0:
        raise LiftingError("data has vacuum")
    return np.sqrt(rho) * np.exp(1j * eps * Theta0(X) / (6.0 * SQRT2))


@dataclass
class SlowVarBundle:
    """Slow variables on a common (tau, X) grid; index [m, j] is (taus[m], X_j)."""

    eps: float
    taus: np.ndarray
    grid: SpectralGrid
    N_plus: np.ndarray
    N_minus: np.ndarray
    Theta_plus: np.ndarray
    Theta_minus: np.ndarray
    dTheta_plus: np.ndarray
    dTheta_minus: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def U_minus(self) -> np.ndarray:
        return 0.5 * (self.N_minus + self.dTheta_minus)

    @property
    def U_plus(self) -> np.ndarray:
        return 0.5 * (self.N_plus - self.dTheta_plus)

    def at(self, tau: float, which: str = "plus") -> np.ndarray:
        """U^+ or U^- at an arbitrary tau by cubic interpolation in time."""
        U = self.U_plus if which == "plus" else self.U_minus
        m = int(np.argmin(np.abs(self.taus - tau)))
        if abs(self.taus[m] - tau) <= 1e-12 * max(1.0, abs(tau)):
            return U[m]
        if len(self.taus) < 4:
            raise ValueError("cubic interpolation in tau needs at least four snapshots")
        return CubicSpline(self.taus, U, axis=0)(tau)


def physical_fields(psi: np.ndarray, setup: TransonicSetup, vacuum_floor: float = 1e-3):
    """eta = 1 - |psi|^2, phase velocity d_y phi and the lifted phase on the GP grid.

    The phase is the spectral primitive of d_x phi (never arg unwrapping);
    it is returned as ``(periodic part, slope)`` with phase = part + slope x.
    """
    rho = np.abs(psi) ** 2
    if np.min(rho) < vacuum_floor:
        raise LiftingError(f"min |psi|^2 = {np.min(rho):.3e}: phase cannot be lifted")
    g = setup.gp_grid
    vx = np.imag(np.conj(psi) * derivative(psi, g, 0)) / rho
    slope = float(np.mean(vx))
    part = antiderivative(vx - slope, g)
    x = g.x[0]
    offset = float(np.angle(psi[0] * np.exp(-1j * (part[0] + slope * x[0]))))
    return 1.0 - rho, vx / SQRT2, (part + offset, slope)


def kdv_rescale(times, snapshots, setup: TransonicSetup, vacuum_floor: float = 1e-3) -> SlowVarBundle:
    """Sample a GP trajectory in the two moving frames.

    At physical time t the value at slow point X_j in the + frame is the
    field at y = X_j/eps + sqrt(2) t, i.e. x = x_j + t on the GP grid,
    obtained by a trigonometric shift.
    """
    eps = setup.eps
    g = setup.gp_grid
    x = g.x[0]
    shape = (len(times), g.n)
    out = {k: np.zeros(shape) for k in ("Np", "Nm", "Tp", "Tm", "dTp", "dTm")}
    for m, (t, psi) in enumerate(zip(times, snapshots)):
        eta, vy, (part, slope) = physical_fields(psi, setup, vacuum_floor)
        N = 6.0 / eps**2 * eta
        dTh = 6.0 * SQRT2 / eps**2 * vy
        for sign, tag in ((1.0, "p"), (-1.0, "m")):
            s = sign * t
            out["N" + tag][m] = fourier_shift(N, g, s)
            out["dT" + tag][m] = fourier_shift(dTh, g, s)
            out["T" + tag][m] = 6.0 * SQRT2 / eps * (fourier_shift(part, g, s) + slope * (x + s))
    return SlowVarBundle(eps=eps, taus=setup.tau_of_t(np.asarray(times, dtype=float)),
                         grid=setup.slow_grid, N_plus=out["Np"], N_minus=out["Nm"],
                         Theta_plus=out["Tp"], Theta_minus=out["Tm"],
                         dTheta_plus=out["dTp"], dTheta_minus=out["dTm"])


def inverse_rescale(times, N_plus_fn, dTheta_plus_fn, setup: TransonicSetup):
    """Manufacture GP snapshots whose + frame variables are the given callables
    N(tau, X), dTheta(tau, X) (used to test ``kdv_rescale``).

    The phase is the zero-mean antiderivative of the velocity implied by dTheta.
    """
    eps = setup.eps
    g = setup.gp_grid
    y = setup.y()
    snaps = []
    for t in times:
        tau = float(setup.tau_of_t(t))
        X = eps * (y - SQRT2 * t)
        eta = eps**2 / 6.0 * N_plus_fn(tau, X)
        vy = eps**2 / (6.0 * SQRT2) * dTheta_plus_fn(tau, X)
        phase = antiderivative(vy * SQRT2, g)
        snaps.append(np.sqrt(1.0 - eta) * np.exp(1j * phase))
    return snaps


def run_gp_transonic(psi0: np.ndarray, setup: TransonicSetup, tau_end: float,
                     dt: float | None = None, checkpoints: int = 4) -> tuple:
    """Evolve GP to t = 2 sqrt(2) tau_end / eps^3 keeping ``checkpoints`` equally
    spaced snapshots after the initial one.

    ``dt`` is capped by ``default_dt``: split-step on a unit background is
    unstable once dt k_max^2 / 2 passes pi. It is then shrunk to divide the
    snapshot spacing.
    """
    cap = default_dt(setup.gp_grid, 1.0)
    dt = cap if dt is None else min(dt, cap)
    t_end = float(setup.t_of_tau(tau_end))
    spacing = t_end / checkpoints
    per = max(1, int(np.ceil(spacing / dt)))
    h = spacing / per
    traj = evolve(SchrodingerState(psi0.astype(complex), 0.0, 1.0, setup.gp_grid),
                  t_end, h, gross_pitaevskii(), snapshot_every=spacing)
    return traj.times, traj.snapshots
