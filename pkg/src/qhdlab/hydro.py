"""Pseudo-spectral integrators for the hydrodynamic family.

* compressible Euler in symmetric form (v, a = sqrt(rho)),
* extended QHD for (rho, z = v + i w) with the i(eps/2) Lap z term handled
  by an exact Fourier integrating factor,
* extended Korteweg system with a general capillarity law (plain RK4),
* the exactly solvable linearisation about (rho, v) = (1, 0).

Nonlinear right-hand sides are dealiased with the 2/3 rule. There is no
artificial viscosity; the optional exponential filter on ``euler_step`` is
meant only for exploring behaviour past steepening.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NonFiniteError, VacuumError
from .grid import SpectralGrid, dealias, divergence, fft, gradient, ifft
from .laws import CapillarityLaw, NonlinearityLaw
from .madelung import ExtendedState


def _rk4(rhs, y, dt):
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * dt * k1)
    k3 = rhs(y + 0.5 * dt * k2)
    k4 = rhs(y + dt * k3)
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# ---------------------------------------------------------------- Euler


@dataclass
class EulerState:
    """Symmetric Euler variables: velocity ``v`` (shape (d, ...)) and a = sqrt(rho)."""

    v: np.ndarray
    a: np.ndarray
    t: float = 0.0

    @property
    def rho(self) -> np.ndarray:
        return self.a**2

    @classmethod
    def from_density(cls, rho, v, t=0.0):
        return cls(v=np.asarray(v, dtype=float), a=np.sqrt(rho), t=t)


def exponential_filter(grid: SpectralGrid, alpha: float = 36.0, order: int = 36) -> np.ndarray:
    kmax = grid.n / 2
    sig = 1.0
    for mk in np.meshgrid(*([np.abs(grid.modes)] * grid.dim), indexing="ij"):
        sig = sig * np.exp(-alpha * (mk / kmax) ** order)
    return sig


def euler_rhs(y: np.ndarray, law: NonlinearityLaw, grid: SpectralGrid) -> np.ndarray:
    d = grid.dim
    v, a = y[:d], y[d]
    ga = gradient(a, grid)
    adv_v = np.stack([sum(v[j] * gradient(v[k], grid)[j] for j in range(d)) for k in range(d)])
    if law.is_affine:
        force = 2.0 * a * ga
    else:
        force = gradient(law.f(a * a), grid)
    dv = -(adv_v + force)
    da = -(np.sum(v * ga, axis=0) + 0.5 * a * divergence(v, grid))
    out = np.concatenate([dv, da[None]])
    return dealias(out, grid)


def euler_step(state: EulerState, dt: float, law: NonlinearityLaw, grid: SpectralGrid,
               spectral_filter: np.ndarray | None = None) -> EulerState:
    """One RK4 step of the dealiased Euler semi-discretisation."""
    y = np.concatenate([state.v, state.a[None]])
    y = _rk4(lambda u: euler_rhs(u, law, grid), y, dt)
    if spectral_filter is not None:
        y = ifft(fft(y, grid) * spectral_filter, grid).real
    t = state.t + dt
    if not np.all(np.isfinite(y)):
        raise NonFiniteError("non-finite Euler state", t)
    d = grid.dim
    return EulerState(v=y[:d], a=y[d], t=t)


def euler_max_dt(state: EulerState, law: NonlinearityLaw, grid: SpectralGrid) -> float:
    """Advective CFL bound 0.5 dx / (|v|_inf + 2 |a|_inf max sqrt(f'))."""
    rho = state.a**2
    cs = float(np.max(np.sqrt(np.maximum(law.df(np.maximum(rho, 1e-300)), 0.0))))
    speed = float(np.max(np.abs(state.v))) + 2.0 * float(np.max(np.abs(state.a))) * cs
    return 0.5 * grid.dx / max(speed, 1e-300)


def euler_energy(state: EulerState, law: NonlinearityLaw, grid: SpectralGrid,
                 background: float | None = None) -> float:
    from .grid import integrate

    rho = state.a**2
    return float(integrate(0.5 * rho * np.sum(state.v**2, axis=0)
                           + law.relative_F(rho, background), grid))


# --------------------------------------------------------- extended QHD


class QHDExtendedStepper:
    """Lawson (integrating factor) RK4 for

        z_t + (1/2) grad(z.z) + grad f(rho) = i (eps/2) Lap z,
        rho_t + div(rho Re z) = 0.
    """

    def __init__(self, grid: SpectralGrid, eps: float, dt: float, law: NonlinearityLaw,
                 floor: float = 0.0):
        self.grid, self.eps, self.dt, self.law, self.floor = grid, eps, dt, law, floor
        self._half = np.exp(-0.25j * eps * dt * grid.k2)
        self._full = self._half**2

    def _E(self, factor, z):
        return ifft(factor * fft(z, self.grid), self.grid)

    def rhs(self, z, rho):
        g = self.grid
        zz = np.sum(z * z, axis=0)
        nz = -0.5 * gradient(zz, g) - gradient(self.law.f(rho), g)
        nr = -divergence(rho * z.real, g)
        return dealias(nz, g), dealias(nr, g)

    def __call__(self, z, rho):
        h = self.dt
        E2, E = self._half, self._full
        k1z, k1r = self.rhs(z, rho)
        zE2 = self._E(E2, z)
        k2z, k2r = self.rhs(self._E(E2, z + 0.5 * h * k1z), rho + 0.5 * h * k1r)
        k3z, k3r = self.rhs(zE2 + 0.5 * h * k2z, rho + 0.5 * h * k2r)
        k4z, k4r = self.rhs(self._E(E, z) + h * self._E(E2, k3z), rho + h * k3r)
        znew = self._E(E, z + h / 6.0 * k1z) + h / 6.0 * (self._E(E2, 2.0 * (k2z + k3z)) + k4z)
        rnew = rho + h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        return znew, rnew.real


def _finish(state: ExtendedState, z, rho, dt, floor):
    t = state.t + dt
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(rho))):
        raise NonFiniteError("non-finite extended state", t)
    rmin = float(np.min(rho))
    if rmin < floor:
        raise VacuumError(rmin, floor, t)
    return replace(state, z=z, rho=rho, t=t)


def qhd_extended_step(state: ExtendedState, dt: float, law: NonlinearityLaw,
                      grid: SpectralGrid, floor: float = 0.0) -> ExtendedState:
    stepper = QHDExtendedStepper(grid, state.eps, dt, law, floor)
    z, rho = stepper(state.z, state.rho)
    return _finish(state, z, rho, dt, floor)


# ----------------------------------------------------- extended Korteweg


def korteweg_rhs(z, rho, law: NonlinearityLaw, cap: CapillarityLaw, grid: SpectralGrid):
    """Right-hand side of z_t + v.grad z + i (grad z).w + grad f = i grad(a(rho) div z)."""
    d = grid.dim
    v, w = z.real, z.imag
    dz = np.stack([gradient(z[k], grid) for k in range(d)])  # dz[k, j] = d_j z_k
    conv = np.stack([
        sum(v[j] * dz[k, j] + 1j * w[j] * dz[j, k] for j in range(d)) for k in range(d)
    ])
    divz = sum(dz[j, j] for j in range(d))
    disp = 1j * gradient(cap.a(rho) * divz, grid)
    nz = -conv - gradient(law.f(rho), grid) + disp
    nr = -divergence(rho * v, grid)
    return dealias(nz, grid), dealias(nr, grid)


def korteweg_extended_step(state: ExtendedState, dt: float, law: NonlinearityLaw,
                           cap: CapillarityLaw, grid: SpectralGrid,
                           floor: float = 0.0) -> ExtendedState:
    """One RK4 step of the extended Korteweg system."""
    d = grid.dim

    def rhs(y):
        nz, nr = korteweg_rhs(y[:d], y[d].real, law, cap, grid)
        return np.concatenate([nz, nr[None].astype(complex)])

    y = np.concatenate([state.z, state.rho[None].astype(complex)])
    y = _rk4(rhs, y, dt)
    return _finish(state, y[:d], y[d].real.copy(), dt, floor)


def korteweg_max_dt(state: ExtendedState, cap: CapillarityLaw, grid: SpectralGrid) -> float:
    """Dispersive limit dx^2 / (pi max a(rho))."""
    amax = float(np.max(cap.a(state.rho)))
    return grid.dx**2 / (np.pi * max(amax, 1e-300))


def extended_max_dt(state: ExtendedState, law: NonlinearityLaw, grid: SpectralGrid) -> float:
    """Advective CFL of the extended systems, same form as for Euler."""
    es = EulerState(v=state.z.real, a=np.sqrt(np.maximum(state.rho, 0.0)))
    return euler_max_dt(es, law, grid)


# ------------------------------------------------------ linearised waves


@dataclass
class LinearWaveState:
    b: np.ndarray
    v: np.ndarray
    t: float
    eps: float


def linear_frequency(k, eps: float):
    """omega(k) = |k| sqrt(1 + eps^2 |k|^2 / 4)."""
    k = np.abs(k)
    return k * np.sqrt(1.0 + 0.25 * eps**2 * k**2)


def solve_linearized(b0: np.ndarray, v0: np.ndarray, t: float, eps: float,
                     grid: SpectralGrid) -> LinearWaveState:
    """Exact solution of

        v_t + grad b = (eps^2/4) grad Lap b,   b_t + div v = 0

    mode by mode. The transverse part of v is stationary.
    """
    d = grid.dim
    v0 = np.asarray(v0, dtype=float).reshape((d,) + grid.shape)
    bh = fft(b0, grid)
    vh = np.stack([fft(v0[j], grid) for j in range(d)])
    kabs = np.sqrt(grid.k2)
    nz = kabs > 0
    khat = [np.where(nz, kj / np.where(nz, kabs, 1.0), 0.0) for kj in grid.k]
    q = sum(kh * vh[j] for j, kh in enumerate(khat))
    mu = 1.0 + 0.25 * eps**2 * grid.k2
    om = kabs * np.sqrt(mu)
    c = np.cos(om * t)
    s_over = np.where(nz, np.sin(om * t) / np.where(nz, om, 1.0), t)
    b_new = bh * c - 1j * kabs * q * s_over
    q_new = q * c - 1j * kabs * mu * bh * s_over
    v_new = np.stack([vh[j] + khat[j] * (q_new - q) for j in range(d)])
    b = ifft(b_new, grid).real
    v = np.stack([ifft(v_new[j], grid).real for j in range(d)])
    return LinearWaveState(b=b, v=v, t=t, eps=eps)


# ------------------------------------------------------------ breakdown


@dataclass
class BreakdownThresholds:
    """Monitors for blow-up detection; ``None`` disables a monitor.

    ``gradient_ratio`` compares max(|grad v|, |grad a|) with its initial value.
    """

    max_gradient: float | None = None
    gradient_ratio: float | None = None
    min_density: float | None = None


@dataclass
class BreakdownReport:
    triggered: bool
    time: float | None = None
    cause: str | None = None
    peak: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"triggered": self.triggered, "time": self.time, "cause": self.cause,
                "peak": self.peak}


def _monitor_fields(state):
    if isinstance(state, EulerState):
        return state.v, state.a
    if isinstance(state, ExtendedState):
        return state.z.real, np.sqrt(np.maximum(state.rho, 0.0))
    v, a = state
    return v, a


def w1inf(v, a, grid) -> float:
    gv = max(float(np.max(np.abs(gradient(vj, grid)))) for vj in v)
    ga = float(np.max(np.abs(gradient(a, grid))))
    return max(gv, ga)


def detect_breakdown(times, states, grid: SpectralGrid,
                     thresholds: BreakdownThresholds) -> BreakdownReport:
    """First time a monitor crosses its threshold."""
    g0 = None
    peak_grad, min_rho = 0.0, np.inf
    for t, s in zip(times, states):
        v, a = _monitor_fields(s)
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(a))):
            return BreakdownReport(True, t, "nonfinite",
                                   {"max_gradient": peak_grad, "min_density": min_rho})
        g = w1inf(v, a, grid)
        g0 = g if g0 is None else g0
        peak_grad = max(peak_grad, g)
        rmin = float(np.min(a**2))
        min_rho = min(min_rho, rmin)
        peak = {"max_gradient": peak_grad, "min_density": min_rho, "initial_gradient": g0}
        if thresholds.max_gradient is not None and g > thresholds.max_gradient:
            return BreakdownReport(True, t, "gradient_blowup", peak)
        if thresholds.gradient_ratio is not None and g > thresholds.gradient_ratio * g0:
            return BreakdownReport(True, t, "gradient_blowup", peak)
        if thresholds.min_density is not None and rmin < thresholds.min_density:
            return BreakdownReport(True, t, "vacuum_approach", peak)
    return BreakdownReport(False, None, None,
                           {"max_gradient": peak_grad, "min_density": min_rho, "initial_gradient": g0})


def spectral_tail(f: np.ndarray, grid: SpectralGrid) -> float:
    """sqrt of the energy fraction in modes n/6 < |m| <= n/3 (resolution monitor)."""
    fh = np.abs(fft(f, grid)) ** 2
    am = np.abs(grid.modes)
    mm = np.meshgrid(*([am] * grid.dim), indexing="ij")
    top = np.maximum.reduce(mm) if grid.dim > 1 else mm[0]
    band = (top > grid.n / 6) & (top <= grid.n / 3)
    total = float(np.sum(fh))
    return float(np.sqrt(np.sum(fh[band]) / total)) if total > 0 else 0.0


@dataclass
class HydroRun:
    times: list
    states: list
    report: BreakdownReport
    diagnostics: dict = field(default_factory=dict)


def run_euler(state: EulerState, T: float, dt: float, law: NonlinearityLaw, grid: SpectralGrid,
              snapshot_every: float | None = None,
              thresholds: BreakdownThresholds | None = None,
              spectral_filter: np.ndarray | None = None,
              stop_on_breakdown: bool = True) -> HydroRun:
    """Integrate Euler to ``T`` keeping snapshots; stop at the first breakdown trigger."""
    nsteps = int(round(T / dt))
    every = max(1, int(round(snapshot_every / dt))) if snapshot_every else nsteps
    thresholds = thresholds or BreakdownThresholds()
    times, states = [state.t], [state]
    g0 = w1inf(state.v, state.a, grid)
    report = BreakdownReport(False)
    s = state
    for j in range(1, nsteps + 1):
        try:
            s = euler_step(s, dt, law, grid, spectral_filter)
        except NonFiniteError as exc:
            report = BreakdownReport(True, exc.t, "nonfinite", {})
            break
        if j % every == 0 or j == nsteps:
            times.append(s.t)
            states.append(s)
            r = detect_breakdown([state.t, s.t], [state, s], grid, thresholds)
            if r.triggered:
                r.peak["initial_gradient"] = g0
                report = r
                if stop_on_breakdown:
                    break
    return HydroRun(times, states, report)
