"""Strang split-step integrator for the semiclassical NLS

    i eps psi_t + (eps^2/2) Lap psi = f(|psi|^2) psi.

Both subflows are exact: the nonlinear one is a pointwise phase rotation
(|psi| is invariant under it) and the linear one is diagonal in Fourier
space. Each substep is therefore an isometry of the discrete L2 norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np

from .errors import NonFiniteError
from .grid import SpectralGrid, fft, ifft, integrate, laplacian
from .laws import NonlinearityLaw


@dataclass
class SchrodingerState:
    psi: np.ndarray
    t: float
    eps: float
    grid: SpectralGrid

    def copy(self) -> "SchrodingerState":
        return replace(self, psi=self.psi.copy())


class StrangStepper:
    """Precomputed Strang step for fixed (grid, eps, dt, law)."""

    def __init__(self, grid: SpectralGrid, eps: float, dt: float, law: NonlinearityLaw):
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt}")
        if not eps > 0:
            raise ValueError(f"eps must be positive, got {eps}")
        self.grid, self.eps, self.dt, self.law = grid, eps, dt, law
        self._linear = np.exp(-0.5j * eps * dt * grid.k2)
        self._half = 0.5 * dt / eps

    def kick(self, psi: np.ndarray) -> np.ndarray:
        return psi * np.exp(-1j * self._half * self.law.f(np.abs(psi) ** 2))

    def __call__(self, psi: np.ndarray) -> np.ndarray:
        psi = self.kick(psi)
        psi = ifft(self._linear * fft(psi, self.grid), self.grid)
        return self.kick(psi)


def step_strang(state: SchrodingerState, dt: float, law: NonlinearityLaw) -> SchrodingerState:
    """One Strang step: half nonlinear kick, full linear flow, half kick."""
    stepper = StrangStepper(state.grid, state.eps, dt, law)
    psi = stepper(state.psi)
    t = state.t + dt
    if not np.all(np.isfinite(psi)):
        raise NonFiniteError("non-finite wave function", t)
    return replace(state, psi=psi, t=t)


def default_dt(grid: SpectralGrid, eps: float) -> float:
    """Step resolving both the top Fourier mode's phase and the 1/eps phase scale."""
    return min(grid.dx**2 / (np.pi * eps), 0.1 * eps)


@dataclass
class Trajectory:
    """Snapshots and observer outputs of a run."""

    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    observations: dict = field(default_factory=dict)
    grid: SpectralGrid | None = None
    eps: float | None = None

    def __len__(self):
        return len(self.times)

    def states(self):
        for t, psi in zip(self.times, self.snapshots):
            yield SchrodingerState(psi, t, self.eps, self.grid)


def _cadence_steps(cadence: float | None, dt: float, name: str) -> int | None:
    if cadence is None:
        return None
    ratio = cadence / dt
    steps = int(round(ratio))
    if steps < 1 or abs(ratio - steps) > 1e-9 * max(1.0, ratio):
        raise ValueError(f"{name} cadence {cadence} is not a multiple of dt={dt}")
    return steps


def evolve(
    state: SchrodingerState,
    T: float,
    dt: float,
    law: NonlinearityLaw,
    observers: Mapping[str, Callable[[SchrodingerState], object]] | None = None,
    observe_every: float | None = None,
    snapshot_every: float | None = None,
) -> Trajectory:
    """Integrate to time ``state.t + T`` with repeated Strang steps.

    Observers are called on the initial state and then every
    ``observe_every`` (default: every snapshot). Snapshots are kept every
    ``snapshot_every`` (default: only initial and final).
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    observers = dict(observers or {})
    nsteps = int(round(T / dt)) if T > 0 else 0
    if T > 0 and abs(nsteps * dt - T) > 1e-9 * T:
        raise ValueError(f"T={T} is not a multiple of dt={dt}")
    snap_k = _cadence_steps(snapshot_every, dt, "snapshot")
    obs_k = _cadence_steps(observe_every, dt, "observation") if observe_every else snap_k

    traj = Trajectory(grid=state.grid, eps=state.eps)
    traj.observations = {name: [] for name in observers}
    traj.observations["t"] = []

    def observe(s):
        traj.observations["t"].append(s.t)
        for name, fn in observers.items():
            traj.observations[name].append(fn(s))

    traj.times.append(state.t)
    traj.snapshots.append(state.psi.copy())
    observe(state)
    if nsteps == 0:
        return traj

    stepper = StrangStepper(state.grid, state.eps, dt, law)
    psi = state.psi.copy()
    t0 = state.t
    for j in range(1, nsteps + 1):
        psi = stepper(psi)
        t = t0 + j * dt
        last = j == nsteps
        keep = (snap_k is not None and j % snap_k == 0) or last
        look = (obs_k is not None and j % obs_k == 0) or (obs_k is None and last)
        if keep or look:
            if not np.all(np.isfinite(psi)):
                raise NonFiniteError("non-finite wave function", t)
            s = SchrodingerState(psi, t, state.eps, state.grid)
            if keep:
                traj.times.append(t)
                traj.snapshots.append(psi.copy())
            if look:
                observe(s)
    return traj


def pde_residual(psi0: np.ndarray, psi1: np.ndarray, dt: float, eps: float,
                 law: NonlinearityLaw, grid: SpectralGrid) -> float:
    """L2 norm of the midpoint-rule residual of the NLS between two snapshots."""
    mid = 0.5 * (psi0 + psi1)
    r = (1j * eps * (psi1 - psi0) / dt + 0.5 * eps**2 * laplacian(mid, grid)
         - law.f(np.abs(mid) ** 2) * mid)
    return float(np.sqrt(integrate(np.abs(r) ** 2, grid)))


def mass(psi: np.ndarray, grid: SpectralGrid) -> float:
    return float(integrate(np.abs(psi) ** 2, grid))


def mirrored_dark_soliton(grid: SpectralGrid) -> np.ndarray:
    """Black soliton pair -tanh(x + L/4) tanh(x - L/4): periodic and stationary
    for Gross-Pitaevskii at eps = 1 up to an O(exp(-L/2)) interaction."""
    x = grid.x[0]
    q = grid.length / 4
    return -np.tanh(x + q) * np.tanh(x - q) + 0j


def to_unit_gp_length(length_gp: float) -> float:
    """Period in the eps = 1 frame of a domain of period ``length_gp`` for
    i psi_t + psi_yy + (1 - |psi|^2) psi = 0 (y = sqrt(2) x)."""
    return length_gp / np.sqrt(2.0)
