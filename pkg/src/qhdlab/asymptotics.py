"""Harnesses for the asymptotic regimes: Euler limit, wave approximation,
dispersion relations and the transonic KdV limit.

Harnesses return raw error samples together with fitted rates; none of them
asserts absolute constants.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .grid import SpectralGrid, fft, l2_norm, make_grid
from .hydro import (BreakdownThresholds, EulerState, QHDExtendedStepper, run_euler,
                    solve_linearized)
from .kdv import (default_length_y, gp_data, kdv_evolve, kdv_rescale, run_gp_transonic,
                  transonic_setup)
from .laws import NonlinearityLaw, gross_pitaevskii
from .madelung import extended_vars_qhd, to_hydro
from .schrodinger import SchrodingerState, StrangStepper, evolve


# ----------------------------------------------------------------- fits


@dataclass
class OrderFit:
    """Least-squares slope of log(error) against log(eps)."""

    eps: list
    errors: list
    slope: float
    intercept: float
    r2: float
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"eps": list(map(float, self.eps)), "errors": list(map(float, self.errors)),
                "slope": self.slope, "intercept": self.intercept, "r2": self.r2, **self.meta}


def _r2(y, pred):
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0


def fit_order(eps, errors, min_span: float = 4.0, **meta) -> OrderFit:
    """Least-squares slope of log(error) against log(eps).

    Needs three or more samples spanning a factor ``min_span`` in eps.
    """
    eps = np.asarray(eps, dtype=float)
    err = np.asarray(errors, dtype=float)
    if len(eps) < 3:
        raise ValueError("an order fit needs at least three samples")
    if np.max(eps) / np.min(eps) < min_span * (1 - 1e-12):
        raise ValueError(f"eps samples must span at least a factor of {min_span:g}")
    if np.any(err <= 0):
        raise ValueError("errors must be positive for a log-log fit")
    le, lr = np.log(eps), np.log(err)
    slope, icpt = np.polyfit(le, lr, 1)
    return OrderFit(eps.tolist(), err.tolist(), float(slope), float(icpt),
                    _r2(lr, slope * le + icpt), dict(meta))


def write_fit(fit: OrderFit, csv_path, json_path=None) -> None:
    """Error table as CSV (eps, error) plus fit metadata in a JSON sidecar."""
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["eps", "error"])
        for e, r in zip(fit.eps, fit.errors):
            w.writerow([repr(float(e)), repr(float(r))])
    if json_path is not None:
        with open(json_path, "w") as fh:
            json.dump(fit.to_json(), fh, indent=2)


@dataclass
class ExpFit:
    """log(error) = a + K tau fitted along checkpoints."""

    taus: list
    errors: list
    rate: float
    r2: float


def fit_exponential(taus, errors) -> ExpFit:
    t = np.asarray(taus, dtype=float)
    lr = np.log(np.asarray(errors, dtype=float))
    K, a = np.polyfit(t, lr, 1)
    return ExpFit(t.tolist(), np.exp(lr).tolist(), float(K), _r2(lr, K * t + a))


# ---------------------------------------------------------- Euler limit


@dataclass
class EulerLimitResult:
    fit: OrderFit
    density_fit: OrderFit
    velocity_fit: OrderFit
    breakdown_time: float | None


def euler_reference(rho0: np.ndarray, grid: SpectralGrid, T: float,
                    law: NonlinearityLaw | None = None, euler_dt: float | None = None,
                    thresholds: BreakdownThresholds | None = None) -> EulerState:
    """Euler solution at time T from (rho0, v = 0); refuses T past breakdown."""
    law = law or gross_pitaevskii()
    thresholds = thresholds or BreakdownThresholds(gradient_ratio=5.0)
    v0 = np.zeros((grid.dim,) + grid.shape)
    if euler_dt is None:
        euler_dt = 0.2 * grid.dx / (2.0 * float(np.sqrt(np.max(rho0)))
                                     * law.sound_speed(float(np.max(rho0))) + 1e-300)
        euler_dt = T / int(np.ceil(T / euler_dt))
    run = run_euler(EulerState.from_density(rho0, v0), T, euler_dt, law, grid,
                    snapshot_every=T / 20, thresholds=thresholds)
    if run.report.triggered:
        raise ValueError(f"T={T} is past the detected Euler breakdown "
                         f"(t={run.report.time}, {run.report.cause})")
    return run.states[-1]


def euler_limit_cell(rho0: np.ndarray, grid: SpectralGrid, eps: float, T: float,
                     reference: EulerState, law: NonlinearityLaw | None = None,
                     dt_factor: float = 0.01) -> tuple:
    """(density error, velocity error) of the NLS run at one eps against ``reference``."""
    law = law or gross_pitaevskii()
    dt = dt_factor * eps
    nsteps = int(np.ceil(T / dt))
    traj = evolve(SchrodingerState(np.sqrt(rho0) + 0j, 0.0, eps, grid), T, T / nsteps, law)
    h = to_hydro(traj.snapshots[-1], grid, eps)
    dv = np.where(h.vacuum_mask, 0.0, h.v - reference.v)
    return l2_norm(h.rho - reference.rho, grid), l2_norm(dv, grid)


def euler_limit_error(rho0: np.ndarray, grid: SpectralGrid, eps_list, T: float,
                      law: NonlinearityLaw | None = None, dt_factor: float = 0.01,
                      euler_dt: float | None = None,
                      thresholds: BreakdownThresholds | None = None) -> EulerLimitResult:
    """NLS from psi0 = sqrt(rho0) (zero phase) against the eps-independent Euler
    solution at time T.

    The error is ||rho_eps - a^2||_L2 + ||v_eps - v||_L2 (v_eps off vacuum).
    Refuses T beyond the Euler breakdown detected with ``thresholds``.
    """
    ref = euler_reference(rho0, grid, T, law, euler_dt, thresholds)
    dens, vel = [], []
    for eps in eps_list:
        d, v = euler_limit_cell(rho0, grid, eps, T, ref, law, dt_factor)
        dens.append(d)
        vel.append(v)
    total = [a + b for a, b in zip(dens, vel)]
    return EulerLimitResult(fit_order(eps_list, total, quantity="density+velocity"),
                            fit_order(eps_list, dens, quantity="density"),
                            fit_order(eps_list, vel, quantity="velocity"), None)


# ----------------------------------------------------- wave approximation


@dataclass
class WaveApproxResult:
    cells: list  # (t, amplitude, eps, error)
    C: float
    r2: float


def qhd_linear_mismatch(b0, v0, eps, times, grid: SpectralGrid, dt: float = 2e-3,
                        comparator_eps: float = 0.0,
                        law: NonlinearityLaw | None = None) -> list:
    """||(v - v_lin, b - b_lin)(t)||_L2 between extended QHD and the linearised
    solution with dispersion parameter ``comparator_eps`` (0: acoustic)."""
    law = law or gross_pitaevskii()
    v0 = np.asarray(v0, dtype=float).reshape((grid.dim,) + grid.shape)
    if not np.any(b0) and not np.any(v0):
        return [0.0 for _ in times]
    st = extended_vars_qhd(1.0 + b0, v0, eps, grid)
    stepper = QHDExtendedStepper(grid, eps, dt, law)
    z, r, t = st.z, st.rho, 0.0
    out = []
    for T in times:
        n = int(round((T - t) / dt))
        for _ in range(n):
            z, r = stepper(z, r)
        t += n * dt
        lin = solve_linearized(b0, v0, T, comparator_eps, grid)
        out.append(float(np.hypot(l2_norm(r - 1.0 - lin.b, grid), l2_norm(z.real - lin.v, grid))))
    return out


def wave_approx_error(profile: np.ndarray, amplitudes, eps_list, times, grid: SpectralGrid,
                      dt: float = 2e-3) -> WaveApproxResult:
    """Fit err ~ C (t A^2 + eps^2 t A) over the (t, A, eps) grid.

    Data are b0 = A * profile, v0 = 0. C is fitted in log space (a single
    multiplicative constant) and R^2 is reported for log(error).
    """
    cells = []
    for A in amplitudes:
        for eps in eps_list:
            errs = qhd_linear_mismatch(A * profile, np.zeros(grid.shape), eps, times, grid, dt)
            cells += [(t, A, eps, e) for t, e in zip(times, errs)]
    arr = np.array(cells)
    shape = arr[:, 0] * arr[:, 1] ** 2 + arr[:, 2] ** 2 * arr[:, 0] * arr[:, 1]
    le = np.log(arr[:, 3])
    logC = float(np.mean(le - np.log(shape)))
    return WaveApproxResult(cells, float(np.exp(logC)), _r2(le, logC + np.log(shape)))


# ------------------------------------------------------------ dispersion


@dataclass
class DispersionRow:
    k: float
    eps: float
    omega: float
    expected: float

    @property
    def rel_error(self) -> float:
        return abs(self.omega - self.expected) / self.expected

    @property
    def phase_speed(self) -> float:
        return self.omega / self.k


def measure_frequency(times, probe) -> float:
    """Angular frequency from zero crossings (linear interpolation) of a
    sinusoidal probe."""
    t = np.asarray(times)
    p = np.asarray(probe)
    idx = np.nonzero(np.signbit(p[:-1]) != np.signbit(p[1:]))[0]
    if len(idx) < 2:
        raise ValueError("probe has fewer than two zero crossings")
    tc = t[idx] - p[idx] * (t[idx + 1] - t[idx]) / (p[idx + 1] - p[idx])
    return float(np.pi * (len(tc) - 1) / (tc[-1] - tc[0]))


def sec3_frequency(k: float, eps: float) -> float:
    return float(k * np.sqrt(1.0 + 0.25 * eps**2 * k**2))


def sec4_frequency(k: float) -> float:
    return float(np.sqrt(2.0 * k**2 + k**4))


def dispersion_check(eps: float, k_list, normalization: str = "sec3", delta: float = 1e-6,
                     periods: float = 3.0, steps_per_period: int = 400) -> list:
    """Excite single modes in the nonlinear solver and measure their frequency.

    ``sec3``: extended QHD about (rho, v) = (1, 0) with parameter ``eps`` on a
    2 pi torus, expected omega^2 = k^2 (1 + eps^2 k^2 / 4).
    ``sec4``: GP i psi_t + psi_yy + (1 - |psi|^2) psi = 0 (``eps`` ignored),
    expected omega^2 = 2 k^2 + k^4 in the y wavenumber k.
    """
    if delta > 1e-5:
        raise ValueError("amplitude must be <= 1e-5 to stay in the linear regime")
    rows = []
    law = gross_pitaevskii()
    for k in k_list:
        if normalization == "sec3":
            expected = sec3_frequency(k, eps)
            grid = make_grid(1, 32, 2.0 * np.pi)
            m = int(round(k))
            x = grid.x[0]
            b0 = delta * np.cos(k * x)
            st = extended_vars_qhd(1.0 + b0, np.zeros((1,) + grid.shape), eps, grid)
            T = periods * 2.0 * np.pi / expected
            nsteps = int(periods * steps_per_period)
            dt = T / nsteps
            stepper = QHDExtendedStepper(grid, eps, dt, law)
            z, r = st.z, st.rho
            probe, times = [], []
            for j in range(nsteps + 1):
                if j:
                    z, r = stepper(z, r)
                times.append(j * dt)
                probe.append(float(fft(r, grid)[m].real))
        elif normalization == "sec4":
            expected = sec4_frequency(k)
            length_y = 2.0 * np.pi / k
            grid = make_grid(1, 32, length_y / np.sqrt(2.0))
            y = grid.x[0] * np.sqrt(2.0)
            psi = 1.0 + delta * np.cos(k * y) + 0j
            T = periods * 2.0 * np.pi / expected
            nsteps = int(periods * steps_per_period)
            dt = T / nsteps
            stepper = StrangStepper(grid, 1.0, dt, law)
            probe, times = [], []
            for j in range(nsteps + 1):
                if j:
                    psi = stepper(psi)
                times.append(j * dt)
                probe.append(float(fft(np.abs(psi) ** 2, grid)[1].real))
        else:
            raise ValueError(f"unknown normalization {normalization!r}")
        rows.append(DispersionRow(float(k), float(eps), measure_frequency(times, probe), expected))
    return rows


# ----------------------------------------------------------------- KdV


def sech2_family(width: float = 2.0, amplitude: float = 1.0):
    """N0 = A sech^2(X / width), Theta0 = 0: splits into two counter-propagating pulses."""
    return (lambda X: amplitude / np.cosh(X / width) ** 2, lambda X: 0.0 * X)


def right_moving_family(width: float = 2.0, amplitude: float = 1.0):
    """Theta0 = A sech^2(X/width), N0 = -d Theta0: U^- vanishes at tau = 0 and N0 has
    zero mean, so the phase stays periodic on the torus."""
    def theta(X):
        return amplitude / np.cosh(X / width) ** 2

    def n0(X):
        s = X / width
        return 2.0 * amplitude / width * np.tanh(s) / np.cosh(s) ** 2

    return n0, theta


@dataclass
class TransonicCell:
    eps: float
    taus: list
    err_plus: list
    err_minus: list
    norm_minus: list
    length_y: float
    n: int

    @property
    def total(self) -> list:
        return [a + b for a, b in zip(self.err_plus, self.err_minus)]


def transonic_cell(eps: float, family, tau_end: float = 0.5, n: int = 2048,
                   checkpoints: int = 4, gp_dt: float = 0.02, kdv_dtau: float = 1e-3,
                   margin: float = 80.0) -> TransonicCell:
    """One eps: GP run, slow-variable rescaling, KdV comparison at every checkpoint."""
    N0, Theta0 = family
    setup = transonic_setup(eps, n, default_length_y(eps, tau_end, margin))
    psi0 = gp_data(setup, N0, Theta0)
    times, snaps = run_gp_transonic(psi0, setup, tau_end, gp_dt, checkpoints)
    bundle = kdv_rescale(times, snaps, setup)
    g = setup.slow_grid
    errs = {}
    for which, direction in (("plus", "right"), ("minus", "left")):
        U = bundle.U_plus if which == "plus" else bundle.U_minus
        tr = kdv_evolve(U[0], g, tau_end, kdv_dtau, direction, snapshot_every=tau_end / checkpoints)
        errs[which] = [l2_norm(U[m] - tr.snapshots[m], g) for m in range(1, len(tr.taus))]
    return TransonicCell(eps, list(bundle.taus[1:]), errs["plus"], errs["minus"],
                         [l2_norm(u, g) for u in bundle.U_minus[1:]], setup.length_y, n)


def transonic_kdv_error(eps_list, family=None, tau_end: float = 0.5, **kw) -> tuple:
    """Order fit of ||U^+ - U_kdv^+|| + ||U^- - U_kdv^-|| at ``tau_end`` in eps."""
    family = family or sech2_family()
    cells = []
    for eps in eps_list:
        cells.append(transonic_cell(eps, family, tau_end, **kw))
    # the feasible window eps in [0.1, 0.3] only spans a factor of 3
    fit = fit_order([c.eps for c in cells], [c.total[-1] for c in cells], min_span=3.0,
                    tau=tau_end)
    return fit, cells


def result_dict(obj) -> dict:
    return asdict(obj)
