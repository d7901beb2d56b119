"""Execute one scalar :class:`RunConfig` and write its artifacts.

Layout of a run directory::

    config.ini          echo of the scalar config
    diagnostics.csv     functionals at every observation (solver kinds)
    snapshots/          <field>_<index>.bin + .json pairs
    result.json         harness outputs or final summary
    breakdown.json      only when a breakdown monitor fired
    manifest.json       config echo, status, versions, wall time
"""

from __future__ import annotations

import csv
import time
from pathlib import Path

import numpy as np

from . import data as families
from .asymptotics import (dispersion_check, euler_limit_cell, euler_reference,
                          qhd_linear_mismatch, transonic_cell)
from .config import ConfigError, RunConfig, write_config
from .conserved import diagnostics_hydro, diagnostics_korteweg, diagnostics_wave, write_csv
from .errors import NonFiniteError, VacuumError
from .hydro import (BreakdownReport, BreakdownThresholds, EulerState, QHDExtendedStepper,
                    euler_max_dt, extended_max_dt, korteweg_extended_step, korteweg_max_dt,
                    run_euler, solve_linearized)
from .io import write_json, write_manifest, write_snapshot
from .kdv import kdv_evolve
from .madelung import extended_vars_korteweg, extended_vars_qhd
from .schrodinger import SchrodingerState, default_dt, evolve


class BreakdownDetected(RuntimeError):
    """A solver left its validity regime (exit status 3)."""

    def __init__(self, report: BreakdownReport):
        super().__init__(f"breakdown at t={report.time}: {report.cause}")
        self.report = report


class CheckFailed(AssertionError):
    """A harness assertion failed (exit status 4)."""

    def __init__(self, message: str, result: dict):
        super().__init__(message)
        self.result = result


def _steps(cfg: RunConfig, dt: float) -> tuple:
    n = int(round(cfg.T / dt))
    if n < 1 or abs(n * dt - cfg.T) > 1e-9 * cfg.T:
        raise ConfigError(f"T={cfg.T} is not a multiple of dt={dt}")

    def every(c):
        if c is None:
            return None
        k = int(round(c / dt))
        if k < 1 or abs(k * dt - c) > 1e-9 * c:
            raise ConfigError(f"cadence {c} is not a multiple of dt={dt}")
        return k

    return n, every(cfg.observe_every), every(cfg.snapshot_every)


def _thresholds(cfg: RunConfig) -> BreakdownThresholds:
    tol = cfg.tolerances
    return BreakdownThresholds(max_gradient=tol.get("max_gradient"),
                               gradient_ratio=tol.get("gradient_ratio"),
                               min_density=tol.get("min_density"))


def _data_params(cfg: RunConfig) -> dict:
    return {"eps": cfg.eps, **cfg.data_params}


class _Snapshots:
    def __init__(self, out: Path, grid, enabled: bool):
        self.dir = out / "snapshots"
        self.grid = grid
        self.count = 0
        if enabled:
            self.dir.mkdir(parents=True, exist_ok=True)
        self.enabled = enabled

    def __call__(self, t, **fields):
        if not self.enabled:
            return
        for name, arr in fields.items():
            write_snapshot(self.dir / f"{name}_{self.count:04d}", arr, self.grid, t, field=name)
        self.count += 1


# ------------------------------------------------------------ solver kinds


def _run_nls(cfg, out, override):
    grid, law = cfg.grid(), cfg.law()
    cfg.check_cfl(default_dt(grid, cfg.eps), "split-step resonance", override)
    dt = cfg.dt or default_dt(grid, cfg.eps)
    try:
        psi0 = families.make_wave(cfg.family, grid, **_data_params(cfg))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"[data] {exc}") from exc
    bg = cfg.tolerances.get("background")
    snaps = _Snapshots(out, grid, cfg.snapshot_every is not None)
    try:
        tr = evolve(SchrodingerState(psi0, 0.0, cfg.eps, grid), cfg.T, dt, law,
                    observers={"d": lambda s: diagnostics_wave(s.psi, s.t, cfg.eps, law, grid,
                                                               background=bg,
                                                               check_support=False)},
                    observe_every=cfg.observe_every or cfg.T, snapshot_every=cfg.snapshot_every)
    except NonFiniteError as exc:
        raise BreakdownDetected(BreakdownReport(True, exc.t, "nonfinite")) from exc
    for t, psi in zip(tr.times, tr.snapshots):
        snaps(t, psi=psi)
    recs = tr.observations["d"]
    write_csv(recs, out / "diagnostics.csv")
    return {"records": len(recs), "final_time": tr.times[-1]}


def _run_euler(cfg, out, override):
    grid, law = cfg.grid(), cfg.law()
    try:
        rho, v = families.make_hydro(cfg.family, grid, **_data_params(cfg))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"[data] {exc}") from exc
    state = EulerState.from_density(rho, v)
    limit = euler_max_dt(state, law, grid)
    cfg.check_cfl(limit, "advective CFL", override)
    dt = cfg.dt or cfg.T / int(np.ceil(cfg.T / limit))
    n, obs, snap = _steps(cfg, dt)
    cadence = (obs or snap or n) * dt
    run = run_euler(state, cfg.T, dt, law, grid, snapshot_every=cadence,
                    thresholds=_thresholds(cfg))
    bg = cfg.tolerances.get("background")
    recs = [diagnostics_hydro(s.rho, s.v, s.t, 0.0, law, grid, bg, check_support=False)
            for s in run.states]
    write_csv(recs, out / "diagnostics.csv")
    snaps = _Snapshots(out, grid, snap is not None)
    for s in run.states:
        snaps(s.t, rho=s.rho, v=s.v)
    if run.report.triggered:
        raise BreakdownDetected(run.report)
    return {"records": len(recs), "final_time": run.times[-1], "breakdown": run.report.to_dict()}


def _run_extended(cfg, out, override):
    grid, law = cfg.grid(), cfg.law()
    try:
        rho, v = families.make_hydro(cfg.family, grid, **_data_params(cfg))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"[data] {exc}") from exc
    floor = cfg.tolerances.get("min_density", 1e-8)
    bg = cfg.tolerances.get("background")
    try:
        if cfg.kind == "qhd":
            st = extended_vars_qhd(rho, v, cfg.eps, grid, floor=floor)
            limit = extended_max_dt(st, law, grid)
        else:
            cap = cfg.capillarity_law()
            st = extended_vars_korteweg(rho, v, cap, grid, floor=floor)
            limit = min(extended_max_dt(st, law, grid), korteweg_max_dt(st, cap, grid))
    except VacuumError as exc:
        raise ConfigError(f"[data] {exc}") from exc
    cfg.check_cfl(limit, "extended-system CFL", override)
    dt = cfg.dt or cfg.T / int(np.ceil(cfg.T / limit))
    n, obs, snap = _steps(cfg, dt)
    obs = obs or n

    def diag(s):
        if cfg.kind == "qhd":
            return diagnostics_hydro(s.rho, s.z.real, s.t, cfg.eps, law, grid, bg,
                                     check_support=False)
        return diagnostics_korteweg(s.rho, s.z.real, s.t, cap, law, grid, bg)

    snaps = _Snapshots(out, grid, snap is not None)
    recs = [diag(st)]
    snaps(st.t, rho=st.rho, z=st.z)
    stepper = QHDExtendedStepper(grid, cfg.eps, dt, law, floor) if cfg.kind == "qhd" else None
    s = st
    try:
        for j in range(1, n + 1):
            if stepper is not None:
                z, r = stepper(s.z, s.rho)
                s = type(s)(rho=r, z=z, t=j * dt, eps=s.eps, capillarity=s.capillarity)
                if not (np.all(np.isfinite(z)) and np.all(np.isfinite(r))):
                    raise NonFiniteError("non-finite extended state", s.t)
                if float(np.min(r)) < floor:
                    raise VacuumError(float(np.min(r)), floor, s.t)
            else:
                s = korteweg_extended_step(s, dt, law, cap, grid, floor)
            if j % obs == 0 or j == n:
                recs.append(diag(s))
            if snap and (j % snap == 0 or j == n):
                snaps(s.t, rho=s.rho, z=s.z)
    except NonFiniteError as exc:
        write_csv(recs, out / "diagnostics.csv")
        raise BreakdownDetected(BreakdownReport(True, exc.t, "nonfinite")) from exc
    except VacuumError as exc:
        write_csv(recs, out / "diagnostics.csv")
        raise BreakdownDetected(BreakdownReport(True, exc.t, "vacuum_approach",
                                                {"min_density": exc.min_density})) from exc
    write_csv(recs, out / "diagnostics.csv")
    return {"records": len(recs), "final_time": s.t}


def _run_linear(cfg, out, override):
    grid, law = cfg.grid(), cfg.law()
    try:
        rho, v = families.make_hydro(cfg.family, grid, **_data_params(cfg))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"[data] {exc}") from exc
    cadence = cfg.observe_every or cfg.T
    times = np.arange(0.0, cfg.T + 0.5 * cadence, cadence)
    snaps = _Snapshots(out, grid, cfg.snapshot_every is not None)
    recs = []
    for t in times:
        lin = solve_linearized(rho - 1.0, v, float(t), cfg.eps, grid)
        recs.append(diagnostics_hydro(1.0 + lin.b, lin.v, float(t), cfg.eps, law, grid, 1.0,
                                      check_support=False))
        snaps(float(t), b=lin.b, v=lin.v)
    write_csv(recs, out / "diagnostics.csv")
    return {"records": len(recs), "final_time": float(times[-1])}


def _run_kdv(cfg, out, override):
    grid = cfg.grid()
    if grid.dim != 1:
        raise ConfigError("KdV runs are one-dimensional")
    params = dict(cfg.data_params)
    direction = str(params.pop("direction", "left"))
    try:
        u0 = families.kdv_data(cfg.family, grid.x[0], direction=direction, **params)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"[data] {exc}") from exc
    dtau = cfg.dt or 1e-3
    every = cfg.observe_every or cfg.T
    try:
        tr = kdv_evolve(u0, grid, cfg.T, dtau, direction, snapshot_every=every)
    except NonFiniteError as exc:
        raise BreakdownDetected(BreakdownReport(True, exc.t, "nonfinite")) from exc
    except ValueError as exc:
        raise ConfigError(f"[time] {exc}") from exc
    with open(out / "diagnostics.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "integral", "l2_squared", "max"])
        for tau, u in zip(tr.taus, tr.snapshots):
            w.writerow([repr(float(tau)), repr(float(np.sum(u) * grid.dx)),
                        repr(float(np.sum(u * u) * grid.dx)), repr(float(np.max(u)))])
    snaps = _Snapshots(out, grid, cfg.snapshot_every is not None)
    for tau, u in zip(tr.taus, tr.snapshots):
        snaps(tau, u=u)
    return {"records": len(tr.taus), "final_time": tr.taus[-1]}


# ------------------------------------------------------------- harnesses


def _harness(cfg, out, override):
    grid, law = cfg.grid(), cfg.law()
    name = cfg.harness
    if name == "euler_limit":
        rho, _ = families.make_hydro(cfg.family, grid, **_data_params(cfg))
        try:
            ref = euler_reference(rho, grid, cfg.T, law, cfg.tolerances.get("euler_dt"),
                                  _thresholds(cfg) if cfg.tolerances.get("gradient_ratio")
                                  else None)
        except ValueError as exc:
            raise BreakdownDetected(BreakdownReport(True, None, "gradient_blowup",
                                                    {"message": str(exc)})) from exc
        d, v = euler_limit_cell(rho, grid, cfg.eps, cfg.T, ref, law,
                                cfg.tolerances.get("dt_factor", 0.01))
        return {"eps": cfg.eps, "error": d + v, "density_error": d, "velocity_error": v}
    if name == "wave_approx":
        rho, v = families.make_hydro(cfg.family, grid, **_data_params(cfg))
        cadence = cfg.observe_every or cfg.T
        times = [float(t) for t in np.arange(cadence, cfg.T + 0.5 * cadence, cadence)]
        errs = qhd_linear_mismatch(rho - 1.0, v, cfg.eps, times, grid, cfg.dt or 2e-3)
        return {"eps": cfg.eps, "times": times, "errors": errs, "error": errs[-1]}
    if name == "dispersion":
        k = float(cfg.data_params.get("k", 1.0))
        norm = str(cfg.data_params.get("normalization", "sec3"))
        try:
            row = dispersion_check(cfg.eps, [k], norm)[0]
        except ValueError as exc:
            raise ConfigError(f"[data] {exc}") from exc
        return {"eps": cfg.eps, "k": k, "omega": row.omega, "expected": row.expected,
                "rel_error": row.rel_error, "phase_speed": row.phase_speed,
                "error": row.rel_error}
    if name == "kdv":
        fam = families.transonic_family(cfg.family, **cfg.data_params)
        cell = transonic_cell(cfg.eps, fam, tau_end=cfg.T, n=cfg.n,
                              gp_dt=cfg.dt or 0.02,
                              checkpoints=int(cfg.tolerances.get("checkpoints", 4)))
        return {"eps": cfg.eps, "taus": cell.taus, "err_plus": cell.err_plus,
                "err_minus": cell.err_minus, "error": cell.total[-1]}
    if name == "weakqhd":
        from .suites import ENERGY_TOL, WEAK_TOL, weak_checks
        psi0 = families.make_wave(cfg.family, grid, **_data_params(cfg))
        cfg.check_cfl(default_dt(grid, 1.0), "split-step resonance", override)
        dt = cfg.dt or default_dt(grid, 1.0)
        tr = evolve(SchrodingerState(psi0, 0.0, 1.0, grid), cfg.T, dt, law,
                    snapshot_every=cfg.snapshot_every or cfg.observe_every or cfg.T / 100)
        checks = weak_checks(f"{grid.dim}D", tr.times, tr.snapshots, grid, law,
                             cfg.tolerances.get("background"), seed=cfg.seed or 12345)
        for c in checks:
            if "continuity" in c.name or "momentum" in c.name:
                c.threshold = cfg.tolerances.get("weak", WEAK_TOL)
            elif "energy drift" in c.name:
                c.threshold = cfg.tolerances.get("energy", ENERGY_TOL)
            c.passed = c.value < c.threshold
        result = {"checks": [c.to_dict() for c in checks],
                  "passed": all(c.passed for c in checks)}
        if not result["passed"]:
            raise CheckFailed("weak QHD residuals above tolerance", result)
        return result
    raise ConfigError(f"unknown harness {name!r}")


RUNNERS = {"nls": _run_nls, "euler": _run_euler, "qhd": _run_extended,
           "korteweg": _run_extended, "linear": _run_linear, "kdv": _run_kdv}


def run_config(cfg: RunConfig, out: Path, override_cfl: bool = False) -> dict:
    """Run ``cfg`` into ``out``; raises ConfigError, BreakdownDetected or CheckFailed.

    The manifest is written in every case except validation failures raised
    before the run starts.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_config(cfg.raw, out / "config.ini")
    t0 = time.perf_counter()
    status = "crash"
    try:
        fn = _harness if cfg.harness else RUNNERS[cfg.kind]
        result = fn(cfg, out, override_cfl)
        status = "ok"
        write_json(out / "result.json", result)
        return result
    except ConfigError:
        status = "validation"
        raise
    except BreakdownDetected as exc:
        status = "breakdown"
        write_json(out / "breakdown.json", exc.report.to_dict())
        raise
    except CheckFailed as exc:
        status = "assertion"
        write_json(out / "result.json", exc.result)
        raise
    finally:
        write_manifest(out, cfg.to_dict(), status, time.perf_counter() - t0, seed=cfg.seed,
                       kind=cfg.kind)
