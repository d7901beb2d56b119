"""Canned verification suites.

Each ``criterion_*`` function runs a fixed configuration and returns a list
of :class:`Check` records. ``SUITES`` maps the public suite names to the
criteria they bundle; :func:`run_suite` evaluates one suite.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .asymptotics import (dispersion_check, euler_limit_error, fit_exponential, sech2_family,
                          transonic_kdv_error, wave_approx_error)
from .conserved import (diagnostics_korteweg, diagnostics_wave, flux_law_orders,
                        max_relative_drift, pseudo_conformal_direct, carles_nakamura_direct)
from .data import compact_bump
from .grid import gradient, integrate, l2_norm, make_grid
from .hydro import (BreakdownThresholds, EulerState, QHDExtendedStepper, korteweg_extended_step,
                    qhd_extended_step, run_euler, spectral_tail)
from .kdv import kdv_evolve, kdv_soliton
from .laws import constant_capillarity, cubic, gross_pitaevskii, qhd_capillarity
from .madelung import (extended_vars_korteweg, extended_vars_qhd, from_hydro,
                       mod_identity_residual, to_hydro)
from .schrodinger import SchrodingerState, evolve, mirrored_dark_soliton
from .weakqhd import (curl_constraint_residual, energy_equality_check, make_test_functions,
                      vortex_dipole, weak_residual_continuity, weak_residual_momentum)

# Weak-QHD tolerances, calibrated on the two reference runs (observed values
# are 1-2 orders of magnitude below and drop >4x when the cadence halves).
WEAK_TOL = 1e-4
ENERGY_TOL = 1e-6
CURL_TOL = 1e-8
MOD_TOL = 1e-10


@dataclass
class Check:
    name: str
    value: float
    threshold: float | tuple
    relation: str  # "<", "<=", ">=", "within"
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: {self.value:.4g} {self.relation} {self.threshold}"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["value"] = _clean(self.value)
        return d


def _clean(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def below(name, value, threshold, **detail) -> Check:
    return Check(name, float(value), threshold, "<", bool(value < threshold), detail)


def at_least(name, value, threshold, **detail) -> Check:
    return Check(name, float(value), threshold, ">=", bool(value >= threshold), detail)


def within(name, value, target, tol, **detail) -> Check:
    return Check(name, float(value), (target, tol), "within",
                 bool(abs(value - target) <= tol), detail)


# -------------------------------------------------------------- 1, 2


def conservation_data(n=512, L=40.0):
    g = make_grid(1, n, L)
    x = g.x[0]
    return g, (1 + 0.3 * x) * np.exp(-x**2) * np.exp(1j * (0.8 * x + 0.3 * x**2))


@lru_cache(maxsize=4)
def _cubic_run(dt: float, eps: float = 0.5, T: float = 1.0, cadence: float = 0.01):
    g, psi0 = conservation_data()
    law = cubic()
    tr = evolve(SchrodingerState(psi0, 0.0, eps, g), T, dt, law,
                observers={"d": lambda s: diagnostics_wave(s.psi, s.t, eps, law, g),
                           "zu": lambda s: (pseudo_conformal_direct(s.psi, s.t, eps, law, g),
                                            carles_nakamura_direct(s.psi, s.t, eps, g))},
                observe_every=cadence)
    return tr


def criterion_1() -> list:
    """Conservation: M, H (with dt-halving ratio), P, U drift and Z consistency."""
    recs = _cubic_run(1e-3).observations["d"]
    recs_half = _cubic_run(5e-4).observations["d"]
    zu = _cubic_run(1e-3).observations["zu"]
    dH = max_relative_drift([r.H for r in recs])
    dH2 = max_relative_drift([r.H for r in recs_half])
    Pscale = max(abs(recs[0].P[0]), 1.0)
    Uscale = max(abs(recs[0].U[0]), 1.0)
    zres = max(abs(r.Z - (r.t**2 * r.H - r.t * r.F + r.I)) for r in recs)
    zdirect = max(abs(r.Z - z) / max(abs(z), 1.0) for r, (z, _) in zip(recs, zu))
    udirect = max(float(np.max(np.abs(r.U - u))) / Uscale for r, (_, u) in zip(recs, zu))
    return [
        below("conservation/mass drift", max_relative_drift([r.M for r in recs]), 1e-10),
        below("conservation/energy drift", dH, 1e-6),
        within("conservation/energy drift ratio dt->dt/2", dH / dH2, 4.0, 1.0),
        below("conservation/momentum drift", max_relative_drift([r.P[0] for r in recs], Pscale), 1e-8),
        below("conservation/U drift", max_relative_drift([r.U[0] for r in recs], Uscale), 1e-8),
        below("conservation/Z = t^2H - tF + I", zres, 1e-10),
        below("conservation/Z vs direct integrand", zdirect, 1e-10),
        below("conservation/U vs direct integrand", udirect, 1e-10),
    ]


def _order_checks(prefix, orders, floor=1e-10):
    out = []
    for law, fo in orders.items():
        if math.isinf(fo.order):
            out.append(below(f"{prefix}/{law} residual (exact law)", max(fo.residuals), floor,
                             spacings=fo.spacings, residuals=fo.residuals))
        else:
            out.append(within(f"{prefix}/{law} order", fo.order, 2.0, 0.3,
                              spacings=fo.spacings, residuals=fo.residuals))
    return out


def criterion_2() -> list:
    """Flux laws in 1D and the 2D critical pseudo-conformal case."""
    recs = _cubic_run(1e-3).observations["d"]
    checks = _order_checks("flux", flux_law_orders(recs, (1, 2, 4)))
    eps = 0.5
    g = make_grid(2, 128, 20.0)
    x, y = g.x
    psi0 = np.exp(-(x**2 + 2 * y**2) / 2) * np.exp(1j * (0.5 * x + 0.2 * x * y))
    law = cubic()
    tr = evolve(SchrodingerState(psi0, 0.0, eps, g), 1.0, 1e-3, law,
                observers={"d": lambda s: diagnostics_wave(s.psi, s.t, eps, law, g)},
                observe_every=0.02)
    r2 = tr.observations["d"]
    checks.append(below("flux/2D critical Z drift", max_relative_drift([r.Z for r in r2]), 1e-6))
    checks.append(below("flux/2D angular momentum drift",
                        max_relative_drift([r.A for r in r2], max(abs(r2[0].A), 1.0)), 1e-8))
    checks.append(below("flux/2D critical virial source D", max(abs(r.D) for r in r2), 1e-10))
    return checks


# ----------------------------------------------------------------- 3


def korteweg_records(kappa=0.01, n=256, L=20.0, dt=1e-3, T=0.5, cadence=0.01):
    g = make_grid(1, n, L)
    x = g.x[0]
    cap, law = constant_capillarity(kappa), gross_pitaevskii()
    s = extended_vars_korteweg(1 + 0.2 * np.exp(-x**2), (0.1 * np.exp(-x**2))[None], cap, g)
    nsteps, every = int(round(T / dt)), int(round(cadence / dt))
    recs = []
    for j in range(nsteps + 1):
        if j % every == 0:
            recs.append(diagnostics_korteweg(s.rho, s.z.real, s.t, cap, law, g, background=1.0))
        if j < nsteps:
            s = korteweg_extended_step(s, dt, law, cap, g)
    return recs


def criterion_3() -> list:
    recs = korteweg_records()
    checks = [below("korteweg/kappa-energy drift", max_relative_drift([r.H for r in recs]), 1e-6)]
    orders = flux_law_orders(recs, (1, 2, 4), korteweg=True)
    checks += _order_checks("korteweg", {k: v for k, v in orders.items()
                                         if k in ("dI/dt=F", "dF/dt=2H+D")})
    eps = 0.5
    g = make_grid(1, 128, 2 * np.pi)
    x = g.x[0]
    rho0, phi0 = 1 + 0.3 * np.sin(x), 0.2 * np.cos(x)
    s1 = extended_vars_korteweg(rho0, gradient(phi0, g), qhd_capillarity(eps), g)
    s2 = s1
    for _ in range(250):
        s1 = korteweg_extended_step(s1, 2e-4, cubic(), qhd_capillarity(eps), g)
        s2 = qhd_extended_step(s2, 2e-4, cubic(), g)
    gap = max(float(np.max(np.abs(s1.z - s2.z))), float(np.max(np.abs(s1.rho - s2.rho))))
    checks.append(below("korteweg/kappa=eps^2/(4rho) vs extended QHD", gap, 1e-8))
    return checks


# ----------------------------------------------------------------- 4


def cross_formulation_errors(dt, eps=0.5, n=512, T=0.25):
    g = make_grid(1, n, 2 * np.pi)
    x = g.x[0]
    rho0, phi0 = 1 + 0.3 * np.sin(x), 0.2 * np.cos(x)
    tr = evolve(SchrodingerState(from_hydro(rho0, phi0, eps), 0.0, eps, g), T, dt, cubic())
    h = to_hydro(tr.snapshots[-1], g, eps)
    st = extended_vars_qhd(rho0, gradient(phi0, g), eps, g)
    stepper = QHDExtendedStepper(g, eps, dt, cubic())
    z, r = st.z, st.rho
    for _ in range(int(round(T / dt))):
        z, r = stepper(z, r)
    return l2_norm(r - h.rho, g) + l2_norm(z.real - h.v, g)


def criterion_4() -> list:
    e1 = cross_formulation_errors(1e-3)
    e2 = cross_formulation_errors(5e-4)
    return [below("identities/NLS+Madelung vs extended QHD L2", e1, 1e-5),
            at_least("identities/cross-formulation order", math.log2(e1 / e2), 2.0 - 0.1,
                     errors=[e1, e2])]


def identity_checks() -> list:
    """Pointwise identities on non-vacuum data: Madelung round trip and (mod)."""
    g = make_grid(1, 256, 2 * np.pi)
    x = g.x[0]
    eps = 0.5
    rho0, phi0 = 1 + 0.3 * np.sin(x), 0.2 * np.cos(x)
    psi = from_hydro(rho0, phi0, eps)
    h = to_hydro(psi, g, eps)
    rt = max(float(np.max(np.abs(h.rho - rho0))), float(np.max(np.abs(h.v - gradient(phi0, g)))))
    return [below("identities/Madelung round trip", rt, 1e-10),
            below("identities/(mod) identity", mod_identity_residual(psi, g), MOD_TOL)]


# ----------------------------------------------------------------- 5


def criterion_5() -> list:
    checks, table = [], []
    worst = 0.0
    for eps in (0.5, 1.0, 2.0):
        for row in dispersion_check(eps, (1, 2, 4), "sec3"):
            table.append({"eps": eps, "k": row.k, "omega": row.omega, "expected": row.expected,
                          "rel_error": row.rel_error})
            worst = max(worst, row.rel_error)
    checks.append(below("dispersion/omega^2 = k^2(1 + eps^2 k^2/4) rel error", worst, 1e-3,
                        table=table))
    rows = dispersion_check(1.0, (0.05, 0.1, 0.2), "sec4")
    small = rows[0]
    checks.append(within("dispersion/GP phase speed at k=0.05", small.phase_speed,
                         math.sqrt(2.0), 1e-2,
                         table=[{"k": r.k, "phase_speed": r.phase_speed, "rel_error": r.rel_error}
                                for r in rows]))
    return checks


# --------------------------------------------------------------- 6, 10


def criterion_6() -> list:
    g = make_grid(1, 2048, 40.0)
    x = g.x[0]
    res = euler_limit_error(1 + 0.2 * np.exp(-x**2), g, [0.2, 0.1, 0.05, 0.025], 1.0,
                            euler_dt=2e-3)
    return [at_least("euler_limit/order (density + velocity)", res.fit.slope, 1.0,
                     errors=res.fit.errors),
            at_least("euler_limit/density order", res.density_fit.slope, 1.7,
                     errors=res.density_fit.errors)]


def compact_euler_state(n=2048, L=16.0, radius=2.0):
    g = make_grid(1, n, L)
    x = g.x[0]
    b = compact_bump(x / radius)
    return g, EulerState(v=(-x * b)[None], a=b.copy()), np.abs(x) < radius


def criterion_10() -> list:
    g, s, inside = compact_euler_state()
    run = run_euler(s, 3.0, 2e-4, cubic(), g, snapshot_every=0.01,
                    thresholds=BreakdownThresholds(gradient_ratio=5.0))
    rep = run.report
    leak = max(float(integrate(np.where(inside, 0.0, st.a**2), g)) for st in run.states)
    mass0 = float(integrate(s.a**2, g))
    tail = spectral_tail(run.states[-1].a, g)
    return [Check("euler_limit/compact data breakdown detected", rep.time or math.inf, "finite",
                  "gradient_blowup", bool(rep.triggered and rep.cause == "gradient_blowup"),
                  rep.to_dict()),
            below("euler_limit/mass leakage outside initial support", leak / mass0, 1e-8),
            below("euler_limit/spectral tail at trigger", tail, 1e-3)]


# ----------------------------------------------------------------- 7


def criterion_7() -> list:
    g = make_grid(1, 512, 40.0)
    x = g.x[0]
    res = wave_approx_error(np.exp(-x**2), [0.025, 0.05, 0.1], [0.1, 0.3, 1.0], [0.5, 1.0, 2.0], g)
    return [at_least("wave_approx/R^2 of C(tA^2 + eps^2 tA)", res.r2, 0.9, C=res.C,
                     cells=len(res.cells)),
            at_least("wave_approx/cells", len(res.cells), 12)]


# ----------------------------------------------------------------- 8


def kdv_soliton_error(tau=1.0, n=512, L=80.0, dtau=1e-3) -> float:
    g = make_grid(1, n, L)
    x = g.x[0]
    err = 0.0
    for d in ("left", "right"):
        tr = kdv_evolve(kdv_soliton(x, 0.0, 1.0, d), g, tau, dtau, d)
        err = max(err, float(np.max(np.abs(tr.final.u - kdv_soliton(x, tau, 1.0, d)))))
    return err


def criterion_8() -> list:
    eps_list = [0.3, 0.2, 0.15, 0.1]
    fit, cells = transonic_kdv_error(eps_list, sech2_family(), tau_end=0.5)
    growth = [fit_exponential(c.taus, c.total) for c in cells]
    return [within("kdv/transonic order", fit.slope, 2.0, 0.3, eps=fit.eps, errors=fit.errors,
                   r2=fit.r2, growth_rates=[gr.rate for gr in growth]),
            below("kdv/soliton shape error at tau=1", kdv_soliton_error(), 1e-6)]


# ----------------------------------------------------------------- 9


def weak_checks(label, times, snaps, grid, law, background, seed=12345) -> list:
    tests = make_test_functions(grid, (times[0], times[-1]), seed=seed)
    c = weak_residual_continuity(times, snaps, grid, tests)
    m = weak_residual_momentum(times, snaps, grid, tests, law)
    curl = max(curl_constraint_residual(p, grid) for p in snaps)
    en = energy_equality_check(snaps, law, grid, background)
    mod = max(mod_identity_residual(p, grid) for p in snaps)
    return [below(f"weakqhd/{label} continuity", c.residual, WEAK_TOL),
            below(f"weakqhd/{label} momentum", m.residual, WEAK_TOL),
            below(f"weakqhd/{label} curl constraint", curl, CURL_TOL),
            below(f"weakqhd/{label} energy drift", en.drift, ENERGY_TOL),
            below(f"weakqhd/{label} energy vs NLS Hamiltonian", en.max_mismatch, MOD_TOL),
            below(f"weakqhd/{label} (mod) identity", mod, MOD_TOL)]


def weak_runs(n=256, L=32.0, cadence=0.01):
    g1 = make_grid(1, n, L)
    x = g1.x[0]
    psi1 = np.exp(-x**2 / 2) * np.exp(0.5j * x) * (1 + 0.2 * x)
    tr1 = evolve(SchrodingerState(psi1, 0.0, 1.0, g1), 1.0, 1e-3, cubic(), snapshot_every=cadence)
    g2 = make_grid(2, n, L)
    psi2 = vortex_dipole(g2, offset=(0.5 * g2.dx, 0.5 * g2.dx))
    tr2 = evolve(SchrodingerState(psi2, 0.0, 1.0, g2), 1.0, 1e-3, gross_pitaevskii(),
                 snapshot_every=cadence)
    return (g1, tr1), (g2, tr2)


def black_soliton_drift(n=1024, L=80.0) -> float:
    g = make_grid(1, n, L)
    psi0 = mirrored_dark_soliton(g)
    tr = evolve(SchrodingerState(psi0, 0.0, 1.0, g), 1.0, 1e-3, gross_pitaevskii())
    return float(np.max(np.abs(tr.snapshots[-1] - psi0)))


def criterion_9() -> list:
    (g1, tr1), (g2, tr2) = weak_runs()
    checks = weak_checks("1D smooth", tr1.times, tr1.snapshots, g1, cubic(), None)
    checks += weak_checks("2D vortex", tr2.times, tr2.snapshots, g2, gross_pitaevskii(), 1.0)
    checks.append(below("weakqhd/black soliton stationarity", black_soliton_drift(), 1e-6))
    return checks


# -------------------------------------------------------------- suites


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}

SUITES = {
    "conservation": (criterion_1, criterion_2),
    "identities": (criterion_4, identity_checks),
    "korteweg": (criterion_3,),
    "dispersion": (criterion_5,),
    "euler_limit": (criterion_6, criterion_10),
    "wave_approx": (criterion_7,),
    "kdv": (criterion_8,),
    "weakqhd": (criterion_9,),
}


def run_suite(name: str) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    t0 = time.perf_counter()
    checks = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for fn in SUITES[name]:
            checks += fn()
    return {"suite": name, "passed": all(c.passed for c in checks),
            "wall_time_s": time.perf_counter() - t0, "checks": [c.to_dict() for c in checks],
            "lines": [c.line() for c in checks]}
