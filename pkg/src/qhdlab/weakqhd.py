"""Distributional checks of the QHD system recovered from an NLS solution (eps = 1).

From a wave-function trajectory we build rho, Lambda = Im(conj(phi) grad psi),
grad sqrt(rho) = Re(conj(phi) grad psi) and J = sqrt(rho) Lambda, with phi the
unit phase (zero on vacuum), and pair the equations

    rho_t + div J = 0,
    J_t + div(Lam x Lam) + grad P(rho) = 1/4 grad Lap rho - div(G x G),

with smooth test functions chi(t, x) = theta(t) eta(x). After moving every
derivative onto chi the momentum pairing reads

    int int J.chi_t + (Lam x Lam):grad chi + (G x G):grad chi
            + P(rho) div chi - 1/4 rho Lap div chi = 0.

Residuals are reported relative to the sum of the absolute integrands, so
they are comparable across runs of different size.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .grid import SpectralGrid, derivative, gradient, integrate, laplacian
from .laws import NonlinearityLaw
from .madelung import WeakVars, curl_identity_residual, weak_vars


def _bump(t, c, w):
    s = (np.asarray(t, dtype=float) - c) / w
    inside = np.abs(s) < 1.0
    ss = np.where(inside, s, 0.0)
    q = 1.0 - ss * ss
    val = np.where(inside, np.exp(1.0 - 1.0 / np.where(inside, q, 1.0)), 0.0)
    dval = np.where(inside, val * (-2.0 * ss / np.where(inside, q * q, 1.0)) / w, 0.0)
    return val, dval


@dataclass
class TestFunctionSet:
    """Tensor products theta_m(t) eta_j(x) on a time window.

    ``scalars`` are zero-mean band-limited periodic fields, ``vectors`` their
    vector-valued counterparts; ``bumps`` lists (centre, half-width) of the
    C-infinity temporal factors, all vanishing to infinite order at the
    window ends.
    """

    grid: SpectralGrid
    window: tuple
    scalars: list
    vectors: list
    bumps: list = field(default_factory=list)

    def theta(self, m, t):
        return _bump(t, *self.bumps[m])


def _random_field(grid, rng, max_mode):
    out = np.zeros(grid.shape)
    ms = range(-max_mode, max_mode + 1)
    vecs = [(m,) for m in ms if m > 0] if grid.dim == 1 else \
        [(a, b) for a in ms for b in ms if (a, b) > (0, 0) and (a or b)]
    for mv in vecs:
        phase = sum(2.0 * np.pi * mv[j] / grid.length * grid.x[j] for j in range(grid.dim))
        a, b = rng.standard_normal(2) / (1.0 + sum(abs(m) for m in mv))
        out += a * np.cos(phase) + b * np.sin(phase)
    return out / np.max(np.abs(out))


def make_test_functions(grid: SpectralGrid, window: tuple, n_space: int = 8,
                        seed: int = 12345, max_mode: int = 4) -> TestFunctionSet:
    """Fixed-seed family: ``n_space`` scalar and vector spatial factors and three
    temporal bumps (whole window, early part, late part)."""
    rng = np.random.default_rng(seed)
    scalars = [_random_field(grid, rng, max_mode) for _ in range(n_space)]
    vectors = [np.stack([_random_field(grid, rng, max_mode) for _ in range(grid.dim)])
               for _ in range(n_space)]
    t0, t1 = window
    T = t1 - t0
    bumps = [(t0 + 0.5 * T, 0.5 * T), (t0 + 0.4 * T, 0.4 * T), (t0 + 0.6 * T, 0.4 * T)]
    return TestFunctionSet(grid, (t0, t1), scalars, vectors, bumps)


def _uniform_times(times):
    t = np.asarray(times, dtype=float)
    if len(t) < 3:
        raise ValueError("need at least three snapshots")
    h = np.diff(t)
    if np.max(np.abs(h - h[0])) > 1e-9 * h[0]:
        raise ValueError("snapshots must be at uniform cadence")
    return t


def _fields(snapshots, grid, threshold):
    return [weak_vars(psi, grid, threshold) for psi in snapshots]


@dataclass
class WeakResidual:
    name: str
    residual: float
    absolute: float
    per_test: list

    def report(self, law: str, tolerance: float) -> dict:
        return {"check": self.name, "law": law, "residual": self.residual,
                "tolerance": tolerance, "pass": bool(self.residual < tolerance)}


def _pair(times, tests, terms_for):
    """Evaluate sum over terms of int int term, returning (max rel, max abs, per test).

    ``terms_for(j)`` yields, per snapshot, a list of (spatial integrand
    factor, temporal weight index) pairs where index 0 means theta, 1 theta'.
    """
    rel, ab, per = 0.0, 0.0, []
    for m in range(len(tests.bumps)):
        th, dth = tests.theta(m, times)
        weights = (th, dth)
        for j in range(len(tests.scalars)):
            series = terms_for(j)  # shape (nterms, 2, ntimes): integrals and abs integrals
            total = 0.0
            scale = 0.0
            for (vals, absvals, widx) in series:
                total += simpson(weights[widx] * vals, x=times)
                scale += simpson(np.abs(weights[widx]) * absvals, x=times)
            a = abs(total)
            r = a / scale if scale > 0 else 0.0
            per.append(r)
            rel, ab = max(rel, r), max(ab, a)
    return rel, ab, per


def weak_residual_continuity(times, snapshots, grid: SpectralGrid, tests: TestFunctionSet,
                             threshold: float = 0.0) -> WeakResidual:
    """Pairing of rho_t + div J = 0: int int rho theta' eta + theta J.grad eta."""
    times = _uniform_times(times)
    wv = _fields(snapshots, grid, threshold)
    cache = {}

    def terms(j):
        if j not in cache:
            eta = tests.scalars[j]
            geta = gradient(eta, grid)
            a = [(w.rho * eta) for w in wv]
            b = [np.sum(w.J * geta, axis=0) for w in wv]
            cache[j] = [
                (np.array([integrate(f, grid) for f in a]),
                 np.array([integrate(np.abs(f), grid) for f in a]), 1),
                (np.array([integrate(f, grid) for f in b]),
                 np.array([integrate(np.abs(f), grid) for f in b]), 0),
            ]
        return cache[j]

    rel, ab, per = _pair(times, tests, terms)
    return WeakResidual("continuity", rel, ab, per)


def _tensor_contract(A, B, grad_chi):
    """sum_jk A_j B_k d_j chi_k with grad_chi[k, j] = d_j chi_k."""
    d = A.shape[0]
    return sum(A[j] * B[k] * grad_chi[k, j] for j in range(d) for k in range(d))


def weak_residual_momentum(times, snapshots, grid: SpectralGrid, tests: TestFunctionSet,
                           law: NonlinearityLaw, threshold: float = 0.0) -> WeakResidual:
    """Pairing of the momentum equation in the fully integrated-by-parts form."""
    times = _uniform_times(times)
    wv = _fields(snapshots, grid, threshold)
    d = grid.dim
    cache = {}

    def terms(j):
        if j not in cache:
            chi = tests.vectors[j]
            gchi = np.stack([gradient(chi[k], grid) for k in range(d)])
            divchi = sum(derivative(chi[k], grid, k) for k in range(d))
            lapdiv = laplacian(divchi, grid)
            groups = [
                ([np.sum(w.J * chi, axis=0) for w in wv], 1),
                ([_tensor_contract(w.Lam, w.Lam, gchi) for w in wv], 0),
                ([_tensor_contract(w.grad_sqrt_rho, w.grad_sqrt_rho, gchi) for w in wv], 0),
                ([law.P(w.rho) * divchi for w in wv], 0),
                ([-0.25 * w.rho * lapdiv for w in wv], 0),
            ]
            cache[j] = [(np.array([integrate(f, grid) for f in fs]),
                         np.array([integrate(np.abs(f), grid) for f in fs]), widx)
                        for fs, widx in groups]
        return cache[j]

    rel, ab, per = _pair(times, tests, terms)
    return WeakResidual("momentum", rel, ab, per)


def curl_constraint_residual(psi: np.ndarray, grid: SpectralGrid, threshold: float = 1e-8) -> float:
    """Pointwise max residual of d_j J^k - d_k J^j = 2(Lam^k d_j sqrt rho - Lam^j d_k sqrt rho)
    off the vacuum mask (zero in 1D)."""
    return curl_identity_residual(psi, grid, threshold)


def weak_energy(wv: WeakVars, law: NonlinearityLaw, grid: SpectralGrid,
                background: float | None = None) -> float:
    """int 1/2 |Lam|^2 + 1/2 |grad sqrt rho|^2 + F(rho)."""
    dens = 0.5 * np.sum(wv.Lam**2 + wv.grad_sqrt_rho**2, axis=0) + law.relative_F(wv.rho, background)
    return float(integrate(dens, grid))


def nls_hamiltonian(psi: np.ndarray, law: NonlinearityLaw, grid: SpectralGrid,
                    background: float | None = None) -> float:
    """int 1/2 |grad psi|^2 + F(|psi|^2) at eps = 1."""
    g = gradient(psi, grid)
    return float(integrate(0.5 * np.sum(np.abs(g) ** 2, axis=0)
                           + law.relative_F(np.abs(psi) ** 2, background), grid))


@dataclass
class EnergyCheck:
    drift: float
    max_mismatch: float
    energies: list


def energy_equality_check(snapshots, law: NonlinearityLaw, grid: SpectralGrid,
                          background: float | None = None, threshold: float = 0.0) -> EnergyCheck:
    """Relative drift of the weak energy and its largest relative mismatch
    with the wave-function Hamiltonian over the snapshots."""
    es, mism = [], 0.0
    for psi in snapshots:
        e = weak_energy(weak_vars(psi, grid, threshold), law, grid, background)
        h = nls_hamiltonian(psi, law, grid, background)
        es.append(e)
        mism = max(mism, abs(e - h) / max(abs(h), 1e-300))
    es_arr = np.array(es)
    ref = abs(es_arr[0]) if es_arr[0] != 0 else 1.0
    drift = float(np.max(np.abs(es_arr - es_arr[0])) / ref)
    return EnergyCheck(drift=drift, max_mismatch=float(mism), energies=es)


def write_report(entries, path) -> None:
    with open(path, "w") as fh:
        json.dump(entries, fh, indent=2)


# -------------------------------------------------------- data families


def vortex_dipole(grid: SpectralGrid, radius: float = 3.0, strength: float = 1.0,
                  offset: tuple = (0.0, 0.0)) -> np.ndarray:
    """1 - exp(-r^2/R^2)(1 - c (x + i y)) centred at ``offset``.

    A simple zero at the centre with winding +1 and a companion antivortex
    nearby, so the total winding is zero and the field is smooth and
    periodic up to exp(-(L/2R)^2).
    """
    x = grid.x[0] - offset[0]
    y = grid.x[1] - offset[1]
    g = np.exp(-(x * x + y * y) / radius**2)
    return 1.0 - g * (1.0 - strength * (x + 1j * y))
