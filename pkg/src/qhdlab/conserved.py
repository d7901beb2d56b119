"""Conserved functionals, virial-type flux laws and their numerical checks.

Everything here is a pure function of sampled fields. On the torus the
moment functionals (X, F, I, Z, U, A) use the centred coordinate and only
make sense for deviations localized well inside the cell. When a constant
background density ``b`` is present (Gross-Pitaevskii, Korteweg around
rho = 1) mass-like integrals are taken of rho - b and the potential energy
is renormalised as F(rho) - F(b) - f(b)(rho - b), which keeps all integrands
localized and the flux laws exact.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundarySupportWarning
from .grid import SpectralGrid, derivative, gradient, integrate
from .laws import CapillarityLaw, NonlinearityLaw

CSV_COLUMNS = ("t", "M", "H", "Px", "Py", "A", "Xx", "Xy", "F", "I", "Z",
               "Ux", "Uy", "D", "K", "p_gp", "representation")


@dataclass
class DiagnosticsRecord:
    """Functionals at one instant.

    ``D`` is the virial source int(d P - 2 F) and ``K`` the capillary
    correction int (d/2)(rho kappa)' |grad rho|^2 (zero outside Korteweg).
    ``A`` is NaN in 1D, ``p_gp`` NaN unless requested.
    """

    t: float
    M: float
    H: float
    P: np.ndarray
    A: float
    X: np.ndarray
    F: float
    I: float
    Z: float
    U: np.ndarray
    D: float
    K: float = 0.0
    p_gp: float = math.nan
    representation: str = "wave"

    def row(self) -> dict:
        P = list(self.P) + [math.nan] * (2 - len(self.P))
        X = list(self.X) + [math.nan] * (2 - len(self.X))
        U = list(self.U) + [math.nan] * (2 - len(self.U))
        return {"t": self.t, "M": self.M, "H": self.H, "Px": P[0], "Py": P[1], "A": self.A,
                "Xx": X[0], "Xy": X[1], "F": self.F, "I": self.I, "Z": self.Z,
                "Ux": U[0], "Uy": U[1], "D": self.D, "K": self.K, "p_gp": self.p_gp,
                "representation": self.representation}


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for r in records:
            w.writerow({k: (repr(float(v)) if k != "representation" else v)
                        for k, v in r.row().items()})


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: (v if k == "representation" else float(v)) for k, v in row.items()}
                for row in csv.DictReader(fh)]


# ------------------------------------------------------------ helpers


def support_monitor(deviation: np.ndarray, grid: SpectralGrid, rel_tol: float = 1e-10,
                    margin: float = 0.1) -> bool:
    """True when |deviation| exceeds rel_tol * max inside the outer ``margin``
    fraction of the cell; emits a BoundarySupportWarning in that case."""
    mag = np.abs(deviation)
    peak = float(np.max(mag))
    if peak == 0.0:
        return False
    inner = 0.5 * grid.length * (1.0 - 2.0 * margin)
    outer = np.zeros(grid.shape, dtype=bool)
    for xj in grid.x:
        outer |= np.abs(xj) > inner
    hit = bool(np.any(mag[outer] > rel_tol * peak))
    if hit:
        warnings.warn("localized field reaches the boundary layer of the periodic cell; "
                      "moment functionals are unreliable", BoundarySupportWarning, stacklevel=3)
    return hit


def _cross(x, vec) -> float:
    return x[0] * vec[1] - x[1] * vec[0]


def _assemble(t, grid, dens_dev, current, kinetic, law, rho, background, rep,
              K=0.0, p_gp=math.nan, check_support=True) -> DiagnosticsRecord:
    d = grid.dim
    if check_support:
        support_monitor(dens_dev, grid)
    x = np.stack(grid.x)
    M = float(integrate(dens_dev, grid))
    H = float(integrate(kinetic + law.relative_F(rho, background), grid))
    P = np.array([float(integrate(current[j], grid)) for j in range(d)])
    X = np.array([float(integrate(x[j] * dens_dev, grid)) for j in range(d)])
    A = float(integrate(_cross(x, current), grid)) if d == 2 else math.nan
    F = float(integrate(np.sum(x * current, axis=0), grid))
    I = float(integrate(0.5 * grid.r2 * dens_dev, grid))
    D = float(integrate(d * law.relative_P(rho, background)
                        - 2.0 * law.relative_F(rho, background), grid))
    Z = t * t * H - t * F + I
    U = X - t * P
    return DiagnosticsRecord(t=t, M=M, H=H, P=P, A=A, X=X, F=F, I=I, Z=Z, U=U, D=D, K=K,
                             p_gp=p_gp, representation=rep)


# --------------------------------------------------------- diagnostics


def diagnostics_wave(psi: np.ndarray, t: float, eps: float, law: NonlinearityLaw,
                     grid: SpectralGrid, background: float | None = None,
                     with_gp_momentum: bool = False, check_support: bool = True) -> DiagnosticsRecord:
    """Functionals of a wave function: M = int |psi|^2, H = int eps^2/2 |grad psi|^2 + F,
    P = eps Im int conj(psi) grad psi, and the moments built from them."""
    rho = np.abs(psi) ** 2
    dpsi = gradient(psi, grid)
    current = eps * np.imag(np.conj(psi) * dpsi)
    kinetic = 0.5 * eps**2 * np.sum(np.abs(dpsi) ** 2, axis=0)
    dev = rho - background if background is not None else rho
    pg = gp_momentum(psi, grid, check_support=False) if with_gp_momentum else math.nan
    return _assemble(t, grid, dev, current, kinetic, law, rho, background, "wave",
                     p_gp=pg, check_support=check_support)


def pseudo_conformal_direct(psi: np.ndarray, t: float, eps: float, law: NonlinearityLaw,
                            grid: SpectralGrid) -> float:
    """Z = int 1/2 |(x + i eps t grad) psi|^2 + t^2 F(|psi|^2), evaluated directly
    (no background). Used to cross-check t^2 H - t F + I."""
    x = np.stack(grid.x)
    op = x * psi + 1j * eps * t * gradient(psi, grid)
    return float(integrate(0.5 * np.sum(np.abs(op) ** 2, axis=0)
                           + t * t * law.F(np.abs(psi) ** 2), grid))


def carles_nakamura_direct(psi: np.ndarray, t: float, eps: float, grid: SpectralGrid) -> np.ndarray:
    """U = Re int conj(psi) (x + i eps t grad) psi."""
    dpsi = gradient(psi, grid)
    return np.array([float(integrate(np.real(np.conj(psi) * (xj * psi + 1j * eps * t * dpsi[j])), grid))
                     for j, xj in enumerate(grid.x)])


def _grad_sqrt_rho(rho, grid, threshold):
    off = rho > threshold * float(np.max(rho))
    g = gradient(rho, grid)
    return np.where(off, g / (2.0 * np.sqrt(np.where(off, rho, 1.0))), 0.0)


def diagnostics_hydro(rho: np.ndarray, v: np.ndarray, t: float, eps: float, law: NonlinearityLaw,
                      grid: SpectralGrid, background: float | None = None,
                      vacuum_threshold: float = 1e-8, check_support: bool = True) -> DiagnosticsRecord:
    """Functionals of (rho, v): H = int 1/2 rho |v|^2 + eps^2/2 |grad sqrt(rho)|^2 + F(rho)."""
    v = np.asarray(v).reshape((grid.dim,) + grid.shape)
    gs = _grad_sqrt_rho(rho, grid, vacuum_threshold)
    kinetic = 0.5 * rho * np.sum(v**2, axis=0) + 0.5 * eps**2 * np.sum(gs**2, axis=0)
    dev = rho - background if background is not None else rho
    return _assemble(t, grid, dev, rho * v, kinetic, law, rho, background, "hydro",
                     check_support=check_support)


def capillary_energy(rho: np.ndarray, cap: CapillarityLaw, grid: SpectralGrid) -> float:
    """int kappa(rho)/2 |grad rho|^2."""
    g2 = np.sum(gradient(rho, grid) ** 2, axis=0)
    return float(integrate(0.5 * cap.kappa(rho) * g2, grid))


def diagnostics_korteweg(rho: np.ndarray, v: np.ndarray, t: float, cap: CapillarityLaw,
                         law: NonlinearityLaw, grid: SpectralGrid, background: float | None = None,
                         check_support: bool = True) -> DiagnosticsRecord:
    """Korteweg functionals; ``K`` carries int (d/2)(rho kappa)' |grad rho|^2."""
    v = np.asarray(v).reshape((grid.dim,) + grid.shape)
    g2 = np.sum(gradient(rho, grid) ** 2, axis=0)
    kinetic = 0.5 * rho * np.sum(v**2, axis=0) + 0.5 * cap.kappa(rho) * g2
    K = float(integrate(0.5 * grid.dim * cap.rho_kappa_prime(rho) * g2, grid))
    dev = rho - background if background is not None else rho
    return _assemble(t, grid, dev, rho * v, kinetic, law, rho, background, "korteweg", K=K,
                     check_support=check_support)


def gp_momentum(psi: np.ndarray, grid: SpectralGrid, check_support: bool = True) -> float:
    """1/2 int (d1 Re psi) Im psi - (d1 Im psi)(Re psi - 1), for psi -> 1 at infinity."""
    if check_support:
        support_monitor(psi - 1.0, grid)
    re, im = psi.real, psi.imag
    dre, dim_ = derivative(re, grid, 0), derivative(im, grid, 0)
    return float(0.5 * integrate(dre * im - dim_ * (re - 1.0), grid))


def galilean_boost(psi: np.ndarray, xi: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """psi e^{i xi . x}; xi must be a lattice wavevector for periodicity."""
    phase = sum(np.asarray(xi)[j] * grid.x[j] for j in range(grid.dim))
    return psi * np.exp(1j * phase)


# --------------------------------------------------------- flux laws


@dataclass
class FluxResidual:
    law: str
    residual: float
    spacing: float
    samples: int


@dataclass
class FluxTable:
    spacing: float
    residuals: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.residuals[key].residual

    def as_dict(self) -> dict:
        return {k: r.residual for k, r in self.residuals.items()}


def _series(records, name):
    return np.array([getattr(r, name) for r in records], dtype=float)


def check_flux_laws(records, stride: int = 1, korteweg: bool | None = None) -> FluxTable:
    """Central-difference residuals of the non-constant laws.

    dX/dt = P, dI/dt = F, dF/dt = 2H + D, dZ/dt + t D = 0, with D replaced
    by D + K for Korteweg records.
    Records must be at uniform cadence; ``stride`` subsamples them. Each
    residual is max |lhs - rhs| over interior records divided by the largest
    term magnitude entering that law.
    """
    recs = list(records)[::stride]
    if len(recs) < 3:
        raise ValueError("need at least three records")
    t = _series(recs, "t")
    h = np.diff(t)
    if np.max(np.abs(h - h[0])) > 1e-9 * abs(h[0]):
        raise ValueError("records are not at uniform cadence")
    h = float(h[0])
    if korteweg is None:
        korteweg = recs[0].representation == "korteweg"

    def cdiff(s):
        return (s[2:] - s[:-2]) / (2.0 * h)

    def resid(lhs, rhs, *scale_terms):
        scale = max([float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs)))]
                    + [float(np.max(np.abs(s))) for s in scale_terms])
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(lhs - rhs))) / scale

    inner = slice(1, -1)
    X = np.stack([r.X for r in recs])
    P = np.stack([r.P for r in recs])
    H, F, I, Z, D = (_series(recs, n) for n in ("H", "F", "I", "Z", "D"))
    K = _series(recs, "K") if korteweg else np.zeros_like(H)
    out = FluxTable(spacing=h)
    n = len(recs) - 2
    out.residuals["dX/dt=P"] = FluxResidual("dX/dt=P", resid(
        np.stack([cdiff(X[:, j]) for j in range(X.shape[1])]),
        P[inner].T), h, n)
    out.residuals["dI/dt=F"] = FluxResidual("dI/dt=F", resid(cdiff(I), F[inner]), h, n)
    out.residuals["dF/dt=2H+D"] = FluxResidual("dF/dt=2H+D", resid(
        cdiff(F), 2.0 * H[inner] + D[inner] + K[inner], 2.0 * H[inner]), h, n)
    out.residuals["dZ/dt+tD=0"] = FluxResidual("dZ/dt+tD=0", resid(
        cdiff(Z), -t[inner] * (D[inner] + K[inner]), F[inner], t[inner] * 2.0 * H[inner]), h, n)
    return out


@dataclass
class FluxOrder:
    law: str
    spacings: list
    residuals: list
    order: float


def flux_law_orders(records, strides=(1, 2, 4), floor: float = 1e-10, korteweg=None) -> dict:
    """Observed convergence order of each flux-law residual in the observation spacing.

    Laws whose residual sits at the rounding floor for every spacing are
    reported with order ``inf`` (they hold exactly for the discrete flow).
    """
    tables = [check_flux_laws(records, s, korteweg) for s in strides]
    out = {}
    for law in tables[0].residuals:
        hs = np.array([tb.spacing for tb in tables])
        rs = np.array([tb[law] for tb in tables])
        if np.all(rs <= floor):
            order = math.inf
        else:
            order = float(np.polyfit(np.log(hs), np.log(np.maximum(rs, 1e-300)), 1)[0])
        out[law] = FluxOrder(law, hs.tolist(), rs.tolist(), order)
    return out


def max_relative_drift(values, reference: float | None = None) -> float:
    """max_t |q(t) - q(0)| / |reference or q(0)|; absolute if the reference vanishes."""
    v = np.asarray(values, dtype=float)
    dev = np.max(np.abs(v - v[0]), axis=0)
    ref = abs(reference) if reference is not None else np.abs(v[0])
    ref = np.where(ref > 0, ref, 1.0)
    return float(np.max(dev / ref))
