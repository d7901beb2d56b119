"""Experiment configuration: INI-style text with sections.

Example::

    [run]
    kind = nls              # nls, euler, qhd, korteweg, linear, kdv, harness:<name>
    eps = 0.5
    seed = 0

    [grid]
    dim = 1
    n = 512
    length = 40

    [law]
    name = cubic            # cubic, gross_pitaevskii, power
    sigma =                 # power law only
    capillarity = constant  # korteweg only: constant or qhd
    kappa = 0.01

    [data]
    family = gaussian
    width = 1.0             # any further keys are family parameters

    [time]
    T = 1.0
    dt = 1e-3
    observe_every = 0.01
    snapshot_every = 0.5

    [tolerances]
    gradient_ratio = 5

Any value may be a comma-separated list; :func:`expand` turns a config with
lists into the Cartesian product of scalar configs (one sweep cell each).
"""

from __future__ import annotations

import configparser
import copy
import itertools
from dataclasses import dataclass, field
from pathlib import Path

from .grid import SpectralGrid, make_grid
from .laws import (CapillarityLaw, NonlinearityLaw, constant_capillarity, embedding_ok,
                   qhd_capillarity)

KINDS = ("nls", "euler", "qhd", "korteweg", "linear", "kdv")
HARNESSES = ("euler_limit", "wave_approx", "dispersion", "kdv", "weakqhd")


class ConfigError(ValueError):
    """Invalid configuration (exit status 2)."""


def read_config(path) -> dict:
    """Raw ``{section: {key: text}}`` mapping of a config file."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return {s: dict(cp[s]) for s in cp.sections()}


def write_config(raw: dict, path) -> None:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    for sec, items in raw.items():
        cp[sec] = {k: str(v) for k, v in items.items()}
    with open(path, "w") as fh:
        cp.write(fh)


def _split(text: str) -> list:
    return [p.strip() for p in str(text).split(",") if p.strip()]


def sweep_axes(raw: dict) -> dict:
    """``{(section, key): [values]}`` for every list-valued entry."""
    axes = {}
    for sec, items in raw.items():
        for key, val in items.items():
            if "," in str(val):
                parts = _split(val)
                if not parts:
                    raise ConfigError(f"[{sec}] {key}: empty list")
                axes[(sec, key)] = parts
    return axes


def expand(raw: dict) -> list:
    """Cartesian product over list-valued entries: a list of (params, scalar raw config)."""
    axes = sweep_axes(raw)
    cells = []
    keys = list(axes)
    for combo in itertools.product(*(axes[k] for k in keys)):
        cell = copy.deepcopy(raw)
        params = {}
        for (sec, key), val in zip(keys, combo):
            cell[sec][key] = val
            params[f"{sec}.{key}"] = val
        cells.append((params, cell))
    return cells


@dataclass
class RunConfig:
    kind: str
    harness: str | None
    eps: float
    dim: int
    n: int
    length: float
    law_name: str
    sigma: float | None
    capillarity: str | None
    kappa: float | None
    family: str
    data_params: dict
    T: float
    dt: float | None
    observe_every: float | None
    snapshot_every: float | None
    tolerances: dict
    seed: int = 0
    out: str | None = None
    raw: dict = field(default_factory=dict)

    # ------------------------------------------------------- construction

    @classmethod
    def from_raw(cls, raw: dict) -> "RunConfig":
        raw = {s: dict(v) for s, v in raw.items()}
        if sweep_axes(raw):
            raise ConfigError("config contains lists; use the sweep command")

        def get(sec, key, conv=str, default=None, required=False):
            val = raw.get(sec, {}).get(key, "")
            if str(val).strip() == "":
                if required:
                    raise ConfigError(f"missing [{sec}] {key}")
                return default
            try:
                return conv(val)
            except ValueError as exc:
                raise ConfigError(f"[{sec}] {key}: cannot parse {val!r}") from exc

        kind = get("run", "kind", required=True).strip()
        harness = None
        if kind.startswith("harness:"):
            harness = kind.split(":", 1)[1]
            if harness not in HARNESSES:
                raise ConfigError(f"unknown harness {harness!r}; choose from {HARNESSES}")
        elif kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {kind!r}; choose from {KINDS} "
                              f"or harness:<{'|'.join(HARNESSES)}>")
        data = dict(raw.get("data", {}))
        family = data.pop("family", "").strip()
        if not family:
            raise ConfigError("missing [data] family")
        params = {}
        for k, v in data.items():
            try:
                params[k] = float(v)
            except ValueError:
                params[k] = v.strip()
        tol = {}
        for k, v in raw.get("tolerances", {}).items():
            try:
                tol[k] = float(v)
            except ValueError as exc:
                raise ConfigError(f"[tolerances] {k}: not a number") from exc
        cfg = cls(
            kind=kind, harness=harness,
            eps=get("run", "eps", float, 1.0),
            dim=get("grid", "dim", int, 1), n=get("grid", "n", int, required=True),
            length=get("grid", "length", float, required=True),
            law_name=get("law", "name", str, "cubic").strip(),
            sigma=get("law", "sigma", float), capillarity=get("law", "capillarity", str),
            kappa=get("law", "kappa", float),
            family=family, data_params=params,
            T=get("time", "T", float, required=True), dt=get("time", "dt", float),
            observe_every=get("time", "observe_every", float),
            snapshot_every=get("time", "snapshot_every", float),
            tolerances=tol, seed=get("run", "seed", int, 0), out=get("output", "dir", str),
            raw=raw)
        cfg.validate_static()
        return cfg

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        return cls.from_raw(read_config(path))

    # --------------------------------------------------------- validation

    def validate_static(self) -> None:
        if self.eps < 0 or (self.eps == 0 and self.kind not in ("euler", "linear")):
            raise ConfigError(f"eps must be positive for kind {self.kind}")
        if self.T <= 0:
            raise ConfigError("T must be positive")
        if self.dt is not None and self.dt <= 0:
            raise ConfigError("dt must be positive")
        self.grid()
        self.law()
        if self.harness == "weakqhd":
            if self.law_name == "power" and self.sigma is None:
                raise ConfigError("[law] power law needs sigma")
            if self.law_name == "power" and not embedding_ok(self.sigma, self.dim):
                raise ConfigError(
                    f"sigma={self.sigma:g} in d={self.dim} violates the embedding hypothesis "
                    f"W^{{1,1}}(R^d) -> L^(sigma+1)(R^d) required by the weak QHD construction")
            if self.eps != 1.0:
                raise ConfigError("the weakqhd harness works at eps = 1")
        if self.kind == "korteweg":
            self.capillarity_law()

    def check_cfl(self, limit: float, what: str, override: bool) -> None:
        if self.dt is not None and self.dt > limit * (1 + 1e-9) and not override:
            raise ConfigError(f"dt={self.dt:g} exceeds the {what} limit {limit:.3g}; "
                              "pass --override-cfl to run anyway")

    # ------------------------------------------------------------- builders

    def grid(self) -> SpectralGrid:
        try:
            return make_grid(self.dim, self.n, self.length)
        except ValueError as exc:
            raise ConfigError(f"[grid] {exc}") from exc

    def law(self) -> NonlinearityLaw:
        try:
            return NonlinearityLaw(self.law_name, 1.0 if self.sigma is None else self.sigma)
        except ValueError as exc:
            raise ConfigError(f"[law] {exc}") from exc

    def capillarity_law(self) -> CapillarityLaw:
        name = (self.capillarity or "constant").strip()
        try:
            if name == "qhd":
                return qhd_capillarity(self.eps)
            if name == "constant":
                if self.kappa is None:
                    raise ConfigError("[law] kappa is required for constant capillarity")
                return constant_capillarity(self.kappa)
        except ValueError as exc:
            raise ConfigError(f"[law] {exc}") from exc
        raise ConfigError(f"[law] unknown capillarity {name!r}")

    def to_dict(self) -> dict:
        return copy.deepcopy(self.raw)


def load(path) -> RunConfig:
    return RunConfig.from_file(Path(path))
