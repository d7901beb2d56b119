"""Command-line driver.

Exit codes: 0 success, 1 crash, 2 validation error, 3 solver breakdown,
4 assertion failure, 5 sweep finished with some failed cells.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import ConfigError, RunConfig, expand, read_config, sweep_axes
from .runner import BreakdownDetected, CheckFailed, run_config

EXIT_OK, EXIT_CRASH, EXIT_VALIDATION, EXIT_BREAKDOWN, EXIT_ASSERTION, EXIT_PARTIAL = 0, 1, 2, 3, 4, 5
STATUS_CODES = {"ok": EXIT_OK, "crash": EXIT_CRASH, "validation": EXIT_VALIDATION,
                "breakdown": EXIT_BREAKDOWN, "assertion": EXIT_ASSERTION}
ENV_OUT = "QHDLAB_OUT"

EXPERIMENTS = {
    "nls": "split-step NLS/GP run with conserved-quantity diagnostics",
    "euler": "compressible Euler (symmetric form) with breakdown monitors",
    "qhd": "extended QHD (rho, z = v + i w)",
    "korteweg": "extended Korteweg system with constant or QHD capillarity",
    "linear": "exact linearised QHD waves about (1, 0)",
    "kdv": "KdV equation (left or right moving) by integrating-factor RK4",
    "harness:euler_limit": "NLS vs Euler error at one eps (sweep eps for an order fit)",
    "harness:wave_approx": "extended QHD vs acoustic wave error curve",
    "harness:dispersion": "measured frequency of one excited mode",
    "harness:kdv": "GP transonic run vs KdV in the slow variables",
    "harness:weakqhd": "distributional QHD residuals of an eps = 1 NLS run",
}


def _error_record(kind: str, message: str, **extra) -> dict:
    return {"error": kind, "message": message, **extra}


def _emit(record: dict, out: Path | None) -> None:
    print(json.dumps(record), file=sys.stderr)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "error.json").write_text(json.dumps(record, indent=2))


def default_out(config_path: str | None, cfg_out: str | None = None) -> Path:
    if cfg_out:
        return Path(cfg_out)
    root = Path(os.environ.get(ENV_OUT, "qhdlab-out"))
    stem = Path(config_path).stem if config_path else "run"
    return root / stem


def _apply_seed(raw: dict, seed: int | None) -> dict:
    if seed is not None:
        raw.setdefault("run", {})["seed"] = str(seed)
    return raw


def execute(raw: dict, out: Path, override_cfl: bool = False) -> tuple:
    """Run one scalar config; returns (status, payload). Never raises."""
    try:
        cfg = RunConfig.from_raw(raw)
        result = run_config(cfg, out, override_cfl)
        return "ok", result
    except ConfigError as exc:
        rec = _error_record("validation", str(exc))
        _emit(rec, out)
        return "validation", rec
    except BreakdownDetected as exc:
        rec = _error_record("breakdown", str(exc), report=exc.report.to_dict())
        _emit(rec, out)
        return "breakdown", rec
    except CheckFailed as exc:
        rec = _error_record("assertion", str(exc), result=exc.result)
        _emit(rec, out)
        return "assertion", rec
    except Exception as exc:  # noqa: BLE001 - crash record for any other failure
        rec = _error_record("crash", f"{type(exc).__name__}: {exc}",
                            traceback=traceback.format_exc())
        _emit(rec, out)
        return "crash", rec


# ---------------------------------------------------------------- commands


def cmd_run(args) -> int:
    try:
        raw = _apply_seed(read_config(args.config), args.seed)
        if sweep_axes(raw):
            raise ConfigError("config contains lists; use the sweep command")
    except ConfigError as exc:
        _emit(_error_record("validation", str(exc)), None)
        return EXIT_VALIDATION
    out = Path(args.out) if args.out else default_out(args.config, raw.get("output", {}).get("dir"))
    status, payload = execute(raw, out, args.override_cfl)
    if status == "ok":
        print(json.dumps({"status": "ok", "out": str(out)}))
    return STATUS_CODES[status]


def _cell_job(job):
    raw, out, override = job
    status, payload = execute(raw, Path(out), override)
    return status, payload


FIT_HARNESSES = ("harness:euler_limit", "harness:kdv")


def aggregate(cells, statuses, payloads, out: Path) -> dict:
    """summary.csv over cells, plus one order fit in eps per group of cells that
    differ only in ``run.eps`` (convergence harnesses only)."""
    from .asymptotics import fit_order, write_fit

    keys = sorted({k for params, _ in cells for k in params})
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cell"] + keys + ["status", "error"])
        for i, ((params, _), st, pl) in enumerate(zip(cells, statuses, payloads)):
            err = pl.get("error") if st == "ok" and isinstance(pl, dict) else ""
            w.writerow([i] + [params.get(k, "") for k in keys] + [st, err])
    fits = {}
    groups = {}
    kind = cells[0][1].get("run", {}).get("kind", "").strip() if cells else ""
    if kind not in FIT_HARNESSES:
        return fits
    for (params, _), st, pl in zip(cells, statuses, payloads):
        if st != "ok" or "run.eps" not in params or not isinstance(pl.get("error"), float):
            continue
        rest = tuple(sorted((k, v) for k, v in params.items() if k != "run.eps"))
        groups.setdefault(rest, []).append((float(params["run.eps"]), pl["error"]))
    for j, (rest, pairs) in enumerate(sorted(groups.items())):
        pairs.sort()
        try:
            fit = fit_order([p[0] for p in pairs], [p[1] for p in pairs], min_span=3.0,
                            **dict(rest))
        except ValueError:
            continue
        name = "fit" if len(groups) == 1 else f"fit_{j}"
        write_fit(fit, out / f"{name}.csv", out / f"{name}.json")
        fits[name] = fit.to_json()
    return fits


def cmd_sweep(args) -> int:
    try:
        raw = _apply_seed(read_config(args.config), args.seed)
        if not sweep_axes(raw):
            raise ConfigError("sweep config has no list-valued entries")
        cells = expand(raw)
    except ConfigError as exc:
        _emit(_error_record("validation", str(exc)), None)
        return EXIT_VALIDATION
    out = Path(args.out) if args.out else default_out(args.config, raw.get("output", {}).get("dir"))
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(cell, str(out / f"cell_{i:03d}"), args.override_cfl) for i, (_, cell) in enumerate(cells)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_cell_job, jobs))
    else:
        results = [_cell_job(j) for j in jobs]
    statuses = [r[0] for r in results]
    payloads = [r[1] for r in results]
    fits = aggregate(cells, statuses, payloads, out)
    n_fail = sum(s != "ok" for s in statuses)
    report = {"cells": len(cells), "failed": n_fail, "statuses": statuses, "fits": fits}
    (out / "sweep.json").write_text(json.dumps(report, indent=2))
    print(json.dumps({"status": "ok" if n_fail == 0 else "partial", "out": str(out),
                      "failed": n_fail}))
    if n_fail == 0:
        return EXIT_OK
    return EXIT_PARTIAL if n_fail < len(cells) else STATUS_CODES[statuses[0]]


def cmd_verify(args) -> int:
    from .suites import SUITES, run_suite

    if args.suite not in SUITES:
        print(f"qhdlab verify: unknown suite {args.suite!r}; choose from {', '.join(sorted(SUITES))}",
              file=sys.stderr)
        return EXIT_VALIDATION
    report = run_suite(args.suite)
    for line in report["lines"]:
        print(line)
    out = Path(args.out) if args.out else Path(os.environ.get(ENV_OUT, "qhdlab-out")) / "verify"
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{args.suite}.json"
    path.write_text(json.dumps(report, indent=2))
    print(f"{'PASS' if report['passed'] else 'FAIL'} {args.suite} -> {path}")
    return EXIT_OK if report["passed"] else EXIT_ASSERTION


def cmd_list(args) -> int:
    from .data import family_names
    from .suites import SUITES

    print("experiments:")
    for k, v in EXPERIMENTS.items():
        print(f"  {k:22s} {v}")
    print("suites:")
    for k in SUITES:
        print(f"  {k}")
    print("data families:")
    print("  " + ", ".join(family_names() + ["kdv_soliton", "sech2", "right_moving"]))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qhdlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, metavar="PATH")
        sp.add_argument("--out", metavar="DIR",
                        help=f"output directory (default ${ENV_OUT}/<config name>)")
        sp.add_argument("--seed", type=int, metavar="S")
        sp.add_argument("--override-cfl", action="store_true",
                        help="run even if dt exceeds the stability limit")

    sp = sub.add_parser("run", help="run one experiment")
    common(sp)
    sp.set_defaults(func=cmd_run)
    sp = sub.add_parser("sweep", help="Cartesian sweep over list-valued entries")
    common(sp)
    sp.add_argument("--jobs", type=int, default=1, metavar="N")
    sp.set_defaults(func=cmd_sweep)
    sp = sub.add_parser("verify", help="run a canned verification suite")
    sp.add_argument("suite")
    common(sp, config=False)
    sp.set_defaults(func=cmd_verify)
    sp = sub.add_parser("list-experiments", help="list kinds, suites and data families")
    sp.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return EXIT_CRASH
    except Exception as exc:  # noqa: BLE001
        _emit(_error_record("crash", f"{type(exc).__name__}: {exc}",
                            traceback=traceback.format_exc()), None)
        return EXIT_CRASH
