"""Command-line scenario runner and verification driver.

Usage::

    relsym run <config.json> [--out DIR] [--seed N]
    relsym verify <suite> [--samples N] [--seed N]

Exit codes: 0 success, 1 bad config or unknown suite, 2 inadmissible data
(rejected before any compute), 3 failure during the run.

A config is a JSON object with a ``name`` and the blocks ``eos``, ``grid``,
``initial``, ``run`` and optionally ``verify``; unknown keys are errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .eos import EquationOfState
from .errors import AdmissibilityError, CertificateSearchError, RelsymError
from .lorentz import Boost
from .solver.fields import FluidField
from .solver.grid import Grid
from .solver.io import artifact_dir, write_report, write_trajectory
from .solver.pipeline import solve_boosted, solve_lab, solve_nonrelativistic
from .verify import SUITES, run_suites

__all__ = ["ConfigError", "ScenarioConfig", "load_config", "build_initial", "run", "verify", "main"]

log = logging.getLogger("relsym")

EXIT_OK, EXIT_CONFIG, EXIT_ADMISSIBILITY, EXIT_RUNTIME = 0, 1, 2, 3

FRAMES = ("lab", "boosted", "galilean")
PROFILES = ("constant", "gaussian-bump", "riemann-1d")

_BLOCK_KEYS = {
    "eos": {"k": 1.0, "gamma": 2.0, "eps": 0.0, "rho_max": None},
    "grid": {"n": None, "extent": None, "cells": None, "boundary": "periodic"},
    "run": {"T": None, "cfl": 0.4, "output_times": None, "frame": "lab", "shift": None,
            "grid_motion": "lab", "dt": None},
    "verify": {"suites": [], "samples": 1000, "seed": 0},
}
_PROFILE_KEYS = {
    "constant": {"rho": None, "velocity": None},
    "gaussian-bump": {"base": 0.0, "amplitude": None, "width": None, "center": None,
                      "velocity": None, "radius": None, "taper": None},
    "riemann-1d": {"rho_left": None, "rho_right": None, "u_left": 0.0, "u_right": 0.0,
                   "position": 0.0, "smoothing": 0.0},
}


class ConfigError(RelsymError, ValueError):
    """Malformed config; the message names the field and, when known, its line."""


@dataclass
class ScenarioConfig:
    name: str
    eos: dict
    grid: dict
    initial: dict
    run: dict
    verify: dict
    source: str = ""


def _line_of(text: str, key: str) -> str:
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return f" (line {i})"
    return ""


def _block(raw: dict, name: str, defaults: dict, text: str, required: bool = True) -> dict:
    if name not in raw:
        if required:
            raise ConfigError(f"missing block '{name}'")
        return dict(defaults)
    blk = raw[name]
    if not isinstance(blk, dict):
        raise ConfigError(f"block '{name}' must be an object{_line_of(text, name)}")
    unknown = sorted(set(blk) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown key '{name}.{unknown[0]}'{_line_of(text, unknown[0])}")
    out = dict(defaults)
    out.update(blk)
    for k, v in out.items():
        if v is None and defaults[k] is None and k in _REQUIRED.get(name, ()):
            raise ConfigError(f"missing required key '{name}.{k}'")
    return out


_REQUIRED = {
    "grid": ("n", "extent", "cells"),
    "run": ("T",),
    "constant": ("rho",),
    "gaussian-bump": ("amplitude", "width"),
    "riemann-1d": ("rho_left", "rho_right"),
}


def _number(blk: dict, path: str, key: str, text: str, positive: bool = False,
            nonneg: bool = False, optional: bool = False):
    v = blk[key]
    if v is None and optional:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"'{path}.{key}' must be a finite number{_line_of(text, key)}")
    if positive and not v > 0:
        raise ConfigError(f"'{path}.{key}' must be positive{_line_of(text, key)}")
    if nonneg and v < 0:
        raise ConfigError(f"'{path}.{key}' must be non-negative{_line_of(text, key)}")
    return float(v)


def _vector(blk: dict, path: str, key: str, n: int, text: str, default=None):
    v = blk[key]
    if v is None:
        return default
    if isinstance(v, (int, float)) and not isinstance(v, bool) and n == 1:
        v = [v]
    if (not isinstance(v, list) or len(v) != n
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
        raise ConfigError(f"'{path}.{key}' must be a list of {n} numbers{_line_of(text, key)}")
    return np.array(v, dtype=float)


def load_config(path, seed: int | None = None) -> ScenarioConfig:
    """Read and validate a scenario file; raise :class:`ConfigError` on any problem."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - {"name", "eos", "grid", "initial", "run", "verify"})
    if unknown:
        raise ConfigError(f"unknown top-level key '{unknown[0]}'{_line_of(text, unknown[0])}")
    name = raw.get("name")
    if not isinstance(name, str) or not name or "/" in name or name.startswith("."):
        raise ConfigError("'name' must be a non-empty string usable as a directory name")

    eos = _block(raw, "eos", _BLOCK_KEYS["eos"], text)
    for key in ("k", "gamma", "eps"):
        _number(eos, "eos", key, text)
    _number(eos, "eos", "rho_max", text, positive=True, optional=True)

    grid = _block(raw, "grid", _BLOCK_KEYS["grid"], text)
    if grid["n"] not in (1, 2) or isinstance(grid["n"], bool):
        raise ConfigError(f"'grid.n' must be 1 or 2{_line_of(text, 'n')}")
    n = grid["n"]
    ext, cells = grid["extent"], grid["cells"]
    if isinstance(cells, int) and n == 1:
        cells = grid["cells"] = [cells]
    if (isinstance(ext, list) and n == 1 and len(ext) == 2
            and all(isinstance(x, (int, float)) for x in ext)):
        ext = grid["extent"] = [ext]
    if not (isinstance(ext, list) and len(ext) == n and all(
            isinstance(e, list) and len(e) == 2 and all(isinstance(x, (int, float)) for x in e) for e in ext)):
        raise ConfigError(f"'grid.extent' must list {n} [lo, hi] pairs{_line_of(text, 'extent')}")
    if not (isinstance(cells, list) and len(cells) == n
            and all(isinstance(c, int) and not isinstance(c, bool) for c in cells)):
        raise ConfigError(f"'grid.cells' must list {n} integers{_line_of(text, 'cells')}")
    if grid["boundary"] not in ("periodic", "vacuum"):
        raise ConfigError(f"'grid.boundary' must be 'periodic' or 'vacuum'{_line_of(text, 'boundary')}")

    if "initial" not in raw or not isinstance(raw["initial"], dict):
        raise ConfigError("missing block 'initial'")
    profile = raw["initial"].get("profile")
    if profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r}; choose from {PROFILES}{_line_of(text, 'profile')}")
    params = {k: v for k, v in raw["initial"].items() if k != "profile"}
    initial = _block({"initial": params}, "initial", _PROFILE_KEYS[profile], text)
    for k in _REQUIRED[profile]:
        if initial[k] is None:
            raise ConfigError(f"missing required key 'initial.{k}' for profile {profile}")
    initial["profile"] = profile

    run_blk = _block(raw, "run", _BLOCK_KEYS["run"], text)
    _number(run_blk, "run", "T", text, nonneg=True)
    _number(run_blk, "run", "cfl", text, positive=True)
    _number(run_blk, "run", "dt", text, positive=True, optional=True)
    if run_blk["frame"] not in FRAMES:
        raise ConfigError(f"'run.frame' must be one of {FRAMES}{_line_of(text, 'frame')}")
    if run_blk["grid_motion"] not in ("lab", "static"):
        raise ConfigError(f"'run.grid_motion' must be 'lab' or 'static'{_line_of(text, 'grid_motion')}")
    ot = run_blk["output_times"]
    if ot is not None and not (isinstance(ot, list) and all(
            isinstance(t, (int, float)) and not isinstance(t, bool) for t in ot)):
        raise ConfigError(f"'run.output_times' must be a list of numbers{_line_of(text, 'output_times')}")

    ver = _block(raw, "verify", _BLOCK_KEYS["verify"], text, required=False)
    suites = ver["suites"]
    if isinstance(suites, str):
        suites = ver["suites"] = [suites]
    if not isinstance(suites, list) or any(s not in SUITES and s != "all" for s in suites):
        raise ConfigError(f"'verify.suites' must list suites from {sorted(SUITES)} or 'all'")
    for key in ("samples", "seed"):
        if not isinstance(ver[key], int) or isinstance(ver[key], bool) or ver[key] < 0:
            raise ConfigError(f"'verify.{key}' must be a non-negative integer{_line_of(text, key)}")
    if seed is not None:
        ver["seed"] = int(seed)
    return ScenarioConfig(name, eos, grid, initial, run_blk, ver, str(path))


def build_eos(cfg: ScenarioConfig) -> EquationOfState:
    e = cfg.eos
    return EquationOfState(e["k"], e["gamma"], e["eps"], e["rho_max"])


def build_grid(cfg: ScenarioConfig) -> Grid:
    g = cfg.grid
    try:
        return Grid(tuple(tuple(float(x) for x in e) for e in g["extent"]), tuple(g["cells"]), g["boundary"])
    except RelsymError as exc:
        raise ConfigError(f"grid: {exc}") from exc


def build_initial(cfg: ScenarioConfig, eos: EquationOfState, grid: Grid) -> FluidField:
    """Evaluate the named initial profile on the grid."""
    p = cfg.initial
    n = grid.n
    x = grid.coordinates()
    prof = p["profile"]
    text = Path(cfg.source).read_text() if cfg.source and Path(cfg.source).exists() else ""
    if prof == "constant":
        rho = np.full(grid.shape, _number(p, "initial", "rho", text, nonneg=True))
        u = np.zeros((n,) + grid.shape)
        vel = _vector(p, "initial", "velocity", n, text, np.zeros(n))
        u += vel.reshape((n,) + (1,) * n)
    elif prof == "gaussian-bump":
        base = _number(p, "initial", "base", text, nonneg=True)
        amp = _number(p, "initial", "amplitude", text, nonneg=True)
        width = _number(p, "initial", "width", text, positive=True)
        center = _vector(p, "initial", "center", n, text, np.zeros(n))
        vel = _vector(p, "initial", "velocity", n, text, np.zeros(n))
        d = x - center.reshape((n,) + (1,) * n)
        r2 = np.sum(d * d, axis=0)
        rho = amp * np.exp(-r2 / width**2)
        R = _number(p, "initial", "radius", text, positive=True, optional=True)
        if R is not None:
            # power chosen so that w vanishes quadratically at the edge
            taper = _number(p, "initial", "taper", text, positive=True, optional=True)
            taper = 4.0 / (eos.gamma - 1.0) if taper is None else taper
            rho = rho * np.clip(1.0 - r2 / R**2, 0.0, None) ** taper
        rho = base + rho
        u = np.zeros((n,) + grid.shape)
        if R is None:
            u += vel.reshape((n,) + (1,) * n)
        else:
            u += vel.reshape((n,) + (1,) * n) * (r2 < R**2)
    else:
        if n != 1:
            raise ConfigError("profile riemann-1d needs grid.n = 1")
        rl = _number(p, "initial", "rho_left", text, nonneg=True)
        rr = _number(p, "initial", "rho_right", text, nonneg=True)
        ul = _number(p, "initial", "u_left", text)
        ur = _number(p, "initial", "u_right", text)
        x0 = _number(p, "initial", "position", text)
        s = _number(p, "initial", "smoothing", text, nonneg=True)
        xi = x[0] - x0
        blend = 0.5 * (1.0 + np.tanh(xi / s)) if s > 0 else (xi > 0).astype(float)
        rho = rl + (rr - rl) * blend
        u = (ul + (ur - ul) * blend)[None]
    return FluidField(grid, rho, u)


def _solve(cfg: ScenarioConfig, eos: EquationOfState, initial: FluidField):
    r = cfg.run
    T = float(r["T"])
    kw = dict(output_times=r["output_times"], cfl=float(r["cfl"]), dt=r["dt"])
    frame = r["frame"]
    n = initial.grid.n
    shift = None if r["shift"] is None else np.asarray(r["shift"], dtype=float)
    if shift is not None and shift.shape != (n,):
        raise ConfigError(f"'run.shift' must list {n} numbers")
    if frame == "lab":
        return solve_lab(eos, initial, T, **kw)
    if frame == "boosted":
        if eos.eps <= 0:
            raise ConfigError("frame 'boosted' needs eos.eps > 0")
        boost = None if shift is None else Boost(shift, eos.eps)
        return solve_boosted(eos, initial, T, grid_motion=r["grid_motion"], boost=boost, **kw)
    if eos.eps != 0:
        raise ConfigError("frame 'galilean' needs eos.eps = 0")
    if shift is None:
        shift = np.zeros(n)
        shift[0] = max(2.0 * float(np.max(initial.speed)), 1.0)
    return solve_nonrelativistic(eos, initial, T, shift, grid_motion=r["grid_motion"], **kw)


def run(config_path, out: str | None = None, seed: int | None = None) -> int:
    """Execute a scenario file and write its artifacts; return the exit code."""
    try:
        cfg = load_config(config_path, seed)
        grid = build_grid(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(out) if out is not None else Path("out") / cfg.name
    try:
        with artifact_dir(out_dir) as stage:
            try:
                eos = build_eos(cfg)
                initial = build_initial(cfg, eos, grid)
                initial.check_admissible(eos)
            except ConfigError:
                raise
            except RelsymError as exc:
                raise AdmissibilityError(str(exc)) from exc
            sol = _solve(cfg, eos, initial)
            write_trajectory(stage, eos, sol.trajectory)
            write_report(stage, sol.report)
            if cfg.verify["suites"]:
                reports = []
                for s in cfg.verify["suites"]:
                    reports += run_suites(s, cfg.verify["samples"], cfg.verify["seed"])
                text = "".join(r.to_text() for r in reports)
                (stage / "verify.txt").write_text(text)
                if not all(r.passed for r in reports):
                    sys.stdout.write(text)
                    raise RelsymError("verification suite failed")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AdmissibilityError, CertificateSearchError) as exc:
        print(f"inadmissible: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except (RelsymError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {out_dir}")
    return EXIT_OK


def verify(suite: str, samples: int = 1000, seed: int = 0, stream=None) -> int:
    """Run a property suite (or ``all``), print the report, return the exit code."""
    stream = stream or sys.stdout
    if suite != "all" and suite not in SUITES:
        print(f"unknown suite {suite!r}; choose from {sorted(SUITES) + ['all']}", file=sys.stderr)
        return EXIT_CONFIG
    if samples < 1:
        print("--samples must be positive", file=sys.stderr)
        return EXIT_CONFIG
    reports = run_suites(suite, samples, seed)
    for r in reports:
        stream.write(r.to_text())
    ok = all(r.passed for r in reports)
    stream.write(f"overall: {'pass' if ok else 'FAIL'} ({len(reports)} suite(s), seed {seed})\n")
    return EXIT_OK if ok else EXIT_RUNTIME


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relsym", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    pr = sub.add_parser("run", help="run a scenario config")
    pr.add_argument("config")
    pr.add_argument("--out", default=None, help="output directory (default ./out/<name>/)")
    pr.add_argument("--seed", type=int, default=None, help="override verify.seed")
    pv = sub.add_parser("verify", help="run a property suite")
    pv.add_argument("suite", help=f"one of {', '.join(list(SUITES) + ['all'])}")
    pv.add_argument("--samples", type=int, default=1000)
    pv.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    if args.command == "run":
        return run(args.config, args.out, args.seed)
    return verify(args.suite, args.samples, args.seed)


if __name__ == "__main__":
    sys.exit(main())
