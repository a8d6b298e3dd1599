"""Command line front-end.

Usage::

    stcrystal run CONFIG          # .toml config, or a manifest.json from an earlier run
    stcrystal validate CONFIG
    stcrystal list-experiments

Exit codes: 0 success, 2 configuration error, 3 numerical invariant violation.
``STCRYSTAL_OUTPUT_DIR`` overrides the configured output directory.

Config layout (TOML, strict: unknown keys are rejected)::

    experiment = "evolve"
    seed = 7
    output_dir = "runs/evolve"

    [units]      # hbar, c, m
    [grid]       # nx, nt, lx, lt
    [params]     # experiment-specific, see ``list-experiments``
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from .errors import ConfigError, InvariantViolation
from .experiments import EXPERIMENTS
from .grid import GridSpec, Units
from .io import sha256

OUTPUT_ENV = "STCRYSTAL_OUTPUT_DIR"
_TOP_KEYS = {"experiment", "seed", "output_dir", "units", "grid", "params"}
_UNIT_KEYS = {"hbar", "c", "m"}
_GRID_KEYS = {"nx", "nt", "lx", "lt"}


@dataclass
class RunConfig:
    experiment: str
    seed: int
    output_dir: Path
    units: Units
    grid: GridSpec
    params: dict

    def echo(self) -> dict:
        """Fully explicit config; re-parses to an equivalent ``RunConfig``."""
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "output_dir": str(self.output_dir),
            "units": {"hbar": self.units.hbar, "c": self.units.c, "m": self.units.m},
            "grid": self.grid.to_dict(),
            "params": self.params,
        }


def _locate(text: str, section: str | None, key: str) -> str:
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        head = re.match(r"\s*\[([^\]]+)\]", line)
        if head:
            current = head.group(1).strip()
            continue
        if current == section and re.match(rf"\s*{re.escape(key)}\s*=", line):
            return f"line {lineno}: "
    return ""


def _same_kind(default, value) -> bool:
    if isinstance(default, bool) or isinstance(value, bool):
        return isinstance(default, bool) == isinstance(value, bool)
    if isinstance(default, float):
        return isinstance(value, (int, float))
    if isinstance(default, int):
        return isinstance(value, int)
    if isinstance(default, list):
        return isinstance(value, list)
    if default is None:
        return True
    return isinstance(value, type(default))


def parse_config(data: dict, text: str = "", source: str = "<config>") -> RunConfig:
    """Validate a decoded config table strictly and merge defaults."""
    for key in data:
        if key not in _TOP_KEYS:
            raise ConfigError(f"{source}: {_locate(text, None, key)}unknown key {key!r}")
    exp = data.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"{source}: {_locate(text, None, 'experiment')}unknown or missing "
                          f"experiment {exp!r}; choose from {sorted(EXPERIMENTS)}")
    _, grid_default, param_default = EXPERIMENTS[exp]

    def table(name, allowed):
        tbl = data.get(name, {})
        if not isinstance(tbl, dict):
            raise ConfigError(f"{source}: {_locate(text, None, name)}[{name}] must be a table")
        for key in tbl:
            if key not in allowed:
                raise ConfigError(f"{source}: {_locate(text, name, key)}unknown key {key!r} in [{name}]")
        return tbl

    try:
        units = Units(**table("units", _UNIT_KEYS))
        grid = GridSpec(**{**grid_default, **table("grid", _GRID_KEYS)})
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{source}: {exc}") from exc
    params = dict(param_default)
    for key, value in table("params", set(param_default)).items():
        if not _same_kind(param_default[key], value):
            raise ConfigError(f"{source}: {_locate(text, 'params', key)}parameter {key!r} "
                              f"expects {type(param_default[key]).__name__}, got {value!r}")
        params[key] = float(value) if isinstance(param_default[key], float) else value
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"{source}: {_locate(text, None, 'seed')}seed must be an integer")
    out = data.get("output_dir", f"runs/{exp}")
    return RunConfig(exp, seed, Path(out), units, grid, params)


def load_config(path: str | Path) -> RunConfig:
    """Read a TOML config or the ``config`` entry of a run manifest."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    if path.suffix == ".json":
        try:
            data = json.loads(text)["config"]
        except (json.JSONDecodeError, KeyError) as exc:
            raise ConfigError(f"{path}: not a run manifest ({exc})") from exc
        return parse_config(data, "", str(path))
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(data, text, str(path))


def _versions() -> dict:
    from importlib.metadata import PackageNotFoundError, version

    try:
        pkg = version("artifact")
    except PackageNotFoundError:
        pkg = "unknown"
    return {"package": pkg, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__}


def run(config: RunConfig) -> dict:
    """Execute an experiment and write its outputs plus ``manifest.json``."""
    func = EXPERIMENTS[config.experiment][0]
    outdir = Path(os.environ.get(OUTPUT_ENV) or config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "config.toml").write_text(tomli_w.dumps(config.echo()))
    rng = np.random.default_rng(config.seed)
    start = time.perf_counter()
    summary = func(config.params, config.grid, config.units, outdir, rng)
    wall = time.perf_counter() - start
    checksums = {
        p.name: sha256(p.read_bytes())
        for p in sorted(outdir.iterdir())
        if p.is_file() and p.name != "manifest.json"
    }
    manifest = {
        "config": config.echo(),
        "seed": config.seed,
        "versions": _versions(),
        "checksums": checksums,
        "wall_time_s": wall,
        "summary": summary,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=float) + "\n")
    return manifest


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="stcrystal", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment from a config or manifest")
    p_run.add_argument("config")
    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config")
    sub.add_parser("list-experiments", help="list experiments and their parameters")
    args = parser.parse_args(argv)

    if args.command == "list-experiments":
        for name, (_, grid, params) in EXPERIMENTS.items():
            print(f"{name}: grid={grid} params={sorted(params)}")
        return 0
    try:
        cfg = load_config(args.config)
        if args.command == "validate":
            print(f"{args.config}: ok ({cfg.experiment})")
            return 0
        manifest = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(manifest["summary"], indent=2, sort_keys=True, default=float))
    return 0


if __name__ == "__main__":
    sys.exit(main())
