"""Run configuration: a versioned TOML file with strict key checking."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

SCHEMA_VERSION = 1

DEFAULT_T_GRID = (0.0, 1.0, 10.0, 1e3, 1e6)


class ConfigError(ValueError):
    """Malformed configuration; the message names the section and field."""


class EmptyConfigError(ConfigError):
    pass


# allowed keys and their expected python types per section
_SCHEMA: dict[str, dict[str, tuple[type, ...]]] = {
    "run": {"seed": (int,), "t_grid": (list,), "tol": (int, float), "out": (str,), "points": (int,)},
    "group": {"n": (int,), "m": (int,), "blocks": (list,), "axis": (bool,)},
    "warped": {"n1": (int,), "n2": (int,), "lambda1": (int, float), "lambda2": (int, float), "b": (int, float),
               "t0": (int, float), "profile_kind": (str,), "domain": (list,), "psi_shift": (int, float),
               "points": (int,), "counterexample_lambdas": (list,)},
    "feasibility": {"dims": (list,), "l": (int,), "constraints": (list,)},
    "coho1": {"R": (int, float), "c_min": (int, float), "num": (int,), "blocks": (list,)},
}

_COHO1_BLOCK_KEYS = {"n": (int,), "kind": (str,), "A": (int, float), "c": (int, float), "reflect": (bool,),
                     "knots": (list,), "values": (list,), "tag": (str,)}


def _check_keys(where: str, table: dict, allowed: dict[str, tuple[type, ...]]) -> None:
    for key, val in table.items():
        if key not in allowed:
            raise ConfigError(f"[{where}] unknown key {key!r}")
        types = allowed[key]
        if isinstance(val, bool) and bool not in types:
            raise ConfigError(f"[{where}] {key}: expected {'/'.join(t.__name__ for t in types)}, got bool")
        if not isinstance(val, types):
            raise ConfigError(f"[{where}] {key}: expected {'/'.join(t.__name__ for t in types)}, "
                              f"got {type(val).__name__}")


def check_t_grid(grid, where: str = "[run] t_grid") -> tuple[float, ...]:
    try:
        g = tuple(float(x) for x in grid)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: entries must be numbers") from exc
    if not g:
        raise ConfigError(f"{where}: must not be empty")
    if any(x < 0 for x in g):
        raise ConfigError(f"{where}: entries must be non-negative")
    if any(b <= a for a, b in zip(g, g[1:])):
        raise ConfigError(f"{where}: must be strictly increasing")
    return g


@dataclass
class RunConfig:
    seed: int = 0
    t_grid: tuple[float, ...] = DEFAULT_T_GRID
    tol: float | None = None
    out: str = "out"
    points: int = 50
    group: dict[str, Any] = field(default_factory=dict)
    warped: dict[str, Any] = field(default_factory=dict)
    feasibility: dict[str, Any] = field(default_factory=dict)
    coho1: dict[str, Any] = field(default_factory=dict)
    t_grid_set: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not data:
            raise EmptyConfigError("configuration is empty")
        if "schema" not in data:
            raise ConfigError("missing top-level key 'schema'")
        if data["schema"] != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema {data['schema']!r} (expected {SCHEMA_VERSION})")
        for key in data:
            if key != "schema" and key not in _SCHEMA:
                raise ConfigError(f"unknown section or key {key!r}")
        for sec, allowed in _SCHEMA.items():
            table = data.get(sec, {})
            if not isinstance(table, dict):
                raise ConfigError(f"[{sec}] must be a table")
            _check_keys(sec, table, allowed)
        for i, blk in enumerate(data.get("coho1", {}).get("blocks", [])):
            if not isinstance(blk, dict):
                raise ConfigError(f"[coho1] blocks[{i}] must be a table")
            _check_keys(f"coho1.blocks[{i}]", blk, _COHO1_BLOCK_KEYS)
        run = data.get("run", {})
        cfg = cls(group=dict(data.get("group", {})), warped=dict(data.get("warped", {})),
                  feasibility=dict(data.get("feasibility", {})), coho1=dict(data.get("coho1", {})))
        if "seed" in run:
            cfg.seed = run["seed"]
        if "t_grid" in run:
            cfg.t_grid = check_t_grid(run["t_grid"])
            cfg.t_grid_set = True
        if "tol" in run:
            if not run["tol"] > 0:
                raise ConfigError("[run] tol: must be positive")
            cfg.tol = float(run["tol"])
        if "out" in run:
            cfg.out = run["out"]
        if "points" in run:
            if run["points"] < 1:
                raise ConfigError("[run] points: must be positive")
            cfg.points = run["points"]
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        text = Path(path).read_text()
        if not text.strip():
            raise EmptyConfigError(f"{path}: configuration is empty")
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(data)
