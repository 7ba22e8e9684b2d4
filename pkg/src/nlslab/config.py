"""Run configuration: TOML file with dotted sections, command-line overrides, hashing.

A configuration is a nested dict such as::

    command = "norms"
    seed = 0

    [grid]
    N = 1024
    m = 8

    [data]
    family = "flat_band"
    band = [0.0, 1.0]

Overrides use the same dotted keys (``--grid.N 2048``).  The config hash is
the SHA-256 of the canonical JSON form with the output directory removed,
so moving outputs does not change it.
"""

from __future__ import annotations

import copy
import hashlib
import json
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["ConfigError", "DEFAULTS", "load_config", "parse_value", "apply_override",
           "merge", "canonical_json", "config_hash"]

DEFAULTS = {
    "seed": 0,
    "grid": {"N": 1024, "m": 8},
    "time": {"T": 1.0, "M": 1000, "stride": 10, "dealias": True, "sign": 1, "nonlinear": True},
    "data": {"family": "gaussian"},
    "norms": {"specs": ["lebesgue:p=2", "lebesgue:p=4", "modulation:p=2", "modulation:p=4",
                        "fourier_lebesgue:r=2", "sobolev:s=1"]},
    "estimate": {},
    "output": {"dir": "out"},
}


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, precondition: str, message: str = ""):
        self.key = key
        self.precondition = precondition
        super().__init__(message or f"{key}: {precondition}")

    def to_dict(self) -> dict:
        return {"error": "config", "key": self.key, "precondition": self.precondition,
                "message": str(self)}


def parse_value(text: str):
    """Interpret a command-line value as a TOML literal, falling back to a string."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def merge(base: dict, extra: dict) -> dict:
    """Recursive dict merge; values in ``extra`` win."""
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def apply_override(cfg: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    if not all(keys):
        raise ConfigError(dotted, "override keys must be non-empty dotted names")
    node = cfg
    for k in keys[:-1]:
        nxt = node.setdefault(k, {})
        if not isinstance(nxt, dict):
            raise ConfigError(dotted, f"{k!r} is a value, not a section")
        node = nxt
    node[keys[-1]] = value


def load_config(path=None, overrides=()) -> dict:
    """Defaults, then the file at ``path``, then ``(dotted_key, value)`` overrides."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            with open(path, "rb") as fh:
                cfg = merge(cfg, tomllib.load(fh))
        except OSError as exc:
            raise ConfigError("config", "file must be readable", str(exc)) from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("config", "file must be valid TOML", str(exc)) from exc
    for key, value in overrides:
        apply_override(cfg, key, value)
    return cfg


def canonical_json(cfg: dict) -> str:
    d = copy.deepcopy(cfg)
    d.get("output", {}).pop("dir", None)
    return json.dumps(d, sort_keys=True, separators=(",", ":"), default=str)


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(canonical_json(cfg).encode()).hexdigest()
