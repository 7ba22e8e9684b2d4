"""Command-line entry point.

Usage::

    nlslab COMMAND [--config FILE] [--seed S] [--out DIR] [--grid.N N] [--section.key VALUE ...]

Exit status: 0 pass, 1 criterion failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import acceptance as acc
from .config import ConfigError, canonical_json, config_hash, load_config, parse_value
from .evolution import EvolutionConfig, energy, mass, picard_iterate, splitstep_evolve
from .grid import FrequencyGrid, SpectralField
from .lab.bilinear import verify_bilinear_inequality, verify_bilinear_kernel
from .lab.data import FAMILIES, generate_data
from .lab.embeddings import verify_embeddings
from .lab.persistence import small_log_decay_datum, verify_norm_persistence
from .lab.report import EstimateReport, to_builtin
from .lab.restriction import verify_restriction_L4
from .lab.scaling import verify_scaling_law
from .lab.strichartz import default_family_set, verify_strichartz
from .norms import NormSpec
from .orlicz import (convex_conjugate, indicator_conjugate_norm, modulation_orlicz_norm,
                     orlicz_instance)
from .variation import TimeSampledPath, adapted_path, vp_norm_partition

__all__ = ["main", "COMMANDS", "build_grid", "build_data", "parse_norm_spec"]

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


# -- config -> objects ---------------------------------------------------------
def build_grid(cfg: dict) -> FrequencyGrid:
    g = cfg.get("grid", {})
    try:
        return FrequencyGrid(int(g["N"]), int(g["m"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("grid", "N a power of two, m >= 1 and N >= 16 m", str(exc)) from exc


def build_evolution(cfg: dict) -> EvolutionConfig:
    t = cfg.get("time", {})
    try:
        return EvolutionConfig(T=float(t["T"]), M=int(t["M"]), dealias=bool(t.get("dealias", True)),
                               sign=int(t.get("sign", 1)), stride=int(t.get("stride", 1)),
                               nonlinear=bool(t.get("nonlinear", True)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("time", "T > 0, M >= 1, stride | M, dt <= 0.01, sign = +-1",
                          str(exc)) from exc


def build_data(cfg: dict, grid: FrequencyGrid) -> SpectralField:
    """Initial datum from ``[data]``: a family with parameters, ``zero`` or ``input = FILE``."""
    d = dict(cfg.get("data", {}))
    if "input" in d:
        try:
            with open(d["input"]) as fh:
                text = fh.read()
            u = SpectralField.from_json(text) if text.lstrip().startswith("{") \
                else SpectralField.from_text(text)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError("data.input", "readable SpectralField file (JSON or text)",
                              str(exc)) from exc
        if u.grid != grid:
            raise ConfigError("data.input", "file grid must equal [grid]",
                              f"file has {u.grid}, config has {grid}")
        return u
    family = d.pop("family", "gaussian")
    seed = d.pop("seed", cfg.get("seed", 0))
    if family == "zero":
        return SpectralField.zeros(grid)
    if family not in FAMILIES:
        raise ConfigError("data.family", f"one of {('zero',) + FAMILIES}", f"got {family!r}")
    if "band" in d:
        d["band"] = tuple(d["band"])
    try:
        return generate_data(grid, family, d, seed if family == "random_phase" else None)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("data", "family parameters valid and de-aliasing margin respected",
                          str(exc)) from exc


def parse_norm_spec(text: str) -> NormSpec:
    """``kind:key=value,key=value`` (``inf`` allowed for exponents)."""
    kind, _, rest = text.partition(":")
    kw = {}
    try:
        for item in filter(None, rest.split(",")):
            k, _, v = item.partition("=")
            k = k.strip()
            if k == "variant":
                kw[k] = v.strip()
            elif k == "homogeneous":
                kw[k] = v.strip().lower() in ("1", "true", "yes")
            else:
                kw[k] = float(v)
        return NormSpec(kind.strip(), **kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError("norms.specs", "kind:key=value with a known kind and exponents >= 1",
                          f"{text!r}: {exc}") from exc


def estimate_params(cfg: dict, defaults: dict) -> dict:
    est = cfg.get("estimate", {})
    unknown = sorted(set(est) - set(defaults))
    if unknown:
        raise ConfigError(f"estimate.{unknown[0]}", f"one of {sorted(defaults)}",
                          f"unknown estimate parameter {unknown[0]!r}")
    return {**defaults, **est}


def _phi(e: dict):
    gamma = float(e["gamma"])
    if gamma <= 0:
        raise ConfigError("estimate.gamma", "gamma > 0")
    return orlicz_instance(gamma, int(e.get("level", 1)), sqrt_convex=bool(e.get("sqrt_convex", True)))


# -- output ----------------------------------------------------------------------
class Writer:
    def __init__(self, cfg: dict):
        self.dir = cfg.get("output", {}).get("dir", "out")
        self.hash = config_hash(cfg)
        self.files = []

    def path(self, name: str) -> str:
        os.makedirs(self.dir, exist_ok=True)
        p = os.path.join(self.dir, name)
        self.files.append(p)
        return p

    def json(self, name: str, obj: dict):
        body = dict(to_builtin(obj))
        if "config" in body:
            body["config"] = json.loads(canonical_json(body["config"]))
        body["config_hash"] = self.hash
        with open(self.path(name), "w") as fh:
            fh.write(json.dumps(body, sort_keys=True, indent=2) + "\n")

    def report(self, rep: EstimateReport, cfg: dict):
        stem = rep.estimate_id
        self.json(f"{stem}.json", {**rep.to_dict(), "config": cfg})
        with open(self.path(f"{stem}.csv"), "w") as fh:
            fh.write(rep.to_csv(f"config_hash={self.hash}"))
        with open(self.path(f"{stem}.dat"), "w") as fh:
            fh.write(rep.plot_data(f"config_hash={self.hash}"))

    def rows(self, name: str, rows: list):
        rep = EstimateReport(name, "", rows=rows)
        with open(self.path(name), "w") as fh:
            fh.write(rep.to_csv(f"config_hash={self.hash}"))


# -- commands --------------------------------------------------------------------
def cmd_norms(cfg, out):
    grid = build_grid(cfg)
    u = build_data(cfg, grid)
    specs = cfg.get("norms", {}).get("specs", [])
    values = {}
    for s in specs:
        try:
            values[s] = parse_norm_spec(s)(u)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("norms.specs", "norm defined on the datum", f"{s!r}: {exc}") from exc
    if "orlicz_gamma" in cfg.get("norms", {}):
        phi = _phi({"gamma": cfg["norms"]["orlicz_gamma"]})
        values[f"l^Phi L2:gamma={cfg['norms']['orlicz_gamma']}"] = modulation_orlicz_norm(u, phi)
    result = {"command": "norms", "grid": grid.to_dict(), "norms": values}
    out.json("norms.json", {**result, "config": cfg})
    print(json.dumps(to_builtin(result), sort_keys=True))
    return EXIT_PASS


def cmd_evolve(cfg, out):
    grid = build_grid(cfg)
    u0 = build_data(cfg, grid)
    ecfg = build_evolution(cfg)
    U = splitstep_evolve(u0, ecfg)
    m24 = NormSpec("modulation", p=4.0).frames(grid, U.coeffs)
    rows = []
    for i, t in enumerate(U.times):
        f = U.frame(i)
        rows.append({"t": t, "mass": mass(f), "energy": energy(f, ecfg.sign), "m24": m24[i]})
    m0 = mass(u0)
    drift = max(abs(r["mass"] - m0) for r in rows) / m0 if m0 > 0 else 0.0
    out.rows("evolve.csv", rows)
    out.json("final_state.json", json.loads(U.frame(-1).to_json()))
    summary = {"command": "evolve", "evolution": ecfg.to_dict(), "grid": grid.to_dict(),
               "mass_rel_drift": drift, "final_l2": U.frame(-1).l2_norm(),
               "sup_m24": float(np.max(m24))}
    out.json("evolve.json", {**summary, "config": cfg})
    print(json.dumps(to_builtin(summary), sort_keys=True))
    return EXIT_PASS


def cmd_picard(cfg, out):
    grid = build_grid(cfg)
    u0 = build_data(cfg, grid)
    e = estimate_params(cfg, {"n_iters": 12, "monitor": "modulation:p=4", "scale_to": None,
                              "gamma": 3.0, "level": 1, "sqrt_convex": True})
    if e["scale_to"] is not None and u0.l2_norm() > 0:
        u0 = u0 * (float(e["scale_to"]) / NormSpec("modulation", p=4.0)(u0))
    mon = _phi(e) if e["monitor"] == "orlicz" else parse_norm_spec(e["monitor"])
    T = float(cfg["time"]["T"])
    res = picard_iterate(u0, T, int(e["n_iters"]), mon, M=int(cfg["time"]["M"]),
                         dealias=bool(cfg["time"].get("dealias", True)),
                         sign=int(cfg["time"].get("sign", 1)))
    body = {"command": "picard", "T": T, **res.to_dict()}
    out.json("picard.json", {**body, "config": cfg})
    out.rows("picard.csv", [{"iteration": i + 1, "difference": d}
                            for i, d in enumerate(res.differences)])
    print(json.dumps(to_builtin(body), sort_keys=True))
    return EXIT_FAIL if res.diverged else EXIT_PASS


def _finish(rep: EstimateReport, cfg, out):
    out.report(rep, cfg)
    print(f"[{'PASS' if rep.passed else 'FAIL'}] {rep.estimate_id}: verdict={rep.verdict}")
    for k, c in rep.checks.items():
        print(f"  {'ok ' if c['passed'] else 'BAD'} {k}")
    return EXIT_PASS if rep.passed else EXIT_FAIL


def _float_or_inf(v):
    return float("inf") if str(v).lower() in ("inf", "infinity") else float(v)


def cmd_verify_strichartz(cfg, out):
    grid = build_grid(cfg)
    e = estimate_params(cfg, {"p": 6.0, "q": 6.0, "n_random": 10, "band": 2.0})
    p, q = _float_or_inf(e["p"]), _float_or_inf(e["q"])
    fams = default_family_set(int(e["n_random"]), int(cfg.get("seed", 0)))
    try:
        rep = verify_strichartz(fams, p, q, [grid, grid.refined()], float(cfg["time"]["T"]),
                                int(cfg["time"]["M"]), float(e["band"]))
    except ValueError as exc:
        raise ConfigError("estimate.p", "2/p + 1/q = 1/2 with 4 <= p <= inf", str(exc)) from exc
    return _finish(rep, cfg, out)


def cmd_verify_bilinear(cfg, out):
    e = estimate_params(cfg, {"lambda_sweep": [8, 16, 32, 64], "band_u": [0.0, 1.0],
                              "offset": 2.0, "m": 32, "window": 16.0, "dt_scale": 0.05,
                              "band": 2.0, "kernel_t": [0.0, 0.7], "kernel_band_v": [3.0, 4.0]})
    sweep = [float(x) for x in e["lambda_sweep"]]
    if not sweep or min(sweep) <= 0:
        raise ConfigError("estimate.lambda_sweep", "non-empty list of positive values")
    rep = verify_bilinear_inequality(sweep, tuple(e["band_u"]), float(e["offset"]), int(e["m"]),
                                     float(e["window"]), float(e["dt_scale"]), float(e["band"]))
    grid = build_grid(cfg)
    u0 = generate_data(grid, "flat_band", {"band": tuple(e["band_u"])})
    v0 = generate_data(grid, "flat_band", {"band": tuple(e["kernel_band_v"])})
    err = verify_bilinear_kernel(u0, v0, e["kernel_t"])
    rep.check("kernel_identity", err <= 1e-6, max_rel_error=err, tol=1e-6)
    return _finish(rep, cfg, out)


def cmd_verify_restriction(cfg, out):
    e = estimate_params(cfg, {"I_sweep": [4, 8, 16, 32, 64, 128, 256], "n_seeds": 20,
                              "band": 2.0, "ensemble_max": 0.65, "K": 160})
    sweep = [int(n) for n in e["I_sweep"]]
    if len(sweep) < 2 or min(sweep) < 2:
        raise ConfigError("estimate.I_sweep", "at least two band lengths >= 2")
    rep = verify_restriction_L4(sweep, int(e["n_seeds"]), int(cfg.get("seed", 0)),
                                float(e["band"]), float(e["ensemble_max"]), int(e["K"]))
    return _finish(rep, cfg, out)


def cmd_verify_embeddings(cfg, out):
    e = estimate_params(cfg, {"n_samples": 50, "p_values": [2.0, 4.0, 8.0], "gamma": 3.0,
                              "level": 1, "sqrt_convex": True, "stability_band": 2.0})
    rep = verify_embeddings(int(e["n_samples"]), int(cfg.get("seed", 0)), build_grid(cfg),
                            [float(p) for p in e["p_values"]], _phi(e), float(e["stability_band"]))
    return _finish(rep, cfg, out)


def cmd_verify_scaling(cfg, out):
    e = estimate_params(cfg, {"gamma": 3.0, "level": 1, "sqrt_convex": True,
                              "log_lambda_sweep": [1.0, 2.0, 4.0, 8.0], "band": 4.0,
                              "sharp_N": 2.0, "sharp_M": 8.0})
    grid = build_grid(cfg)
    u0 = generate_data(grid, "log_decay", {"gamma": float(e["gamma"])})
    rep = verify_scaling_law(u0, [float(s) for s in e["log_lambda_sweep"]], float(e["gamma"]),
                             _phi(e), float(e["band"]), float(e["sharp_N"]), float(e["sharp_M"]))
    return _finish(rep, cfg, out)


def cmd_verify_persistence(cfg, out):
    e = estimate_params(cfg, {"gamma": 3.0, "level": 1, "sqrt_convex": True, "band": 4.0,
                              "initial_norm": 0.1})
    if not 0 <= float(e["initial_norm"]) <= 0.1:
        raise ConfigError("estimate.initial_norm", "small-data regime: 0 <= norm <= 0.1")
    grid = build_grid(cfg)
    phi = _phi(e)
    if cfg.get("data", {}).get("family") == "zero":
        u0 = SpectralField.zeros(grid)
    else:
        u0 = small_log_decay_datum(grid, float(e["gamma"]), phi, float(e["initial_norm"]))
    ecfg = build_evolution(cfg)
    rep = verify_norm_persistence(u0, ecfg.T, ecfg.M, float(e["gamma"]), phi, float(e["band"]),
                                  ecfg.stride, ecfg.nonlinear)
    return _finish(rep, cfg, out)


def cmd_vpnorm(cfg, out):
    e = estimate_params(cfg, {"p": 2.0, "source": "solution", "tail": False, "samples": 12})
    p = float(e["p"])
    if not 1 <= p < np.inf:
        raise ConfigError("estimate.p", "1 <= p < inf")
    if e["source"] == "solution":
        grid = build_grid(cfg)
        U = splitstep_evolve(build_data(cfg, grid), build_evolution(cfg))
        path = adapted_path(U, bool(e["tail"]))
    elif e["source"] == "random":
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        n = int(e["samples"])
        path = TimeSampledPath(np.arange(n + 1.0), rng.standard_normal((n + 1, 4)), 1.0,
                               bool(e["tail"]))
    else:
        raise ConfigError("estimate.source", "'solution' or 'random'", f"got {e['source']!r}")
    value, part = vp_norm_partition(path, p)
    body = {"command": "vpnorm", "p": p, "tail": bool(e["tail"]), "value": value,
            "partition": part, "samples": int(path.times.size)}
    out.json("vpnorm.json", {**body, "config": cfg})
    print(json.dumps(to_builtin(body), sort_keys=True))
    return EXIT_PASS


def cmd_orlicz_conjugate(cfg, out):
    e = estimate_params(cfg, {"gamma": 3.0, "level": 1, "sqrt_convex": False,
                              "t": [1e-10, 1e-6, 1e-3, 0.1, 1.0], "N": [16, 64, 256, 1024, 4096]})
    phi = _phi(e)
    rows = []
    for t in e["t"]:
        try:
            rows.append({"kind": "conjugate", "t": float(t), "value": convex_conjugate(phi, float(t))})
        except ValueError as exc:
            raise ConfigError("estimate.t", "positive values within the tabulated range",
                              str(exc)) from exc
    for N in e["N"]:
        rows.append({"kind": "indicator_norm", "N": int(N),
                     "value": indicator_conjugate_norm(int(N), phi)})
    out.rows("orlicz_conjugate.csv", rows)
    body = {"command": "orlicz-conjugate", "phi": phi.to_dict(), "rows": rows}
    out.json("orlicz_conjugate.json", {**body, "config": cfg})
    print(json.dumps(to_builtin(body), sort_keys=True))
    return EXIT_PASS


def cmd_acceptance(cfg, out):
    only = cfg.get("estimate", {}).get("only")
    results = acc.run_acceptance(only=set(only) if only else None, seed=int(cfg.get("seed", 0)))
    print(acc.summary_table(results), end="")
    out.json("acceptance.json", {"criteria": [r.to_dict() for r in results],
                                 "passed": all(r.passed for r in results)})
    return EXIT_PASS if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {
    "norms": cmd_norms,
    "evolve": cmd_evolve,
    "picard": cmd_picard,
    "verify-strichartz": cmd_verify_strichartz,
    "verify-bilinear": cmd_verify_bilinear,
    "verify-restriction": cmd_verify_restriction,
    "verify-embeddings": cmd_verify_embeddings,
    "verify-scaling": cmd_verify_scaling,
    "verify-persistence": cmd_verify_persistence,
    "vpnorm": cmd_vpnorm,
    "orlicz-conjugate": cmd_orlicz_conjugate,
    "acceptance": cmd_acceptance,
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nlslab", description=__doc__.splitlines()[0],
                                 epilog="Any further --section.key VALUE pair overrides the "
                                        "matching config entry.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="TOML configuration file")
    ap.add_argument("--seed", type=int, help="seed for randomized data and suites")
    ap.add_argument("--out", help="output directory")
    return ap


def _overrides(extra: list) -> list:
    pairs = []
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--") or "." not in tok:
            raise ConfigError(tok, "overrides have the form --section.key VALUE")
        if "=" in tok:
            key, val = tok[2:].split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extra):
                raise ConfigError(tok, "override needs a value")
            key, val = tok[2:], extra[i + 1]
            i += 2
        pairs.append((key, parse_value(val)))
    return pairs


def main(argv=None) -> int:
    ap = _parser()
    args, extra = ap.parse_known_args(argv)
    try:
        overrides = _overrides(extra)
        if args.seed is not None:
            overrides.append(("seed", args.seed))
        if args.out is not None:
            overrides.append(("output.dir", args.out))
        cfg = load_config(args.config, overrides)
        cfg["command"] = args.command
        return COMMANDS[args.command](cfg, Writer(cfg))
    except ConfigError as exc:
        print(json.dumps(exc.to_dict(), sort_keys=True), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
