"""Estimate reports: measured ratios, fits, verdicts and their serializations.

Verdict rules
-------------
``bounded``
    ``max(ratio) / min(ratio) <= band`` over the sweep (two-sided band), or,
    for one-sided checks, ``max(ratio) <= bound``.
``growth-consistent``
    Fitted exponent ``<= predicted + 0.15`` and fit residual below threshold.
``inconclusive``
    A fit whose RMS log-residual exceeds the threshold.
``violated``
    Anything else.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EstimateReport",
    "fit_power_law",
    "band_verdict",
    "bound_verdict",
    "growth_verdict",
    "GROWTH_TOLERANCE",
    "RESIDUAL_THRESHOLD",
    "to_builtin",
]

GROWTH_TOLERANCE = 0.15
RESIDUAL_THRESHOLD = 0.1


def to_builtin(obj):
    """Convert numpy scalars/arrays (recursively) into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_builtin(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if np.isnan(v):
            return "nan"
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def fit_power_law(x, y):
    """Least-squares slope of ``log y`` against ``log x``.

    Returns
    -------
    exponent, intercept, residual : float
        ``residual`` is the RMS of the log-residuals.
    """
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    res = ly - A @ coef
    return float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(res**2)))


def band_verdict(ratios, band: float) -> tuple:
    r = np.asarray(ratios, dtype=float)
    if r.size == 0 or not np.all(np.isfinite(r)) or np.any(r <= 0):
        return "violated", float("nan")
    spread = float(r.max() / r.min())
    return ("bounded" if spread <= band else "violated"), spread


def bound_verdict(ratios, bound: float) -> tuple:
    r = np.asarray(ratios, dtype=float)
    top = float(np.max(r)) if r.size else float("nan")
    ok = r.size > 0 and np.all(np.isfinite(r)) and top <= bound
    return ("bounded" if ok else "violated"), top


def growth_verdict(exponent: float, predicted: float, residual: float,
                   tol: float = GROWTH_TOLERANCE, threshold: float = RESIDUAL_THRESHOLD) -> str:
    if not np.isfinite(residual) or residual > threshold:
        return "inconclusive"
    return "growth-consistent" if exponent <= predicted + tol else "violated"


@dataclass
class EstimateReport:
    """Result of one empirical verification.

    ``rows`` hold one dict per sweep point; ``checks`` hold named pass/fail
    entries; the overall ``verdict`` summarizes the primary check.
    """

    estimate_id: str
    predicted_law: str
    sweep_name: str = ""
    sweep: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    fitted_exponent: float | None = None
    fit_residual: float | None = None
    verdict: str = "violated"
    checks: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    grid: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c["passed"] for c in self.checks.values())

    def check(self, name: str, passed: bool, **detail):
        self.checks[name] = {"passed": bool(passed), **detail}
        return bool(passed)

    def to_dict(self) -> dict:
        return to_builtin({
            "estimate_id": self.estimate_id,
            "predicted_law": self.predicted_law,
            "sweep_name": self.sweep_name,
            "sweep": self.sweep,
            "ratios": self.ratios,
            "fitted_exponent": self.fitted_exponent,
            "fit_residual": self.fit_residual,
            "verdict": self.verdict,
            "passed": self.passed,
            "checks": self.checks,
            "grid": self.grid,
            "params": self.params,
            "info": self.info,
        })

    def to_json(self, extra: dict | None = None) -> str:
        d = self.to_dict()
        if extra:
            d.update(to_builtin(extra))
        return json.dumps(d, sort_keys=True, indent=2) + "\n"

    def to_csv(self, extra_comment: str | None = None) -> str:
        buf = io.StringIO()
        if extra_comment:
            buf.write(f"# {extra_comment}\n")
        rows = self.rows or [{"x": x, "ratio": r} for x, r in zip(self.sweep, self.ratios)]
        keys = sorted({k for r in rows for k in r})
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r.get(k, "")) for k in keys})
        return buf.getvalue()

    def plot_data(self, extra_comment: str | None = None) -> str:
        """Three columns ``x y fit`` with a gnuplot usage header."""
        x = np.asarray(self.sweep, dtype=float)
        y = np.asarray(self.ratios, dtype=float)
        lines = [f"# {self.estimate_id}: {self.predicted_law}"]
        if extra_comment:
            lines.append(f"# {extra_comment}")
        lines.append("# columns: x ratio fit")
        lines.append("# gnuplot: set logscale xy; plot 'FILE' u 1:2 w p t 'ratio', '' u 1:3 w l t 'fit'")
        fit = np.full_like(y, np.nan)
        if self.fitted_exponent is not None and y.size and np.all(x > 0) and np.all(y > 0):
            _, icpt, _ = fit_power_law(self.info.get("fit_x", x), self.info.get("fit_y", y))
            fx = np.asarray(self.info.get("fit_x", x), dtype=float)
            fit = np.exp(icpt) * fx**self.fitted_exponent
        for a, b, c in zip(x, y, fit):
            lines.append(f"{a:.12g} {b:.12g} {c:.12g}")
        return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return v
