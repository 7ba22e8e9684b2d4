"""Space-time L4 bound for free waves with spectrum in a union of unit blocks.

For ``u0`` supported in ``I = [0, n)`` the ratio

    R(n) = ||exp(i t Delta) u0||_{L4([0,1] x R)} / (sum_k ||P_k u0||_{L2}^4)^{1/4}

is expected to grow at most like ``sqrt(ln n)``.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import trapezoid

from ..grid import FrequencyGrid, SpectralField, block_masses, to_physical
from .data import generate_data
from .report import EstimateReport, band_verdict, fit_power_law, growth_verdict

__all__ = ["restriction_grid", "graded_times", "spacetime_l4", "restriction_ratio",
           "verify_restriction_L4"]

PREDICTED_EXPONENT = 0.5


def restriction_grid(n: int) -> FrequencyGrid:
    """Grid holding the band ``[0, n)`` inside the de-aliasing margin.

    The period ``2 pi max(8, n)`` keeps waves with speed ``<= 2n`` from wrapping
    around during ``[0, 1]``.
    """
    m = max(8, int(n))
    return FrequencyGrid(4 * int(n) * m, m)


def graded_times(K: int = 160, t_min: float = 1e-7, T: float = 1.0) -> np.ndarray:
    """``{0}`` followed by ``K`` geometrically spaced times in ``[t_min, T]``.

    ``||u(t)||_{L4}^4`` is flat for ``t < 1/n^2`` and decays like ``1/t``
    beyond, so a geometric grid resolves it uniformly in ``n``.
    """
    return np.r_[0.0, np.geomspace(t_min, T, K)]


def spacetime_l4(u0: SpectralField, times: np.ndarray, chunk: int = 16) -> float:
    """``(int ||u(t)||_{L4}^4 dt)^{1/4}`` by the trapezoid rule on ``times``."""
    grid = u0.grid
    xi2 = grid.xi**2
    vals = np.empty(times.size)
    for s in range(0, times.size, chunk):
        t = times[s:s + chunk, None]
        u = to_physical(grid, np.exp(-1j * t * xi2) * u0.coeffs)
        p = u.real**2 + u.imag**2
        vals[s:s + chunk] = grid.dx * np.sum(p * p, axis=1)
    return float(trapezoid(vals, times) ** 0.25)


def restriction_ratio(u0: SpectralField, times: np.ndarray | None = None) -> float:
    """``R = ||u||_{L4([0,T] x R)} / (sum_k ||P_k u0||^4)^{1/4}``."""
    times = graded_times() if times is None else times
    _, masses = block_masses(u0.grid, u0.coeffs)
    rhs = float(np.sum(masses**4) ** 0.25)
    if rhs == 0:
        return 0.0
    return spacetime_l4(u0, times) / rhs


def _datum(n: int, seed: int | None) -> SpectralField:
    g = restriction_grid(n)
    if seed is None:
        return generate_data(g, "flat_band", {"band": (0.0, float(n))})
    return generate_data(g, "random_phase", {"profile": "flat_band",
                                             "profile_params": {"band": (0.0, float(n))},
                                             "phase_scale": 1.0}, seed)


def verify_restriction_L4(I_sweep=(4, 8, 16, 32, 64, 128, 256), n_seeds: int = 20,
                          seed: int = 0, band: float = 2.0, ensemble_max: float = 0.65,
                          K: int = 160) -> EstimateReport:
    """Flat-band and random-phase sweeps over the band length ``|I|``.

    Checks
    ------
    flat_band_normalized
        ``max/min`` of ``R(|I|) / sqrt(ln |I|)`` over the sweep ``<= band``.
    flat_growth
        Fitted exponent of ``R`` against ``ln |I|`` is growth-consistent
        with ``1/2`` (``inconclusive`` when the fit residual is large).
    ensemble_exponent
        Largest fitted exponent over ``n_seeds`` random-phase data
        ``<= ensemble_max``; every ensemble fit must be conclusive.
    """
    sweep = [int(n) for n in I_sweep]
    times = graded_times(K)
    rep = EstimateReport(
        estimate_id="restriction_L4",
        predicted_law="||P_I u||_{L4([0,1]xR)} <= C sqrt(ln|I|) (sum_k ||u0_k||^4)^{1/4}",
        sweep_name="|I|",
        params={"I_sweep": sweep, "n_seeds": n_seeds, "seed": seed, "band": band,
                "ensemble_max": ensemble_max, "K": K},
    )
    logs = np.log(sweep)
    flat = np.array([restriction_ratio(_datum(n, None), times) for n in sweep])
    normalized = flat / np.sqrt(logs)
    for n, r, q in zip(sweep, flat, normalized):
        rep.rows.append({"I": n, "data": "flat", "seed": -1, "R": r, "R_over_sqrt_log": q})
    rep.sweep, rep.ratios = sweep, list(normalized)
    expo, _, resid = fit_power_law(logs, flat)
    rep.fitted_exponent, rep.fit_residual = expo, resid
    rep.info.update({"fit_x": list(logs), "fit_y": list(flat)})
    verdict, spread = band_verdict(normalized, band)
    rep.check("flat_band_normalized", verdict == "bounded", spread=spread, band=band)
    growth = growth_verdict(expo, PREDICTED_EXPONENT, resid)
    rep.check("flat_growth", growth == "growth-consistent", exponent=expo, residual=resid,
              verdict=growth)
    rep.verdict = verdict if growth == "growth-consistent" else growth

    exps, resids = [], []
    for s in range(seed, seed + n_seeds):
        rs = np.array([restriction_ratio(_datum(n, s), times) for n in sweep])
        e, _, r = fit_power_law(logs, rs)
        exps.append(e)
        resids.append(r)
        for n, v in zip(sweep, rs):
            rep.rows.append({"I": n, "data": "random_phase", "seed": s, "R": v,
                             "R_over_sqrt_log": v / np.sqrt(np.log(n))})
    rep.info.update({"ensemble_exponents": exps, "ensemble_residuals": resids})
    worst = float(np.max(exps))
    conclusive = all(growth_verdict(e, PREDICTED_EXPONENT, r) != "inconclusive"
                     for e, r in zip(exps, resids))
    rep.check("ensemble_exponent", worst <= ensemble_max and conclusive,
              max_exponent=worst, bound=ensemble_max, conclusive=conclusive)
    return rep
