"""Free-flow space-time bounds for admissible exponent pairs."""

from __future__ import annotations

import numpy as np

from ..evolution import free_evolution
from ..grid import FrequencyGrid
from ..norms import mixed_spacetime_norm
from .data import generate_data
from .report import EstimateReport, band_verdict

__all__ = ["is_admissible", "strichartz_ratio", "verify_strichartz", "default_family_set"]


def is_admissible(p: float, q: float) -> bool:
    """``2/p + 1/q = 1/2`` with ``4 <= p <= inf``."""
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    inv_q = 0.0 if np.isinf(q) else 1.0 / q
    return p >= 4 and abs(2 * inv_p + inv_q - 0.5) < 1e-12


def strichartz_ratio(u0, p: float, q: float, T: float = 1.0, M: int = 1000) -> float:
    """``||exp(i t Delta) u0||_{L^p L^q([0, T])} / ||u0||_{L2}``."""
    n = u0.l2_norm()
    if n == 0:
        return 0.0
    U = free_evolution(u0, np.linspace(0.0, T, M + 1))
    return mixed_spacetime_norm(U, p, q) / n


def default_family_set(n_random: int = 10, seed: int = 0) -> list:
    """Gaussian, flat band and random-phase Gaussian data (phases seeded)."""
    fams = [("gaussian", {"width": 1.0}, None), ("flat_band", {"band": (0.0, 1.0)}, None)]
    for k in range(n_random):
        fams.append(("random_phase", {"profile": "gaussian",
                                      "profile_params": {"width": 2.0}}, seed + k))
    return fams


def verify_strichartz(families, p: float, q: float, resolutions, T: float = 1.0,
                      M: int = 1000, band: float = 2.0) -> EstimateReport:
    """Measure Strichartz ratios over data families and grid resolutions.

    Parameters
    ----------
    families : list of (family, params, seed)
    resolutions : list of FrequencyGrid
        Typically a grid and its refinement (``N -> 2N``, ``L -> 2L``).
    band : float
        Allowed spread of each datum's ratio across resolutions.

    Raises
    ------
    ValueError
        If ``(p, q)`` is not admissible.
    """
    if not is_admissible(p, q):
        raise ValueError(f"(p, q) = ({p}, {q}) is not admissible: need 2/p + 1/q = 1/2, p >= 4")
    rep = EstimateReport(
        estimate_id=f"strichartz_p{p:g}_q{q:g}",
        predicted_law="||exp(it Delta) u0||_{L^p L^q([0,1])} <= C ||u0||_{L2}",
        sweep_name="resolution",
        params={"p": p, "q": q, "T": T, "M": M, "band": band},
        grid={"resolutions": [g.to_dict() for g in resolutions]},
    )
    spreads = []
    all_ratios = []
    for fam, params, seed in families:
        rs = []
        for g in resolutions:
            u0 = generate_data(g, fam, params, seed)
            r = strichartz_ratio(u0, p, q, T, M)
            rs.append(r)
            rep.rows.append({"family": fam, "seed": -1 if seed is None else seed,
                             "N": g.N, "m": g.m, "ratio": r})
        verdict, spread = band_verdict(rs, band)
        spreads.append(spread)
        all_ratios.extend(rs)
    rep.sweep = list(range(len(all_ratios)))
    rep.ratios = all_ratios
    worst = float(np.max(spreads))
    rep.verdict = "bounded" if worst <= band else "violated"
    rep.info["max_ratio"] = float(np.max(all_ratios))
    rep.info["worst_resolution_spread"] = worst
    rep.check("resolution_stability", worst <= band, worst_spread=worst, band=band)
    return rep
