"""Growth of the ``L^Phi-hat`` norm under the ``L2``-critical dilation.

For ``v0(x) = lam u0(lam x)`` the spectrum is ``v0_hat(xi) = u0_hat(xi / lam)``,
so ``||v0||_{L^Phi-hat}`` is the Luxemburg norm of the same heights with all
widths multiplied by ``lam``.  Working with ``log lam`` keeps dilations such
as ``lam = exp(exp(8))`` representable.
"""

from __future__ import annotations

import numpy as np

from ..grid import FrequencyGrid, SpectralField
from ..orlicz import (PiecewiseSpectrum, YoungFunction, luxemburg_frequency_norm,
                      luxemburg_weighted_norm, orlicz_instance)
from .data import generate_data
from .report import EstimateReport, band_verdict, bound_verdict

__all__ = ["dilated_norm", "scaling_ratio", "sharpness_datum", "sharpness_ratio",
           "verify_scaling_law"]


def dilated_norm(u0, log_lambda: float, phi: YoungFunction) -> float:
    """``||lam u0(lam .)||_{L^Phi-hat}`` given ``log lam``."""
    if isinstance(u0, PiecewiseSpectrum):
        return luxemburg_frequency_norm(u0.stretched(log_lambda), phi)
    return luxemburg_weighted_norm(np.abs(u0.coeffs), np.log(u0.grid.dxi) + log_lambda, phi)


def _sup(u0) -> float:
    if isinstance(u0, PiecewiseSpectrum):
        return u0.sup()
    return float(np.max(np.abs(u0.coeffs)))


def scaling_ratio(u0, log_lambda: float, phi: YoungFunction, gamma: float) -> float:
    """``||v0|| / ((||u0|| + ||u0_hat||_inf) max(1, ln lam)^gamma)``.

    The ``max(1, .)`` makes ``lam = 1`` (no dilation) well defined.
    """
    b = luxemburg_frequency_norm(u0, phi)
    a = _sup(u0)
    if a + b == 0:
        return 0.0
    return dilated_norm(u0, log_lambda, phi) / ((a + b) * max(1.0, log_lambda) ** gamma)


def sharpness_datum(N: float) -> PiecewiseSpectrum:
    """Height ``N`` on ``[0, exp(-N)]``: small norm, large sup."""
    return PiecewiseSpectrum(np.array([float(N)]), np.array([-float(N)]))


def sharpness_ratio(N: float, M: float, phi: YoungFunction) -> float:
    """``||v0|| / (N e^M)`` for the sharpness datum dilated by ``lam = exp(exp(M))``."""
    return dilated_norm(sharpness_datum(N), float(np.exp(M)), phi) / (N * np.exp(M))


def verify_scaling_law(u0=None, log_lambda_sweep=(1.0, 2.0, 4.0, 8.0), gamma: float = 3.0,
                       phi: YoungFunction | None = None, band: float = 4.0,
                       sharp_N: float = 2.0, sharp_M: float = 8.0,
                       sharp_gamma: float = 1.0) -> EstimateReport:
    """Dilation sweep on log-decaying data plus the sharpness example.

    Parameters
    ----------
    u0 : SpectralField or PiecewiseSpectrum, optional
        Defaults to ``log_decay(gamma)`` on the 1024 x 8 grid.
    log_lambda_sweep : sequence of float
        Values of ``ln lam``.
    band : float
        Allowed ``max/min`` of the ratio over the sweep.

    Notes
    -----
    The sweep is also repeated on the refined grid and the ratio spread is
    reported together with the largest ratio (the one-sided reading).  The
    sharpness run uses ``gamma = 1``; its ratio ``||v0|| / (N e^M)`` must lie
    in ``[1/4, 4]``, while ``||v0|| / (||u0|| ln lam)`` (no sup term) grows
    linearly in ``N``.
    """
    phi = orlicz_instance(gamma, 1, sqrt_convex=True) if phi is None else phi
    if u0 is None:
        u0 = generate_data(FrequencyGrid(1024, 8), "log_decay", {"gamma": gamma})
    sweep = [float(s) for s in log_lambda_sweep]
    rep = EstimateReport(
        estimate_id="scaling_law",
        predicted_law="||v0||_{L^Phi-hat} <= C (||u0||_{L^Phi-hat} + ||u0_hat||_inf) (ln lam)^gamma",
        sweep_name="ln lambda",
        params={"gamma": gamma, "phi": phi.to_dict(), "band": band, "sharp_N": sharp_N,
                "sharp_M": sharp_M, "sharp_gamma": sharp_gamma},
    )
    if isinstance(u0, SpectralField):
        rep.grid = u0.grid.to_dict()
    ratios = [scaling_ratio(u0, s, phi, gamma) for s in sweep]
    rep.sweep, rep.ratios = sweep, ratios
    for s, r in zip(sweep, ratios):
        rep.rows.append({"run": "sweep", "ln_lambda": s, "ratio": r})
    verdict, spread = band_verdict(ratios, band)
    _, top = bound_verdict(ratios, band)
    rep.verdict = verdict
    rep.info.update({"base_ratio": scaling_ratio(u0, 0.0, phi, gamma), "max_ratio": top})
    rep.check("ratio_band", verdict == "bounded", spread=spread, band=band, max_ratio=top)

    if isinstance(u0, SpectralField):
        g2 = u0.grid.refined()
        fine = [scaling_ratio(generate_data(g2, "log_decay", {"gamma": gamma}), s, phi, gamma)
                for s in sweep]
        rep.info["refined_ratios"] = fine
        drift = float(np.max(np.maximum(np.divide(fine, ratios), np.divide(ratios, fine))))
        rep.info["refinement_drift"] = drift

    phi1 = orlicz_instance(sharp_gamma, 1, sqrt_convex=True)
    sharp = sharpness_ratio(sharp_N, sharp_M, phi1)
    rep.rows.append({"run": "sharpness", "N": sharp_N, "M": sharp_M, "ratio": sharp})
    rep.check("sharpness", 0.25 <= sharp <= 4.0, ratio=sharp, window=[0.25, 4.0])

    # without the sup term the ratio grows with N at fixed dilation
    Ns = [1.0, 2.0, 4.0]
    naive = []
    for N in Ns:
        d = sharpness_datum(N)
        naive.append(dilated_norm(d, float(np.exp(sharp_M)), phi1)
                     / (luxemburg_frequency_norm(d, phi1) * np.exp(sharp_M) ** sharp_gamma))
        rep.rows.append({"run": "without_sup", "N": N, "M": sharp_M, "ratio": naive[-1]})
    rep.info["without_sup_ratios"] = naive
    rep.check("sup_term_needed", bool(np.all(np.diff(naive) > 0)) and naive[-1] > 2 * naive[0],
              ratios=naive)
    return rep
