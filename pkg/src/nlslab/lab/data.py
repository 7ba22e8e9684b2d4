"""Initial data families.

Every family describes a spectrum ``u_hat(xi)``.  Slowly decaying profiles
are multiplied by a smooth window that equals one up to ``0.75 xi_c`` and
vanishes beyond ``xi_c = xi_max / 2``, so all mass sits inside the
de-aliasing margin.
"""

from __future__ import annotations

import numpy as np

from ..grid import FrequencyGrid, SpectralField

__all__ = ["FAMILIES", "generate_data", "spectral_window", "margin_fraction", "profile"]

FAMILIES = ("gaussian", "power_decay", "log_decay", "flat_band", "random_phase")
MARGIN = 0.9999


def spectral_window(xi: np.ndarray, cutoff: float) -> np.ndarray:
    """Cosine-tapered window: 1 on ``|xi| <= 0.75 cutoff``, 0 on ``|xi| >= cutoff``."""
    a = np.abs(xi)
    start = 0.75 * cutoff
    s = np.clip((a - start) / (cutoff - start), 0.0, 1.0)
    return 0.5 * (1 + np.cos(np.pi * s))


def margin_fraction(u: SpectralField) -> float:
    """Fraction of L2 mass with ``|xi| <= xi_max / 2``."""
    power = np.abs(u.coeffs) ** 2
    total = power.sum()
    if total == 0:
        return 1.0
    inside = np.abs(u.grid.xi) <= u.grid.xi_max / 2
    return float(power[inside].sum() / total)


def profile(grid: FrequencyGrid, family: str, params: dict) -> np.ndarray:
    """Real nonnegative spectral profile of a deterministic family on ``grid``."""
    xi = grid.xi
    if family == "gaussian":
        width = params.get("width", 1.0)
        center = params.get("center", 0.0)
        return np.exp(-0.5 * ((xi - center) / width) ** 2)
    if family == "power_decay":
        beta = params["beta"]
        if beta <= 0:
            raise ValueError("power_decay needs beta > 0")
        return (1 + np.abs(xi)) ** (-beta) * spectral_window(xi, grid.xi_max / 2)
    if family == "log_decay":
        gamma = params["gamma"]
        if gamma <= 0:
            raise ValueError("log_decay needs gamma > 0")
        return np.log(2 + np.abs(xi)) ** (-gamma) * spectral_window(xi, grid.xi_max / 2)
    if family == "flat_band":
        a, b = params.get("band", (0.0, 1.0))
        if not a < b:
            raise ValueError("flat_band needs a < b")
        j = grid.j
        return ((j >= a * grid.m) & (j < b * grid.m)).astype(float)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def generate_data(grid: FrequencyGrid, family: str, params: dict | None = None,
                  seed: int | None = None) -> SpectralField:
    """Initial datum of a family, optionally rescaled.

    Parameters
    ----------
    family : str
        ``gaussian`` (width, center), ``power_decay`` (beta),
        ``log_decay`` (gamma), ``flat_band`` (band = (a, b)) or
        ``random_phase`` (profile = name, profile_params, phase_scale).
        ``random_phase`` multiplies the profile by phases that are constant
        on frequency cells of length ``phase_scale`` (default 1), so the
        datum does not depend on the grid resolution.
    params : dict
        Family parameters; ``amplitude`` multiplies the result.
    seed : int
        Seed for ``random_phase``.

    Raises
    ------
    ValueError
        If the datum puts more than 0.01% of its mass outside
        ``|xi| <= xi_max / 2``.
    """
    params = dict(params or {})
    amp = params.pop("amplitude", 1.0)
    if family == "random_phase":
        base = params.get("profile", "gaussian")
        prof = profile(grid, base, params.get("profile_params", {}))
        scale = params.get("phase_scale", 1.0)
        cells = np.floor(grid.xi / scale).astype(int)
        lo = cells.min()
        rng = np.random.default_rng(seed)
        theta = rng.uniform(0, 2 * np.pi, cells.max() - lo + 1)
        coeffs = prof * np.exp(1j * theta[cells - lo])
    else:
        coeffs = profile(grid, family, params).astype(complex)
    u = SpectralField(grid, amp * coeffs)
    frac = margin_fraction(u)
    if frac < MARGIN:
        raise ValueError(f"datum violates the de-aliasing margin: {frac:.6f} of mass inside "
                         f"|xi| <= {grid.xi_max / 2:g}")
    return u
