"""Bilinear interaction of two free waves with separated frequencies.

For free waves ``u = exp(i t Delta) u0`` and ``v = exp(i t Delta) v0``
(unitary transform, free multiplier ``exp(-i t xi^2)``)

    F(u conj(v))(t, xi) = (2 pi)^{-1/2} int exp(-i t xi^2 + 2 i t xi eta)
                          u0_hat(xi - eta) conj(v0_hat(-eta)) d eta

and integrating over all times gives the frequency-side identity

    ||P_{>lam}(u conj(v))||^2_{L2(R x R)}
        = int int 1{|xi1 - xi2| > lam} |u0_hat(xi1)|^2 |v0_hat(xi2)|^2
          / (2 |xi1 - xi2|) d xi1 d xi2.
"""

from __future__ import annotations

import numpy as np

from ..evolution import free_evolve
from ..grid import FrequencyGrid, SpectralField, to_physical, to_spectrum
from .data import generate_data
from .report import EstimateReport, band_verdict, fit_power_law

__all__ = [
    "product_spectrum",
    "kernel_oracle",
    "verify_bilinear_kernel",
    "flat_band_kernel_continuum",
    "frequency_side_mass",
    "windowed_mass",
    "bilinear_identity",
    "verify_bilinear_inequality",
    "sweep_grid",
]


def product_spectrum(u0: SpectralField, v0: SpectralField, t: float) -> np.ndarray:
    """Coefficients of ``u(t) conj(v(t))`` computed on the physical grid."""
    u = free_evolve(u0, t).physical()
    v = free_evolve(v0, t).physical()
    return to_spectrum(u0.grid, u * np.conj(v))


def kernel_oracle(u0: SpectralField, v0: SpectralField, t: float, xi: np.ndarray) -> np.ndarray:
    """Direct oscillatory lattice sum of the product kernel at frequencies ``xi``.

    Evaluates ``(2 pi)^{-1/2} dxi sum_eta exp(-i t xi^2 + 2 i t xi eta)
    u0_hat(xi - eta) conj(v0_hat(-eta))`` over the lattice ``eta``.
    """
    grid = u0.grid
    m = grid.m
    su = np.flatnonzero(u0.coeffs)
    sv = np.flatnonzero(v0.coeffs)
    ju = grid.j[su]
    jv = grid.j[sv]
    out = np.zeros(len(xi), dtype=complex)
    for n, x in enumerate(np.atleast_1d(xi)):
        jx = int(round(x * m))
        # eta = -xi_b for b in supp(v0); then xi - eta = xi + xi_b must lie in supp(u0)
        a = jx + jv
        ok = np.isin(a, ju)
        if not ok.any():
            continue
        eta = -jv[ok] / m
        ua = u0.coeffs[a[ok] + grid.N // 2]
        vb = v0.coeffs[sv[ok]]
        phase = np.exp(-1j * t * x * x + 2j * t * x * eta)
        out[n] = grid.dxi / np.sqrt(2 * np.pi) * np.sum(phase * ua * np.conj(vb))
    return out


def flat_band_kernel_continuum(band_u, band_v, t: float, xi: float) -> complex:
    """Continuum value of the kernel for indicator spectra (closed form)."""
    # eta ranges over {xi - eta in band_u} and {-eta in band_v}
    lo = max(xi - band_u[1], -band_v[1])
    hi = min(xi - band_u[0], -band_v[0])
    if hi <= lo:
        return 0.0j
    w = 2 * t * xi
    if abs(w) < 1e-300:
        integral = hi - lo
    else:
        integral = (np.exp(1j * w * hi) - np.exp(1j * w * lo)) / (1j * w)
    return complex(np.exp(-1j * t * xi * xi) * integral / np.sqrt(2 * np.pi))


def verify_bilinear_kernel(u0: SpectralField, v0: SpectralField, t_samples, xi_samples=None,
                           rel_floor: float = 1e-3) -> float:
    """Largest relative deviation between the grid product and the kernel sum.

    Errors are measured relative to the largest kernel modulus at each time;
    ``xi_samples`` defaults to every lattice frequency whose oracle value
    exceeds ``rel_floor`` times that maximum.
    """
    grid = u0.grid
    worst = 0.0
    for t in np.atleast_1d(t_samples):
        spec = product_spectrum(u0, v0, float(t))
        if xi_samples is None:
            cand = grid.xi[np.abs(spec) > rel_floor * np.abs(spec).max()]
        else:
            cand = np.asarray(xi_samples, dtype=float)
        oracle = kernel_oracle(u0, v0, float(t), cand)
        idx = np.rint(cand * grid.m).astype(int) + grid.N // 2
        scale = max(np.abs(oracle).max(), np.finfo(float).tiny)
        worst = max(worst, float(np.max(np.abs(spec[idx] - oracle)) / scale))
    return worst


def frequency_side_mass(u0: SpectralField, v0: SpectralField, lam: float) -> float:
    """Lattice quadrature of the double integral with kernel ``1/(2|xi1 - xi2|)``."""
    grid = u0.grid
    pu = np.abs(u0.coeffs) ** 2
    pv = np.abs(v0.coeffs) ** 2
    iu = np.flatnonzero(pu)
    iv = np.flatnonzero(pv)
    d = np.abs(grid.xi[iu][:, None] - grid.xi[iv][None, :])
    with np.errstate(divide="ignore"):
        kern = np.where(d > lam, 1.0 / (2 * d), 0.0)
    return float(grid.dxi**2 * pu[iu] @ kern @ pv[iv])


def windowed_mass(u0: SpectralField, v0: SpectralField, lam: float, T_w: float, dt: float,
                  chunk: int = 128) -> float:
    """``int_{-T_w}^{T_w} ||P_{>lam}(u conj(v))(t)||^2_{L2} dt`` by the trapezoid rule."""
    grid = u0.grid
    n = int(np.ceil(2 * T_w / dt))
    times = np.linspace(-T_w, T_w, n + 1)
    keep = np.abs(grid.xi) > lam
    w = np.full(times.size, times[1] - times[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    xi2 = grid.xi**2
    total = 0.0
    for s in range(0, times.size, chunk):
        t = times[s:s + chunk, None]
        ph = np.exp(-1j * t * xi2)
        u = to_physical(grid, ph * u0.coeffs)
        v = to_physical(grid, ph * v0.coeffs)
        spec = to_spectrum(grid, u * np.conj(v))
        vals = grid.dxi * np.sum(np.abs(spec[:, keep]) ** 2, axis=1)
        total += float(np.dot(w[s:s + chunk], vals))
    return total


def bilinear_identity(u0: SpectralField, v0: SpectralField, lam: float, T_w: float, dt: float,
                      target: float = 0.95, max_doublings: int = 6):
    """Windowed mass against the frequency-side value, doubling ``T_w`` until ``target``.

    Returns
    -------
    dict
        ``rhs``, ``history`` (list of (T_w, lhs)), ``converged`` and
        ``recurrence`` (the torus time beyond which separated packets meet
        again; windows are kept below half of it).
    """
    grid = u0.grid
    rhs = frequency_side_mass(u0, v0, lam)
    ku = grid.xi[np.abs(u0.coeffs) > 0]
    kv = grid.xi[np.abs(v0.coeffs) > 0]
    sep = max(abs(ku.max() - kv.min()), abs(kv.max() - ku.min())) if ku.size and kv.size else 0.0
    recurrence = np.pi * grid.m / sep if sep > 0 else np.inf
    hist = []
    converged = rhs == 0
    T = T_w
    for _ in range(max_doublings + 1):
        if T > recurrence / 2:
            break
        lhs = windowed_mass(u0, v0, lam, T, dt)
        hist.append((T, lhs))
        if rhs == 0 or lhs >= target * rhs:
            converged = True
            break
        T *= 2
    return {"rhs": rhs, "history": hist, "converged": converged, "recurrence": recurrence}


def sweep_grid(top: float, m: int = 32) -> FrequencyGrid:
    """Smallest grid whose de-aliasing margin contains ``[-top, top]``."""
    xi_max = 2.0 ** np.ceil(np.log2(2 * top))
    N = int(max(16 * m, 2 * m * xi_max))
    return FrequencyGrid(N, m)


def verify_bilinear_inequality(lambda_sweep, band_u=(0.0, 1.0), offset: float = 2.0,
                               m: int = 32, window: float = 16.0, dt_scale: float = 0.05,
                               band: float = 2.0, target: float = 0.95) -> EstimateReport:
    """Sweep ``lam`` with the second band translated to ``[lam + offset, lam + offset + 1)``.

    For each ``lam`` the windowed space-time mass of ``P_{>lam}(u conj(v))``
    over ``[-T_w, T_w]`` (starting at ``T_w = window / lam``, doubled until it
    reaches ``target`` of the frequency-side value) gives the measured norm.
    The ratio against ``lam^{-1/2} ||u0|| ||v0||`` must stay within ``band``
    and the fitted ``lam``-exponent of the norm within ``[-0.6, -0.4]``.
    """
    rep = EstimateReport(
        estimate_id="bilinear_lambda_sweep",
        predicted_law="||P_{>lam}(u conj v)||_{L2L2} <= C lam^{-1/2} ||u0|| ||v0||",
        sweep_name="lambda",
        params={"band_u": list(band_u), "offset": offset, "m": m, "window": window,
                "dt_scale": dt_scale, "band": band, "target": target},
    )
    norms = []
    for lam in lambda_sweep:
        band_v = (lam + offset, lam + offset + 1.0)
        g = sweep_grid(band_v[1], m)
        u0 = generate_data(g, "flat_band", {"band": band_u})
        v0 = generate_data(g, "flat_band", {"band": band_v})
        res = bilinear_identity(u0, v0, lam, window / lam, dt_scale / lam, target)
        T_w, lhs = res["history"][-1] if res["history"] else (0.0, 0.0)
        norm = np.sqrt(lhs)
        ratio = norm / (lam**-0.5 * u0.l2_norm() * v0.l2_norm())
        norms.append(norm)
        rep.sweep.append(lam)
        rep.ratios.append(ratio)
        rep.rows.append({"lambda": lam, "N": g.N, "m": g.m, "T_w": T_w, "lhs_sq": lhs,
                         "rhs_sq": res["rhs"], "captured": lhs / res["rhs"] if res["rhs"] else 1.0,
                         "norm": norm, "ratio": ratio})
        rep.check(f"window_lambda_{lam:g}", res["converged"], captured=lhs / res["rhs"])
    expo, _, resid = fit_power_law(rep.sweep, norms)
    rep.fitted_exponent, rep.fit_residual = expo, resid
    rep.info.update({"fit_x": rep.sweep, "fit_y": norms})
    verdict, spread = band_verdict(rep.ratios, band)
    rep.verdict = verdict
    rep.check("ratio_band", verdict == "bounded", spread=spread, band=band)
    rep.check("exponent", -0.6 <= expo <= -0.4, exponent=expo, window=[-0.6, -0.4])
    rep.check("exponent_upper", expo <= -0.5 + 0.1, exponent=expo)
    return rep
