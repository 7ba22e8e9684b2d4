"""Lebesgue, Sobolev, Fourier-Lebesgue, modulation, mixed and Bourgain norms."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .grid import SpaceTimeField, SpectralField, block_masses, to_physical

__all__ = [
    "NormSpec",
    "lebesgue_norm",
    "sobolev_norm",
    "fourier_lebesgue_norm",
    "modulation_norm",
    "mixed_spacetime_norm",
    "bourgain_norm",
    "bourgain_shells",
    "time_taper",
    "lp_rows",
    "conjugate_exponent",
]


def conjugate_exponent(r: float) -> float:
    """Hölder conjugate r' with 1/r + 1/r' = 1."""
    if r == 1:
        return np.inf
    if np.isinf(r):
        return 1.0
    return r / (r - 1.0)


def _check_exponent(p, name="p", lo=1.0):
    if not (p >= lo):
        raise ValueError(f"{name} must lie in [{lo:g}, inf], got {p}")


def lp_rows(values: np.ndarray, weight: float, p: float) -> np.ndarray:
    """Weighted l^p norm along the last axis: ``(weight * sum |v|^p)^(1/p)``."""
    a = np.abs(values)
    if np.isinf(p):
        return a.max(axis=-1) if a.shape[-1] else np.zeros(a.shape[:-1])
    if p == 2:
        return np.sqrt(weight * np.sum(a * a, axis=-1))
    return (weight * np.sum(a**p, axis=-1)) ** (1.0 / p)


def lebesgue_norm(u: SpectralField, p: float) -> float:
    """``||u||_{L^p}`` by a Riemann sum over the physical grid (max for p=inf)."""
    _check_exponent(p)
    return float(lp_rows(u.physical(), u.grid.dx, p))


def sobolev_norm(u: SpectralField, s: float, homogeneous: bool = False) -> float:
    """Sobolev norm with weight ``|xi|^{2s}`` or ``(1+xi^2)^s``.

    Raises
    ------
    ValueError
        For a homogeneous norm with ``s < 0`` when the zero mode is nonzero.
    """
    xi = u.grid.xi
    power = np.abs(u.coeffs) ** 2
    if homogeneous:
        zero = xi == 0
        if s < 0 and power[zero].any():
            raise ValueError("homogeneous norm with s < 0 needs a vanishing zero mode")
        w = np.zeros_like(xi)
        w[~zero] = np.abs(xi[~zero]) ** (2 * s)
        if s == 0:
            w[zero] = 1.0
    else:
        w = (1.0 + xi**2) ** s
    return float(np.sqrt(u.grid.dxi * np.sum(w * power)))


def fourier_lebesgue_norm(u: SpectralField, r: float) -> float:
    """``||u||_{L^r-hat} = ||u_hat||_{L^{r'}}``; r = 1 gives the sup of |u_hat|."""
    _check_exponent(r, "r")
    return float(lp_rows(u.coeffs, u.grid.dxi, conjugate_exponent(r)))


def modulation_norm(u: SpectralField, p: float) -> float:
    """``M_{2,p}`` norm: l^p sum of unit-block L2 masses.

    ``p = inf`` (the endpoint space) is accepted for diagnostics.
    """
    _check_exponent(p)
    _, masses = block_masses(u.grid, u.coeffs)
    return float(lp_rows(masses, 1.0, p))


def mixed_spacetime_norm(U: SpaceTimeField, p: float, q: float) -> float:
    """``||U||_{L^p_t L^q_x}`` with a left-endpoint Riemann sum in time.

    Frames ``0..M-1`` carry weight ``dt``; ``p = inf`` takes the maximum over
    all frames.
    """
    _check_exponent(p)
    _check_exponent(q, "q")
    inner = lp_rows(U.physical(), U.grid.dx, q)
    if np.isinf(p):
        return float(inner.max())
    if U.num_frames < 2:
        return 0.0
    return float(lp_rows(inner[:-1], U.dt, p))


def time_taper(n: int, fraction: float = 0.1) -> np.ndarray:
    """Window equal to one in the middle with cosine ramps on each end."""
    w = np.ones(n)
    ramp = int(np.floor(fraction * n))
    if ramp > 0:
        k = np.arange(ramp)
        rise = 0.5 * (1 - np.cos(np.pi * (k + 0.5) / ramp))
        w[:ramp] = rise
        w[n - ramp:] = rise[::-1]
    return w


def bourgain_shells(U: SpaceTimeField, s: float = 0.0, taper: float = 0.1):
    """Distribution of the space-time transform over dyadic modulation shells.

    The frames are tapered in time and transformed with kernel
    ``exp(+i t tau)`` so that free waves ``exp(-i t xi^2)`` concentrate on
    ``tau = xi^2``.  The modulation ``|tau - xi^2|`` is measured modulo the
    sampling period ``2 pi / dt``.

    Returns
    -------
    dict
        ``mu`` (shell lower edges, the first shell being ``[0, 2 dtau)``),
        ``weighted`` (integrals of ``|u~|^2 |xi|^{2s} |tau - xi^2|``) and
        ``mass`` (integrals of ``|u~|^2 |xi|^{2s}``) per shell, plus ``dtau``.
    """
    n = U.num_frames
    if n < 8:
        raise ValueError(f"need at least 8 time samples, got {n}")
    dt = U.dt
    grid = U.grid
    w = time_taper(n, taper)[:, None]
    # sum_n f(t_n) exp(+i n dt tau_l) via an inverse FFT scaled back up
    trans = np.fft.ifft(w * U.coeffs, axis=0) * n
    trans *= dt / np.sqrt(2 * np.pi)
    dtau = 2 * np.pi / (n * dt)
    omega = 2 * np.pi / dt
    tau = np.arange(n) * dtau
    xi = grid.xi
    mod = np.abs(np.mod(tau[:, None] - xi[None, :] ** 2 + omega / 2, omega) - omega / 2)
    if s == 0:
        sw = np.ones_like(xi)
    else:
        sw = np.where(xi != 0, np.abs(xi) ** (2 * s), 0.0)
    dens = np.abs(trans) ** 2 * sw[None, :] * grid.dxi * dtau
    kmax = int(np.floor(np.log2(n / 2))) + 1
    shell = np.floor(np.log2(np.maximum(mod, dtau) / dtau)).astype(int)
    shell = np.clip(shell, 0, kmax - 1)
    weighted = np.bincount(shell.ravel(), (dens * mod).ravel(), minlength=kmax)
    mass = np.bincount(shell.ravel(), dens.ravel(), minlength=kmax)
    mu = np.r_[0.0, dtau * 2.0 ** np.arange(1, kmax)]
    return {"mu": mu, "weighted": weighted, "mass": mass, "dtau": dtau}


def bourgain_norm(U: SpaceTimeField, s: float = 0.0, variant: str = "sup") -> float:
    """Dyadic-modulation norm: sup or sum over shells of the root shell integral."""
    if variant not in ("sup", "sum"):
        raise ValueError(f"variant must be 'sup' or 'sum', got {variant!r}")
    roots = np.sqrt(bourgain_shells(U, s)["weighted"])
    return float(roots.max() if variant == "sup" else roots.sum())


_KINDS = ("lebesgue", "sobolev", "fourier_lebesgue", "modulation", "mixed", "bourgain")


@dataclass(frozen=True)
class NormSpec:
    """Declarative description of a norm, evaluable on fields.

    Parameters
    ----------
    kind : str
        One of ``lebesgue``, ``sobolev``, ``fourier_lebesgue``, ``modulation``,
        ``mixed``, ``bourgain``.
    """

    kind: str
    p: float = 2.0
    q: float = 2.0
    r: float = 2.0
    s: float = 0.0
    homogeneous: bool = False
    variant: str = "sup"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "modulation" and np.isinf(self.p):
            raise ValueError("modulation norm requires finite p")
        for name in ("p", "q", "r"):
            _check_exponent(getattr(self, name), name)

    def __call__(self, u) -> float:
        k = self.kind
        if k == "lebesgue":
            return lebesgue_norm(u, self.p)
        if k == "sobolev":
            return sobolev_norm(u, self.s, self.homogeneous)
        if k == "fourier_lebesgue":
            return fourier_lebesgue_norm(u, self.r)
        if k == "modulation":
            return modulation_norm(u, self.p)
        if k == "mixed":
            return mixed_spacetime_norm(u, self.p, self.q)
        return bourgain_norm(u, self.s, self.variant)

    def params(self) -> dict:
        d = asdict(self)
        return {key: (str(v) if isinstance(v, float) and np.isinf(v) else v) for key, v in d.items()}

    def frames(self, grid, coeffs: np.ndarray) -> np.ndarray:
        """Evaluate a single-time norm on each row of ``coeffs``."""
        k = self.kind
        if k == "modulation":
            return lp_rows(block_masses(grid, coeffs)[1], 1.0, self.p)
        if k == "lebesgue":
            return lp_rows(to_physical(grid, coeffs), grid.dx, self.p)
        if k == "fourier_lebesgue":
            return lp_rows(coeffs, grid.dxi, conjugate_exponent(self.r))
        if k == "sobolev":
            return np.array([sobolev_norm(SpectralField(grid, c), self.s, self.homogeneous)
                             for c in coeffs])
        raise ValueError(f"{k} is not a single-time norm")
