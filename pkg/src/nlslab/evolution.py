"""Free flow, symmetries, split-step solver, Duhamel quadrature and Picard iteration.

Equation: ``i u_t + u_xx - sign * |u|^2 u = 0`` with ``sign = +1`` by
default.  The free flow multiplies Fourier coefficients by
``exp(-i t xi^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (FrequencyGrid, SpaceTimeField, SpectralField, block_masses, to_physical,
                   to_spectrum)
from .norms import NormSpec

__all__ = [
    "EvolutionConfig",
    "free_evolve",
    "free_evolution",
    "galilean_boost",
    "galilean_reference",
    "rescale",
    "dealias_mask",
    "cubic_term",
    "splitstep_evolve",
    "mass",
    "energy",
    "duhamel_apply",
    "picard_iterate",
    "PicardResult",
    "picard_coefficient",
]


@dataclass(frozen=True)
class EvolutionConfig:
    """Time stepping parameters.

    Parameters
    ----------
    T : float
        Final time.
    M : int
        Number of time steps, ``dt = T / M``.
    dealias : bool
        Apply the 2/3-rule mask to nonlinear products.
    sign : int
        +1 for the defocusing equation, -1 for the focusing one.
    stride : int
        Record every ``stride``-th step.
    nonlinear : bool
        Switch the nonlinearity off to obtain the free flow.
    max_dt : float
        Largest accepted step.
    """

    T: float = 1.0
    M: int = 1000
    dealias: bool = True
    sign: int = 1
    stride: int = 1
    nonlinear: bool = True
    max_dt: float = 0.01

    def __post_init__(self):
        if self.T <= 0 or self.M < 1:
            raise ValueError("need T > 0 and M >= 1")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.stride < 1 or self.M % self.stride:
            raise ValueError("stride must divide M")
        if self.dt > self.max_dt * (1 + 1e-12):
            raise ValueError(f"dt = {self.dt:g} exceeds max_dt = {self.max_dt:g}")

    @property
    def dt(self) -> float:
        return self.T / self.M

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.M // self.stride + 1)

    def to_dict(self) -> dict:
        return {"T": self.T, "M": self.M, "dealias": self.dealias, "sign": self.sign,
                "stride": self.stride, "nonlinear": self.nonlinear,
                "equation": "i u_t + u_xx - sign |u|^2 u = 0",
                "free_multiplier": "exp(-i t xi^2)"}


def free_evolve(u0: SpectralField, t: float) -> SpectralField:
    """``exp(i t Delta) u0``: multiply coefficients by ``exp(-i t xi^2)``."""
    return SpectralField(u0.grid, u0.coeffs * np.exp(-1j * t * u0.grid.xi**2))


def free_evolution(u0: SpectralField, times) -> SpaceTimeField:
    """Free solution sampled at uniform ``times``."""
    times = np.asarray(times, dtype=float)
    phase = np.exp(-1j * np.outer(times, u0.grid.xi**2))
    return SpaceTimeField(u0.grid, times, phase * u0.coeffs[None, :])


def _lattice_shift(grid: FrequencyGrid, c: float) -> int:
    s = c * grid.m
    if abs(s - round(s)) > 1e-9:
        raise ValueError(f"boost c = {c} is not a multiple of dxi = {grid.dxi}")
    return int(round(s))


def _shift(coeffs: np.ndarray, s: int) -> np.ndarray:
    # out[..., j] = coeffs[..., j - s], zero fill: modes leaving the grid are dropped
    out = np.zeros_like(coeffs)
    n = coeffs.shape[-1]
    if s >= 0:
        out[..., s:] = coeffs[..., : n - s]
    else:
        out[..., : n + s] = coeffs[..., -s:]
    return out


def galilean_boost(u0: SpectralField, c: float) -> SpectralField:
    """Initial data ``exp(i c x) u0``: spectrum translated by ``c``."""
    return SpectralField(u0.grid, _shift(u0.coeffs, _lattice_shift(u0.grid, c)))


def galilean_reference(U: SpaceTimeField, c: float) -> SpaceTimeField:
    """Frame-wise ``exp(-i(c^2 t - c x)) u(t, x - 2 c t)``.

    In Fourier variables this is
    ``exp(-i c^2 t) exp(-i (xi - c) 2 c t) u_hat(t, xi - c)``.
    """
    grid = U.grid
    s = _lattice_shift(grid, c)
    t = U.times[:, None]
    eta = grid.xi[None, :] - c
    phase = np.exp(-1j * (c * c * t + 2 * c * t * eta))
    return U.with_coeffs(phase * _shift(U.coeffs, s))


def rescale(u0: SpectralField, lam: float) -> SpectralField:
    """``lam * u0(lam x)`` for ``lam`` a power of two.

    The result lives on the grid with ``m' = m / lam`` (period ``L / lam``),
    where the lattice point ``j`` sits at ``lam * xi_j``; the coefficients
    are unchanged because ``v_hat(xi) = u_hat(xi / lam)``.

    Raises
    ------
    ValueError
        If ``lam`` is not a power of two or ``m / lam`` is not an integer.
    """
    k = np.log2(lam)
    if lam <= 0 or abs(k - round(k)) > 1e-12:
        raise ValueError(f"lambda must be a power of two, got {lam}")
    m_new = u0.grid.m / lam
    if abs(m_new - round(m_new)) > 1e-12 or m_new < 1:
        raise ValueError(f"grid with m = {u0.grid.m} cannot be rescaled by {lam}")
    return SpectralField(FrequencyGrid(u0.grid.N, int(round(m_new))), u0.coeffs)


def dealias_mask(grid: FrequencyGrid) -> np.ndarray:
    """2/3-rule mask: keep modes with ``|j| < N/3``."""
    return np.abs(grid.j) < grid.N / 3.0


def cubic_term(grid: FrequencyGrid, coeffs: np.ndarray, dealias: bool = True) -> np.ndarray:
    """Coefficients of ``|u|^2 u`` (rows are frames)."""
    u = to_physical(grid, coeffs)
    out = to_spectrum(grid, np.abs(u) ** 2 * u)
    if dealias:
        out = out * dealias_mask(grid)
    return out


def mass(u: SpectralField) -> float:
    return u.l2_norm() ** 2


def energy(u: SpectralField, sign: int = 1) -> float:
    """``int |u_x|^2 + (sign / 2) |u|^4 dx``."""
    grid = u.grid
    kinetic = grid.dxi * np.sum(grid.xi**2 * np.abs(u.coeffs) ** 2)
    quartic = grid.dx * np.sum(np.abs(u.physical()) ** 4)
    return float(kinetic + 0.5 * sign * quartic)


def splitstep_evolve(u0: SpectralField, config: EvolutionConfig) -> SpaceTimeField:
    """Strang split-step solution recorded every ``config.stride`` steps.

    Each step applies half a nonlinear phase ``u exp(-i sign |u|^2 dt/2)``,
    a full free step and another half nonlinear phase.

    Raises
    ------
    FloatingPointError
        If the solution becomes non-finite.
    """
    grid = u0.grid
    dt = config.dt
    lin = np.exp(-1j * dt * grid.xi**2)
    mask = dealias_mask(grid) if config.dealias else None
    frames = np.empty((config.M // config.stride + 1, grid.N), dtype=complex)
    frames[0] = u0.coeffs
    c = np.array(u0.coeffs)
    half = 0.5 * dt * config.sign
    for n in range(1, config.M + 1):
        if config.nonlinear:
            u = to_physical(grid, c)
            u = u * np.exp(-1j * half * np.abs(u) ** 2)
            c = to_spectrum(grid, u) * lin
            u = to_physical(grid, c)
            u = u * np.exp(-1j * half * np.abs(u) ** 2)
            c = to_spectrum(grid, u)
            if mask is not None:
                c = c * mask
        else:
            c = c * lin
        if n % config.stride == 0:
            if not np.all(np.isfinite(c)):
                raise FloatingPointError(f"non-finite solution at step {n}, t = {n * dt:g}")
            frames[n // config.stride] = c
    return SpaceTimeField(grid, config.times, frames)


def duhamel_apply(F: SpaceTimeField) -> SpaceTimeField:
    """``int_{t_0}^{t} exp(i (t - s) Delta) F(s) ds`` at every sample time.

    The integrand is twisted by ``exp(+i s xi^2)``, integrated with the
    cumulative trapezoid rule and twisted back.
    """
    grid = F.grid
    t = F.times
    xi2 = grid.xi**2
    G = np.exp(1j * np.outer(t, xi2)) * F.coeffs
    cum = np.zeros_like(G)
    if t.size > 1:
        steps = 0.5 * np.diff(t)[:, None] * (G[1:] + G[:-1])
        cum[1:] = np.cumsum(steps, axis=0)
    return F.with_coeffs(np.exp(-1j * np.outer(t, xi2)) * cum)


def picard_coefficient(T: float, p: float = 4.0, eps: float = 1e-2) -> float:
    """``A(T) = T^{1/2} + T^{1/4} + T^{1/p+}`` with ``p+ = p + eps``."""
    return T**0.5 + T**0.25 + T ** (1.0 / (p + eps))


@dataclass
class PicardResult:
    """Outcome of :func:`picard_iterate`.

    ``differences[n]`` is ``sup_t ||u^{n+1}(t) - u^n(t)||`` in the monitored
    norm and ``ratios[n] = differences[n+1] / differences[n]``.
    """

    final: SpaceTimeField
    differences: np.ndarray
    ratios: np.ndarray
    A_T: float
    monitor: str
    diverged: bool = False
    stopped_at_floor: bool = False
    free_size: float = 0.0

    def to_dict(self) -> dict:
        return {
            "differences": [float(d) for d in self.differences],
            "ratios": [float(r) for r in self.ratios],
            "A_T": self.A_T,
            "monitor": self.monitor,
            "diverged": self.diverged,
            "stopped_at_floor": self.stopped_at_floor,
            "free_size": self.free_size,
        }


def _monitor_frames(monitor, grid, coeffs) -> np.ndarray:
    from .orlicz import YoungFunction, luxemburg_sequence_norm

    if isinstance(monitor, YoungFunction):
        masses = block_masses(grid, coeffs)[1]
        return np.array([luxemburg_sequence_norm(mu, monitor) for mu in masses])
    return monitor.frames(grid, coeffs)


def _monitor_name(monitor) -> str:
    if isinstance(monitor, NormSpec):
        return f"sup_t {monitor.kind} p={monitor.p:g}"
    return f"sup_t l^Phi L2 alpha={monitor.alpha:g} beta={monitor.beta:g} C={monitor.C:g}"


def picard_iterate(u0: SpectralField, T: float, n_iters: int, monitor=None, M: int | None = None,
                   dealias: bool = True, sign: int = 1, floor: float = 1e-13) -> PicardResult:
    """Picard iteration of the Duhamel map on a uniform time grid.

    ``u^0(t) = exp(i t Delta) u0`` and
    ``u^{n+1} = exp(i t Delta) u0 - i sign * Duhamel(|u^n|^2 u^n)``.

    Parameters
    ----------
    monitor : NormSpec or YoungFunction, optional
        Norm used for ``sup_t`` differences; defaults to ``M_{2,4}``.
    M : int, optional
        Number of time steps; defaults to ``dt = 1e-3``.
    floor : float
        Iteration stops once a difference falls below ``floor`` times the
        monitored size of the free solution (round-off level).
    """
    if n_iters < 2:
        raise ValueError("n_iters must be at least 2")
    monitor = NormSpec("modulation", p=4.0) if monitor is None else monitor
    if M is None:
        M = max(8, int(round(T / 1e-3)))
    times = np.linspace(0.0, T, M + 1)
    grid = u0.grid
    free = free_evolution(u0, times)
    p = getattr(monitor, "p", 4.0)
    free_size = float(np.max(_monitor_frames(monitor, grid, free.coeffs)))
    cur = free
    diffs = []
    stopped = False
    for _ in range(n_iters):
        nl = SpaceTimeField(grid, times, cubic_term(grid, cur.coeffs, dealias))
        nxt = free.coeffs - 1j * sign * duhamel_apply(nl).coeffs
        d = float(np.max(_monitor_frames(monitor, grid, nxt - cur.coeffs)))
        diffs.append(d)
        cur = SpaceTimeField(grid, times, nxt)
        if d <= floor * max(free_size, np.finfo(float).tiny):
            stopped = True
            break
    diffs = np.array(diffs)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = diffs[1:] / diffs[:-1]
    above = np.r_[ratios > 1, False].astype(int)
    run = 0
    diverged = False
    for a in above:
        run = run + 1 if a else 0
        if run >= 3:
            diverged = True
    return PicardResult(
        final=cur,
        differences=diffs,
        ratios=ratios,
        A_T=picard_coefficient(T, p if np.isfinite(p) else 4.0),
        monitor=_monitor_name(monitor),
        diverged=diverged,
        stopped_at_floor=stopped,
        free_size=free_size,
    )
