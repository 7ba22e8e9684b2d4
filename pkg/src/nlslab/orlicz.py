"""Young functions, Luxemburg norms and convex conjugates.

The Young functions used here are ``Phi(x) = exp(-x^{-alpha} + C x^beta)``
with ``Phi(0) = 0``.  Everything that can overflow or underflow is done in
the log domain: with ``l = log x`` we use

    log Phi(x)   = -exp(-alpha l) + C exp(beta l)
    log Phi'(x)  = log Phi(x) + log(alpha x^{-alpha-1} + C beta x^{beta-1})

Luxemburg norms solve ``sum_i w_i Phi(h_i / k) = 1`` for ``k`` by bisection
on ``log k`` with a logsumexp evaluation of the left side, so that widths
such as ``exp(-N)`` and scalings such as ``exp(exp(M))`` remain
representable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .grid import SpectralField, block_masses

__all__ = [
    "YoungFunction",
    "PiecewiseSpectrum",
    "choose_correction_constant",
    "orlicz_instance",
    "luxemburg_sequence_norm",
    "luxemburg_frequency_norm",
    "luxemburg_weighted_norm",
    "modulation_orlicz_norm",
    "convex_conjugate",
    "conjugate_sequence_norm",
    "indicator_conjugate_norm",
    "indicator_conjugate_ratio",
    "block_l2_average",
]

UNDERFLOW_EXPONENT = 700.0
BISECTION_RTOL = 1e-10
BISECTION_MAXITER = 200
SCAN_POINTS = 4000
SCAN_X_MIN = 1e-6


def _convexity_margin(x, alpha, beta, C):
    """``x^2 Phi''(x) / Phi(x)``; Phi is convex exactly where this is >= 0."""
    x = np.asarray(x, dtype=float)
    y = x ** (-alpha)
    return (alpha * alpha * y * y - alpha * (alpha + 1) * y
            + 2 * alpha * beta * C * x ** (beta - alpha)
            + (C * beta) ** 2 * x ** (2 * beta)
            + C * beta * (beta - 1) * x**beta)


def _scan_floor(alpha: float, x_min: float = SCAN_X_MIN) -> float:
    # the bare factor exp(-x^-alpha) has its inflection at t0; scanning three
    # decades below t0 lets the tail certificate take over
    t0 = (alpha / (alpha + 1)) ** (1 / alpha)
    return min(x_min, 1e-3 * t0)


def _tail_certified(alpha, beta, C, x_lo) -> bool:
    """Convexity on (0, x_lo] from monotonicity of the terms of the margin."""
    y = x_lo ** (-alpha)
    if y < (alpha + 1) / (2 * alpha):
        return False
    lead = alpha * alpha * y * y - alpha * (alpha + 1) * y
    neg = C * beta * (1 - beta) * x_lo**beta if beta < 1 else 0.0
    return lead >= neg


def _scan_convex(alpha, beta, C, x_max, x_min=SCAN_X_MIN, n=SCAN_POINTS) -> bool:
    x_lo = _scan_floor(alpha, x_min)
    x = np.geomspace(x_lo, x_max, n)
    return bool(np.all(_convexity_margin(x, alpha, beta, C) >= 0)
                and _tail_certified(alpha, beta, C, x_lo))


def choose_correction_constant(alpha: float, beta: float, x_max: float = 10.0,
                               x_min: float = SCAN_X_MIN,
                               sqrt_convex: bool = False) -> float:
    """Smallest correction constant ``C`` making ``Phi`` convex.

    The search doubles ``C`` from 1e-3 until the convexity scan passes and
    then bisects to three significant digits, returning the convex end.

    The scan evaluates the exact sign of ``Phi''`` on a geometric grid from
    ``min(x_min, 1e-3 * t0)`` to ``x_max`` (``t0`` being the inflection point
    of ``exp(-x^-alpha)``) and certifies the remaining interval near zero
    analytically, so the returned function is convex on all of (0, x_max].

    Parameters
    ----------
    sqrt_convex : bool
        Also require ``Phi(sqrt(t))`` to be convex on (0, x_max].

    Raises
    ------
    ValueError
        If no ``C <= 1e6`` passes the scan.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if x_max < 1:
        raise ValueError("x_max must be at least 1")

    def ok(C):
        good = _scan_convex(alpha, beta, C, x_max, x_min)
        if sqrt_convex:
            good = good and _scan_convex(alpha / 2, beta / 2, C, x_max, x_min)
        return good

    if ok(0.0):
        return 0.0
    C = 1e-3
    while not ok(C):
        C *= 2
        if C > 1e6:
            raise ValueError(f"no correction constant up to 1e6 for alpha={alpha}, beta={beta}")
    lo, hi = C / 2, C
    while (hi - lo) > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True, eq=False)
class YoungFunction:
    """``Phi(x) = exp(-x^{-alpha} + C x^beta)`` with ``Phi(0) = 0``.

    A table of ``log Phi'`` on a geometric grid is built at construction and
    used to bracket roots of ``Phi'(s) = t`` for the convex conjugate.
    """

    alpha: float
    beta: float
    C: float
    x_max: float = 10.0
    _table: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0 or self.C < 0:
            raise ValueError("need alpha > 0, beta > 0, C >= 0")
        # down to where x^-alpha = 1e5, i.e. Phi' ~ exp(-1e5)
        l_min = -np.log(1e5) / self.alpha
        l_grid = np.linspace(l_min, np.log(self.x_max), 20001)
        object.__setattr__(self, "_table", (l_grid, self.log_derivative_at(l_grid)))

    # -- evaluation -------------------------------------------------------
    def exponent_at(self, l):
        """``log Phi(e^l)``."""
        l = np.asarray(l, dtype=float)
        return -np.exp(-self.alpha * l) + self.C * np.exp(self.beta * l)

    def log_value(self, x):
        """``log Phi(x)``, ``-inf`` at ``x = 0``."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(x > 0, self.exponent_at(np.log(np.where(x > 0, x, 1.0))), -np.inf)

    def __call__(self, x):
        """``Phi(x)``; returns exactly 0 where ``x^{-alpha} > 700``."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("Phi is defined for x >= 0")
        pos = x > 0
        xs = np.where(pos, x, 1.0)
        neg = xs ** (-self.alpha)
        with np.errstate(over="ignore"):
            val = np.exp(-neg + self.C * xs**self.beta)
        return np.where(pos & (neg <= UNDERFLOW_EXPONENT), val, 0.0)

    def log_derivative_at(self, l):
        """``log Phi'(e^l)``."""
        l = np.asarray(l, dtype=float)
        a, b, C = self.alpha, self.beta, self.C
        t1 = np.log(a) - (a + 1) * l
        if C > 0:
            t1 = np.logaddexp(t1, np.log(C * b) + (b - 1) * l)
        return self.exponent_at(l) + t1

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        pos = x > 0
        with np.errstate(over="ignore"):
            d = np.exp(self.log_derivative_at(np.log(np.where(pos, x, 1.0))))
        return np.where(pos, d, 0.0)

    def _dlogderiv(self, l):
        # d/dl log Phi'(e^l), positive wherever Phi is convex
        a, b, C = self.alpha, self.beta, self.C
        p = a * np.exp(-(a + 1) * l)
        q = C * b * np.exp((b - 1) * l)
        return (a * np.exp(-a * l) + C * b * np.exp(b * l)
                + (-(a + 1) * p + (b - 1) * q) / (p + q))

    def convexity_margin(self, x):
        return _convexity_margin(x, self.alpha, self.beta, self.C)

    def is_convex(self, x_min: float = SCAN_X_MIN) -> bool:
        """Exact-sign convexity scan on (0, x_max] (see choose_correction_constant)."""
        return _scan_convex(self.alpha, self.beta, self.C, self.x_max, x_min)

    def second_difference_scan(self, x_min: float = SCAN_X_MIN, n: int = SCAN_POINTS) -> float:
        """Smallest normalized second divided difference on a geometric grid.

        Returns ``min f[x0,x1,x2] * x1^2 / Phi(x1)``, computed from log values
        so it is insensitive to overflow of ``Phi`` itself.
        """
        x = np.geomspace(x_min, self.x_max, n)
        g = self.log_value(x)
        x0, x1, x2 = x[:-2], x[1:-1], x[2:]
        with np.errstate(over="ignore", invalid="ignore"):
            r0 = np.exp(g[:-2] - g[1:-1])
            r2 = np.exp(g[2:] - g[1:-1])
            d = ((r2 - 1) / (x2 - x1) - (1 - r0) / (x1 - x0)) / (x2 - x0)
        return float(np.nanmin(d * x1**2))

    def unit_level(self) -> float:
        """``x*`` with ``Phi(x*) = 1``."""
        lo, hi = -50.0, 50.0
        f = lambda l: float(self.exponent_at(l))
        while f(hi) < 0:
            hi *= 2
        return float(np.exp(brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)))

    def sqrt_composed(self) -> "YoungFunction":
        """``Phi(sqrt(t))``, again of the same family."""
        return YoungFunction(self.alpha / 2, self.beta / 2, self.C, self.x_max)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "C": self.C, "x_max": self.x_max}

    # -- conjugate --------------------------------------------------------
    def log_conjugate(self, log_t: float) -> float:
        """``log Psi(t)`` for ``Psi(t) = sup_s (s t - Phi(s))``.

        Solves ``Phi'(s) = t`` on every bracket found in the cached table
        and keeps the largest value of ``s t - Phi(s)``.

        Raises
        ------
        ValueError
            If ``t`` lies outside the tabulated range of ``Phi'``.
        """
        lg, ld = self._table
        if not (ld.min() <= log_t <= ld.max()):
            raise ValueError(f"t = exp({log_t:g}) outside the derivative range "
                             f"[exp({ld.min():g}), exp({ld.max():g})]")
        f = ld - log_t
        idx = np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) <= 0)
        best = -np.inf
        a, b, C = self.alpha, self.beta, self.C
        for i in idx:
            fn = lambda l: float(self.log_derivative_at(l)) - log_t
            if f[i] == 0:
                l = lg[i]
            elif f[i + 1] == 0:
                l = lg[i + 1]
            else:
                l = brentq(fn, lg[i], lg[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
            # at a root Phi(s) = s t / (alpha s^-alpha + C beta s^beta)
            denom = a * np.exp(-a * l) + C * b * np.exp(b * l)
            if denom > 1:
                best = max(best, l + log_t + np.log1p(-1.0 / denom))
        return float(best)

    def conjugate_values(self, t) -> np.ndarray:
        """Vectorized ``Psi(t)`` for a convex ``Phi`` (Newton from the table)."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        if not pos.any():
            return out
        lt = np.log(t[pos])
        lg, ld = self._table
        if lt.min() < ld[0] or lt.max() > ld[-1]:
            raise ValueError("t outside the derivative range")
        if np.any(np.diff(ld) <= 0):
            return np.where(pos, [np.exp(self.log_conjugate(np.log(v))) if v > 0 else 0.0
                                  for v in t.ravel()], 0.0).reshape(t.shape)
        l = np.interp(lt, ld, lg)
        for _ in range(6):
            l = l - (self.log_derivative_at(l) - lt) / self._dlogderiv(l)
        a, b, C = self.alpha, self.beta, self.C
        denom = a * np.exp(-a * l) + C * b * np.exp(b * l)
        val = np.exp(l + lt) * np.clip(1 - 1 / denom, 0, None)
        out[pos] = val
        return out


def orlicz_instance(gamma: float, level: int = 1, x_max: float = 10.0,
                    sqrt_convex: bool = False) -> YoungFunction:
    """Young function of the family used for log-decaying data.

    ``level`` 1, 2, 3 give exponents ``(1/gamma, 1)``, ``(1/(2 gamma), 1/2)``
    and ``(1/(4 gamma), 1/4)``; ``C`` comes from the convexity search.
    """
    if level not in (1, 2, 3):
        raise ValueError("level must be 1, 2 or 3")
    k = 2 ** (level - 1)
    alpha, beta = 1.0 / (k * gamma), 1.0 / k
    C = choose_correction_constant(alpha, beta, x_max, sqrt_convex=sqrt_convex)
    return YoungFunction(alpha, beta, C, x_max)


@dataclass(frozen=True)
class PiecewiseSpectrum:
    """Piecewise-constant spectrum: heights ``h_i`` on pieces of width ``exp(log_widths_i)``."""

    heights: np.ndarray
    log_widths: np.ndarray

    @classmethod
    def from_widths(cls, heights, widths) -> "PiecewiseSpectrum":
        return cls(np.asarray(heights, float), np.log(np.asarray(widths, float)))

    def stretched(self, log_lambda: float) -> "PiecewiseSpectrum":
        """Spectrum of ``lambda u(lambda x)``: same heights, widths times lambda."""
        return PiecewiseSpectrum(self.heights, np.asarray(self.log_widths) + log_lambda)

    def sup(self) -> float:
        return float(np.max(np.abs(self.heights))) if len(self.heights) else 0.0


def _luxemburg(heights, log_weights, log_eval, rtol=BISECTION_RTOL, maxiter=BISECTION_MAXITER,
               k_start=None) -> float:
    """Solve ``logsumexp(log_weights + log_eval(heights / k)) = 0`` for ``k``."""
    h = np.abs(np.asarray(heights, dtype=float))
    lw = np.broadcast_to(np.asarray(log_weights, dtype=float), h.shape)
    keep = h > 0
    h, lw = h[keep], lw[keep]
    if h.size == 0:
        return 0.0

    def F(logk):
        return float(logsumexp(lw + log_eval(h / np.exp(logk))))

    lo = np.log(k_start if k_start else h.max())
    hi = lo
    step = np.log(2.0)
    while F(lo) < 0:
        lo -= step
        step *= 2
    step = np.log(2.0)
    while F(hi) > 0:
        hi += step
        step *= 2
    for _ in range(maxiter):
        if hi - lo <= rtol:
            break
        mid = 0.5 * (lo + hi)
        if F(mid) > 0:
            lo = mid
        else:
            hi = mid
    return float(np.exp(0.5 * (lo + hi)))


def luxemburg_sequence_norm(a, phi: YoungFunction) -> float:
    """``inf{k > 0 : sum_n Phi(|a_n| / k) <= 1}`` for a finite sequence.

    Raises
    ------
    ValueError
        If any entry is negative.
    """
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("sequence entries must be nonnegative")
    if not a.any():
        return 0.0
    return _luxemburg(a, 0.0, phi.log_value, k_start=a.max() / phi.unit_level())


def luxemburg_weighted_norm(heights, log_weights, phi: YoungFunction) -> float:
    """``inf{k : sum_i w_i Phi(h_i / k) <= 1}`` with weights given by their logs."""
    h = np.asarray(heights, dtype=float)
    if not np.any(h):
        return 0.0
    return _luxemburg(h, log_weights, phi.log_value, k_start=np.abs(h).max() / phi.unit_level())


def luxemburg_frequency_norm(u, phi: YoungFunction) -> float:
    """``inf{k : int Phi(|u_hat(xi)| / k) dxi <= 1}``.

    ``u`` is a :class:`SpectralField` (lattice sum with weight ``dxi``) or a
    :class:`PiecewiseSpectrum` (exact integral of a step profile).
    """
    if isinstance(u, SpectralField):
        return luxemburg_weighted_norm(np.abs(u.coeffs), np.log(u.grid.dxi), phi)
    if isinstance(u, PiecewiseSpectrum):
        return luxemburg_weighted_norm(np.abs(u.heights), u.log_widths, phi)
    raise TypeError(f"unsupported spectrum type {type(u).__name__}")


def modulation_orlicz_norm(u: SpectralField, phi: YoungFunction) -> float:
    """``l^Phi L2`` norm: Luxemburg norm of the unit-block masses."""
    _, masses = block_masses(u.grid, u.coeffs)
    return luxemburg_sequence_norm(masses, phi)


def convex_conjugate(phi: YoungFunction, t: float) -> float:
    """``Psi(t) = sup_s (s t - Phi(s))`` via root finding on ``Phi'(s) = t``."""
    if t <= 0:
        raise ValueError("t must be positive")
    return float(max(np.exp(phi.log_conjugate(np.log(t))), 0.0))


def conjugate_sequence_norm(b, phi: YoungFunction) -> float:
    """Luxemburg norm of ``b`` in ``l^Psi`` with ``Psi`` the conjugate of ``phi``."""
    b = np.asarray(b, dtype=float)
    if np.any(b < 0):
        raise ValueError("sequence entries must be nonnegative")
    if not b.any():
        return 0.0

    def log_psi(x):
        with np.errstate(divide="ignore"):
            return np.log(phi.conjugate_values(x))

    return _luxemburg(b, 0.0, log_psi)


def _indicator_log_norm(log_n: float, phi3: YoungFunction) -> float:
    # solve log N + log Psi(1/k) = 0 for log k by bisection
    def F(logk):
        return log_n + phi3.log_conjugate(-logk)

    lo, hi = -5.0, -5.0
    while F(lo) < 0:
        lo -= 5.0
    while F(hi) > 0:
        hi += 5.0
    for _ in range(BISECTION_MAXITER):
        if hi - lo <= BISECTION_RTOL:
            break
        mid = 0.5 * (lo + hi)
        if F(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def indicator_conjugate_norm(N: int, phi3: YoungFunction) -> float:
    """Norm of the all-ones sequence of length ``N`` in ``l^Psi``.

    Solves ``N Psi(1/k) = 1`` by bisection on ``log k`` with the log-domain
    conjugate as evaluator.
    """
    if N < 1:
        raise ValueError("N must be positive")
    return float(np.exp(_indicator_log_norm(np.log(N), phi3)))


def indicator_conjugate_ratio(N: float, phi3: YoungFunction, gamma: float,
                              log_N: float | None = None) -> float:
    """``||1_N||_{l^Psi} / (N / (ln N)^{4 gamma})``.

    Passing ``log_N`` instead of ``N`` allows lengths beyond floating range.
    """
    ln = np.log(N) if log_N is None else log_N
    logk = _indicator_log_norm(ln, phi3)
    return float(np.exp(logk - ln + 4 * gamma * np.log(ln)))


def block_l2_average(a, j: int) -> np.ndarray:
    """Root-mean-square of ``a`` over windows of ``2^j`` consecutive indices.

    Entry ``i`` of the result is the window starting at ``n = i - (2^j - 1)``,
    so every window meeting the support ``0..len(a)-1`` appears once and each
    index is covered by exactly ``2^j`` windows.

    Raises
    ------
    ValueError
        If ``j < 0`` or an entry is negative.
    """
    if j < 0:
        raise ValueError("scale j must be nonnegative")
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("sequence entries must be nonnegative")
    w = 2**j
    sq = np.convolve(a * a, np.ones(w), mode="full")
    return np.sqrt(np.clip(sq, 0, None) / w)
