"""Periodic grid, unitary Fourier transform and frequency projections.

The real line is modeled by the torus [-L/2, L/2) with L = 2*pi*m, so the
Fourier lattice has spacing 1/m and every unit interval [k, k+1) holds
exactly m modes.  Coefficients are stored in centered order: array index
``i`` holds the mode ``j = i - N/2`` at frequency ``xi_j = j/m``.

Transform convention (unitary)::

    u_hat(xi_j) = dx / sqrt(2 pi) * sum_n u(x_n) exp(-i xi_j x_n)
    u(x_n)      = dxi / sqrt(2 pi) * sum_j u_hat(xi_j) exp(i xi_j x_n)

which is the Riemann sum of the continuum pair
``u_hat(xi) = (2 pi)^{-1/2} int u(x) exp(-i x xi) dx``.  With this
normalization ``dx * sum |u|^2 == dxi * sum |u_hat|^2`` holds exactly.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "FrequencyGrid",
    "SpectralField",
    "SpaceTimeField",
    "DyadicInterval",
    "forward_transform",
    "inverse_transform",
    "to_spectrum",
    "to_physical",
    "project_band",
    "band_mask",
    "unit_blocks",
    "block_masses",
]

SQRT_2PI = np.sqrt(2.0 * np.pi)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class FrequencyGrid:
    """Periodic grid with ``N`` samples and ``m`` modes per unit frequency.

    Parameters
    ----------
    N : int
        Number of samples, a power of two.
    m : int
        Modes per unit frequency interval.  The period is ``2*pi*m``.
    """

    N: int
    m: int = 8

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or not _is_power_of_two(int(self.N)):
            raise ValueError(f"N must be a power of two, got {self.N!r}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "m", int(self.m))
        if self.N < 16 * self.m:
            raise ValueError(
                f"grid too coarse: N/(2m) = {self.N / (2 * self.m):g} < 8"
            )

    @property
    def period(self) -> float:
        return 2.0 * np.pi * self.m

    @property
    def dx(self) -> float:
        return self.period / self.N

    @property
    def dxi(self) -> float:
        return 1.0 / self.m

    @property
    def xi_max(self) -> float:
        """Largest resolved |xi|; the lattice covers [-xi_max, xi_max)."""
        return self.N / (2.0 * self.m)

    @property
    def j(self) -> np.ndarray:
        return np.arange(-self.N // 2, self.N // 2)

    @property
    def xi(self) -> np.ndarray:
        return self.j / self.m

    @property
    def x(self) -> np.ndarray:
        return -self.period / 2 + self.dx * np.arange(self.N)

    @property
    def block_index(self) -> np.ndarray:
        """Unit block ``k`` of each mode, so that xi_j lies in [k, k+1)."""
        return self.j // self.m

    def to_dict(self) -> dict:
        return {"N": self.N, "m": self.m}

    def refined(self) -> "FrequencyGrid":
        """Grid with doubled resolution and doubled period."""
        return FrequencyGrid(2 * self.N, 2 * self.m)


def to_spectrum(grid: FrequencyGrid, values: np.ndarray) -> np.ndarray:
    """Unitary transform of samples along the last axis (centered order)."""
    values = np.asarray(values)
    if values.shape[-1] != grid.N:
        raise ValueError(f"expected {grid.N} samples, got {values.shape[-1]}")
    sign = 1 - 2 * (grid.j % 2)
    spec = np.fft.fftshift(np.fft.fft(values, axis=-1), axes=-1)
    return (grid.dx / SQRT_2PI) * sign * spec


def to_physical(grid: FrequencyGrid, coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_spectrum` along the last axis."""
    coeffs = np.asarray(coeffs)
    sign = 1 - 2 * (grid.j % 2)
    vals = np.fft.ifft(np.fft.ifftshift(sign * coeffs, axes=-1), axis=-1)
    return vals * (grid.N * grid.dxi / SQRT_2PI)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a periodic function on ``grid``.

    ``coeffs[i]`` approximates ``u_hat(xi_j)`` with ``j = i - N/2``.
    """

    grid: FrequencyGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = _frozen(self.coeffs)
        if c.shape != (self.grid.N,):
            raise ValueError(f"coeffs must have shape ({self.grid.N},), got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, grid: FrequencyGrid) -> "SpectralField":
        return cls(grid, np.zeros(grid.N, dtype=complex))

    @classmethod
    def from_spectrum(cls, grid: FrequencyGrid, func: Callable) -> "SpectralField":
        """Sample ``func(xi)`` at the lattice frequencies."""
        return cls(grid, np.asarray(func(grid.xi), dtype=complex) * np.ones(grid.N))

    @classmethod
    def from_physical(cls, grid: FrequencyGrid, func: Callable) -> "SpectralField":
        """Transform the samples ``func(x)`` at the grid points."""
        return forward_transform(grid, np.asarray(func(grid.x), dtype=complex) * np.ones(grid.N))

    def physical(self) -> np.ndarray:
        return inverse_transform(self)

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coeffs)

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.dxi * np.sum(np.abs(self.coeffs) ** 2)))

    def inner(self, other: "SpectralField") -> complex:
        """L2 inner product <self, other>, linear in the first slot."""
        _check_same_grid(self.grid, other.grid)
        return complex(self.grid.dxi * np.vdot(other.coeffs, self.coeffs))

    def _combine(self, other, op):
        if isinstance(other, SpectralField):
            _check_same_grid(self.grid, other.grid)
            return SpectralField(self.grid, op(self.coeffs, other.coeffs))
        return NotImplemented

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, c):
        if np.isscalar(c):
            return SpectralField(self.grid, self.coeffs * c)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)

    def to_text(self) -> str:
        """Columnar text: header line, then ``j re im`` per mode."""
        lines = [f"# N={self.grid.N} m={self.grid.m}"]
        for j, c in zip(self.grid.j, self.coeffs):
            lines.append(f"{j:d} {float(c.real)!r} {float(c.imag)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SpectralField":
        rows = [ln for ln in text.splitlines() if ln.strip()]
        header = dict(kv.split("=") for kv in rows[0].lstrip("# ").split())
        grid = FrequencyGrid(int(header["N"]), int(header["m"]))
        data = np.array([[float(v) for v in ln.split()] for ln in rows[1:]])
        if data.shape != (grid.N, 3) or not np.array_equal(data[:, 0], grid.j):
            raise ValueError("mode indices do not match the declared grid")
        return cls(grid, data[:, 1] + 1j * data[:, 2])

    def to_json(self) -> str:
        """JSON envelope with base64 little-endian complex128 coefficients."""
        raw = np.ascontiguousarray(self.coeffs, dtype="<c16").tobytes()
        return json.dumps(
            {
                "grid": self.grid.to_dict(),
                "coeffs": {"encoding": "base64-complex128-le",
                           "data": base64.b64encode(raw).decode("ascii")},
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "SpectralField":
        obj = json.loads(text)
        grid = FrequencyGrid(**obj["grid"])
        enc = obj["coeffs"]
        if enc.get("encoding") != "base64-complex128-le":
            raise ValueError(f"unknown coefficient encoding {enc.get('encoding')!r}")
        coeffs = np.frombuffer(base64.b64decode(enc["data"]), dtype="<c16")
        return cls(grid, coeffs)


def _check_same_grid(a: FrequencyGrid, b: FrequencyGrid):
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


def forward_transform(grid: FrequencyGrid, samples) -> SpectralField:
    """Physical samples at ``grid.x`` to a :class:`SpectralField`.

    Raises
    ------
    ValueError
        If the number of samples is not a power of two or differs from N.
    """
    samples = np.asarray(samples)
    if samples.ndim != 1 or not _is_power_of_two(samples.shape[0]):
        raise ValueError(f"sample count must be a power of two, got {samples.shape}")
    return SpectralField(grid, to_spectrum(grid, samples))


def inverse_transform(u: SpectralField) -> np.ndarray:
    """Physical samples of ``u`` at ``u.grid.x``."""
    return to_physical(u.grid, u.coeffs)


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Uniformly time-sampled sequence of spectral frames.

    Parameters
    ----------
    grid : FrequencyGrid
    times : ndarray, shape (M+1,)
        Uniform, strictly increasing sample times.
    coeffs : ndarray, shape (M+1, N)
        Frame coefficients in centered order.
    """

    grid: FrequencyGrid
    times: np.ndarray
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        c = _frozen(self.coeffs)
        if t.ndim != 1 or t.size < 1:
            raise ValueError("times must be a non-empty 1-D array")
        if c.shape != (t.size, self.grid.N):
            raise ValueError(f"coeffs shape {c.shape} != ({t.size}, {self.grid.N})")
        if t.size > 1:
            dt = np.diff(t)
            if np.any(dt <= 0):
                raise ValueError("times must be strictly increasing")
            if not np.allclose(dt, dt[0], rtol=1e-9, atol=0):
                raise ValueError("times must be uniformly spaced")
        t.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, u: SpectralField, times) -> "SpaceTimeField":
        times = np.asarray(times, dtype=float)
        return cls(u.grid, times, np.tile(u.coeffs, (times.size, 1)))

    @property
    def num_frames(self) -> int:
        return self.times.size

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 0.0

    @property
    def T(self) -> float:
        return float(self.times[-1] - self.times[0])

    def frame(self, i: int) -> SpectralField:
        return SpectralField(self.grid, self.coeffs[i])

    def physical(self) -> np.ndarray:
        return to_physical(self.grid, self.coeffs)

    def with_coeffs(self, coeffs) -> "SpaceTimeField":
        return SpaceTimeField(self.grid, self.times, coeffs)


@dataclass(frozen=True)
class DyadicInterval:
    """Dyadic frequency interval ``[3/4 * 2^j, 3/2 * 2^j)``."""

    j: int

    def __post_init__(self):
        if self.j < 0:
            raise ValueError("scale j must be nonnegative")

    @property
    def lo(self) -> float:
        return 0.75 * 2.0**self.j

    @property
    def hi(self) -> float:
        return 1.5 * 2.0**self.j

    def contains(self, x: float) -> bool:
        return self.lo <= x < self.hi

    @staticmethod
    def covering(x: float) -> list:
        """Scales whose interval contains ``x`` (one or two for x >= 3/4)."""
        if x < 0.75:
            return []
        top = int(np.floor(np.log2(x / 0.75)))
        return [j for j in (top - 1, top) if j >= 0 and DyadicInterval(j).contains(x)]


def band_mask(grid: FrequencyGrid, a: float, b: float) -> np.ndarray:
    """Boolean mask of modes with ``a <= xi_j < b``."""
    j = grid.j
    return (j >= a * grid.m) & (j < b * grid.m)


def project_band(u: SpectralField, a: float, b: float) -> SpectralField:
    """Fourier restriction of ``u`` to the half-open band ``[a, b)``."""
    if not a < b:
        raise ValueError(f"empty band: need a < b, got [{a}, {b})")
    return SpectralField(u.grid, np.where(band_mask(u.grid, a, b), u.coeffs, 0))


def block_masses(grid: FrequencyGrid, coeffs: np.ndarray):
    """L2 masses of all unit blocks along the last axis.

    Returns
    -------
    ks : ndarray of int
        Block labels covering the grid, increasing.
    masses : ndarray
        ``||P_k u||_{L2}`` with shape ``coeffs.shape[:-1] + (len(ks),)``.
    """
    k = grid.block_index
    starts = np.flatnonzero(np.r_[True, np.diff(k) != 0])
    power = np.abs(np.asarray(coeffs)) ** 2
    sums = np.add.reduceat(power, starts, axis=-1) * grid.dxi
    return k[starts], np.sqrt(sums)


def unit_blocks(u: SpectralField) -> list:
    """List of ``(k, ||P_k u||_{L2})`` over blocks with nonzero mass."""
    ks, masses = block_masses(u.grid, u.coeffs)
    return [(int(k), float(mu)) for k, mu in zip(ks, masses) if mu > 0]
