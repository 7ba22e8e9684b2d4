"""p-variation norms of sampled paths, atomic upper bounds and duality pairings.

A path is a finite sequence of L2-valued samples ``v(t_0), ..., v(t_M)``
stored as rows of coefficient vectors together with the quadrature weight
of the L2 inner product (``dxi`` for spectral rows).  With the tail flag
set, a final sample ``v = 0`` is appended, emulating ``v(+inf) = 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .grid import SpaceTimeField

__all__ = [
    "TimeSampledPath",
    "StepAtom",
    "AtomicDecomposition",
    "vp_norm",
    "vp_norm_partition",
    "vp_norm_bruteforce",
    "vp_norm_refined",
    "up_upper_bound",
    "canonical_decomposition",
    "duality_pairing",
    "u2_lower_bound",
    "adapted_path",
]

BRUTEFORCE_MAX_M = 15


@dataclass(frozen=True, eq=False)
class TimeSampledPath:
    """Samples of an L2-valued path.

    Parameters
    ----------
    times : ndarray, shape (M+1,)
        Strictly increasing sample times.
    values : ndarray, shape (M+1, n)
        Sample coefficient vectors.
    weight : float
        Inner product ``<f, g> = weight * sum f conj(g)``.
    tail : bool
        Append a terminal jump to zero.
    """

    times: np.ndarray
    values: np.ndarray
    weight: float = 1.0
    tail: bool = False

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values)
        if v.ndim == 1:
            v = v[:, None]
        if t.ndim != 1 or v.shape[0] != t.size:
            raise ValueError("times and values must have equal lengths")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_field(cls, U: SpaceTimeField, tail: bool = False) -> "TimeSampledPath":
        return cls(U.times, U.coeffs, U.grid.dxi, tail)

    def with_tail(self, tail: bool) -> "TimeSampledPath":
        return TimeSampledPath(self.times, self.values, self.weight, tail)

    def effective(self):
        """Times and values including the appended zero sample when tailed."""
        if not self.tail:
            return self.times, self.values
        gap = self.times[-1] - self.times[-2] if self.times.size > 1 else 1.0
        t = np.r_[self.times, self.times[-1] + gap]
        v = np.vstack([self.values, np.zeros((1, self.values.shape[1]), self.values.dtype)])
        return t, v

    def gram(self) -> np.ndarray:
        _, v = self.effective()
        return self.weight * (v @ v.conj().T)

    def distances(self) -> np.ndarray:
        """Pairwise L2 distances from the Gram matrix."""
        G = self.gram()
        d = np.real(np.diag(G))
        D2 = d[:, None] + d[None, :] - 2 * np.real(G)
        return np.sqrt(np.clip(D2, 0, None))

    def sup_l2(self) -> float:
        """``sup_t ||v(t)||_{L2}`` over the samples."""
        return float(np.sqrt(self.weight * np.max(np.sum(np.abs(self.values) ** 2, axis=1))))


def vp_norm_partition(path: TimeSampledPath, p: float):
    """Exact sampled p-variation and a maximizing partition.

    Dynamic programming over ``best(j) = max_{i<j} best(i) + ||v_j - v_i||^p``.

    Returns
    -------
    value : float
    partition : list of int
        Sample indices of a maximizing partition (the appended zero sample
        has index ``M+1`` when the tail flag is set).
    """
    if not 1 <= p < np.inf:
        raise ValueError("p must lie in [1, inf)")
    D = path.distances() ** p
    K = D.shape[0]
    if K < 2:
        return 0.0, [0]
    best = np.zeros(K)
    prev = np.zeros(K, dtype=int)
    for j in range(1, K):
        cand = best[:j] + D[:j, j]
        i = int(np.argmax(cand))
        best[j], prev[j] = cand[i], i
    end = int(np.argmax(best))
    part = [end]
    while part[-1] != 0:
        part.append(int(prev[part[-1]]))
    return float(best[end] ** (1.0 / p)), part[::-1]


def vp_norm(path: TimeSampledPath, p: float) -> float:
    """Sampled ``V^p`` norm (supremum over sub-partitions of the sample grid)."""
    if path.times.size < 2 and not path.tail:
        return 0.0
    return vp_norm_partition(path, p)[0]


def vp_norm_bruteforce(path: TimeSampledPath, p: float) -> float:
    """Exhaustive maximum over all sub-partitions (reference implementation).

    Raises
    ------
    ValueError
        If the path has more than ``BRUTEFORCE_MAX_M`` increments.
    """
    if not 1 <= p < np.inf:
        raise ValueError("p must lie in [1, inf)")
    _, v = path.effective()
    M = v.shape[0] - 1
    if M > BRUTEFORCE_MAX_M:
        raise ValueError(f"brute force limited to M <= {BRUTEFORCE_MAX_M}, got {M}")
    if M < 1:
        return 0.0
    w = path.weight
    best = 0.0
    for r in range(0, M):
        for inner in itertools.combinations(range(1, M), r):
            idx = (0,) + inner + (M,)
            total = 0.0
            for a, b in zip(idx[:-1], idx[1:]):
                diff = v[b] - v[a]
                total += np.sqrt(w * np.real(np.vdot(diff, diff))) ** p
            best = max(best, total)
    return float(best ** (1.0 / p))


def vp_norm_refined(sampler, p: float, M0: int = 16, rtol: float = 0.01, max_M: int = 4096):
    """Double the sampling until the sampled norm changes by less than ``rtol``.

    ``sampler(M)`` must return a :class:`TimeSampledPath` with ``M+1`` samples.
    Returns the last value and the list of ``(M, value)`` pairs.
    """
    M = M0
    hist = [(M, vp_norm(sampler(M), p))]
    while M < max_M:
        M *= 2
        hist.append((M, vp_norm(sampler(M), p)))
        a, b = hist[-2][1], hist[-1][1]
        if abs(b - a) <= rtol * max(abs(b), np.finfo(float).tiny):
            break
    return hist[-1][1], hist


@dataclass(frozen=True, eq=False)
class StepAtom:
    """Step path ``sum_k 1_[t_{k-1}, t_k) phi_{k-1}`` with ``t_0 = -inf``, ``t_K = inf``.

    Parameters
    ----------
    jumps : ndarray, shape (K-1,)
        Interior partition points ``t_1 < ... < t_{K-1}``.
    values : ndarray, shape (K, n)
        ``phi_0, ..., phi_{K-1}``.
    weight : float
        L2 quadrature weight.
    """

    jumps: np.ndarray
    values: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        j = np.asarray(self.jumps, dtype=float)
        v = np.asarray(self.values)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] != j.size + 1:
            raise ValueError("need one more value than jump")
        if np.any(np.diff(j) <= 0):
            raise ValueError("jumps must be strictly increasing")
        object.__setattr__(self, "jumps", j)
        object.__setattr__(self, "values", v)

    def step_norms(self) -> np.ndarray:
        return np.sqrt(self.weight * np.sum(np.abs(self.values) ** 2, axis=1))

    def check(self, p: float, rtol: float = 1e-9):
        """Validate ``phi_0 = 0`` and ``sum ||phi_k||^p = 1``."""
        n = self.step_norms()
        if n[0] != 0:
            raise ValueError("atom must start at zero (phi_0 = 0)")
        s = np.sum(n**p)
        if abs(s - 1) > rtol:
            raise ValueError(f"atom normalization sum ||phi_k||^p = {s:.12g}, expected 1")

    def sample(self, times) -> np.ndarray:
        k = np.searchsorted(self.jumps, np.asarray(times, dtype=float), side="right")
        return self.values[k]


@dataclass(frozen=True, eq=False)
class AtomicDecomposition:
    """``u = sum_j lambda_j a_j`` with ``U^p`` atoms ``a_j``."""

    weights: tuple
    atoms: tuple
    p: float = 2.0

    def __post_init__(self):
        if len(self.weights) != len(self.atoms):
            raise ValueError("one weight per atom")
        object.__setattr__(self, "weights", tuple(complex(w) for w in self.weights))
        object.__setattr__(self, "atoms", tuple(self.atoms))

    def sample(self, times, tail: bool = False) -> TimeSampledPath:
        times = np.asarray(times, dtype=float)
        vals = sum(w * a.sample(times) for w, a in zip(self.weights, self.atoms))
        return TimeSampledPath(times, vals, self.atoms[0].weight, tail)


def up_upper_bound(decomp: AtomicDecomposition) -> float:
    """``sum |lambda_j|``, an upper bound for the ``U^p`` norm.

    Raises
    ------
    ValueError
        If an atom is not normalized.
    """
    for a in decomp.atoms:
        a.check(decomp.p)
    return float(sum(abs(w) for w in decomp.weights))


def canonical_decomposition(jumps, values, weight: float = 1.0, p: float = 2.0) -> AtomicDecomposition:
    """Single-atom decomposition of a step path with ``phi_0 = 0``."""
    atom0 = StepAtom(jumps, values, weight)
    lam = float(np.sum(atom0.step_norms() ** p) ** (1.0 / p))
    if lam == 0:
        return AtomicDecomposition((), (), p)
    return AtomicDecomposition((lam,), (StepAtom(jumps, atom0.values / lam, weight),), p)


def duality_pairing(u: TimeSampledPath, v: TimeSampledPath, partition=None) -> complex:
    """``sum_k <u(t_{k-1}), v(t_k) - v(t_{k-1})>`` over a partition of the samples.

    ``partition`` lists sample indices (default: all samples).  When ``v``
    carries the tail flag the final increment to zero is included.

    Raises
    ------
    ValueError
        If the two paths are not sampled at the same times.
    """
    if u.times.shape != v.times.shape or not np.allclose(u.times, v.times, rtol=0, atol=1e-14):
        raise ValueError("paths must share a common sample grid")
    if u.weight != v.weight:
        raise ValueError("paths must use the same inner product weight")
    idx = np.arange(u.times.size) if partition is None else np.asarray(partition, dtype=int)
    uu = u.values[idx]
    vv = v.values[idx]
    if v.tail:
        uu = np.vstack([uu, uu[-1:]])
        vv = np.vstack([vv, np.zeros_like(vv[-1:])])
    inc = vv[1:] - vv[:-1]
    return complex(u.weight * np.sum(uu[:-1] * inc.conj()))


def u2_lower_bound(u: TimeSampledPath, probes) -> float:
    """``max |B(u, v)| / ||v||_{V^2}`` over probe paths (tail convention on)."""
    best = 0.0
    for v in probes:
        v = v.with_tail(True)
        n = vp_norm(v, 2.0)
        if n > 0:
            best = max(best, abs(duality_pairing(u, v)) / n)
    return best


def adapted_path(U: SpaceTimeField, tail: bool = False) -> TimeSampledPath:
    """Pull back by the free flow: frames multiplied by ``exp(+i t xi^2)``."""
    twist = np.exp(1j * np.outer(U.times, U.grid.xi**2))
    return TimeSampledPath(U.times, twist * U.coeffs, U.grid.dxi, tail)
