import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlslab.evolution import duhamel_apply, free_evolution
from nlslab.grid import FrequencyGrid, SpaceTimeField, SpectralField, band_mask
from nlslab.variation import (AtomicDecomposition, StepAtom, TimeSampledPath, adapted_path,
                              canonical_decomposition, duality_pairing, u2_lower_bound,
                              up_upper_bound, vp_norm, vp_norm_bruteforce, vp_norm_partition)

seeds = st.integers(0, 2**32 - 1)


def random_path(rng, M, n=3, tail=False):
    t = np.cumsum(rng.uniform(0.1, 1.0, M + 1))
    v = rng.standard_normal((M + 1, n)) + 1j * rng.standard_normal((M + 1, n))
    return TimeSampledPath(t, v, 1.0, tail)


@pytest.mark.parametrize("M", [4, 8, 12])
@pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
def test_dp_matches_bruteforce(M, p):
    rng = np.random.default_rng(M * 10 + int(p * 2))
    for _ in range(100 // 9 + 1):
        for tail in (False, True):
            path = random_path(rng, M if not tail else M - 1, tail=tail)
            assert vp_norm(path, p) == pytest.approx(vp_norm_bruteforce(path, p), rel=1e-12)


def test_bruteforce_limit():
    with pytest.raises(ValueError):
        vp_norm_bruteforce(random_path(np.random.default_rng(0), 16), 2)


@pytest.mark.parametrize("M", [1, 5, 20])
def test_ramp_gives_total_rise(M):
    path = TimeSampledPath(np.linspace(0, 1, M + 1), np.arange(M + 1.0))
    assert vp_norm(path, 2) == pytest.approx(M, rel=1e-14)
    value, part = vp_norm_partition(path, 2)
    assert part == [0, M]


@pytest.mark.parametrize("p", [1, 2, 4])
def test_two_point_path(p):
    phi, psi = np.array([1.0, 2j]), np.array([-1.0, 0.5])
    path = TimeSampledPath([0.0, 1.0], np.vstack([phi, psi]))
    assert vp_norm(path, p) == pytest.approx(np.linalg.norm(psi - phi), rel=1e-14)
    assert vp_norm_bruteforce(path, p) == pytest.approx(np.linalg.norm(psi - phi), rel=1e-14)


def test_constant_path_and_tail():
    v = np.tile([1.0, -2.0], (6, 1))
    path = TimeSampledPath(np.arange(6.0), v)
    assert vp_norm(path, 2) == 0 and vp_norm_bruteforce(path, 2) == 0
    assert vp_norm(path.with_tail(True), 2) == pytest.approx(np.sqrt(5), rel=1e-14)
    assert vp_norm(TimeSampledPath([0.0], [[1.0]]), 2) == 0


def test_path_validation():
    with pytest.raises(ValueError):
        TimeSampledPath([0.0, 0.0], [[1.0], [2.0]])
    with pytest.raises(ValueError):
        TimeSampledPath([0.0, 1.0], [[1.0]])
    with pytest.raises(ValueError):
        vp_norm(TimeSampledPath([0.0, 1.0], [[1.0], [2.0]]), 0.5)


@given(seeds)
def test_refinement_and_exponent_monotone(seed):
    rng = np.random.default_rng(seed)
    path = random_path(rng, 20)
    sub = TimeSampledPath(path.times[::2], path.values[::2])
    assert vp_norm(path, 2) >= vp_norm(sub, 2) * (1 - 1e-12)
    vals = [vp_norm(path, p) for p in (1, 1.5, 2, 3, 6)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))


def test_pairing_hand_expansion():
    rng = np.random.default_rng(4)
    a, b, c, d, e, f = (rng.standard_normal(3) + 1j * rng.standard_normal(3) for _ in range(6))
    t = [0.0, 1.0, 2.0]
    u = TimeSampledPath(t, np.vstack([a, b, c]))
    v = TimeSampledPath(t, np.vstack([d, e, f]))
    ip = lambda x, y: np.sum(x * y.conj())
    assert duality_pairing(u, v) == pytest.approx(ip(a, e - d) + ip(b, f - e), abs=1e-14)
    tailed = ip(a, e - d) + ip(b, f - e) + ip(c, -f)
    assert duality_pairing(u, v.with_tail(True)) == pytest.approx(tailed, abs=1e-14)
    # single step chi_[t0, t1) phi paired with itself
    step = TimeSampledPath(t, np.vstack([a, 0 * a, 0 * a]))
    assert duality_pairing(step, step) == pytest.approx(-ip(a, a), abs=1e-14)
    const = TimeSampledPath(t, np.vstack([d, d, d]))
    assert duality_pairing(u, const) == 0
    with pytest.raises(ValueError):
        duality_pairing(u, TimeSampledPath([0.0, 1.0, 3.0], np.vstack([d, e, f])))


def test_atoms_and_upper_bound():
    rng = np.random.default_rng(6)
    phi = rng.standard_normal((4, 3))
    phi[0] = 0
    atom0 = StepAtom([1.0, 2.0, 3.0], phi)
    lam = np.sqrt(np.sum(atom0.step_norms() ** 2))
    atom = StepAtom([1.0, 2.0, 3.0], phi / lam)
    assert up_upper_bound(AtomicDecomposition((1.0,), (atom,))) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        up_upper_bound(AtomicDecomposition((1.0,), (atom0,)))
    bad = phi.copy() / lam
    bad[0] = bad[1]
    with pytest.raises(ValueError):
        up_upper_bound(AtomicDecomposition((1.0,), (StepAtom([1.0, 2.0, 3.0], bad),)))


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_canonical_decomposition_bounds(p):
    rng = np.random.default_rng(int(p))
    for _ in range(20):
        K = rng.integers(2, 7)
        vals = rng.standard_normal((K, 4)) + 1j * rng.standard_normal((K, 4))
        vals[0] = 0
        jumps = np.sort(rng.uniform(0, 1, K - 1))
        dec = canonical_decomposition(jumps, vals, 1.0, p)
        bound = up_upper_bound(dec)
        times = np.r_[-1.0, jumps, 2.0]
        vp = vp_norm(dec.sample(times, tail=True), p)
        # each step enters at most two increments, so V^p <= 2 sum |lambda|
        assert np.isfinite(bound)
        assert vp <= 2 * bound * (1 + 1e-12)


def test_duality_sandwich():
    rng = np.random.default_rng(8)
    vals = rng.standard_normal((5, 3))
    vals[0] = 0
    jumps = np.array([0.2, 0.4, 0.6, 0.8])
    dec = canonical_decomposition(jumps, vals)
    times = np.linspace(0, 1, 21)
    u = dec.sample(times)
    probes = [random_path(rng, 20) for _ in range(50)]
    probes = [TimeSampledPath(times, pr.values) for pr in probes]
    assert u2_lower_bound(u, probes) <= up_upper_bound(dec) * (1 + 1e-12)


def test_adapted_free_path_is_constant():
    g = FrequencyGrid(128, 8)
    u0 = SpectralField.from_spectrum(g, lambda xi: np.exp(-xi**2 / 2))
    U = free_evolution(u0, np.linspace(0, 1, 33))
    # Gram-based distances carry a sqrt(eps) relative floor
    assert vp_norm(adapted_path(U), 2) <= 1e-6 * u0.l2_norm()


def test_adapted_forced_path_and_block_orthogonality():
    g = FrequencyGrid(128, 8)
    rng = np.random.default_rng(9)
    t = np.linspace(0, 1, 33)
    F = rng.standard_normal((33, g.N)) + 1j * rng.standard_normal((33, g.N))
    F *= band_mask(g, -3, 3)
    U = duhamel_apply(SpaceTimeField(g, t, F))
    assert vp_norm(adapted_path(U), 2) > 0
    proj = lambda a, b: U.with_coeffs(U.coeffs * band_mask(g, a, b))
    whole = vp_norm(adapted_path(proj(-3, 3)), 2) ** 2
    parts = sum(vp_norm(adapted_path(proj(i, i + 1)), 2) ** 2 for i in range(-3, 3))
    assert whole <= parts + 1e-9
