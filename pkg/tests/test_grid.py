import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import erf

from nlslab.grid import (DyadicInterval, FrequencyGrid, SpaceTimeField, SpectralField,
                         block_masses, forward_transform, inverse_transform, project_band,
                         unit_blocks)

from conftest import random_field

seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize("N,m", [(100, 4), (256, 32), (0, 1)])
def test_grid_rejects_invalid(N, m):
    with pytest.raises(ValueError):
        FrequencyGrid(N, m)


def test_grid_geometry(grid):
    assert grid.period == pytest.approx(2 * np.pi * grid.m)
    assert grid.dxi == 1 / grid.m
    assert grid.xi_max >= 8
    for k in range(-4, 4):
        assert np.count_nonzero((grid.xi >= k) & (grid.xi < k + 1)) == grid.m


def test_constant_maps_to_dc(grid):
    u = forward_transform(grid, np.ones(grid.N))
    dc = grid.j == 0
    assert u.coeffs[dc][0] == pytest.approx(grid.period / np.sqrt(2 * np.pi), rel=1e-12)
    assert np.max(np.abs(u.coeffs[~dc])) < 1e-12


@pytest.mark.parametrize("m", [8, 16])
def test_gaussian_fourier_pair(m):
    # unitary convention: exp(-x^2/2) -> exp(-xi^2/2)
    g = FrequencyGrid(32 * m, m)
    u = forward_transform(g, np.exp(-g.x**2 / 2))
    err = np.max(np.abs(u.coeffs - np.exp(-g.xi**2 / 2)))
    assert err <= 1e-8


def test_non_power_of_two_rejected(grid):
    with pytest.raises(ValueError):
        forward_transform(grid, np.ones(100))


@given(seeds)
def test_round_trip_and_plancherel(seed):
    g = FrequencyGrid(128, 8)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(g.N) + 1j * rng.standard_normal(g.N)
    u = forward_transform(g, x)
    back = inverse_transform(u)
    assert np.linalg.norm(back - x) <= 1e-12 * np.linalg.norm(x)
    phys = g.dx * np.sum(np.abs(x) ** 2)
    assert u.l2_norm() ** 2 == pytest.approx(phys, rel=1e-12)


def test_project_band_examples(grid):
    u = SpectralField.from_spectrum(grid, lambda xi: ((xi >= 0) & (xi < 1)).astype(float))
    assert np.array_equal(project_band(u, 0, 1).coeffs, u.coeffs)
    assert not project_band(u, 1, 2).coeffs.any()
    with pytest.raises(ValueError):
        project_band(u, 1, 1)


@given(seeds, st.integers(1, 6))
def test_unit_projections_partition(seed, K):
    g = FrequencyGrid(128, 8)
    u = random_field(g, np.random.default_rng(seed))
    total = sum(project_band(u, k, k + 1).l2_norm() ** 2 for k in range(-K, K + 1))
    assert total == pytest.approx(project_band(u, -K, K + 1).l2_norm() ** 2, rel=1e-12)


@given(seeds, st.floats(-6, 5), st.floats(0.1, 4))
def test_projection_idempotent_self_adjoint(seed, a, width):
    g = FrequencyGrid(128, 8)
    rng = np.random.default_rng(seed)
    u, v = random_field(g, rng), random_field(g, rng)
    b = a + width
    Pu = project_band(u, a, b)
    assert np.array_equal(project_band(Pu, a, b).coeffs, Pu.coeffs)
    lhs, rhs = Pu.inner(v), u.inner(project_band(v, a, b))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))
    Qu = project_band(u, b, b + 1)
    assert abs(Pu.inner(Qu)) <= 1e-12 * u.l2_norm() ** 2


def test_unit_blocks_examples(grid):
    u = SpectralField.from_spectrum(grid, lambda xi: ((xi >= 0) & (xi < 2)).astype(float))
    blocks = unit_blocks(u)
    assert [k for k, _ in blocks] == [0, 1]
    assert np.allclose([mu for _, mu in blocks], 1.0, rtol=1e-14)
    assert unit_blocks(SpectralField.zeros(grid)) == []


def test_gaussian_block_masses_match_lattice_quadrature():
    g = FrequencyGrid(512, 16)
    u = forward_transform(g, np.exp(-g.x**2 / 2))
    ks, masses = block_masses(g, u.coeffs)
    for k, mu in zip(ks, masses):
        sel = g.block_index == k
        oracle = np.sqrt(g.dxi * np.sum(np.exp(-g.xi[sel] ** 2)))
        if oracle > 1e-6:
            assert mu == pytest.approx(oracle, rel=1e-10)
    # lattice sums approach the continuum block integrals as m grows
    k0 = int(np.flatnonzero(ks == 0)[0])
    exact = np.sqrt(np.sqrt(np.pi) / 2 * erf(1.0))
    assert masses[k0] == pytest.approx(exact, rel=0.05)


@given(seeds)
def test_block_masses_sum_to_norm(seed):
    g = FrequencyGrid(128, 8)
    u = random_field(g, np.random.default_rng(seed))
    assert sum(mu**2 for _, mu in unit_blocks(u)) == pytest.approx(u.l2_norm() ** 2, rel=1e-12)


def test_field_serialization_round_trips(grid):
    u = random_field(grid, np.random.default_rng(1))
    for v in (SpectralField.from_text(u.to_text()), SpectralField.from_json(u.to_json())):
        assert v.grid == grid
        assert np.array_equal(v.coeffs, u.coeffs)
    assert json.loads(u.to_json())["grid"]["N"] == grid.N


def test_spacetime_requires_uniform_increasing_times(grid):
    u = SpectralField.zeros(grid)
    U = SpaceTimeField.constant(u, np.linspace(0, 1, 5))
    assert U.num_frames == 5 and U.dt == pytest.approx(0.25)
    with pytest.raises(ValueError):
        SpaceTimeField(grid, np.array([0.0, 0.5, 0.4]), np.zeros((3, grid.N), complex))


@pytest.mark.parametrize("j", [0, 1, 5, 20])
def test_dyadic_interval(j):
    d = DyadicInterval(j)
    assert d.hi == 2 * d.lo
    assert d.lo == 0.75 * 2**j


def test_dyadic_intervals_cover_half_line():
    xs = np.r_[0.75, np.geomspace(0.75, 1e6, 2001), 1.5, 3.0]
    for x in xs:
        cov = DyadicInterval.covering(x)
        assert cov and all(DyadicInterval(j).contains(x) for j in cov)
    assert DyadicInterval.covering(0.5) == []
    with pytest.raises(ValueError):
        DyadicInterval(-1)
