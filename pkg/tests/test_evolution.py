import numpy as np
import pytest
import sympy as sp

from nlslab.evolution import (EvolutionConfig, cubic_term, dealias_mask, duhamel_apply, energy,
                              free_evolution, free_evolve, galilean_boost, galilean_reference,
                              mass, picard_coefficient, picard_iterate, rescale, splitstep_evolve)
from nlslab.grid import FrequencyGrid, SpectralField
from nlslab.norms import NormSpec, modulation_norm

from conftest import random_field


@pytest.fixture
def gauss():
    g = FrequencyGrid(256, 8)
    return SpectralField.from_physical(g, lambda x: np.exp(-x**2 / 2) + 0j)


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_config_validation():
    for kw in ({"T": 0}, {"M": 0}, {"sign": 2}, {"M": 10, "stride": 3}, {"T": 1, "M": 10}):
        with pytest.raises(ValueError):
            EvolutionConfig(**kw)
    cfg = EvolutionConfig(T=1.0, M=100, stride=10)
    assert cfg.dt == 0.01 and cfg.times.size == 11


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_free_flow_unitary(grid, t):
    u0 = random_field(grid, np.random.default_rng(0))
    assert free_evolve(u0, t).l2_norm() == pytest.approx(u0.l2_norm(), rel=1e-12)
    assert np.array_equal(free_evolve(u0, 0.0).coeffs, u0.coeffs)


def test_free_group_law(grid):
    u0 = random_field(grid, np.random.default_rng(1))
    a = free_evolve(free_evolve(u0, 0.3), 1.1).coeffs
    assert rel(a, free_evolve(u0, 1.4).coeffs) <= 1e-12


def test_free_gaussian_closed_form(gauss):
    # e^{itD} e^{-x^2/2} = (1 + 2it)^{-1/2} exp(-x^2 / (2 (1 + 2it)))
    t = 0.7
    x = gauss.grid.x
    exact = (1 + 2j * t) ** -0.5 * np.exp(-x**2 / (2 * (1 + 2j * t)))
    assert rel(free_evolve(gauss, t).physical(), exact) <= 1e-10


@pytest.mark.parametrize("c", [0.0, 1.0, -2.5])
def test_galilean_free_commutation(gauss, c):
    t = np.linspace(0, 1, 6)
    A = free_evolution(galilean_boost(gauss, c), t)
    B = galilean_reference(free_evolution(gauss, t), c)
    for a, b in zip(A.coeffs[1:], B.coeffs[1:]):
        assert rel(a, b) <= 1e-10
    if c == 0:
        assert np.array_equal(galilean_boost(gauss, c).coeffs, gauss.coeffs)


def test_galilean_boost_must_be_on_lattice(gauss):
    with pytest.raises(ValueError):
        galilean_boost(gauss, 0.01)


def test_galilean_nonlinear_covariance(gauss):
    cfg = EvolutionConfig(T=0.5, M=500, stride=100)
    A = splitstep_evolve(galilean_boost(gauss, 1.0), cfg)
    B = galilean_reference(splitstep_evolve(gauss, cfg), 1.0)
    assert max(rel(a, b) for a, b in zip(A.coeffs[1:], B.coeffs[1:])) <= 1e-5


@pytest.mark.parametrize("lam", [1, 2, 4])
def test_rescale(lam):
    g = FrequencyGrid(256, 16)
    u0 = random_field(g, np.random.default_rng(2), band=(-2, 2))
    v = rescale(u0, lam)
    assert v.l2_norm() == pytest.approx(lam**0.5 * u0.l2_norm(), rel=1e-10)
    if lam == 1:
        assert v.grid == g and np.array_equal(v.coeffs, u0.coeffs)


@pytest.mark.parametrize("lam", [3, 32])
def test_rescale_rejects(lam):
    with pytest.raises(ValueError):
        rescale(SpectralField.zeros(FrequencyGrid(256, 16)), lam)


def test_zero_data_stays_zero(grid):
    U = splitstep_evolve(SpectralField.zeros(grid), EvolutionConfig(T=0.1, M=10))
    assert not U.coeffs.any()


@pytest.mark.parametrize("sign", [1, -1])
def test_mass_conservation(gauss, sign):
    U = splitstep_evolve(gauss, EvolutionConfig(T=1.0, M=1000, stride=100, sign=sign))
    m0 = mass(gauss)
    assert max(abs(mass(U.frame(i)) - m0) / m0 for i in range(U.num_frames)) <= 1e-10


def test_energy_error_second_order(gauss):
    E0 = energy(gauss)
    drift = []
    for M in (200, 400, 800):
        V = splitstep_evolve(gauss, EvolutionConfig(T=1.0, M=M, stride=M))
        drift.append(abs(energy(V.frame(-1)) - E0))
    for a, b in zip(drift, drift[1:]):
        assert 3.5 <= a / b <= 4.5


def test_linear_switch_matches_free_flow(gauss):
    U = splitstep_evolve(gauss, EvolutionConfig(T=1.0, M=100, nonlinear=False, stride=100))
    assert rel(U.coeffs[-1], free_evolve(gauss, 1.0).coeffs) <= 1e-12


def test_cubic_term_and_dealias(grid):
    u = random_field(grid, np.random.default_rng(3), band=(-2, 2))
    raw = cubic_term(grid, u.coeffs, dealias=False)
    direct = SpectralField(grid, raw)
    phys = np.abs(u.physical()) ** 2 * u.physical()
    assert rel(direct.physical(), phys) <= 1e-12
    mask = dealias_mask(grid)
    assert not cubic_term(grid, u.coeffs)[~mask].any()


def test_duhamel_zero_and_free_forcing(gauss):
    t = np.linspace(0, 1, 1001)
    G = free_evolution(gauss, t)
    assert not duhamel_apply(G.with_coeffs(0 * G.coeffs)).coeffs.any()
    D = duhamel_apply(G)
    expected = t[:, None] * G.coeffs
    assert rel(D.coeffs[1:], expected[1:]) <= 1e-6


def test_duhamel_manufactured_solution(gauss):
    # u(t) = a(t) e^{itD} g solves i u_t + u_xx = i a'(t) e^{itD} g
    s = sp.symbols("s")
    a_expr = sp.exp(sp.sin(3 * s)) * sp.cos(s**2)
    a = sp.lambdify(s, a_expr, "numpy")
    da = sp.lambdify(s, sp.diff(a_expr, s), "numpy")
    t = np.linspace(0, 1, 1001)
    W = free_evolution(gauss, t)
    F = W.with_coeffs(1j * da(t)[:, None] * W.coeffs)
    u = a(t)[:, None] * W.coeffs
    rhs = a(0.0) * W.coeffs - 1j * duhamel_apply(F).coeffs
    assert rel(rhs, u) <= 1e-6


def test_picard_zero_data(grid):
    pr = picard_iterate(SpectralField.zeros(grid), 0.5, 3)
    assert not pr.final.coeffs.any()
    assert np.all(pr.differences == 0)


def test_picard_small_data_matches_splitstep():
    g = FrequencyGrid(512, 8)
    u0 = SpectralField.from_physical(g, lambda x: np.exp(-x**2 / 2) + 0j)
    u0 = u0 * (0.1 / modulation_norm(u0, 4.0))
    pr = picard_iterate(u0, 1.0, 10)
    assert not pr.diverged
    assert np.all(pr.ratios[1:] < 1)
    U = splitstep_evolve(u0, EvolutionConfig(T=1.0, M=1000))
    gap = np.max(NormSpec("modulation", p=4.0).frames(g, pr.final.coeffs - U.coeffs))
    assert gap <= 1e-4


def test_picard_ratio_grows_with_T():
    g = FrequencyGrid(512, 8)
    u0 = SpectralField.from_physical(g, lambda x: np.exp(-x**2 / 2) + 0j)
    u0 = u0 * (0.3 / modulation_norm(u0, 4.0))
    first = [picard_iterate(u0, T, 3).ratios[0] for T in (0.25, 0.5, 1.0)]
    assert first[0] <= first[1] <= first[2]
    assert picard_coefficient(0.25) < picard_coefficient(0.5) < picard_coefficient(1.0)
    with pytest.raises(ValueError):
        picard_iterate(u0, 1.0, 1)
