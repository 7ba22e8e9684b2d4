import csv
import io
import json

import numpy as np
import pytest

from nlslab.grid import FrequencyGrid, SpectralField
from nlslab.lab import (FAMILIES, EstimateReport, bilinear_identity, fit_power_law,
                        generate_data, verify_bilinear_inequality, verify_bilinear_kernel,
                        verify_embeddings, verify_norm_persistence, verify_restriction_L4,
                        verify_scaling_law, verify_strichartz)
from nlslab.lab.bilinear import flat_band_kernel_continuum, frequency_side_mass, kernel_oracle
from nlslab.lab.data import margin_fraction
from nlslab.lab.report import band_verdict, bound_verdict, growth_verdict
from nlslab.lab.restriction import graded_times
from nlslab.lab.scaling import sharpness_ratio
from nlslab.lab.strichartz import default_family_set, is_admissible
from nlslab.orlicz import orlicz_instance

PARAMS = {"gaussian": {}, "power_decay": {"beta": 1.0}, "log_decay": {"gamma": 3},
          "flat_band": {"band": (0, 1)},
          "random_phase": {"profile": "gaussian", "profile_params": {"width": 2.0}}}


@pytest.mark.parametrize("family", FAMILIES)
def test_families_respect_margin(grid, family):
    u = generate_data(grid, family, PARAMS[family], seed=1)
    assert u.l2_norm() > 0
    assert margin_fraction(u) >= 0.9999


def test_random_phase_is_seeded(grid):
    a = generate_data(grid, "random_phase", PARAMS["random_phase"], seed=3)
    b = generate_data(grid, "random_phase", PARAMS["random_phase"], seed=3)
    c = generate_data(grid, "random_phase", PARAMS["random_phase"], seed=4)
    assert np.array_equal(a.coeffs, b.coeffs) and not np.array_equal(a.coeffs, c.coeffs)


@pytest.mark.parametrize("family,params", [
    ("gaussian", {"width": 20.0}), ("flat_band", {"band": (0, 15)}), ("nope", {}),
    ("power_decay", {"beta": -1}), ("flat_band", {"band": (1, 1)})])
def test_family_errors(grid, family, params):
    with pytest.raises(ValueError):
        generate_data(grid, family, params)


def test_amplitude_scales(grid):
    u = generate_data(grid, "gaussian", {"amplitude": 3.0})
    assert u.l2_norm() == pytest.approx(3 * generate_data(grid, "gaussian").l2_norm())


def test_power_law_fit_and_verdicts():
    x = np.array([1.0, 2, 4, 8])
    e, c, res = fit_power_law(x, 3 * x**0.5)
    assert e == pytest.approx(0.5) and np.exp(c) == pytest.approx(3) and res < 1e-12
    assert band_verdict([1, 1.5], 2) == ("bounded", 1.5)
    assert band_verdict([1, 3], 2)[0] == "violated"
    assert band_verdict([1, np.nan], 2)[0] == "violated"
    assert bound_verdict([0.5, 0.9], 1) == ("bounded", 0.9)
    assert growth_verdict(0.6, 0.5, 0.01) == "growth-consistent"
    assert growth_verdict(0.7, 0.5, 0.01) == "violated"
    assert growth_verdict(0.1, 0.5, 0.5) == "inconclusive"


def test_report_serialization():
    rep = EstimateReport("demo", "y <= C", sweep_name="x", sweep=[1, 2], ratios=[np.float64(0.5), 1.0],
                         info={"a": np.arange(2), "inf": np.inf})
    rep.check("ok", np.bool_(True), value=np.float32(1.5))
    d = json.loads(rep.to_json({"extra": 1}))
    assert d["passed"] is True and d["extra"] == 1 and d["info"]["inf"] == "inf"
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert [r["ratio"] for r in rows] == ["0.5", "1"]
    lines = [ln for ln in rep.plot_data().splitlines() if not ln.startswith("#")]
    assert len(lines) == 2
    assert not EstimateReport("empty", "").passed


def test_admissibility():
    assert is_admissible(6, 6) and is_admissible(8, 4) and is_admissible(np.inf, 2)
    assert not is_admissible(4, 4) and not is_admissible(2, np.inf)


def test_strichartz_small():
    g = FrequencyGrid(256, 8)
    rep = verify_strichartz(default_family_set(2), 8, 4, [g, g.refined()], M=200)
    assert rep.passed
    with pytest.raises(ValueError):
        verify_strichartz(default_family_set(0), 4, 4, [g])


@pytest.mark.parametrize("t", [0.0, 0.3, 2.0])
def test_kernel_oracle_matches_grid_product(t):
    g = FrequencyGrid(256, 8)
    u = generate_data(g, "flat_band", {"band": (0, 1)})
    v = generate_data(g, "random_phase", {"profile": "flat_band", "profile_params": {"band": (2, 3)}},
                      seed=2)
    assert verify_bilinear_kernel(u, v, [t]) <= 1e-10


def test_kernel_lattice_sum_approaches_continuum():
    t, xi = 0.2, -2.0
    errs = []
    for m in (8, 32, 128):
        g = FrequencyGrid(32 * m, m)
        u = generate_data(g, "flat_band", {"band": (0, 1)})
        v = generate_data(g, "flat_band", {"band": (2, 3)})
        errs.append(abs(kernel_oracle(u, v, t, np.array([xi]))[0]
                        - flat_band_kernel_continuum((0, 1), (2, 3), t, xi)))
    assert errs[0] > errs[1] > errs[2]


def test_frequency_side_mass_separated_bands():
    # separation exceeds lam everywhere: kernel 1 / (2 |xi1 - xi2|) on [0,1) x [3,4)
    g = FrequencyGrid(256, 8)
    u = generate_data(g, "flat_band", {"band": (0, 1)})
    v = generate_data(g, "flat_band", {"band": (3, 4)})
    d = np.abs(g.xi[g.xi >= 0][:8][:, None] - g.xi[(g.xi >= 3) & (g.xi < 4)][None, :])
    oracle = g.dxi**2 * np.sum(1 / (2 * d))
    assert frequency_side_mass(u, v, 0.5) == pytest.approx(oracle, rel=1e-12)
    assert frequency_side_mass(u, v, 10.0) == 0


def test_bilinear_identity_small():
    g = FrequencyGrid(512, 32)
    u = generate_data(g, "flat_band", {"band": (0, 2)})
    v = generate_data(g, "flat_band", {"band": (1, 3)})
    out = bilinear_identity(u, v, 0.5, 4.0, 0.01)
    assert out["converged"] and out["history"][-1][1] >= 0.95 * out["rhs"]
    assert out["history"][-1][1] <= out["rhs"] * (1 + 1e-6)


def test_bilinear_inequality_small():
    rep = verify_bilinear_inequality((1, 2, 4), window=4.0)
    for lam in (1, 2, 4):
        assert rep.checks[f"window_lambda_{lam}"]["passed"]
    assert rep.checks["ratio_band"]["passed"]
    assert rep.fitted_exponent < 0


def test_graded_times():
    t = graded_times(40)
    assert t[0] == 0 and t[-1] == pytest.approx(1.0) and np.all(np.diff(t) > 0)


def test_restriction_small():
    rep = verify_restriction_L4((4, 8, 16), n_seeds=3, K=40)
    assert rep.passed
    assert rep.checks["ensemble_exponent"]["max_exponent"] <= 0.65


def test_embeddings_small():
    rep = verify_embeddings(n_samples=5)
    assert rep.passed
    assert all(c["passed"] for c in rep.checks.values())


def test_scaling_law_report_structure():
    rep = verify_scaling_law()
    assert set(rep.checks) == {"ratio_band", "sharpness", "sup_term_needed"}
    assert rep.checks["sharpness"]["passed"]
    assert rep.info["max_ratio"] <= 4.0
    assert np.all(np.diff(rep.ratios) < 0)


def test_sharpness_ratio_close_to_one():
    phi = orlicz_instance(1, 1)
    assert 0.25 <= sharpness_ratio(2.0, 8.0, phi) <= 4.0


def test_persistence_small_and_zero():
    rep = verify_norm_persistence(T=0.2, M=200)
    assert rep.passed and rep.info["sup_ratio"] <= 4.0
    zero = SpectralField.zeros(FrequencyGrid(256, 8))
    triv = verify_norm_persistence(u0=zero, T=0.1, M=10)
    assert triv.passed and triv.info["trivial"]
