"""Embedding constants measured on random data.

Three suites:

* ``modulation``: ``M_{2,p}`` against ``L^{p'}-hat`` (``||u_hat||_{L^p}``),
  block-wise Hölder on unit blocks gives constant 1 for ``p >= 2``;
* ``orlicz``: ``l^Phi L2`` against ``L^Phi-hat``, constant 1 whenever
  ``Phi(sqrt(.))`` is convex (Jensen on each unit block);
* ``atomic``: ``sup_t ||u(t)||_{L2}`` against the atomic bound
  ``sum |lambda_j|`` on step paths built from normalized atoms.
"""

from __future__ import annotations

import numpy as np

from ..grid import FrequencyGrid, SpectralField
from ..norms import conjugate_exponent, fourier_lebesgue_norm, modulation_norm
from ..orlicz import YoungFunction, luxemburg_frequency_norm, modulation_orlicz_norm, orlicz_instance
from ..variation import AtomicDecomposition, StepAtom, up_upper_bound
from .data import generate_data
from .report import EstimateReport

__all__ = ["random_family", "random_lattice_field", "random_atomic_path",
           "modulation_ratios", "orlicz_ratios", "atomic_ratios", "verify_embeddings"]

EXACT_TOL = 1e-9


def random_family(rng: np.random.Generator) -> tuple:
    """A data family with random parameters, defined independently of the grid."""
    kind = rng.integers(4)
    if kind == 0:
        return "gaussian", {"width": float(rng.uniform(0.3, 6.0)),
                            "center": float(rng.uniform(-8, 8)),
                            "amplitude": float(rng.uniform(0.1, 10))}, None
    if kind == 1:
        return "power_decay", {"beta": float(rng.uniform(0.2, 2.0)),
                               "amplitude": float(rng.uniform(0.1, 10))}, None
    if kind == 2:
        return "log_decay", {"gamma": float(rng.uniform(1.0, 4.0)),
                             "amplitude": float(rng.uniform(0.1, 10))}, None
    a = float(rng.integers(-10, 10))
    return "random_phase", {"profile": "gaussian",
                            "profile_params": {"width": float(rng.uniform(0.5, 8.0)),
                                               "center": a},
                            "amplitude": float(rng.uniform(0.1, 10))}, int(rng.integers(2**31))


def random_lattice_field(grid: FrequencyGrid, rng: np.random.Generator) -> SpectralField:
    """White complex noise on a random band inside the de-aliasing margin."""
    half = grid.xi_max / 2
    a, b = np.sort(rng.uniform(-half, half, 2))
    mask = (grid.xi >= a) & (grid.xi <= b)
    c = (rng.standard_normal(grid.N) + 1j * rng.standard_normal(grid.N)) * mask
    c *= rng.lognormal(0.0, 1.0, grid.N)
    return SpectralField(grid, c)


def modulation_ratios(fields, p: float) -> np.ndarray:
    """``||u||_{M_{2,p}} / ||u_hat||_{L^p}`` for each field."""
    r = conjugate_exponent(p)
    out = []
    for u in fields:
        den = fourier_lebesgue_norm(u, r)
        out.append(modulation_norm(u, p) / den if den > 0 else 0.0)
    return np.array(out)


def orlicz_ratios(fields, phi: YoungFunction) -> np.ndarray:
    """``||u||_{l^Phi L2} / ||u||_{L^Phi-hat}`` for each field."""
    out = []
    for u in fields:
        den = luxemburg_frequency_norm(u, phi)
        out.append(modulation_orlicz_norm(u, phi) / den if den > 0 else 0.0)
    return np.array(out)


def random_atomic_path(rng: np.random.Generator, n: int = 16, p: float = 2.0,
                       max_atoms: int = 4, weight: float = 0.125) -> AtomicDecomposition:
    """Random combination of normalized step atoms on ``[0, 1]``."""
    atoms, weights = [], []
    for _ in range(int(rng.integers(1, max_atoms + 1))):
        K = int(rng.integers(2, 9))
        jumps = np.sort(rng.uniform(0, 1, K - 1))
        vals = rng.standard_normal((K, n)) + 1j * rng.standard_normal((K, n))
        vals[0] = 0
        norms = np.sqrt(weight * np.sum(np.abs(vals) ** 2, axis=1))
        vals /= np.sum(norms**p) ** (1.0 / p)
        atoms.append(StepAtom(jumps, vals, weight))
        weights.append(rng.standard_normal() + 1j * rng.standard_normal())
    return AtomicDecomposition(tuple(weights), tuple(atoms), p)


def atomic_ratios(decomps, times) -> np.ndarray:
    """``sup_t ||u(t)||_{L2} / sum |lambda_j|`` on the sample ``times``."""
    return np.array([d.sample(times).sup_l2() / up_upper_bound(d) for d in decomps])


def verify_embeddings(n_samples: int = 50, seed: int = 0, grid: FrequencyGrid | None = None,
                      p_values=(2.0, 4.0, 8.0), phi: YoungFunction | None = None,
                      stability_band: float = 2.0) -> EstimateReport:
    """Run the three embedding suites.

    The Orlicz constant is the largest ratio over the sample; it is measured
    on ``grid`` and on its refinement (``N -> 2N``, ``L -> 2L``) and must not
    change by more than ``stability_band``.
    """
    grid = FrequencyGrid(1024, 8) if grid is None else grid
    phi = orlicz_instance(3.0, 1, sqrt_convex=True) if phi is None else phi
    rng = np.random.default_rng(seed)
    rep = EstimateReport(
        estimate_id="embeddings",
        predicted_law="M_{2,p} <= L^{p'}-hat (C=1); l^Phi L2 <= C L^Phi-hat; "
                      "sup_t L2 <= atomic bound",
        sweep_name="suite",
        params={"n_samples": n_samples, "seed": seed, "p_values": list(p_values),
                "phi": phi.to_dict(), "stability_band": stability_band},
        grid=grid.to_dict(),
    )

    fields = [random_lattice_field(grid, rng) for _ in range(n_samples // 2)]
    fams = [random_family(rng) for _ in range(n_samples - len(fields))]
    fields += [generate_data(grid, f, p, s) for f, p, s in fams]
    for p in p_values:
        r = modulation_ratios(fields, p)
        top = float(r.max())
        rep.rows.append({"suite": "modulation", "p": p, "constant": top})
        rep.check(f"modulation_p{p:g}", top <= 1 + EXACT_TOL, constant=top)

    fams = [random_family(rng) for _ in range(n_samples)]
    consts = []
    for g in (grid, grid.refined()):
        r = orlicz_ratios([generate_data(g, f, p, s) for f, p, s in fams], phi)
        consts.append(float(r.max()))
        rep.rows.append({"suite": "orlicz", "N": g.N, "m": g.m, "constant": consts[-1]})
    stab = max(consts) / min(consts)
    rep.info["orlicz_constants"] = consts
    if phi.sqrt_composed().is_convex():
        rep.check("orlicz_jensen", max(consts) <= 1 + EXACT_TOL, constant=max(consts))
    rep.check("orlicz_stability", stab <= stability_band, constants=consts, spread=stab)

    decomps = [random_atomic_path(rng) for _ in range(n_samples)]
    times = np.linspace(0.0, 1.0, 257)
    r = atomic_ratios(decomps, times)
    top = float(r.max())
    rep.rows.append({"suite": "atomic", "constant": top})
    rep.check("atomic", top <= 1 + EXACT_TOL, constant=top)

    rep.sweep = list(range(len(rep.rows)))
    rep.ratios = [row["constant"] for row in rep.rows]
    rep.verdict = "bounded" if rep.passed else "violated"
    return rep
