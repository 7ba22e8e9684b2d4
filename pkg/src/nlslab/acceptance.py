"""Acceptance suite: eleven numbered criteria, one pass/fail line each.

Every criterion returns a :class:`CriterionResult` holding its sub-checks;
a criterion passes only if all sub-checks pass.  All randomness comes from
``numpy.random.default_rng(seed)``.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .evolution import (EvolutionConfig, energy, free_evolve, galilean_boost, galilean_reference,
                        mass, picard_iterate, rescale, splitstep_evolve)
from .grid import (FrequencyGrid, SpaceTimeField, SpectralField, band_mask, project_band,
                   to_physical, to_spectrum)
from .lab.bilinear import bilinear_identity, verify_bilinear_inequality, verify_bilinear_kernel
from .lab.data import generate_data
from .lab.embeddings import random_atomic_path, random_lattice_field, verify_embeddings
from .lab.persistence import verify_norm_persistence
from .lab.report import band_verdict, bound_verdict, to_builtin
from .lab.restriction import verify_restriction_L4
from .lab.scaling import verify_scaling_law
from .lab.strichartz import default_family_set, verify_strichartz
from .norms import NormSpec, modulation_norm, sobolev_norm
from .orlicz import (block_l2_average, conjugate_sequence_norm, convex_conjugate,
                     indicator_conjugate_ratio, luxemburg_sequence_norm, orlicz_instance)
from .variation import (TimeSampledPath, up_upper_bound, u2_lower_bound, vp_norm,
                        vp_norm_bruteforce)

__all__ = ["CriterionResult", "CRITERIA", "run_acceptance", "summary_table"]


@dataclass
class CriterionResult:
    number: int
    name: str
    checks: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c["passed"] for c in self.checks.values())

    def add(self, name: str, passed: bool, **detail) -> bool:
        self.checks[name] = {"passed": bool(passed), **to_builtin(detail)}
        return bool(passed)

    def failed_checks(self) -> list:
        return [k for k, c in self.checks.items() if not c["passed"]]

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tail = "" if self.passed else "  failed: " + ", ".join(self.failed_checks())
        return f"[{status}] {self.number:2d} {self.name} ({self.seconds:.1f}s){tail}"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "checks": self.checks}


def _rel(a, b) -> float:
    den = np.linalg.norm(b)
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / (den if den > 0 else 1.0))


# -- 1 ----------------------------------------------------------------------
def spectral_exactness(seed: int = 0, n: int = 100, tol: float = 1e-10) -> CriterionResult:
    res = CriterionResult(1, "spectral exactness")
    rng = np.random.default_rng(seed)
    g = FrequencyGrid(1024, 8)
    planch, idem, orth, unit, group = [], [], [], [], []
    for _ in range(n):
        u = random_lattice_field(g, rng)
        x = u.physical()
        planch.append(abs(g.dx * np.sum(np.abs(x) ** 2) - g.dxi * np.sum(np.abs(u.coeffs) ** 2))
                      / (g.dxi * np.sum(np.abs(u.coeffs) ** 2)))
        planch.append(_rel(to_spectrum(g, to_physical(g, u.coeffs)), u.coeffs))
        a, b, c = np.sort(rng.uniform(-g.xi_max, g.xi_max, 3))
        p = project_band(u, a, b)
        idem.append(_rel(project_band(p, a, b).coeffs, p.coeffs))
        q = project_band(u, b, c)
        orth.append(abs(p.inner(q)) / u.l2_norm() ** 2)
        rest = u - p
        orth.append(abs(p.inner(rest)) / u.l2_norm() ** 2)
        s, t = rng.uniform(-10, 10, 2)
        unit.append(abs(free_evolve(u, t).l2_norm() - u.l2_norm()) / u.l2_norm())
        group.append(_rel(free_evolve(free_evolve(u, s), t).coeffs, free_evolve(u, s + t).coeffs))
    for name, errs in [("plancherel", planch), ("projection_idempotence", idem),
                       ("projection_orthogonality", orth), ("free_flow_unitarity", unit),
                       ("free_flow_group_law", group)]:
        res.add(name, max(errs) <= tol, max_error=max(errs), tol=tol, instances=n)
    return res


# -- 2 ----------------------------------------------------------------------
def conservation(amplitude: float = 1.0) -> CriterionResult:
    res = CriterionResult(2, "conservation")
    g = FrequencyGrid(1024, 8)
    u0 = SpectralField.from_physical(g, lambda x: amplitude * np.exp(-x**2 / 2) + 0j)
    U = splitstep_evolve(u0, EvolutionConfig(T=1.0, M=1000, stride=10))
    m0 = mass(u0)
    merr = max(abs(mass(U.frame(i)) - m0) / m0 for i in range(U.num_frames))
    res.add("mass", merr <= 1e-10, max_rel_error=merr, tol=1e-10)
    E0 = energy(u0)
    drifts = []
    for M in (250, 500, 1000, 2000):
        V = splitstep_evolve(u0, EvolutionConfig(T=1.0, M=M, stride=M))
        drifts.append(abs(energy(V.frame(-1)) - E0))
    factors = [drifts[i] / drifts[i + 1] for i in range(len(drifts) - 1)]
    ok = all(3.5 <= f <= 4.5 for f in factors)
    res.add("energy_order", ok, drifts=drifts, factors=factors, window=[3.5, 4.5])
    return res


# -- 3 ----------------------------------------------------------------------
def symmetries() -> CriterionResult:
    res = CriterionResult(3, "symmetries")
    g = FrequencyGrid(1024, 8)
    u0 = generate_data(g, "gaussian", {"width": 1.0, "center": 2.0})
    u0 = u0.with_coeffs(np.where(g.j == 0, 0, u0.coeffs))
    h0 = sobolev_norm(u0, -0.5, homogeneous=True)
    errs = [abs(sobolev_norm(rescale(u0, lam), -0.5, homogeneous=True) - h0) / h0
            for lam in (2, 4)]
    res.add("scaling_invariance", max(errs) <= 1e-6, errors=errs, tol=1e-6)
    w0 = SpectralField.from_physical(g, lambda x: np.exp(-x**2 / 2) + 0j)
    history = {}
    for c in (1.0, 2.0):
        per_dt = []
        for M in (500, 1000):
            cfg = EvolutionConfig(T=0.5, M=M, stride=M // 5)
            A = splitstep_evolve(galilean_boost(w0, c), cfg)
            B = galilean_reference(splitstep_evolve(w0, cfg), c)
            per_dt.append(max(_rel(a, b) for a, b in zip(A.coeffs, B.coeffs)))
        history[f"c={c:g}"] = per_dt
    refined = max(h[-1] for h in history.values())
    res.add("galilean_covariance", refined <= 1e-5, max_error=refined, by_dt=history, tol=1e-5)
    return res


# -- 4 ----------------------------------------------------------------------
def embedding_constants(seed: int = 0) -> CriterionResult:
    res = CriterionResult(4, "embedding constants")
    rep = verify_embeddings(n_samples=50, seed=seed)
    for k in ("modulation_p2", "modulation_p4", "modulation_p8", "orlicz_stability"):
        c = rep.checks[k]
        res.add(k, c["passed"], **{a: b for a, b in c.items() if a != "passed"})
    return res


# -- 5 ----------------------------------------------------------------------
def strichartz(seed: int = 0) -> CriterionResult:
    res = CriterionResult(5, "strichartz")
    fams = default_family_set(10, seed)
    grids = [FrequencyGrid(1024, 8), FrequencyGrid(2048, 16)]
    for p, q in ((6.0, 6.0), (8.0, 4.0), (np.inf, 2.0)):
        rep = verify_strichartz(fams, p, q, grids, band=2.0)
        res.add(f"p{p:g}_q{q:g}", rep.passed, worst_spread=rep.info["worst_resolution_spread"],
                max_ratio=rep.info["max_ratio"], band=2.0)
    return res


# -- 6 ----------------------------------------------------------------------
def bilinear() -> CriterionResult:
    res = CriterionResult(6, "bilinear")
    g = FrequencyGrid(1024, 8)
    u0 = generate_data(g, "flat_band", {"band": (0.0, 1.0)})
    v0 = generate_data(g, "flat_band", {"band": (3.0, 4.0)})
    err = verify_bilinear_kernel(u0, v0, [0.0, 0.7])
    res.add("kernel", err <= 1e-6, max_rel_error=err, tol=1e-6)
    rep = verify_bilinear_inequality([8, 16, 32, 64])
    expo = rep.fitted_exponent
    res.add("lambda_exponent", -0.6 <= expo <= -0.4, exponent=expo, window=[-0.6, -0.4],
            ratio_spread=rep.checks["ratio_band"]["spread"])
    g2 = FrequencyGrid(512, 32)
    a = generate_data(g2, "flat_band", {"band": (0.0, 2.0)})
    b = generate_data(g2, "flat_band", {"band": (1.0, 3.0)})
    ident = bilinear_identity(a, b, 0.5, 2.0, 0.01)
    frac = ident["history"][-1][1] / ident["rhs"]
    res.add("identity", ident["converged"] and 0.95 <= frac <= 1.0 + 1e-9, captured=frac,
            history=ident["history"], rhs=ident["rhs"])
    return res


# -- 7 ----------------------------------------------------------------------
def restriction(seed: int = 0) -> CriterionResult:
    res = CriterionResult(7, "restriction L4")
    rep = verify_restriction_L4(seed=seed)
    c = rep.checks["flat_band_normalized"]
    res.add("flat_normalized_band", c["passed"], spread=c["spread"], band=2.0)
    c = rep.checks["ensemble_exponent"]
    res.add("ensemble_exponent", c["passed"], max_exponent=c["max_exponent"], bound=0.65)
    return res


# -- 8 ----------------------------------------------------------------------
def _random_path(rng, M, n=4, tail=False):
    times = np.cumsum(rng.uniform(0.1, 1.0, M + 1))
    vals = rng.standard_normal((M + 1, n)) + 1j * rng.standard_normal((M + 1, n))
    return TimeSampledPath(times, vals, 1.0, tail)


def variation_machinery(seed: int = 0) -> CriterionResult:
    res = CriterionResult(8, "variation machinery")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(100):
        M = (4, 8, 12)[i % 3]
        path = _random_path(rng, M, tail=bool(i % 2))
        p = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
        if path.tail:
            path = TimeSampledPath(path.times[:-1], path.values[:-1], 1.0, True)
        a, b = vp_norm(path, p), vp_norm_bruteforce(path, p)
        worst = max(worst, abs(a - b) / b)
    res.add("dp_equals_bruteforce", worst <= 1e-12, max_rel_diff=worst)

    g = FrequencyGrid(128, 8)
    blocks = [(k, k + 1) for k in range(-2, 2)]
    viol = -np.inf
    for _ in range(50):
        coeffs = (rng.standard_normal((21, g.N)) + 1j * rng.standard_normal((21, g.N)))
        coeffs *= band_mask(g, -2, 2)
        U = SpaceTimeField(g, np.linspace(0, 1, 21), coeffs)
        whole = vp_norm(TimeSampledPath(U.times, coeffs, g.dxi), 2.0) ** 2
        parts = sum(vp_norm(TimeSampledPath(U.times, coeffs * band_mask(g, a, b), g.dxi), 2.0) ** 2
                    for a, b in blocks)
        viol = max(viol, (whole - parts) / parts)
    res.add("v2_block_orthogonality", viol <= 1e-9, max_excess=viol, tol=1e-9)

    bad = 0
    times = np.linspace(0, 1, 33)
    for _ in range(20):
        d = random_atomic_path(rng, n=8, weight=1.0)
        u = d.sample(times)
        probes = [TimeSampledPath(times, rng.standard_normal((33, 8)) + 1j * rng.standard_normal((33, 8)),
                                  1.0, True) for _ in range(50)]
        if u2_lower_bound(u, probes) > up_upper_bound(d) * (1 + 1e-12):
            bad += 1
    res.add("duality_sandwich", bad == 0, violations=bad, examples=20, probes=50)
    return res


# -- 9 ----------------------------------------------------------------------
def orlicz_suite(seed: int = 0) -> CriterionResult:
    res = CriterionResult(9, "orlicz suite")
    rng = np.random.default_rng(seed)
    phi = orlicz_instance(3.0, 1, sqrt_convex=True)
    worst = 0.0
    for _ in range(100):
        a = rng.exponential(0.3, rng.integers(1, 40))
        b = rng.exponential(0.3, a.size)
        c = float(rng.uniform(0.01, 100))
        na, nb = luxemburg_sequence_norm(a, phi), luxemburg_sequence_norm(b, phi)
        worst = max(worst, abs(luxemburg_sequence_norm(c * a, phi) - c * na) / (c * na))
        worst = max(worst, (luxemburg_sequence_norm(a + b, phi) - na - nb) / (na + nb))
    zero_ok = luxemburg_sequence_norm(np.zeros(5), phi) == 0.0
    res.add("luxemburg_axioms", worst <= 1e-9 and zero_ok, max_violation=worst, tol=1e-9)

    top = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 30))
        a = rng.exponential(0.2, n)
        b = rng.exponential(0.2, n)
        lhs = float(np.dot(a, b))
        top = max(top, lhs / (luxemburg_sequence_norm(a, phi) * conjugate_sequence_norm(b, phi)))
    res.add("generalized_holder", top <= 2.0, max_ratio=top, bound=2.0)

    gamma = 2.0
    phib = orlicz_instance(gamma, 2)
    ts = np.geomspace(1e-10, 1e-3, 15)
    r = [convex_conjugate(phib, t) / (t * np.log(1 / t) ** (-2 * gamma)) for t in ts]
    verdict, spread = band_verdict(r, 16.0)
    res.add("conjugate_asymptotic_band", verdict == "bounded", ratios=r, spread=spread, band=16.0)

    phi3 = orlicz_instance(3.0, 3)
    Ns = [16, 64, 256, 1024, 4096]
    r = [indicator_conjugate_ratio(N, phi3, 3.0) for N in Ns]
    verdict, top = bound_verdict(r, 1.0)
    res.add("indicator_conjugate_bounded", verdict == "bounded", ratios=r, max_ratio=top, bound=1.0)

    ok_scan = phi.sqrt_composed().is_convex()
    worst = -np.inf
    for _ in range(100):
        a = rng.exponential(0.3, rng.integers(1, 60))
        j = int(rng.integers(0, 5))
        worst = max(worst, luxemburg_sequence_norm(block_l2_average(a, j), phi)
                    / luxemburg_sequence_norm(a, phi))
    res.add("block_average_contraction", ok_scan and worst <= 1 + 1e-6, max_ratio=worst,
            sqrt_convex=ok_scan)
    return res


# -- 10 ---------------------------------------------------------------------
def scaling_law() -> CriterionResult:
    res = CriterionResult(10, "scaling law")
    rep = verify_scaling_law()
    c = rep.checks["ratio_band"]
    res.add("ratio_band", c["passed"], ratios=rep.ratios, spread=c["spread"], band=4.0,
            max_ratio=c["max_ratio"])
    c = rep.checks["sharpness"]
    res.add("sharpness", c["passed"], ratio=c["ratio"], window=[0.25, 4.0])
    return res


# -- 11 ---------------------------------------------------------------------
def picard_contraction() -> CriterionResult:
    res = CriterionResult(11, "picard contraction")
    g = FrequencyGrid(1024, 8)
    u0 = SpectralField.from_physical(g, lambda x: np.exp(-x**2 / 2) + 0j)
    u0 = u0 * (0.1 / modulation_norm(u0, 4.0))
    pr = picard_iterate(u0, 1.0, 12)
    later = pr.ratios[1:]
    res.add("contraction", bool(np.all(later < 1)) and not pr.diverged,
            differences=pr.differences, ratios=pr.ratios)
    U = splitstep_evolve(u0, EvolutionConfig(T=1.0, M=1000))
    gap = float(np.max(NormSpec("modulation", p=4.0).frames(g, pr.final.coeffs - U.coeffs)))
    res.add("matches_splitstep", gap <= 1e-4, sup_t_m24=gap, tol=1e-4)
    rep = verify_norm_persistence()
    res.add("norm_persistence", rep.passed, sup_ratio=rep.info["sup_ratio"], bound=4.0)
    return res


CRITERIA = [
    (1, spectral_exactness),
    (2, conservation),
    (3, symmetries),
    (4, embedding_constants),
    (5, strichartz),
    (6, bilinear),
    (7, restriction),
    (8, variation_machinery),
    (9, orlicz_suite),
    (10, scaling_law),
    (11, picard_contraction),
]

_SEEDED = {spectral_exactness, embedding_constants, strichartz, restriction,
           variation_machinery, orlicz_suite}


def run_acceptance(only=None, seed: int = 0, stream=None) -> list:
    """Run the criteria (all, or the numbers in ``only``) and print one line each."""
    stream = sys.stdout if stream is None else stream
    out = []
    for number, fn in CRITERIA:
        if only is not None and number not in only:
            continue
        t0 = time.perf_counter()
        r = fn(seed) if fn in _SEEDED else fn()
        r.seconds = time.perf_counter() - t0
        out.append(r)
        if stream is not False:
            print(r.line(), file=stream, flush=True)
    return out


def summary_table(results) -> str:
    rows = [f"{'#':>2}  {'criterion':<22} {'status':<6} {'seconds':>8}"]
    for r in results:
        rows.append(f"{r.number:>2}  {r.name:<22} {'PASS' if r.passed else 'FAIL':<6} {r.seconds:8.1f}")
    n = sum(r.passed for r in results)
    rows.append(f"{n}/{len(results)} criteria passed")
    return "\n".join(rows) + "\n"
