"""End-to-end verification suite.

Ten self-contained checks, each tying a package capability to a quantitative
expectation: agreement between the master-equation oracle and the analytic
response, the derived geometry and thermal numbers, statistical behavior of
the Monte Carlo lab, and fit-recovery performance. The CLI `verify`
subcommand and the test suite both run exactly these functions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import fitting, geometry, lindblad, montecarlo, qed, thermal

SEED = 20240815


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def check_oracle_agreement() -> CriterionResult:
    """Master equation vs analytic transmission for one and two atoms."""
    start = time.perf_counter()
    grid = np.linspace(-8.0, 8.0, 161)  # 0.1 MHz step
    worst = 0.0
    for n in (1, 2):
        spec = lindblad.SystemSpec.uniform(n_atoms=n)
        scan = lindblad.oracle_transmission(spec, grid)
        omega = qed.collective_coupling(spec.per_atom_g).omega_eff
        analytic = qed.transmission(grid, delta_ca=0.0, omega_eff=omega)
        worst = max(worst, float(np.abs(scan.transmission - analytic).max()))
    elapsed = time.perf_counter() - start
    passed = worst <= 1e-3 and elapsed < 120.0
    return CriterionResult(
        "oracle_agreement", passed,
        f"max |T_me - T_analytic| = {worst:.2e} (tol 1e-3), "
        f"{elapsed:.1f} s (limit 120 s)")


def check_cooperativity() -> CriterionResult:
    """Single-atom cooperativity at the reference rates."""
    c = qed.CavityParams().cooperativity
    passed = abs(c - 1.969) <= 0.01
    return CriterionResult("cooperativity", passed,
                           f"C = {c:.4f} (expect 1.969 +/- 0.01)")


def check_sqrtn_roundtrip() -> CriterionResult:
    """Simulate, fit, and refit the collective-coupling scaling."""
    g_true = 2.74
    grid = np.linspace(-12.0, 12.0, 481)
    ns = np.arange(1, 9)
    fitted = []
    for n in ns:
        omega = g_true * np.sqrt(n)
        scan = qed.spectrum(grid, omega_eff=omega)
        fitted.append(fitting.fit_vrs(scan).value("omega_eff"))
    fitted = np.asarray(fitted)
    per_n = np.abs(fitted / np.sqrt(ns) - g_true) / g_true
    g_hat = fitting.fit_sqrt_scaling(ns, fitted).value("g")
    passed = abs(g_hat - g_true) <= 0.02 and per_n.max() <= 0.01
    return CriterionResult(
        "sqrtn_roundtrip", passed,
        f"g' = {g_hat:.4f} MHz (expect 2.74 +/- 0.02), "
        f"worst per-N deviation {per_n.max():.2%} (tol 1%)")


def check_beat_geometry() -> CriterionResult:
    """Beat period, edge envelope, and across-array coupling spread."""
    geo = geometry.ModeGeometry()
    period = geo.beat_period_um
    edge = geometry.envelope(42.6, geo)
    spread = geometry.coupling_spread(geometry.site_couplings())
    checks = (abs(period - 423.2) <= 1.0,
              abs(edge - 0.950) <= 0.005,
              abs(geometry.envelope(-42.6, geo) - 0.950) <= 0.005,
              abs(spread - 0.025) <= 0.003)
    return CriterionResult(
        "beat_geometry", all(checks),
        f"period = {period:.2f} um (423.2 +/- 1.0), envelope(+/-42.6 um) = "
        f"{edge:.4f} (0.950 +/- 0.005), spread = {spread:.2%} (2.5 +/- 0.3%)")


def check_thermal_bands() -> CriterionResult:
    """Mean occupation and motion-averaged couplings in their bands."""
    nbar = thermal.mean_phonon()
    g_anti = thermal.thermal_coupling(0.0)
    g_node = thermal.thermal_coupling(thermal.probe_node_offset_nm())
    ratio = g_node / g_anti
    g_anti_20 = thermal.thermal_coupling(0.0, n_max=20)
    shift = abs(g_anti_20 - g_anti) / g_anti
    checks = (1.2 <= nbar <= 1.5,
              3.0 <= g_anti <= 3.2,
              0.125 <= ratio <= 0.16,
              shift < 0.005)
    return CriterionResult(
        "thermal_bands", all(checks),
        f"nbar = {nbar:.3f} [1.2, 1.5], antinode = {g_anti:.4f} MHz "
        f"[3.0, 3.2], node ratio = {ratio:.4f} [0.125, 0.16], "
        f"truncation shift = {shift:.2e} (< 5e-3)")


def check_loading_stats() -> CriterionResult:
    """Mean occupancy and binomial goodness of fit at 1e5 trials."""
    model = montecarlo.LoadingModel()
    occ = montecarlo.simulate_loading(model, n_trials=100_000, seed=SEED)
    per_trial = occ.sum(axis=1)
    mean = float(per_trial.mean())
    gof = montecarlo.occupancy_gof(per_trial, model)
    passed = abs(mean - 6.27) <= 0.05 and gof.pvalue > 0.01
    return CriterionResult(
        "loading_stats", passed,
        f"mean occupancy = {mean:.4f} (6.27 +/- 0.05), chi-square p = "
        f"{gof.pvalue:.3f} (> 0.01, dof {gof.dof})")


_ERROR_TABLE = (0.0006, 0.0024, 0.0054, 0.0096,
                0.0150, 0.0216, 0.0294, 0.0384)


def check_detection_errors() -> CriterionResult:
    """Atom-number error table and the hold-window survival number."""
    errs = np.array([montecarlo.atom_number_error(n) for n in range(1, 9)])
    table_ok = np.abs(errs - np.asarray(_ERROR_TABLE)).max() <= 2e-4
    loss = 1.0 - montecarlo.SurvivalModel().survival(montecarlo.HOLD_WINDOW_S)
    loss_ok = abs(loss - 0.000625) <= 5e-6
    return CriterionResult(
        "detection_errors", bool(table_ok and loss_ok),
        f"error(N=1..8) max deviation {np.abs(errs - _ERROR_TABLE).max():.1e}"
        f" (tol 2e-4), 1 - survival(3 ms) = {loss:.6f} "
        f"(0.000625 +/- 5e-6)")


def _bisect(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    flo = f(lo)
    if flo * f(hi) > 0:
        raise ValueError("bisection bracket does not straddle a root")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if flo * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
            flo = f(lo)
    return 0.5 * (lo + hi)


def check_empty_cavity() -> CriterionResult:
    """Resonant transmission of 1 and linewidth 2 kappa without atoms."""
    p = qed.CavityParams()
    t0 = qed.transmission(0.0, omega_eff=0.0, params=p)
    f = lambda x: qed.transmission(x, omega_eff=0.0, params=p) - 0.5
    fwhm = _bisect(f, 0.0, 8.0) - _bisect(f, -8.0, 0.0)
    checks = (abs(t0 - 1.0) <= 1e-12, abs(fwhm - 2.0 * p.kappa) <= 1e-6)
    return CriterionResult(
        "empty_cavity", all(checks),
        f"T(0) - 1 = {t0 - 1.0:.1e} (tol 1e-12), FWHM = {fwhm:.8f} MHz "
        f"(expect {2.0 * p.kappa} +/- 1e-6)")


def check_fit_recovery() -> CriterionResult:
    """Parameter recovery from noisy data, 100 repeats per model."""
    grid = np.linspace(-12.0, 12.0, 481)
    omega_true = 5.52
    clean = qed.transmission(grid, omega_eff=omega_true)
    vrs_hits = 0
    for i in range(100):
        rng = montecarlo.rng_from_seed(SEED + i)
        noisy = clean * (1.0 + 0.01 * rng.standard_normal(grid.size))
        scan = qed.SpectrumScan(grid, np.clip(noisy, 0.0, None))
        om = fitting.fit_vrs(scan).value("omega_eff")
        vrs_hits += abs(om - omega_true) / omega_true <= 0.02

    p_true = montecarlo.LOAD_PROBABILITY
    detection = montecarlo.DetectionModel()
    bimodal_hits = 0
    for i in range(100):
        rng = montecarlo.rng_from_seed(SEED + 1000 + i)
        occupied = rng.random(20_000) < p_true
        counts = montecarlo.simulate_counts(occupied, detection,
                                            seed=SEED + 2000 + i)
        est = fitting.fit_bimodal(counts).p_load
        bimodal_hits += abs(est - p_true) / p_true <= 0.02
    passed = vrs_hits >= 95 and bimodal_hits >= 95
    return CriterionResult(
        "fit_recovery", passed,
        f"splitting within 2%: {vrs_hits}/100, loading fraction within 2%: "
        f"{bimodal_hits}/100 (each needs >= 95)")


def check_asymmetric_splitting() -> CriterionResult:
    """Cavity detuning skews the doublet toward the predicted side."""
    omega = 2.74 * np.sqrt(8.0)
    delta_ca = -0.2
    lo, hi = qed.splitting_peaks(omega, delta_ca=delta_ca)
    t_lo = qed.transmission(lo, delta_ca=delta_ca, omega_eff=omega)
    t_hi = qed.transmission(hi, delta_ca=delta_ca, omega_eff=omega)
    ratio = max(t_lo, t_hi) / min(t_lo, t_hi)
    higher_side = np.sign(lo if t_lo > t_hi else hi)
    side_ok = higher_side == np.sign(delta_ca)

    lo_s, hi_s = qed.splitting_peaks(omega, delta_ca=0.0)
    t_lo_s = qed.transmission(lo_s, omega_eff=omega)
    t_hi_s = qed.transmission(hi_s, omega_eff=omega)
    sym_dev = abs(t_lo_s / t_hi_s - 1.0)
    passed = ratio > 1.01 and bool(side_ok) and sym_dev <= 1e-6
    return CriterionResult(
        "asymmetric_splitting", passed,
        f"height ratio = {ratio:.4f} (> 1.01) on detuning side, symmetric "
        f"imbalance = {sym_dev:.1e} (<= 1e-6)")


CRITERIA = (
    check_oracle_agreement,
    check_cooperativity,
    check_sqrtn_roundtrip,
    check_beat_geometry,
    check_thermal_bands,
    check_loading_stats,
    check_detection_errors,
    check_empty_cavity,
    check_fit_recovery,
    check_asymmetric_splitting,
)


def run_all() -> list[CriterionResult]:
    return [check() for check in CRITERIA]
