import math

import numpy as np
import pytest
import scipy.optimize

from atomcavity.errors import DegenerateFitError
from atomcavity.fitting import (ModelSpec, estimate_splitting, fit_bimodal,
                                fit_exponential, fit_gaussian_profile,
                                fit_least_squares, fit_rabi,
                                fit_sqrt_scaling, fit_vrs,
                                gaussian_profile_model)
from atomcavity.montecarlo import (rng_from_seed, simulate_counts,
                                   simulate_loading)
from atomcavity.qed import SpectrumScan, spectrum


def _linear_model():
    return ModelSpec(predict=lambda p, x: p[0] + p[1] * np.asarray(x),
                     param_names=("intercept", "slope"))


class TestEngine:
    def test_linear_model_matches_normal_equations(self):
        rng = rng_from_seed(1)
        x = np.linspace(0, 10, 40)
        y = 1.7 - 0.4 * x + rng.normal(0, 0.1, x.size)
        s = np.full_like(x, 0.1)
        res = fit_least_squares(_linear_model(), x, y, sigma=s, p0=(0.0, 0.0))

        a = np.column_stack([np.ones_like(x), x]) / s[:, None]
        lhs = a.T @ a
        beta = np.linalg.solve(lhs, a.T @ (y / s))
        np.testing.assert_allclose(res.params, beta, atol=1e-10)
        resid = (y - beta[0] - beta[1] * x) / s
        cov = np.linalg.inv(lhs) * (resid @ resid) / (x.size - 2)
        np.testing.assert_allclose(res.covariance, cov, rtol=1e-8)
        assert res.dof == x.size - 2
        assert res.converged

    def test_noiseless_recovery_from_offset_start(self):
        x = np.linspace(-5, 5, 81)
        true = np.array([2.0, 0.3, 1.5, 0.1])
        gm = gaussian_profile_model()
        y = gm.predict(true, x)
        res = fit_least_squares(gm, x, y, p0=true * 1.2)
        np.testing.assert_allclose(res.params, true, rtol=1e-6)
        assert res.chi2 < 1e-12

    def test_agrees_with_reference_optimizer(self):
        rng = rng_from_seed(101)
        t = np.linspace(0, 20, 60)
        y = 3.0 * np.exp(-t / 4.8) + 0.5 + rng.normal(0, 0.03, t.size)
        s = np.full_like(t, 0.03)
        mine = fit_exponential(t, y, sigma=s)

        def f(tt, amp, tau, off):
            return amp * np.exp(-tt / tau) + off

        popt, pcov = scipy.optimize.curve_fit(f, t, y, p0=(2.0, 3.0, 0.0),
                                              sigma=s, absolute_sigma=False)
        np.testing.assert_allclose(mine.params, popt, rtol=1e-6)
        np.testing.assert_allclose(mine.sigmas, np.sqrt(np.diag(pcov)),
                                   rtol=1e-3)

    def test_one_sigma_coverage(self):
        x = np.linspace(-5, 5, 81)
        true = (2.0, 0.3, 1.5, 0.1)
        gm = gaussian_profile_model()
        y0 = gm.predict(true, x)
        hits = 0
        for i in range(200):
            rng = rng_from_seed(500 + i)
            y = y0 + rng.normal(0, 0.05, x.size)
            res = fit_least_squares(gm, x, y, sigma=np.full_like(x, 0.05))
            hits += abs(res.value("center") - true[1]) <= res.sigma("center")
        assert 0.60 <= hits / 200 <= 0.78

    def test_scale_invariance(self):
        x = np.linspace(0, 10, 30)
        rng = rng_from_seed(8)
        y = 1.0 + 2.0 * x + rng.normal(0, 0.2, x.size)
        res1 = fit_least_squares(_linear_model(), x, y,
                                 sigma=np.full_like(x, 0.2), p0=(0.0, 0.0))
        res2 = fit_least_squares(_linear_model(), x, 1000.0 * y,
                                 sigma=np.full_like(x, 200.0), p0=(0.0, 0.0))
        np.testing.assert_allclose(res2.params, 1000.0 * res1.params,
                                   rtol=1e-10)
        assert res2.chi2 == pytest.approx(res1.chi2, rel=1e-10)

    def test_cost_trace_monotone(self):
        rng = rng_from_seed(13)
        t = np.linspace(0, 20, 50)
        y = 3.0 * np.exp(-t / 4.8) + 0.5 + rng.normal(0, 0.05, t.size)
        res = fit_exponential(t, y, p0=(1.0, 10.0, 0.0))
        assert np.all(np.diff(res.cost_trace) <= 0)
        assert res.cost_trace[0] >= res.chi2

    def test_numeric_jacobian_matches_analytic(self):
        from atomcavity.fitting import _jacobian
        x = np.linspace(0, 10, 25)
        model = ModelSpec(
            predict=lambda p, xx: p[0] * np.exp(-np.asarray(xx) / p[1]),
            param_names=("amp", "tau"))
        p = np.array([2.5, 4.0])
        inv_sigma = np.ones_like(x)
        j = _jacobian(model, p, x, inv_sigma)
        # columns are the model derivatives d predict / d p_k
        d_amp = np.exp(-x / p[1])
        d_tau = p[0] * np.exp(-x / p[1]) * x / p[1] ** 2
        np.testing.assert_allclose(j[:, 0], d_amp, atol=1e-7)
        np.testing.assert_allclose(j[:, 1], d_tau, atol=1e-5)

    def test_dead_parameter_raises(self):
        x = np.linspace(0, 1, 20)
        model = ModelSpec(predict=lambda p, xx: p[0] * np.asarray(xx),
                          param_names=("slope", "unused"))
        with pytest.raises(DegenerateFitError):
            fit_least_squares(model, x, 2.0 * x, p0=(1.0, 1.0))

    def test_iteration_cap_returns_best_so_far(self):
        rng = rng_from_seed(21)
        t = np.linspace(0, 20, 50)
        y = 3.0 * np.exp(-t / 4.8) + 0.5 + rng.normal(0, 0.01, t.size)
        capped = fit_exponential(t, y, p0=(0.5, 15.0, 0.0))
        res = fit_least_squares(exp_model := _exp_model(), t, y,
                                p0=(0.5, 15.0, 0.0), max_iter=1)
        assert not res.converged
        assert res.n_iter == 1
        assert res.chi2 >= capped.chi2
        ref0 = (y - exp_model.predict((0.5, 15.0, 0.0), t))
        assert res.chi2 <= ref0 @ ref0

    def test_bounds_respected(self):
        x = np.linspace(0, 10, 30)
        y = 2.0 * np.exp(-x / 4.0)  # true offset is 0
        model = ModelSpec(
            predict=lambda p, xx: p[0] * np.exp(-np.asarray(xx) / p[1]) + p[2],
            param_names=("amp", "tau", "offset"),
            lower=(0.0, 0.1, 0.05))
        res = fit_least_squares(model, x, y, p0=(1.0, 2.0, 0.2))
        assert res.value("offset") >= 0.05

    def test_validation(self):
        x = np.linspace(0, 1, 10)
        with pytest.raises(ValueError):
            fit_least_squares(_linear_model(), x, x)  # no guess, no p0
        with pytest.raises(ValueError):
            fit_least_squares(_linear_model(), x, x, p0=(0.0,))
        with pytest.raises(ValueError):
            fit_least_squares(_linear_model(), x, x, sigma=np.zeros_like(x),
                              p0=(0.0, 0.0))
        with pytest.raises(ValueError):
            fit_least_squares(_linear_model(), x, x, p0=(np.inf, 0.0))
        with pytest.raises(ValueError):
            ModelSpec(predict=lambda p, xx: xx, param_names=("a",),
                      lower=(0.0, 1.0))
        with pytest.raises(ValueError):
            ModelSpec(predict=lambda p, xx: xx, param_names=("a",),
                      lower=(1.0,), upper=(0.0,))


def _exp_model():
    return ModelSpec(
        predict=lambda p, t: p[0] * np.exp(-np.asarray(t) / p[1]) + p[2],
        param_names=("amplitude", "tau", "offset"))


class TestSplitSpectrum:
    def test_estimate_splitting_two_peaks(self):
        scan = spectrum(np.linspace(-12, 12, 481), omega_eff=5.48)
        om, found = estimate_splitting(scan)
        assert found
        assert om == pytest.approx(5.48, abs=0.3)

    def test_noiseless_recovery(self):
        grid = np.linspace(-12, 12, 481)
        clean = spectrum(grid, omega_eff=5.48, delta_ca=-0.2)
        scan = SpectrumScan(grid, 0.9 * clean.transmission)
        res = fit_vrs(scan)
        assert res.converged
        assert res.value("omega_eff") == pytest.approx(5.48, rel=1e-9)
        assert res.value("delta_ca") == pytest.approx(-0.2, rel=1e-9)
        assert res.value("amplitude") == pytest.approx(0.9, rel=1e-9)

    def test_noisy_recovery_within_percent(self):
        grid = np.linspace(-12, 12, 481)
        clean = 0.9 * spectrum(grid, omega_eff=5.48,
                               delta_ca=-0.2).transmission
        rng = rng_from_seed(77)
        noisy = np.clip(clean + rng.normal(0, 0.01, grid.size), 1e-12, None)
        res = fit_vrs(SpectrumScan(grid, noisy),
                      sigma=np.full(grid.size, 0.01))
        assert res.value("omega_eff") == pytest.approx(5.48, rel=0.01)

    def test_unresolved_splitting_recovered_by_multistart(self):
        # below (kappa + gamma)/2 the two peaks merge into one
        scan = spectrum(np.linspace(-6, 6, 301), omega_eff=0.8)
        om, found = estimate_splitting(scan)
        assert not found
        assert om == 0.0
        res = fit_vrs(scan)
        assert res.value("omega_eff") == pytest.approx(0.8, rel=1e-6)

    def test_explicit_start_bypasses_search(self):
        grid = np.linspace(-12, 12, 241)
        scan = spectrum(grid, omega_eff=5.48)
        res = fit_vrs(scan, p0=(5.0, 0.1, 1.1))
        assert res.value("omega_eff") == pytest.approx(5.48, rel=1e-9)


class TestLineShapes:
    def test_gaussian_profile(self):
        x = np.linspace(-120, 120, 161)
        y = 3.1 * np.exp(-(x / 46.0) ** 2) + 0.02
        res = fit_gaussian_profile(x, y)
        assert res.value("amplitude") == pytest.approx(3.1, rel=1e-7)
        assert res.value("center") == pytest.approx(0.0, abs=1e-7)
        assert res.value("waist") == pytest.approx(46.0, rel=1e-7)
        assert res.value("offset") == pytest.approx(0.02, rel=1e-6)

    def test_exponential(self):
        t = np.linspace(0, 15, 100)
        rng = rng_from_seed(4)
        y = np.exp(-t / 4.8) + rng.normal(0, 0.005, t.size)
        res = fit_exponential(t, y, sigma=np.full_like(t, 0.005))
        assert res.value("tau") == pytest.approx(4.8, rel=0.02)
        assert res.value("tau") == pytest.approx(4.8, abs=3 * res.sigma("tau"))

    def test_rabi(self):
        t = np.linspace(0, 8, 161)
        rng = rng_from_seed(9)
        y = (0.8 * np.sin(np.pi * 0.25 * t + 0.4) ** 2 + 0.1
             + rng.normal(0, 0.01, t.size))
        res = fit_rabi(t, y)
        assert res.value("frequency") == pytest.approx(0.25, rel=0.01)
        assert res.value("amplitude") == pytest.approx(0.8, rel=0.05)
        assert res.value("phase") == pytest.approx(0.4, abs=0.05)
        assert res.value("offset") == pytest.approx(0.1, abs=0.02)


class TestBimodal:
    def test_recovers_loading_fraction_and_counts(self):
        occ = simulate_loading(n_trials=2000, seed=31).ravel()
        counts = simulate_counts(occ, seed=32)
        got = fit_bimodal(counts)
        assert got.p_load == pytest.approx(0.57, rel=0.02)
        assert got.detection.mu_empty == pytest.approx(40.0, rel=0.02)
        assert got.detection.mu_occupied == pytest.approx(400.0, rel=0.02)
        assert got.detection.sigma_empty == pytest.approx(37.68, rel=0.03)
        assert got.detection.sigma_occupied == pytest.approx(37.68, rel=0.03)
        assert got.bin_centers.size == got.bin_counts.size == 60

    def test_canonical_peak_order(self):
        rng = rng_from_seed(6)
        # mostly-occupied sample: the mixture fraction must still report
        # the upper peak's weight
        occ = rng.random(5000) < 0.8
        counts = simulate_counts(occ, seed=7)
        got = fit_bimodal(counts)
        assert got.detection.mu_empty < got.detection.mu_occupied
        assert got.p_load == pytest.approx(0.8, rel=0.05)

    def test_too_few_counts(self):
        with pytest.raises(ValueError):
            fit_bimodal(np.ones(99))


class TestSqrtScaling:
    def test_single_point_closed_form(self):
        res = fit_sqrt_scaling([4], [5.48])
        assert res.value("g") == pytest.approx(2.74, rel=1e-14)
        assert res.sigma("g") == 0.0
        assert res.dof == 0

    def test_exact_law(self):
        n = np.arange(1, 9, dtype=float)
        res = fit_sqrt_scaling(n, 2.74 * np.sqrt(n))
        assert res.value("g") == pytest.approx(2.74, rel=1e-12)
        assert res.chi2 < 1e-20

    def test_matches_general_engine(self):
        n = np.arange(1, 9, dtype=float)
        rng = rng_from_seed(55)
        om = 2.74 * np.sqrt(n) + rng.normal(0, 0.03, 8)
        s = np.full(8, 0.03)
        closed = fit_sqrt_scaling(n, om, s)
        model = ModelSpec(predict=lambda p, nn: p[0] * np.sqrt(nn),
                          param_names=("g",))
        iterative = fit_least_squares(model, n, om, sigma=s, p0=(1.0,))
        assert closed.value("g") == pytest.approx(iterative.value("g"),
                                                  abs=1e-8)
        assert closed.sigma("g") == pytest.approx(iterative.sigma("g"),
                                                  rel=1e-6)

    def test_validation(self):
        with pytest.raises(ValueError):
            fit_sqrt_scaling([1, 2], [2.74])
        with pytest.raises(ValueError):
            fit_sqrt_scaling([0], [1.0])
        with pytest.raises(ValueError):
            fit_sqrt_scaling([1], [2.74], [0.0])
