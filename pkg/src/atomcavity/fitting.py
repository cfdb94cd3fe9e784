"""Levenberg-Marquardt curve fitting and the standard line-shape models.

The optimizer is self-contained (numpy only): these are small, dense,
well-conditioned problems and an explicit implementation keeps the iteration
trace and failure modes inspectable. Weighted residuals (y - f)/sigma are
minimized; the parameter covariance is inv(J^T J) scaled by chi2/dof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateFitError
from .montecarlo import DetectionModel
from .qed import CavityParams, SpectrumScan, transmission

_EPS_CD = float(np.finfo(float).eps) ** (1.0 / 3.0)  # central-difference step


@dataclass(frozen=True)
class ModelSpec:
    """A parametric model y = predict(params, x) plus fitting metadata."""

    predict: Callable
    param_names: tuple[str, ...]
    lower: tuple | None = None
    upper: tuple | None = None
    guess: Callable | None = None  # (x, y) -> p0

    def __post_init__(self):
        n = len(self.param_names)
        for b in (self.lower, self.upper):
            if b is not None and len(b) != n:
                raise ValueError("bounds length must match param_names")
        if self.lower is not None and self.upper is not None:
            if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
                raise ValueError("bounds must satisfy lower <= upper")


@dataclass(frozen=True)
class FitResult:
    """Optimized parameters with uncertainties and the iteration record."""

    params: np.ndarray
    sigmas: np.ndarray
    covariance: np.ndarray
    chi2: float
    dof: int
    converged: bool
    n_iter: int
    param_names: tuple[str, ...]
    cost_trace: np.ndarray = field(repr=False, default=None)

    def value(self, name: str) -> float:
        return float(self.params[self.param_names.index(name)])

    def sigma(self, name: str) -> float:
        return float(self.sigmas[self.param_names.index(name)])


def _clip(p: np.ndarray, model: ModelSpec) -> np.ndarray:
    if model.lower is not None:
        p = np.maximum(p, model.lower)
    if model.upper is not None:
        p = np.minimum(p, model.upper)
    return p


def _cost(r: np.ndarray) -> float:
    return float(r @ r) if np.all(np.isfinite(r)) else math.inf


def _feasible_fraction(p: np.ndarray, step: np.ndarray,
                       model: ModelSpec) -> float:
    """Largest fraction of a step that keeps every parameter in bounds."""
    alpha = 1.0
    for k in range(p.size):
        s = step[k]
        if s > 0 and model.upper is not None and math.isfinite(model.upper[k]):
            alpha = min(alpha, (model.upper[k] - p[k]) / s)
        elif (s < 0 and model.lower is not None
              and math.isfinite(model.lower[k])):
            alpha = min(alpha, (model.lower[k] - p[k]) / s)
    return max(alpha, 0.0)


def _jacobian(model: ModelSpec, p: np.ndarray, x, inv_sigma) -> np.ndarray:
    j = np.empty((np.asarray(x).shape[0] if np.ndim(x) else 1, p.size))
    with np.errstate(all="ignore"):
        for k in range(p.size):
            h = _EPS_CD * max(abs(p[k]), 1.0)
            pp, pm = p.copy(), p.copy()
            pp[k] += h
            pm[k] -= h
            # probes must stay inside the feasible box; at a bound this
            # degrades to a one-sided difference
            pp, pm = _clip(pp, model), _clip(pm, model)
            width = pp[k] - pm[k]
            if width <= 0.0:
                j[:, k] = 0.0
                continue
            j[:, k] = (np.asarray(model.predict(pp, x))
                       - np.asarray(model.predict(pm, x))) / width
    return j * inv_sigma[:, None]


def fit_least_squares(model: ModelSpec, x, y, sigma=None, p0=None,
                      max_iter: int = 500, gtol: float = 1e-10,
                      ftol: float = 1e-12) -> FitResult:
    """Minimize sum(((y - predict(p, x)) / sigma)^2) over p.

    Damped Gauss-Newton with Marquardt diagonal scaling and a simple
    accept/reject lambda schedule. Stops on a small gradient, a relative
    cost decrease below ftol, or the iteration cap; the cap returns the
    best parameters seen with converged=False. Steps that leave the bound
    box are shortened along their direction to the first bound they hit;
    once a parameter is pinned there the remaining components keep moving.
    """
    y = np.asarray(y, dtype=float)
    if sigma is None:
        inv_sigma = np.ones_like(y)
    else:
        s = np.asarray(sigma, dtype=float)
        if np.any(s <= 0):
            raise ValueError("sigma entries must be positive")
        inv_sigma = 1.0 / s
    if p0 is None:
        if model.guess is None:
            raise ValueError("p0 required: model has no guess policy")
        p0 = model.guess(x, y)
    p = _clip(np.asarray(p0, dtype=float).copy(), model)
    if p.size != len(model.param_names):
        raise ValueError("p0 length must match param_names")

    def residual(pp):
        with np.errstate(all="ignore"):
            return (y - np.asarray(model.predict(pp, x))) * inv_sigma

    r = residual(p)
    cost = _cost(r)
    if not math.isfinite(cost):
        raise ValueError("initial parameters give non-finite residuals")
    lam = 1e-3
    trace = [cost]
    converged = False
    n_iter = 0
    jtj = None
    for n_iter in range(1, max_iter + 1):
        j = _jacobian(model, p, x, inv_sigma)
        jtj = j.T @ j
        grad = j.T @ r
        if np.abs(grad).max() < gtol:
            converged = True
            break
        diag = np.diag(jtj).copy()
        dead = diag <= 0
        if np.all(dead):
            raise DegenerateFitError("model is flat in every parameter")
        diag[dead] = diag[~dead].min()

        accepted = False
        while lam < 1e12:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), grad)
            except np.linalg.LinAlgError:
                lam *= 8.0
                continue
            raw = p + step
            clipped = _clip(raw, model)
            if np.array_equal(clipped, raw):
                p_new = raw
            else:
                # walk the same direction only as far as the first bound;
                # projecting component-wise would distort a long step into
                # an unrelated corner of the box
                alpha = _feasible_fraction(p, step, model)
                p_new = (_clip(p + alpha * step, model) if alpha > 1e-12
                         else clipped)  # pinned: move the free components
            r_new = residual(p_new)
            cost_new = _cost(r_new)
            if cost_new < cost:
                rel_drop = (cost - cost_new) / max(cost, 1e-300)
                p, r, cost = p_new, r_new, cost_new
                trace.append(cost)
                lam = max(lam / 4.0, 1e-12)
                accepted = True
                if rel_drop < ftol:
                    converged = True
                break
            lam *= 8.0
        if not accepted:
            converged = True  # no downhill direction left at any damping
            break
        if converged:
            break

    if jtj is None:
        j = _jacobian(model, p, x, inv_sigma)
        jtj = j.T @ j
    dof = y.size - p.size
    scale = cost / dof if dof > 0 else 1.0
    cond = np.linalg.cond(jtj)
    if not np.isfinite(cond) or cond > 1e12:
        raise DegenerateFitError(
            f"normal equations singular at the solution (cond {cond:.2e})")
    cov = np.linalg.inv(jtj) * scale
    return FitResult(params=p, sigmas=np.sqrt(np.diag(cov)), covariance=cov,
                     chi2=cost, dof=dof, converged=converged, n_iter=n_iter,
                     param_names=model.param_names,
                     cost_trace=np.asarray(trace))


# ---------------------------------------------------------------------------
# line-shape models


def _smooth5(y: np.ndarray) -> np.ndarray:
    """5-point moving average with edge padding."""
    padded = np.pad(y, 2, mode="edge")
    return np.convolve(padded, np.full(5, 0.2), mode="valid")


def _local_maxima(y: np.ndarray) -> np.ndarray:
    """Indices of strict interior local maxima."""
    return np.where((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:]))[0] + 1


def estimate_splitting(scan: SpectrumScan) -> tuple[float, bool]:
    """Initial splitting guess from the outermost pair of smoothed maxima.

    Returns (omega_guess, found_pair). With fewer than two maxima the guess
    is 0 and found_pair is False; fit_vrs then falls back to multi-start.
    """
    sm = _smooth5(scan.transmission)
    idx = _local_maxima(sm)
    if idx.size < 2:
        return 0.0, False
    x = scan.delta_pa[idx]
    return float((x.max() - x.min()) / 2.0), True


_VRS_MULTISTART = (0.5, 1.0, 2.0, 4.0)  # MHz


def fit_vrs(scan: SpectrumScan, params: CavityParams | None = None,
            sigma=None, p0=None) -> FitResult:
    """Fit a measured transmission scan to the split-spectrum model.

    Free parameters: (omega_eff, delta_ca, amplitude); kappa and gamma are
    taken from params and held fixed. The amplitude absorbs the overall
    detection efficiency. If the scan shows no resolvable peak pair the fit
    is restarted from a ladder of splitting guesses and the best final cost
    wins.
    """
    p = params if params is not None else CavityParams()

    def predict(theta, x):
        om, dca, amp = theta
        return amp * transmission(x, delta_ca=dca, omega_eff=abs(om),
                                  params=p)

    model = ModelSpec(predict=predict,
                      param_names=("omega_eff", "delta_ca", "amplitude"),
                      lower=(1e-6, -np.inf, 1e-12))

    def run(om0):
        t_model = predict((om0, 0.0, 1.0), scan.delta_pa)
        amp0 = scan.transmission.max() / max(t_model.max(), 1e-12)
        return fit_least_squares(model, scan.delta_pa, scan.transmission,
                                 sigma=sigma, p0=(om0, 0.0, amp0))

    if p0 is not None:
        return fit_least_squares(model, scan.delta_pa, scan.transmission,
                                 sigma=sigma, p0=p0)
    om0, found = estimate_splitting(scan)
    if found:
        result = run(om0)
        if result.converged:
            return result
    results = [run(om) for om in _VRS_MULTISTART]
    return min(results, key=lambda res: res.chi2)


def gaussian_profile_model() -> ModelSpec:
    """amplitude * exp(-((x - center)/waist)^2) + offset."""

    def predict(theta, x):
        amp, center, waist, offset = theta
        return amp * np.exp(-((np.asarray(x) - center) / waist) ** 2) + offset

    def guess(x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        offset = y.min()
        amp = y.max() - offset
        center = x[np.argmax(y)]
        weight = np.clip(y - offset, 0, None)
        denom = weight.sum() or 1.0
        var = ((x - center) ** 2 * weight).sum() / denom
        waist = math.sqrt(2.0 * var) or (x.max() - x.min()) / 4.0
        return np.array([amp, center, waist, offset])

    return ModelSpec(predict=predict,
                     param_names=("amplitude", "center", "waist", "offset"),
                     lower=(0.0, -np.inf, 1e-12, -np.inf), guess=guess)


def fit_gaussian_profile(x, y, sigma=None, p0=None) -> FitResult:
    """Fit a transverse coupling profile; waist is the 1/e half-width."""
    return fit_least_squares(gaussian_profile_model(), x, y, sigma=sigma,
                             p0=p0)


def exponential_model() -> ModelSpec:
    """amplitude * exp(-t / tau) + offset."""

    def predict(theta, t):
        amp, tau, offset = theta
        return amp * np.exp(-np.asarray(t) / tau) + offset

    def guess(t, y):
        t = np.asarray(t, float)
        y = np.asarray(y, float)
        offset = y.min()
        amp = max(y[0] - offset, 1e-12)
        span = t.max() - t.min()
        return np.array([amp, span / 3.0 if span > 0 else 1.0, offset])

    return ModelSpec(predict=predict, param_names=("amplitude", "tau",
                                                   "offset"),
                     lower=(0.0, 1e-300, -np.inf), guess=guess)


def fit_exponential(t, y, sigma=None, p0=None) -> FitResult:
    """Fit a survival or decay curve; tau in the units of t."""
    return fit_least_squares(exponential_model(), t, y, sigma=sigma, p0=p0)


def rabi_model() -> ModelSpec:
    """amplitude * sin^2(pi f t + phase) + offset."""

    def predict(theta, t):
        amp, freq, phase, offset = theta
        return amp * np.sin(np.pi * freq * np.asarray(t) + phase) ** 2 + offset

    def guess(t, y):
        t = np.asarray(t, float)
        y = np.asarray(y, float)
        offset = y.min()
        amp = max(y.max() - offset, 1e-12)
        # sin^2 oscillates at f, so the FFT peak sits at the Rabi frequency
        dt = np.median(np.diff(t))
        spec = np.abs(np.fft.rfft(y - y.mean()))
        freqs = np.fft.rfftfreq(t.size, dt)
        f0 = freqs[1 + np.argmax(spec[1:])] if spec.size > 1 else 1.0
        return np.array([amp, f0 if f0 > 0 else 1.0, 0.0, offset])

    return ModelSpec(predict=predict,
                     param_names=("amplitude", "frequency", "phase",
                                  "offset"),
                     lower=(0.0, 1e-12, -np.pi, -np.inf),
                     upper=(np.inf, np.inf, np.pi, np.inf), guess=guess)


def fit_rabi(t, y, sigma=None, p0=None) -> FitResult:
    """Fit driven-oscillation data; frequency in cycles per unit of t."""
    return fit_least_squares(rabi_model(), t, y, sigma=sigma, p0=p0)


@dataclass(frozen=True)
class BimodalFit:
    """Loading fraction and count model recovered from a count histogram."""

    p_load: float
    detection: DetectionModel
    fit: FitResult
    bin_centers: np.ndarray = field(repr=False, default=None)
    bin_counts: np.ndarray = field(repr=False, default=None)


def fit_bimodal(counts, bins: int = 60, sigma_floor: float = 1.0) -> BimodalFit:
    """Fit a two-Gaussian mixture to a photon-count histogram.

    Free parameters: mixture fraction, both means, both widths. Bin errors
    are Poisson (sqrt of the count, floored at sigma_floor). Returns the
    occupied fraction and the equivalent DetectionModel.
    """
    c = np.asarray(counts, dtype=float)
    if c.size < 100:
        raise ValueError("need at least 100 counts to fit a mixture")
    hist, edges = np.histogram(c, bins=bins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    width = edges[1] - edges[0]
    norm = c.size * width

    def predict(theta, x):
        p, m0, s0, m1, s1 = theta
        x = np.asarray(x)
        g0 = np.exp(-0.5 * ((x - m0) / s0) ** 2) / (s0 * math.sqrt(2 * math.pi))
        g1 = np.exp(-0.5 * ((x - m1) / s1) ** 2) / (s1 * math.sqrt(2 * math.pi))
        return norm * ((1.0 - p) * g0 + p * g1)

    # split at the histogram midpoint for moment-based starting values
    split = 0.5 * (c.min() + c.max())
    lo, hi = c[c <= split], c[c > split]
    if lo.size == 0 or hi.size == 0:
        raise ValueError("counts do not separate into two groups")
    p0 = np.array([hi.size / c.size, lo.mean(), max(lo.std(), width),
                   hi.mean(), max(hi.std(), width)])

    model = ModelSpec(predict=predict,
                      param_names=("p_load", "mu_empty", "sigma_empty",
                                   "mu_occupied", "sigma_occupied"),
                      lower=(1e-6, -np.inf, 1e-9, -np.inf, 1e-9),
                      upper=(1.0 - 1e-6, np.inf, np.inf, np.inf, np.inf))
    result = fit_least_squares(model, centers, hist,
                               sigma=np.sqrt(np.maximum(hist, sigma_floor)),
                               p0=p0)
    p, m0, s0, m1, s1 = result.params
    if m0 > m1:  # canonical order: empty peak below occupied peak
        p, m0, s0, m1, s1 = 1.0 - p, m1, s1, m0, s0
    detection = DetectionModel(mu_empty=m0, mu_occupied=m1, sigma_empty=s0,
                               sigma_occupied=s1)
    return BimodalFit(p_load=float(p), detection=detection, fit=result,
                      bin_centers=centers, bin_counts=hist.astype(float))


def fit_sqrt_scaling(n_atoms, omega_values, sigmas=None) -> FitResult:
    """Single-atom coupling from collective splittings Omega_N = g sqrt(N).

    Linear least squares through the origin in sqrt(N), solved in closed
    form: g = sum(w sqrt(N) Omega) / sum(w N) with w = 1/sigma^2. The
    parameter uncertainty uses chi2/dof; a single point has dof 0 and
    reports sigma 0.
    """
    n = np.asarray(n_atoms, dtype=float)
    om = np.asarray(omega_values, dtype=float)
    if n.shape != om.shape or n.ndim != 1 or n.size == 0:
        raise ValueError("n_atoms and omega_values must be equal-length 1-d")
    if np.any(n < 1):
        raise ValueError("atom numbers must be >= 1")
    if sigmas is None:
        w = np.ones_like(om)
    else:
        s = np.asarray(sigmas, dtype=float)
        if np.any(s <= 0):
            raise ValueError("sigmas must be positive")
        w = 1.0 / s ** 2
    sn = np.sqrt(n)
    denom = float(w @ n)
    if denom <= 0:
        raise DegenerateFitError("no weight in the scaling fit")
    g = float(w @ (sn * om)) / denom
    r = (om - g * sn) * np.sqrt(w)
    chi2 = float(r @ r)
    dof = om.size - 1
    var = (chi2 / dof / denom) if dof > 0 else 0.0
    cov = np.array([[var]])
    return FitResult(params=np.array([g]), sigmas=np.array([math.sqrt(var)]),
                     covariance=cov, chi2=chi2, dof=dof, converged=True,
                     n_iter=0, param_names=("g",),
                     cost_trace=np.array([chi2]))
