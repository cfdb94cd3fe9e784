"""Stochastic models of array loading, state detection, and retention.

Every sampling routine takes an explicit integer seed and draws from a
counter-based Philox generator, so results are reproducible across runs and
platforms and independent streams never overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import chi2 as _chi2

from .constants import (ATOM_LIFETIME_S, HOLD_WINDOW_S,
                        LIGHT_SHIFT_HALF_RANGE_FRACTION,
                        LIGHT_SHIFT_MEAN_MHZ, LOAD_PROBABILITY, N_SITES,
                        PER_ATOM_LOSS)

# optimal-threshold misclassification rate the default detection model is
# constructed to reproduce
DETECTION_ERROR_TARGET = 8.9e-7


def rng_from_seed(seed: int) -> np.random.Generator:
    """Philox generator keyed by seed."""
    return np.random.Generator(np.random.Philox(key=int(seed)))


@dataclass(frozen=True)
class LoadingModel:
    """Independent per-site Bernoulli loading."""

    p_load: float = LOAD_PROBABILITY
    n_sites: int = N_SITES

    def __post_init__(self):
        if not 0.0 <= self.p_load <= 1.0:
            raise ValueError("p_load must be in [0, 1]")
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")

    @property
    def mean_occupancy(self) -> float:
        return self.p_load * self.n_sites

    def pmf(self, k) -> np.ndarray:
        """Exact binomial occupancy probabilities."""
        kk = np.atleast_1d(np.asarray(k, dtype=int))
        n, p = self.n_sites, self.p_load
        out = np.array([math.comb(n, int(x)) * p ** x * (1 - p) ** (n - x)
                        if 0 <= x <= n else 0.0 for x in kk])
        return out if np.asarray(k).ndim else float(out[0])


def simulate_loading(model: LoadingModel | None = None, n_trials: int = 1,
                     seed: int = 0) -> np.ndarray:
    """Boolean site-occupation matrix of shape (n_trials, n_sites)."""
    m = model if model is not None else LoadingModel()
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    rng = rng_from_seed(seed)
    return rng.random((n_trials, m.n_sites)) < m.p_load


def _phi(x: float) -> float:
    """Standard normal CDF."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class DetectionModel:
    """Two-Gaussian photon-count model for occupied / empty sites."""

    mu_empty: float = 40.0
    mu_occupied: float = 400.0
    sigma_empty: float = 0.0  # 0 selects the default width, see below
    sigma_occupied: float = 0.0

    def __post_init__(self):
        if self.mu_occupied <= self.mu_empty:
            raise ValueError("mu_occupied must exceed mu_empty")
        # default width: back-solved so the optimal equal-prior threshold
        # misclassifies at DETECTION_ERROR_TARGET
        if self.sigma_empty == 0.0 or self.sigma_occupied == 0.0:
            sep = -2.0 * ndtri(DETECTION_ERROR_TARGET)
            sigma = (self.mu_occupied - self.mu_empty) / sep
            if self.sigma_empty == 0.0:
                object.__setattr__(self, "sigma_empty", sigma)
            if self.sigma_occupied == 0.0:
                object.__setattr__(self, "sigma_occupied", sigma)
        if self.sigma_empty < 0 or self.sigma_occupied < 0:
            raise ValueError("count widths must be positive")

    @classmethod
    def from_error_rate(cls, error: float = DETECTION_ERROR_TARGET,
                        mu_empty: float = 40.0,
                        mu_occupied: float = 400.0) -> "DetectionModel":
        """Equal-width model whose optimal balanced threshold errs at `error`."""
        if not 0.0 < error < 0.5:
            raise ValueError("error must be in (0, 0.5)")
        sigma = (mu_occupied - mu_empty) / (-2.0 * ndtri(error))
        return cls(mu_empty=mu_empty, mu_occupied=mu_occupied,
                   sigma_empty=sigma, sigma_occupied=sigma)


def simulate_counts(occupied, model: DetectionModel | None = None,
                    seed: int = 0) -> np.ndarray:
    """Draw photon counts for a boolean occupation array.

    Gaussian approximation to the count statistics; the low tail may dip
    below zero, which is harmless for threshold classification.
    """
    m = model if model is not None else DetectionModel()
    occ = np.asarray(occupied, dtype=bool)
    rng = rng_from_seed(seed)
    mu = np.where(occ, m.mu_occupied, m.mu_empty)
    sigma = np.where(occ, m.sigma_occupied, m.sigma_empty)
    return rng.normal(mu, sigma)


def classify(counts, threshold: float) -> np.ndarray:
    """Counts above threshold are called occupied."""
    return np.asarray(counts, dtype=float) > threshold


def optimal_threshold(model: DetectionModel | None = None,
                      prior_occupied: float = 0.5) -> float:
    """Threshold minimizing the misclassification probability.

    Root of (1-p) N(t; empty) = p N(t; occupied); quadratic in t for
    unequal widths, linear for equal widths. Candidate roots are compared
    on the exact error so the minimum (not the saddle) is returned.
    """
    m = model if model is not None else DetectionModel()
    p = prior_occupied
    if not 0.0 < p < 1.0:
        # all mass on one class: any infinite threshold is optimal
        return math.inf if p <= 0.0 else -math.inf
    s0, s1 = m.sigma_empty, m.sigma_occupied
    m0, m1 = m.mu_empty, m.mu_occupied
    a = 0.5 / s1 ** 2 - 0.5 / s0 ** 2
    b = m0 / s0 ** 2 - m1 / s1 ** 2
    c = (0.5 * m1 ** 2 / s1 ** 2 - 0.5 * m0 ** 2 / s0 ** 2
         + math.log((1.0 - p) * s1 / (p * s0)))
    if abs(a) < 1e-300:
        roots = [-c / b]
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0:
            # one class dominates everywhere
            return math.inf if p < 0.5 else -math.inf
        r = math.sqrt(disc)
        roots = [(-b - r) / (2 * a), (-b + r) / (2 * a)]
    return min(roots, key=lambda t: detection_error(m, t, p))


def detection_error(model: DetectionModel | None = None,
                    threshold: float | None = None,
                    prior_occupied: float = 0.5) -> float:
    """Exact misclassification probability at a threshold.

    (1-p) P(count > t | empty) + p P(count < t | occupied); threshold None
    means the optimal one.
    """
    m = model if model is not None else DetectionModel()
    p = prior_occupied
    if threshold is None:
        threshold = optimal_threshold(m, p)
    false_occ = 1.0 - _phi((threshold - m.mu_empty) / m.sigma_empty)
    false_empty = _phi((threshold - m.mu_occupied) / m.sigma_occupied)
    return (1.0 - p) * false_occ + p * false_empty


@dataclass(frozen=True)
class SurvivalModel:
    """Exponential single-atom retention in the array."""

    lifetime_s: float = ATOM_LIFETIME_S

    def __post_init__(self):
        if self.lifetime_s <= 0:
            raise ValueError("lifetime_s must be positive")

    def survival(self, hold_s) -> float | np.ndarray:
        """P(atom still present) after hold_s seconds."""
        t = np.asarray(hold_s, dtype=float)
        if np.any(t < 0):
            raise ValueError("hold time must be non-negative")
        out = np.exp(-t / self.lifetime_s)
        return out if out.ndim else float(out)


def atom_number_error(n_atoms: int,
                      per_atom_loss: float = PER_ATOM_LOSS) -> float:
    """Probability of misjudging the atom number over a hold window.

    Quadratic scaling n^2 * per_atom_loss: each of the n atoms may leave
    with probability per_atom_loss during the window, and a lost atom
    corrupts an n-fold repeated readout. The default base rate is the
    rounded single-atom loss over the standard window; this first-order
    form is the quoted error budget and is accurate while n^2 * loss << 1.
    """
    if n_atoms < 0:
        raise ValueError("n_atoms must be >= 0")
    if not 0.0 <= per_atom_loss <= 1.0:
        raise ValueError("per_atom_loss must be in [0, 1]")
    return n_atoms ** 2 * per_atom_loss


def simulate_survival(occupied, hold_s: float = HOLD_WINDOW_S,
                      model: SurvivalModel | None = None,
                      seed: int = 0) -> np.ndarray:
    """Thin an occupation matrix by independent exponential loss."""
    m = model if model is not None else SurvivalModel()
    occ = np.asarray(occupied, dtype=bool)
    rng = rng_from_seed(seed)
    keep = rng.random(occ.shape) < m.survival(hold_s)
    return occ & keep


@dataclass(frozen=True)
class LightShiftModel:
    """Site-to-site spread of the trap-induced transition shift."""

    mean_mhz: float = LIGHT_SHIFT_MEAN_MHZ
    half_range_fraction: float = LIGHT_SHIFT_HALF_RANGE_FRACTION

    def __post_init__(self):
        if self.mean_mhz <= 0:
            raise ValueError("mean_mhz must be positive")
        if not 0.0 <= self.half_range_fraction < 1.0:
            raise ValueError("half_range_fraction must be in [0, 1)")

    @property
    def half_range_mhz(self) -> float:
        return self.mean_mhz * self.half_range_fraction

    def sample_mhz(self, n_sites: int, seed: int = 0) -> np.ndarray:
        """Per-site shifts, uniform over mean * (1 +/- half_range_fraction)."""
        if n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        rng = rng_from_seed(seed)
        lo = self.mean_mhz - self.half_range_mhz
        hi = self.mean_mhz + self.half_range_mhz
        return rng.uniform(lo, hi, size=n_sites)

    def offsets_mhz(self, n_sites: int, seed: int = 0) -> np.ndarray:
        """Shifts relative to the mean, in [-half_range, +half_range]."""
        return self.sample_mhz(n_sites, seed) - self.mean_mhz


@dataclass(frozen=True)
class GofResult:
    statistic: float
    dof: int
    pvalue: float


def occupancy_gof(occupancy_counts, model: LoadingModel | None = None,
                  min_expected: float = 5.0) -> GofResult:
    """Pearson chi-square of observed occupancies against the binomial law.

    Sparse tail bins are pooled until each pooled bin expects at least
    min_expected counts before forming the statistic.
    """
    m = model if model is not None else LoadingModel()
    k = np.asarray(occupancy_counts, dtype=int)
    if k.ndim != 1 or k.size == 0:
        raise ValueError("occupancy_counts must be a non-empty 1-d array")
    if k.min() < 0 or k.max() > m.n_sites:
        raise ValueError("occupancy outside [0, n_sites]")
    n_trials = k.size
    observed = np.bincount(k, minlength=m.n_sites + 1).astype(float)
    expected = m.pmf(np.arange(m.n_sites + 1)) * n_trials

    # pool bins left to right until each carries enough expectation
    obs, exp = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= min_expected:
            obs.append(o_acc)
            exp.append(e_acc)
            o_acc = e_acc = 0.0
    if e_acc > 0:
        if exp:
            obs[-1] += o_acc
            exp[-1] += e_acc
        else:
            obs.append(o_acc)
            exp.append(e_acc)
    obs = np.asarray(obs)
    exp = np.asarray(exp)
    if exp.size < 2:
        raise ValueError("too few populated bins for a chi-square test")
    stat = float(((obs - exp) ** 2 / exp).sum())
    dof = exp.size - 1
    return GofResult(statistic=stat, dof=dof,
                     pvalue=float(_chi2.sf(stat, dof)))
