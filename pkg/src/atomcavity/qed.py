"""Analytic weak-drive response of atoms coupled to a driven cavity.

Single collective-mode model: N atoms with individual couplings g_k enter
only through the quadrature sum Omega_eff = sqrt(sum g_k^2). All rates are
nu = omega/2pi in MHz; kappa and gamma are half-widths, so the empty-cavity
transmission line has FWHM 2*kappa.

Detuning conventions (MHz):
    delta_pa = probe - atom
    delta_ca = cavity - atom
    delta_pc = probe - cavity = delta_pa - delta_ca
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import (CAVITY_LENGTH_MM, FINESSE, G0_MHZ, GAMMA_MHZ,
                        KAPPA_MHZ, LATTICE_WAVELENGTH_NM, MODE_WAIST_UM,
                        PROBE_WAVELENGTH_NM)
from .errors import SingularityError

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CavityParams:
    """Static cavity and atom parameters.

    g0 is the peak single-atom coupling at a mode antinode. kappa and gamma
    are the cavity field and atomic dipole decay rates (half-widths).
    """

    g0: float = G0_MHZ  # MHz
    kappa: float = KAPPA_MHZ  # MHz
    gamma: float = GAMMA_MHZ  # MHz
    lambda_probe_nm: float = PROBE_WAVELENGTH_NM
    lambda_lattice_nm: float = LATTICE_WAVELENGTH_NM
    cavity_length_mm: float = CAVITY_LENGTH_MM
    waist_um: float = MODE_WAIST_UM
    finesse: float = FINESSE

    def __post_init__(self):
        for name in ("g0", "kappa", "gamma", "lambda_probe_nm",
                     "lambda_lattice_nm", "cavity_length_mm", "waist_um",
                     "finesse"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.lambda_lattice_nm >= self.lambda_probe_nm:
            raise ValueError("lattice wavelength must sit blue of the probe "
                             "line (lambda_lattice_nm < lambda_probe_nm)")

    @property
    def cooperativity(self) -> float:
        """Single-atom cooperativity C = g0^2 / (2 kappa gamma)."""
        return self.g0 ** 2 / (2.0 * self.kappa * self.gamma)


def cooperativity(g0: float, kappa: float, gamma: float) -> float:
    """C = g0^2 / (2 kappa gamma) for rates in any common unit."""
    if g0 <= 0 or kappa <= 0 or gamma <= 0:
        raise ValueError("rates must be positive")
    return g0 ** 2 / (2.0 * kappa * gamma)


@dataclass(frozen=True)
class Detunings:
    """Probe/atom/cavity detuning triple with the closure identity enforced.

    Constructed from delta_pa and delta_ca; delta_pc may be passed only as a
    cross-check and must equal delta_pa - delta_ca.
    """

    delta_pa: float  # MHz
    delta_ca: float  # MHz
    delta_pc: float | None = None  # MHz, derived

    def __post_init__(self):
        derived = self.delta_pa - self.delta_ca
        if self.delta_pc is None:
            object.__setattr__(self, "delta_pc", derived)
        elif abs(self.delta_pc - derived) > 1e-9 * max(1.0, abs(derived)):
            raise ValueError(
                f"inconsistent detunings: delta_pc={self.delta_pc} but "
                f"delta_pa - delta_ca = {derived}")


@dataclass(frozen=True)
class CollectiveCoupling:
    """Per-atom couplings and their collective quadrature sum."""

    per_atom_g: tuple[float, ...]  # MHz
    omega_eff: float  # MHz
    n_atoms: int

    def __post_init__(self):
        expected = math.sqrt(sum(g * g for g in self.per_atom_g))
        scale = max(expected, 1e-300)
        if abs(self.omega_eff - expected) > 1e-12 * scale:
            raise ValueError("omega_eff does not equal sqrt(sum g_k^2)")
        if self.n_atoms != len(self.per_atom_g):
            raise ValueError("n_atoms does not match per_atom_g length")


def collective_coupling(per_atom_g) -> CollectiveCoupling:
    """Combine per-atom couplings into the effective collective coupling.

    Omega_eff = sqrt(sum g_k^2); for N equal couplings this is g*sqrt(N).
    Couplings must be non-negative and the list non-empty.
    """
    gs = tuple(float(g) for g in np.atleast_1d(np.asarray(per_atom_g, float)))
    if len(gs) == 0:
        raise ValueError("per_atom_g must be non-empty")
    if any(g < 0 for g in gs):
        raise ValueError("per-atom couplings must be non-negative")
    omega = math.sqrt(sum(g * g for g in gs))
    return CollectiveCoupling(per_atom_g=gs, omega_eff=omega, n_atoms=len(gs))


def transmission(delta_pa, delta_ca: float = 0.0, omega_eff: float = 0.0,
                 params: CavityParams | None = None):
    """Normalized cavity transmission versus probe detuning.

    T = kappa^2 (gamma^2 + delta_pa^2) /
        [(Omega^2 - delta_pa^2 + delta_ca delta_pa + gamma kappa)^2
         + (kappa delta_pa + gamma delta_pa - gamma delta_ca)^2]

    Normalized to unity on resonance for the empty cavity (Omega = 0,
    delta_ca = 0). delta_pa may be a scalar or an array.
    """
    p = params if params is not None else CavityParams()
    if omega_eff < 0:
        raise ValueError("omega_eff must be non-negative")
    d = np.asarray(delta_pa, dtype=float)
    k, g = p.kappa, p.gamma
    om2 = omega_eff ** 2
    num = k ** 2 * (g ** 2 + d ** 2)
    den = ((om2 - d ** 2 + delta_ca * d + g * k) ** 2
           + (k * d + g * d - g * delta_ca) ** 2)
    out = num / den
    return out if out.ndim else float(out)


def steady_state_field(delta_pa, delta_ca: float = 0.0,
                       omega_eff: float = 0.0,
                       params: CavityParams | None = None,
                       eta: float = 1.0):
    """Weak-drive steady-state field amplitude <a>.

    <a> = eta (delta_pa + i gamma) /
          [(delta_pc + i kappa)(delta_pa + i gamma) - Omega_eff^2]

    with delta_pc = delta_pa - delta_ca. The transmission formula is the
    squared magnitude of kappa <a> / eta. Raises SingularityError if the
    denominator vanishes (only possible for zero rates).
    """
    p = params if params is not None else CavityParams()
    if omega_eff < 0:
        raise ValueError("omega_eff must be non-negative")
    d = np.asarray(delta_pa, dtype=float)
    dpc = d - delta_ca
    den = (dpc + 1j * p.kappa) * (d + 1j * p.gamma) - omega_eff ** 2
    if np.any(den == 0):
        raise SingularityError("response pole: denominator vanished")
    out = eta * (d + 1j * p.gamma) / den
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class SpectrumScan:
    """A transmission spectrum on a strictly increasing detuning grid."""

    delta_pa: np.ndarray  # MHz
    transmission: np.ndarray  # dimensionless, >= 0

    def __post_init__(self):
        d = np.asarray(self.delta_pa, dtype=float)
        t = np.asarray(self.transmission, dtype=float)
        if d.ndim != 1 or d.size < 2:
            raise ValueError("delta_pa must be a 1-d grid of >= 2 points")
        if t.shape != d.shape:
            raise ValueError("transmission shape must match delta_pa")
        if not np.all(np.isfinite(d)) or not np.all(np.isfinite(t)):
            raise ValueError("grid and transmission must be finite")
        if np.any(np.diff(d) <= 0):
            raise ValueError("delta_pa must be strictly increasing")
        if np.any(t < 0):
            raise ValueError("transmission must be non-negative")
        object.__setattr__(self, "delta_pa", d)
        object.__setattr__(self, "transmission", t)

    def __len__(self) -> int:
        return self.delta_pa.size


def spectrum(delta_pa_grid, omega_eff: float = 0.0, delta_ca: float = 0.0,
             params: CavityParams | None = None) -> SpectrumScan:
    """Evaluate the transmission model on a detuning grid."""
    grid = np.asarray(delta_pa_grid, dtype=float)
    t = transmission(grid, delta_ca=delta_ca, omega_eff=omega_eff,
                     params=params)
    return SpectrumScan(delta_pa=grid, transmission=np.asarray(t))


def _golden_max(f, a: float, b: float, tol: float = 1e-10,
                max_iter: int = 200) -> float:
    """Location of the maximum of a unimodal f on [a, b]."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def splitting_peaks(omega_eff: float, delta_ca: float = 0.0,
                    params: CavityParams | None = None,
                    search_halfwidth: float | None = None
                    ) -> tuple[float, float]:
    """Locations (MHz) of the two transmission maxima of a split spectrum.

    Each side of delta_pa = 0 is searched by golden-section maximization.
    The analytic +/-Omega_eff is biased at these rates (kappa, gamma are not
    small against Omega_eff), so the maxima are located numerically. For a
    merged single-peak spectrum the two returned locations collapse toward
    zero and are not meaningful as a splitting.
    """
    p = params if params is not None else CavityParams()
    if omega_eff <= 0:
        raise ValueError("omega_eff must be positive to define a splitting")
    w = search_halfwidth
    if w is None:
        w = 2.0 * omega_eff + 3.0 * (p.kappa + p.gamma) + abs(delta_ca)

    def f(x):
        return transmission(x, delta_ca=delta_ca, omega_eff=omega_eff,
                            params=p)

    lo = _golden_max(f, -w, 0.0)
    hi = _golden_max(f, 0.0, w)
    return lo, hi
