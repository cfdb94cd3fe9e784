"""Thermal-motion average of the coupling for a lattice-trapped atom.

Along the cavity axis the atom sits in one antinode well of the blue
intracavity lattice, approximated as a harmonic oscillator with

    omega_z = (2 sqrt(2) pi / lambda_lat) sqrt(U0 / m).

Axial motion smears the probe standing wave g0 |cos(2 pi z / lambda_probe)|
over the motional state. The average weights each oscillator level n by the
thermal occupation P_n = nbar^n / (1 + nbar)^(n+1), truncated at n_max and
renormalized, and integrates |psi_n(z)|^2 against the coupling over one well
(z0 +/- lambda_lat / 4) by composite Simpson quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, k
from scipy.integrate import simpson

from .constants import (ATOM_TEMPERATURE_UK, CS_MASS_KG, G0_GEOMETRIC_MHZ,
                        LATTICE_DEPTH_MK, LATTICE_WAVELENGTH_NM)
from .geometry import ModeGeometry, microscopic_coupling

_N_MAX_LIMIT = 60  # recurrence is exact but occupations this high mean the
                   # harmonic approximation has already broken down


@dataclass(frozen=True)
class TrapParams:
    """Axial trap of one lattice well and the atom moving in it."""

    temperature_uk: float = ATOM_TEMPERATURE_UK
    lattice_depth_mk: float = LATTICE_DEPTH_MK  # U0 / kB
    atom_mass_kg: float = CS_MASS_KG
    lambda_lattice_nm: float = LATTICE_WAVELENGTH_NM

    def __post_init__(self):
        if self.temperature_uk < 0:
            raise ValueError("temperature_uk must be non-negative")
        for name in ("lattice_depth_mk", "atom_mass_kg", "lambda_lattice_nm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def omega_z(self) -> float:
        """Axial trap frequency, rad/s."""
        u0 = k * self.lattice_depth_mk * 1e-3
        lam = self.lambda_lattice_nm * 1e-9
        return (2.0 * np.sqrt(2.0) * np.pi / lam) * np.sqrt(
            u0 / self.atom_mass_kg)

    @property
    def oscillator_length_nm(self) -> float:
        """Ground-state length sqrt(hbar / (m omega_z)), nm."""
        return float(np.sqrt(hbar / (self.atom_mass_kg * self.omega_z)) * 1e9)


def mean_phonon(trap: TrapParams | None = None) -> float:
    """Mean axial occupation nbar = kB T / (hbar omega_z)."""
    t = trap if trap is not None else TrapParams()
    return float(k * t.temperature_uk * 1e-6 / (hbar * t.omega_z))


@dataclass(frozen=True)
class PhononDistribution:
    """Truncated, renormalized thermal occupation of oscillator levels."""

    mean_n: float
    n_max: int = 10

    def __post_init__(self):
        if self.mean_n < 0:
            raise ValueError("mean_n must be non-negative")
        if not 0 <= self.n_max <= _N_MAX_LIMIT:
            raise ValueError(f"n_max must be in [0, {_N_MAX_LIMIT}]")

    @property
    def raw_tail(self) -> float:
        """Thermal weight above n_max before renormalization, q^(n_max+1)."""
        q = self.mean_n / (1.0 + self.mean_n)
        return float(q ** (self.n_max + 1))

    @property
    def weights(self) -> np.ndarray:
        """P_n for n = 0..n_max, renormalized to sum to 1."""
        n = np.arange(self.n_max + 1)
        q = self.mean_n / (1.0 + self.mean_n)
        w = q ** n / (1.0 + self.mean_n)
        return w / w.sum()


def _densities(n_max: int, xi: np.ndarray) -> np.ndarray:
    """|psi_n|^2 for n = 0..n_max at xi = (z - z0)/a, in oscillator units.

    Normalized-Hermite recurrence, stable at any n this module allows:
    phi_{n+1} = sqrt(2/(n+1)) xi phi_n - sqrt(n/(n+1)) phi_{n-1}.
    """
    phi = np.empty((n_max + 1, xi.size))
    phi[0] = np.pi ** -0.25 * np.exp(-xi ** 2 / 2.0)
    if n_max >= 1:
        phi[1] = np.sqrt(2.0) * xi * phi[0]
    for n in range(1, n_max):
        phi[n + 1] = (np.sqrt(2.0 / (n + 1)) * xi * phi[n]
                      - np.sqrt(n / (n + 1.0)) * phi[n - 1])
    return phi ** 2


def phonon_density(n: int, z_nm, z0_nm: float = 0.0,
                   trap: TrapParams | None = None):
    """Probability density |psi_n(z)|^2 in 1/nm for the axial trap at z0."""
    if not 0 <= n <= _N_MAX_LIMIT:
        raise ValueError(f"n must be in [0, {_N_MAX_LIMIT}]")
    t = trap if trap is not None else TrapParams()
    a = t.oscillator_length_nm
    z = np.asarray(z_nm, dtype=float)
    xi = np.atleast_1d((z - z0_nm) / a)
    out = _densities(n, xi)[n] / a
    return out if np.asarray(z_nm).ndim else float(out[0])


def thermal_coupling(z0_nm: float = 0.0, trap: TrapParams | None = None,
                     geometry: ModeGeometry | None = None,
                     g0: float = G0_GEOMETRIC_MHZ, n_max: int = 10,
                     n_intervals: int = 2048) -> float:
    """Motion-averaged coupling (MHz) for a well centered at z0.

    z0 is measured from a probe antinode, in nm: z0 = 0 is perfect
    antinode overlap, z0 = lambda_probe / 4 centers the well on a probe
    node. Returns sum_n P_n integral g0 |cos(2 pi z / lambda_p)|
    |psi_n(z)|^2 dz over (z0 - lambda_lat/4, z0 + lambda_lat/4).
    """
    t = trap if trap is not None else TrapParams()
    geo = geometry if geometry is not None else ModeGeometry(
        lambda_lattice_nm=t.lambda_lattice_nm)
    if g0 < 0:
        raise ValueError("g0 must be non-negative")
    if n_intervals < 2 or n_intervals % 2:
        raise ValueError("n_intervals must be even and >= 2")
    dist = PhononDistribution(mean_phonon(t), n_max=n_max)

    half = t.lambda_lattice_nm / 4.0
    z = np.linspace(z0_nm - half, z0_nm + half, n_intervals + 1)
    a = t.oscillator_length_nm
    dens = _densities(n_max, (z - z0_nm) / a) / a  # 1/nm
    g_of_z = microscopic_coupling(z, g0=g0,
                                  lambda_probe_nm=geo.lambda_probe_nm)
    per_level = simpson(dens * g_of_z[None, :], x=z, axis=1)
    return float(dist.weights @ per_level)


def probe_node_offset_nm(geometry: ModeGeometry | None = None) -> float:
    """Well-center offset that puts the atom on a probe node, nm."""
    geo = geometry if geometry is not None else ModeGeometry()
    return geo.lambda_probe_nm / 4.0


def convergence_report(z0_nm: float = 0.0, trap: TrapParams | None = None,
                       geometry: ModeGeometry | None = None,
                       g0: float = G0_GEOMETRIC_MHZ, n_max: int = 10,
                       n_intervals: int = 2048) -> dict:
    """Thermal average plus sensitivity to the two truncation knobs.

    Reports the relative change when n_max is doubled (capped at the module
    limit) and when the quadrature grid is halved.
    """
    value = thermal_coupling(z0_nm, trap, geometry, g0, n_max, n_intervals)
    n_hi = min(2 * n_max, _N_MAX_LIMIT) if n_max else 10
    deeper = thermal_coupling(z0_nm, trap, geometry, g0, n_hi, n_intervals)
    coarser = thermal_coupling(z0_nm, trap, geometry, g0, n_max,
                               max(2, n_intervals // 2))
    t = trap if trap is not None else TrapParams()
    dist = PhononDistribution(mean_phonon(t), n_max=n_max)
    return {
        "value_mhz": value,
        "mean_phonon": mean_phonon(t),
        "n_max": n_max,
        "raw_tail": dist.raw_tail,
        "n_intervals": n_intervals,
        "truncation_shift": abs(deeper - value) / value if value else 0.0,
        "quadrature_shift": abs(coarser - value) / value if value else 0.0,
    }
