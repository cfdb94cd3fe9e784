"""Spatial map of the atom-cavity coupling along and across the mode.

Two standing waves share the cavity axis: the probe mode at lambda_probe and
the blue-detuned intracavity lattice that traps the atoms. Their antinode
registration slips slowly along the axis and rephases with the beat period

    P = lambda_lat * lambda_probe / (2 (lambda_probe - lambda_lat)).

An atom trapped at the lattice node nearest axial position z couples with the
envelope |cos(pi z / P)|: exact at the node positions, smoothly interpolated
in between, and exactly zero at z = P/2 where nodes of one wave meet
antinodes of the other.

Axial coordinates use nm for the sub-wavelength microscopic scale and um for
the beat and array scales; argument names carry the unit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import (G0_MHZ, LATTICE_WAVELENGTH_NM, MODE_WAIST_X_UM,
                        MODE_WAIST_Y_UM, N_SITES, PROBE_WAVELENGTH_NM,
                        SITE_SPACING_UM)


def beat_period_um(lambda_probe_nm: float = PROBE_WAVELENGTH_NM,
                   lambda_lattice_nm: float = LATTICE_WAVELENGTH_NM) -> float:
    """Axial period (um) over which lattice/probe antinode overlap repeats."""
    if lambda_lattice_nm <= 0 or lambda_probe_nm <= 0:
        raise ValueError("wavelengths must be positive")
    if lambda_lattice_nm >= lambda_probe_nm:
        raise ValueError("beat geometry requires lambda_lattice < lambda_probe")
    p_nm = (lambda_lattice_nm * lambda_probe_nm
            / (2.0 * (lambda_probe_nm - lambda_lattice_nm)))
    return p_nm * 1e-3


@dataclass(frozen=True)
class ModeGeometry:
    """Wavelengths and transverse waists of the cavity mode pair."""

    lambda_probe_nm: float = PROBE_WAVELENGTH_NM
    lambda_lattice_nm: float = LATTICE_WAVELENGTH_NM
    waist_x_um: float = MODE_WAIST_X_UM
    waist_y_um: float = MODE_WAIST_Y_UM

    def __post_init__(self):
        if self.lambda_probe_nm <= 0 or self.lambda_lattice_nm <= 0:
            raise ValueError("wavelengths must be positive")
        if self.lambda_lattice_nm >= self.lambda_probe_nm:
            raise ValueError("lattice must be blue of the probe "
                             "(lambda_lattice_nm < lambda_probe_nm)")
        if self.waist_x_um <= 0 or self.waist_y_um <= 0:
            raise ValueError("waists must be positive")

    @property
    def beat_period_um(self) -> float:
        return beat_period_um(self.lambda_probe_nm, self.lambda_lattice_nm)

    @property
    def waist_geometric_um(self) -> float:
        """Geometric-mean waist used for the transverse coupling profile."""
        return float(np.sqrt(self.waist_x_um * self.waist_y_um))


@dataclass(frozen=True)
class ArrayLayout:
    """Evenly spaced tweezer sites centered on the mode axis."""

    n_sites: int = N_SITES
    spacing_um: float = SITE_SPACING_UM
    center_um: float = 0.0

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        if self.spacing_um <= 0:
            raise ValueError("spacing_um must be positive")

    @property
    def positions_um(self) -> np.ndarray:
        k = np.arange(self.n_sites, dtype=float)
        return self.center_um + (k - (self.n_sites - 1) / 2.0) * self.spacing_um

    @property
    def extent_um(self) -> float:
        """Distance from array center to the outermost site."""
        return (self.n_sites - 1) / 2.0 * self.spacing_um


def microscopic_coupling(z_nm, g0: float = G0_MHZ,
                         lambda_probe_nm: float = PROBE_WAVELENGTH_NM):
    """Coupling g0*|cos(2 pi z / lambda_probe)| at axial position z (nm).

    The fast standing-wave variation, with a probe antinode at z = 0.
    """
    if g0 < 0:
        raise ValueError("g0 must be non-negative")
    z = np.asarray(z_nm, dtype=float)
    out = g0 * np.abs(np.cos(2.0 * np.pi * z / lambda_probe_nm))
    return out if out.ndim else float(out)


def envelope(z_um, geometry: ModeGeometry | None = None):
    """Relative coupling of an atom trapped at the lattice node nearest z.

    |cos(pi z / beat_period)|: 1 at perfect antinode overlap (z = 0), exact
    zero at z = beat_period / 2.
    """
    g = geometry if geometry is not None else ModeGeometry()
    z = np.asarray(z_um, dtype=float)
    out = np.abs(np.cos(np.pi * z / g.beat_period_um))
    return out if out.ndim else float(out)


def local_coupling(x_um, y_um, z_um, geometry: ModeGeometry | None = None,
                   g0: float = G0_MHZ):
    """Site coupling (MHz) at transverse offset (x, y) and axial position z.

    g0 * envelope(z) * exp(-(x^2 + y^2) / w^2) with w the geometric-mean
    waist. Inputs broadcast together.
    """
    g = geometry if geometry is not None else ModeGeometry()
    if g0 < 0:
        raise ValueError("g0 must be non-negative")
    x = np.asarray(x_um, dtype=float)
    y = np.asarray(y_um, dtype=float)
    w2 = g.waist_geometric_um ** 2
    out = g0 * envelope(z_um, g) * np.exp(-(x ** 2 + y ** 2) / w2)
    return out if out.ndim else float(out)


def site_couplings(layout: ArrayLayout | None = None,
                   geometry: ModeGeometry | None = None,
                   g0: float = G0_MHZ) -> np.ndarray:
    """Couplings (MHz) of every site of a centered array on the mode axis."""
    lay = layout if layout is not None else ArrayLayout()
    return np.asarray(local_coupling(0.0, 0.0, lay.positions_um, geometry, g0))


def coupling_spread(values) -> float:
    """Half the peak-to-peak spread over the mean, for a set of couplings."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("values must be non-empty")
    m = v.mean()
    if m <= 0:
        raise ValueError("mean coupling must be positive")
    return float((v.max() - v.min()) / 2.0 / m)
