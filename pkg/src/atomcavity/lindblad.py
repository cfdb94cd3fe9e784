"""Driven-dissipative master equation for N two-level atoms in a cavity.

This is the package's numerical ground truth: no weak-drive or single-mode
approximation beyond the photon-number cutoff. The analytic response in
qed.py must agree with it at small drive, which is what the verification
suite checks.

Frame and conventions (rates in MHz, nu = omega/2pi):

    H = -delta_pc a†a - sum_k delta_pa_k |e><e|_k
        + sum_k g_k (a† s-_k + s+_k a) + eta (a + a†)

    drho/dt = -i[H, rho] + kappa D[a]rho + gamma sum_k D[s-_k]rho
    D[c]rho = 2 c rho c† - c†c rho - rho c†c

kappa and gamma are half-widths, matching qed.CavityParams. The 2pi of the
angular-frequency convention cancels between H and the dissipators, so
steady states can be computed directly with MHz numbers.

A SystemSpec fixes the detunings at the probe-on-nominal-atom-resonance
reference point; sweeping the probe by Delta shifts delta_pc and every
per_atom_delta_a entry by +Delta (the atom and cavity frequencies stay put,
only the probe moves).

Superoperators use column-stacking, vec(A rho B) = (B^T kron A) vec(rho),
built with scipy.sparse.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import MatrixRankWarning, expm_multiply, spsolve

from .constants import G0_MHZ, GAMMA_MHZ, KAPPA_MHZ
from .errors import (DegenerateSteadyStateError, DimensionCapError,
                     SteadyStateConvergenceError)
from .qed import SpectrumScan

DIMENSION_CAP = 4096
DEFAULT_PHOTON_CUTOFF = 3
# weak-drive fraction of kappa for analytic comparisons; keeps saturation
# error well below 1e-3 in transmission
DEFAULT_DRIVE_FRACTION = 0.01

_SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]])  # basis (|g>, |e>)
_EXCITED = np.array([[0.0, 0.0], [0.0, 1.0]])


@dataclass(frozen=True)
class SystemSpec:
    """Full system definition at the probe reference point.

    per_atom_delta_a[k] is atom k's probe-atom detuning when the nominal
    probe-atom detuning is zero; delta_pc is the probe-cavity detuning at
    the same point. eta defaults to DEFAULT_DRIVE_FRACTION * kappa.
    """

    n_atoms: int
    per_atom_g: tuple[float, ...] = ()
    per_atom_delta_a: tuple[float, ...] = ()
    delta_pc: float = 0.0
    kappa: float = KAPPA_MHZ
    gamma: float = GAMMA_MHZ
    eta: float | None = None
    photon_cutoff: int = DEFAULT_PHOTON_CUTOFF

    def __post_init__(self):
        object.__setattr__(self, "per_atom_g",
                           tuple(float(g) for g in self.per_atom_g))
        object.__setattr__(self, "per_atom_delta_a",
                           tuple(float(d) for d in self.per_atom_delta_a))
        if self.n_atoms < 0:
            raise ValueError("n_atoms must be >= 0")
        if len(self.per_atom_g) != self.n_atoms:
            raise ValueError("per_atom_g must have n_atoms entries")
        if len(self.per_atom_delta_a) != self.n_atoms:
            raise ValueError("per_atom_delta_a must have n_atoms entries")
        if any(g < 0 for g in self.per_atom_g):
            raise ValueError("couplings must be non-negative")
        if self.photon_cutoff < 1:
            raise ValueError("photon_cutoff must be >= 1")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.eta is None:
            object.__setattr__(self, "eta",
                               DEFAULT_DRIVE_FRACTION * self.kappa)
        elif self.eta < 0:
            raise ValueError("eta must be non-negative")
        if self.dimension > DIMENSION_CAP:
            raise DimensionCapError(
                f"Hilbert dimension {self.dimension} exceeds cap "
                f"{DIMENSION_CAP}; lower n_atoms or photon_cutoff")

    @property
    def dimension(self) -> int:
        return 2 ** self.n_atoms * (self.photon_cutoff + 1)

    @classmethod
    def uniform(cls, n_atoms: int, g: float = G0_MHZ, delta_ca: float = 0.0,
                kappa: float = KAPPA_MHZ, gamma: float = GAMMA_MHZ,
                eta: float | None = None,
                photon_cutoff: int = DEFAULT_PHOTON_CUTOFF) -> "SystemSpec":
        """N identical atoms on resonance, cavity detuned by delta_ca."""
        return cls(n_atoms=n_atoms, per_atom_g=(g,) * n_atoms,
                   per_atom_delta_a=(0.0,) * n_atoms, delta_pc=-delta_ca,
                   kappa=kappa, gamma=gamma, eta=eta,
                   photon_cutoff=photon_cutoff)

    @classmethod
    def from_site_detunings(cls, per_atom_g, per_atom_delta_ca,
                            kappa: float = KAPPA_MHZ,
                            gamma: float = GAMMA_MHZ,
                            eta: float | None = None,
                            photon_cutoff: int = DEFAULT_PHOTON_CUTOFF
                            ) -> "SystemSpec":
        """Atoms with site-dependent shifts, cavity as frequency reference.

        per_atom_delta_ca[k] is the cavity-minus-atom detuning of site k
        (e.g. light-shift inhomogeneity); the probe grid origin is the
        cavity resonance.
        """
        gs = tuple(float(g) for g in per_atom_g)
        dca = tuple(float(d) for d in per_atom_delta_ca)
        if len(gs) != len(dca):
            raise ValueError("per_atom_g and per_atom_delta_ca lengths differ")
        return cls(n_atoms=len(gs), per_atom_g=gs, per_atom_delta_a=dca,
                   delta_pc=0.0, kappa=kappa, gamma=gamma, eta=eta,
                   photon_cutoff=photon_cutoff)


@dataclass(frozen=True)
class SystemOperators:
    """Sparse operators on the joint (atoms x photon) space."""

    a: sp.csr_matrix
    sigma_minus: tuple
    excited: tuple  # per-atom |e><e| projectors
    dim: int

    @property
    def photon_number(self) -> sp.csr_matrix:
        return (self.a.conj().T @ self.a).tocsr()

    @property
    def excitation_number(self) -> sp.csr_matrix:
        """Total excitation count a†a + sum_k |e><e|_k."""
        n = self.photon_number
        for pe in self.excited:
            n = n + pe
        return n.tocsr()


def build_operators(spec: SystemSpec) -> SystemOperators:
    """Embed the mode and per-atom operators in the full tensor space.

    Ordering: atom 0 x atom 1 x ... x photon, photon index fastest.
    """
    nc = spec.photon_cutoff
    a_f = sp.diags(np.sqrt(np.arange(1.0, nc + 1)), 1, format="csr")
    i_f = sp.identity(nc + 1, format="csr")
    i_2 = sp.identity(2, format="csr")

    def embed(op_2, site):
        m = sp.identity(1, format="csr")
        for j in range(spec.n_atoms):
            m = sp.kron(m, op_2 if j == site else i_2, format="csr")
        return sp.kron(m, i_f, format="csr")

    i_atoms = sp.identity(2 ** spec.n_atoms, format="csr")
    a = sp.kron(i_atoms, a_f, format="csr")
    sms = tuple(embed(sp.csr_matrix(_SIGMA_MINUS), k)
                for k in range(spec.n_atoms))
    pes = tuple(embed(sp.csr_matrix(_EXCITED), k)
                for k in range(spec.n_atoms))
    return SystemOperators(a=a, sigma_minus=sms, excited=pes,
                           dim=spec.dimension)


def build_hamiltonian(spec: SystemSpec,
                      ops: SystemOperators | None = None) -> sp.csr_matrix:
    """Rotating-frame Hamiltonian at the spec's reference detunings."""
    o = ops if ops is not None else build_operators(spec)
    h = (-spec.delta_pc) * o.photon_number
    for k in range(spec.n_atoms):
        h = h - spec.per_atom_delta_a[k] * o.excited[k]
        h = h + spec.per_atom_g[k] * (o.a.conj().T @ o.sigma_minus[k]
                                      + o.sigma_minus[k].conj().T @ o.a)
    h = h + spec.eta * (o.a + o.a.conj().T)
    return h.tocsr()


def _commutator_superop(h: sp.spmatrix) -> sp.csr_matrix:
    """Superoperator of rho -> -i[h, rho] under column stacking."""
    i = sp.identity(h.shape[0], format="csr")
    return (-1j * (sp.kron(i, h) - sp.kron(h.T, i))).tocsr()


def _dissipator_superop(c: sp.spmatrix, rate: float) -> sp.csr_matrix:
    """Superoperator of rho -> rate * (2 c rho c† - c†c rho - rho c†c)."""
    cdc = (c.conj().T @ c).tocsr()
    i = sp.identity(c.shape[0], format="csr")
    return (rate * (2.0 * sp.kron(c.conj(), c) - sp.kron(i, cdc)
                    - sp.kron(cdc.T, i))).tocsr()


@dataclass(frozen=True)
class Liouvillian:
    """Generator of the master equation on vectorized density matrices."""

    matrix: sp.csr_matrix  # (dim^2, dim^2)
    dim: int
    parts: dict = field(default_factory=dict, compare=False)


def build_liouvillian(spec: SystemSpec,
                      ops: SystemOperators | None = None) -> Liouvillian:
    """Assemble the full generator with its parts kept addressable."""
    o = ops if ops is not None else build_operators(spec)
    parts = {"hamiltonian": _commutator_superop(build_hamiltonian(spec, o)),
             "cavity_decay": _dissipator_superop(o.a, spec.kappa)}
    atom = None
    for sm in o.sigma_minus:
        d = _dissipator_superop(sm, spec.gamma)
        atom = d if atom is None else atom + d
    if atom is not None:
        parts["atom_decay"] = atom.tocsr()
    total = parts["hamiltonian"] + parts["cavity_decay"]
    if atom is not None:
        total = total + parts["atom_decay"]
    return Liouvillian(matrix=total.tocsr(), dim=o.dim, parts=parts)


def _unvec(x: np.ndarray, dim: int) -> np.ndarray:
    return x.reshape((dim, dim), order="F")


_DENSE_FALLBACK_DIM = 32


def steady_state(liou: Liouvillian, rtol: float = 1e-10) -> np.ndarray:
    """Unique steady density matrix of the generator.

    Solves L vec(rho) = 0 with the trace row pinned to 1, then verifies the
    residual against the untouched generator. A dense null-space analysis
    backs up the sparse solve for small systems and distinguishes a
    degenerate kernel from a solver failure.
    """
    d = liou.dim
    a = liou.matrix.tolil(copy=True)
    a[0, :] = 0.0
    for i in range(d):
        a[0, i * (d + 1)] = 1.0
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    with np.errstate(all="ignore"), warnings.catch_warnings():
        # a singular pinned system is diagnosed below, not by the solver
        warnings.simplefilter("ignore", MatrixRankWarning)
        x = spsolve(a.tocsc(), b)

    scale = max(1.0, abs(liou.matrix).max())
    tol = rtol * scale
    if np.all(np.isfinite(x)):
        resid = np.abs(liou.matrix @ x).max()
        if resid <= tol:
            rho = _unvec(x, d)
            rho = 0.5 * (rho + rho.conj().T)
            return rho / np.trace(rho).real
    if d > _DENSE_FALLBACK_DIM:
        raise SteadyStateConvergenceError(
            f"sparse steady-state solve failed (dim {d})")

    # dense diagnosis: count kernel vectors of L
    dense = liou.matrix.toarray()
    _, s, vh = np.linalg.svd(dense)
    null_tol = max(s) * d * d * np.finfo(float).eps
    kernel = vh[s < null_tol].conj()
    if kernel.shape[0] > 1:
        raise DegenerateSteadyStateError(
            f"{kernel.shape[0]}-dimensional steady-state manifold")
    if kernel.shape[0] == 0:
        raise SteadyStateConvergenceError("no steady state found")
    rho = _unvec(kernel[0], d)
    tr = np.trace(rho)
    if abs(tr) < 1e-12:
        raise DegenerateSteadyStateError("kernel vector is traceless")
    rho = rho / tr
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def evolve(liou: Liouvillian, rho0: np.ndarray, t: float) -> np.ndarray:
    """Propagate a density matrix for time t (in 1/MHz) under the generator."""
    x = expm_multiply(liou.matrix * t, rho0.reshape(-1, order="F"))
    rho = _unvec(x, liou.dim)
    return 0.5 * (rho + rho.conj().T)


def vacuum_state(spec: SystemSpec) -> np.ndarray:
    """All atoms in |g>, zero photons."""
    rho = np.zeros((spec.dimension, spec.dimension), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def expectation(op: sp.spmatrix, rho: np.ndarray) -> complex:
    return complex(np.trace(op @ rho))


def shifted(spec: SystemSpec, delta: float) -> SystemSpec:
    """The spec with the probe moved by delta (MHz)."""
    return SystemSpec(
        n_atoms=spec.n_atoms, per_atom_g=spec.per_atom_g,
        per_atom_delta_a=tuple(d + delta for d in spec.per_atom_delta_a),
        delta_pc=spec.delta_pc + delta, kappa=spec.kappa, gamma=spec.gamma,
        eta=spec.eta, photon_cutoff=spec.photon_cutoff)


def steady_field(spec: SystemSpec) -> complex:
    """Steady-state <a> of the spec as given."""
    liou = build_liouvillian(spec)
    rho = steady_state(liou)
    return expectation(build_operators(spec).a, rho)


def oracle_transmission(spec: SystemSpec, delta_pa_grid) -> SpectrumScan:
    """Master-equation transmission spectrum |kappa <a> / eta|^2.

    The probe sweep enters as L(Delta) = L0 + Delta * S with S the
    commutator superoperator of the detuning generator, so the expensive
    tensor assembly happens once per spec rather than once per grid point.
    """
    grid = np.asarray(delta_pa_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("delta_pa_grid must be a 1-d grid of >= 2 points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("delta_pa_grid must be strictly increasing")
    if spec.eta <= 0:
        raise ValueError("oracle transmission needs a nonzero drive")

    ops = build_operators(spec)
    liou0 = build_liouvillian(spec, ops)
    shift_gen = _commutator_superop((-1.0) * ops.excitation_number)
    a_op = ops.a

    t_out = np.empty_like(grid)
    for i, delta in enumerate(grid):
        liou = Liouvillian(matrix=(liou0.matrix + delta * shift_gen).tocsr(),
                           dim=liou0.dim)
        rho = steady_state(liou)
        a_ss = expectation(a_op, rho)
        t_out[i] = abs(spec.kappa * a_ss / spec.eta) ** 2
    return SpectrumScan(delta_pa=grid, transmission=t_out)
