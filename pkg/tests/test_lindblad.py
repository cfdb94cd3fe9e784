import numpy as np
import pytest

from atomcavity.errors import DegenerateSteadyStateError, DimensionCapError
from atomcavity.lindblad import (SystemSpec, build_hamiltonian,
                                 build_liouvillian, build_operators, evolve,
                                 expectation, oracle_transmission, shifted,
                                 steady_field, steady_state, vacuum_state)
from atomcavity.qed import (collective_coupling, steady_state_field,
                            transmission)


def _trace_functional(dim):
    t = np.zeros(dim * dim)
    t[::dim + 1] = 1.0
    return t


def test_mode_commutator_below_cutoff():
    spec = SystemSpec(n_atoms=0, photon_cutoff=5)
    a = build_operators(spec).a.toarray()
    comm = a @ a.conj().T - a.conj().T @ a
    # canonical commutation holds on every level except the truncation edge
    np.testing.assert_allclose(np.diag(comm)[:-1], 1.0, atol=1e-13)
    assert np.abs(comm - np.diag(np.diag(comm))).max() < 1e-13


def test_atom_operator_algebra():
    spec = SystemSpec.uniform(2)
    ops = build_operators(spec)
    eye = np.eye(spec.dimension)
    for k in range(2):
        sm = ops.sigma_minus[k].toarray()
        anti = sm @ sm.conj().T + sm.conj().T @ sm
        np.testing.assert_allclose(anti, eye, atol=1e-13)
        np.testing.assert_allclose(sm @ sm, 0.0, atol=1e-13)
    cross = (ops.sigma_minus[0] @ ops.sigma_minus[1]
             - ops.sigma_minus[1] @ ops.sigma_minus[0]).toarray()
    np.testing.assert_allclose(cross, 0.0, atol=1e-13)


def test_hamiltonian_hermitian():
    rng = np.random.default_rng(3)
    for _ in range(5):
        n = int(rng.integers(1, 4))
        spec = SystemSpec(n_atoms=n,
                          per_atom_g=tuple(rng.uniform(0, 4, n)),
                          per_atom_delta_a=tuple(rng.uniform(-3, 3, n)),
                          delta_pc=rng.uniform(-3, 3), eta=rng.uniform(0, 1))
        h = build_hamiltonian(spec).toarray()
        np.testing.assert_allclose(h, h.conj().T, atol=1e-12)


def test_single_excitation_eigenvalues():
    # resonant undriven single atom: eigenvalues 0, +/-g in the lowest sector
    spec = SystemSpec(n_atoms=1, per_atom_g=(1.0,), per_atom_delta_a=(0.0,),
                      delta_pc=0.0, eta=0.0, photon_cutoff=1)
    vals = np.linalg.eigvalsh(build_hamiltonian(spec).toarray())
    np.testing.assert_allclose(np.sort(vals), [-1.0, 0.0, 0.0, 1.0],
                               atol=1e-12)


def test_excitation_number_conserved_without_drive():
    spec = SystemSpec(n_atoms=2, per_atom_g=(3.2, 3.2),
                      per_atom_delta_a=(0.5, -0.5), delta_pc=1.0, eta=0.0)
    ops = build_operators(spec)
    h = build_hamiltonian(spec, ops)
    n_exc = ops.excitation_number
    comm = (h @ n_exc - n_exc @ h)
    assert abs(comm).max() < 1e-12


def test_liouvillian_preserves_trace():
    spec = SystemSpec.uniform(2, delta_ca=-0.3)
    liou = build_liouvillian(spec)
    t = _trace_functional(liou.dim)
    assert np.abs(t @ liou.matrix).max() < 1e-10
    # each dissipative part is trace preserving on its own
    for name in ("cavity_decay", "atom_decay"):
        assert np.abs(t @ liou.parts[name]).max() < 1e-10


def test_liouvillian_parts_sum():
    spec = SystemSpec.uniform(1)
    liou = build_liouvillian(spec)
    total = sum(liou.parts.values())
    assert abs(liou.matrix - total).max() < 1e-14


def test_vacuum_is_dark_without_drive():
    spec = SystemSpec.uniform(2, eta=0.0)
    liou = build_liouvillian(spec)
    rho = vacuum_state(spec)
    assert np.abs(liou.matrix @ rho.reshape(-1, order="F")).max() < 1e-13


def test_empty_cavity_coherent_state():
    # cutoff 5 leaves the coherent-state tail below machine precision
    spec = SystemSpec(n_atoms=0, delta_pc=0.0, eta=0.05, photon_cutoff=5)
    liou = build_liouvillian(spec)
    rho = steady_state(liou)
    ops = build_operators(spec)
    a_ss = expectation(ops.a, rho)
    alpha = -1j * spec.eta / spec.kappa
    assert a_ss == pytest.approx(alpha, rel=1e-9)
    n_ss = expectation(ops.photon_number, rho)
    assert n_ss.real == pytest.approx(abs(alpha) ** 2, rel=1e-6)
    assert n_ss.imag == pytest.approx(0.0, abs=1e-12)


def test_single_atom_field_matches_closed_form():
    """Steady <a> against the weak-drive formula, magnitude and phase."""
    spec = SystemSpec.uniform(1, delta_ca=-0.2)
    for dpa in (-4.0, -1.5, 0.0, 2.0, 5.0):
        a_me = steady_field(shifted(spec, dpa))
        a_cf = steady_state_field(dpa, delta_ca=-0.2, omega_eff=3.2,
                                  eta=spec.eta)
        assert abs(a_me - a_cf) / abs(a_cf) < 1e-3


def test_oracle_transmission_matches_analytic():
    grid = np.linspace(-8.0, 8.0, 33)
    spec = SystemSpec.uniform(1)
    scan = oracle_transmission(spec, grid)
    analytic = transmission(grid, omega_eff=3.2)
    assert np.abs(scan.transmission - analytic).max() < 1e-3


def test_oracle_shift_path_equals_rebuild():
    spec = SystemSpec.uniform(1, delta_ca=-0.2)
    grid = np.linspace(-2.0, 2.0, 3)
    scan = oracle_transmission(spec, grid)
    for i, delta in enumerate(grid):
        a_ss = steady_field(shifted(spec, float(delta)))
        t_rebuild = abs(spec.kappa * a_ss / spec.eta) ** 2
        assert scan.transmission[i] == pytest.approx(t_rebuild, rel=1e-9)


def test_collective_equivalence_unequal_couplings():
    """Unequal g_k with equal detunings reduce to one collective mode."""
    gs = (2.0, 3.0, 1.5)
    spec = SystemSpec(n_atoms=3, per_atom_g=gs,
                      per_atom_delta_a=(0.0,) * 3, delta_pc=0.0)
    grid = np.linspace(-7.0, 7.0, 29)
    scan = oracle_transmission(spec, grid)
    omega = collective_coupling(gs).omega_eff
    analytic = transmission(grid, omega_eff=omega)
    assert np.abs(scan.transmission - analytic).max() < 1e-3


def test_site_detunings_close_to_collective():
    """Sub-linewidth site shifts barely perturb the collective response."""
    rng = np.random.default_rng(77)
    dca = rng.uniform(-0.4, 0.0, 3)
    spec = SystemSpec.from_site_detunings([2.74] * 3, dca)
    grid = np.linspace(-8.0, 8.0, 33)
    scan = oracle_transmission(spec, grid)
    omega = collective_coupling([2.74] * 3).omega_eff
    mean = float(dca.mean())
    analytic = transmission(grid + mean, delta_ca=mean, omega_eff=omega)
    assert np.abs(scan.transmission - analytic).max() < 1e-3


def test_steady_state_density_axioms():
    rng = np.random.default_rng(19)
    for _ in range(4):
        n = int(rng.integers(1, 3))
        spec = SystemSpec(n_atoms=n,
                          per_atom_g=tuple(rng.uniform(0.5, 4, n)),
                          per_atom_delta_a=tuple(rng.uniform(-2, 2, n)),
                          delta_pc=rng.uniform(-2, 2),
                          eta=rng.uniform(0.005, 0.2))
        rho = steady_state(build_liouvillian(spec))
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
        assert abs(np.trace(rho).imag) < 1e-12
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)
        eigs = np.linalg.eigvalsh(rho)
        assert eigs.min() > -1e-9
        assert np.trace(rho @ rho).real <= 1.0 + 1e-9


def test_steady_state_satisfies_generator():
    spec = SystemSpec.uniform(2, delta_ca=0.1)
    liou = build_liouvillian(spec)
    rho = steady_state(liou)
    assert np.abs(liou.matrix @ rho.reshape(-1, order="F")).max() < 1e-10


def test_photon_cutoff_converged_at_weak_drive():
    grid = np.array([-3.2, 0.0, 3.2])
    t2 = oracle_transmission(SystemSpec.uniform(1, photon_cutoff=2), grid)
    t3 = oracle_transmission(SystemSpec.uniform(1, photon_cutoff=3), grid)
    assert np.abs(t2.transmission - t3.transmission).max() < 1e-6


def test_evolution_relaxes_to_steady_state():
    spec = SystemSpec.uniform(1)
    liou = build_liouvillian(spec)
    rho_ss = steady_state(liou)
    rho_t = evolve(liou, vacuum_state(spec), t=60.0)
    assert np.abs(rho_t - rho_ss).max() < 1e-8


def test_degenerate_kernel_detected():
    # undriven, undamped, uncoupled atom: its populations never relax,
    # so the steady state is not unique
    spec = SystemSpec(n_atoms=1, per_atom_g=(0.0,), per_atom_delta_a=(0.0,),
                      delta_pc=0.0, gamma=0.0, eta=0.0, photon_cutoff=1)
    with pytest.raises(DegenerateSteadyStateError):
        steady_state(build_liouvillian(spec))


def test_dimension_cap_enforced():
    assert SystemSpec.uniform(10).dimension == 4096  # at the cap, allowed
    with pytest.raises(DimensionCapError):
        SystemSpec.uniform(11)


def test_spec_validation():
    with pytest.raises(ValueError):
        SystemSpec(n_atoms=1, per_atom_g=(), per_atom_delta_a=(0.0,))
    with pytest.raises(ValueError):
        SystemSpec(n_atoms=1, per_atom_g=(-1.0,), per_atom_delta_a=(0.0,))
    with pytest.raises(ValueError):
        SystemSpec(n_atoms=0, photon_cutoff=0)
    with pytest.raises(ValueError):
        SystemSpec(n_atoms=0, kappa=0.0)
    with pytest.raises(ValueError):
        SystemSpec.uniform(1, eta=-0.1)


def test_default_drive_is_weak():
    spec = SystemSpec.uniform(1)
    assert spec.eta == pytest.approx(0.01 * spec.kappa, rel=1e-14)


def test_oracle_grid_validation():
    spec = SystemSpec.uniform(1)
    with pytest.raises(ValueError):
        oracle_transmission(spec, np.array([1.0, 0.5, 2.0]))
    with pytest.raises(ValueError):
        oracle_transmission(spec, np.array([1.0]))
