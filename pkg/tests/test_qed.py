import numpy as np
import pytest

from atomcavity.qed import (CavityParams, CollectiveCoupling, Detunings,
                            SpectrumScan, collective_coupling, cooperativity,
                            spectrum, splitting_peaks, steady_state_field,
                            transmission)

REF = CavityParams()  # g0 3.2, kappa 1.0, gamma 2.6


def test_cooperativity_reference_rates():
    expected = 3.2 ** 2 / (2.0 * 1.0 * 2.6)
    assert REF.cooperativity == pytest.approx(expected, rel=1e-12)
    assert cooperativity(3.2, 1.0, 2.6) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(1.969, abs=1e-3)


@pytest.mark.parametrize("g0,kappa,gamma", [(0, 1, 1), (1, -1, 1), (1, 1, 0)])
def test_cooperativity_rejects_nonpositive(g0, kappa, gamma):
    with pytest.raises(ValueError):
        cooperativity(g0, kappa, gamma)


def test_empty_cavity_lorentzian():
    # with no atoms the formula reduces to kappa^2 / (kappa^2 + d^2)
    assert transmission(0.0, omega_eff=0.0) == pytest.approx(1.0, abs=1e-15)
    assert transmission(REF.kappa, omega_eff=0.0) == pytest.approx(0.5,
                                                                   abs=1e-15)
    assert transmission(-REF.kappa, omega_eff=0.0) == pytest.approx(0.5,
                                                                    abs=1e-15)
    d = np.linspace(-7, 7, 29)
    expected = REF.kappa ** 2 / (REF.kappa ** 2 + d ** 2)
    np.testing.assert_allclose(transmission(d, omega_eff=0.0), expected,
                               rtol=1e-13)


def test_transmission_equals_field_magnitude():
    """The printed line shape is |kappa <a> / eta|^2 of the steady field."""
    rng = np.random.default_rng(11)
    for _ in range(200):
        dpa = rng.uniform(-15, 15)
        dca = rng.uniform(-3, 3)
        om = rng.uniform(0, 10)
        t = transmission(dpa, delta_ca=dca, omega_eff=om)
        a = steady_state_field(dpa, delta_ca=dca, omega_eff=om, eta=0.37)
        assert t == pytest.approx(abs(REF.kappa * a / 0.37) ** 2, rel=1e-10)


def test_resonant_field_magnitude():
    # on double resonance |<a>|^2 = gamma^2 / (kappa gamma + Omega^2)^2
    a = steady_state_field(0.0, delta_ca=0.0, omega_eff=2.76, eta=1.0)
    expected = 2.6 ** 2 / (1.0 * 2.6 + 2.76 ** 2) ** 2
    assert abs(a) ** 2 == pytest.approx(expected, rel=1e-12)
    assert abs(a) ** 2 == pytest.approx(0.0647513611487076, rel=1e-10)


def test_transmission_at_bare_splitting():
    # at delta_pa = Omega the general formula reduces to
    # kappa^2 (gamma^2 + Omega^2) / ((gamma kappa)^2 + ((kappa+gamma) Omega)^2)
    om = 2.74 * np.sqrt(8.0)
    k, g = REF.kappa, REF.gamma
    reduced = k ** 2 * (g ** 2 + om ** 2) / ((g * k) ** 2
                                             + ((k + g) * om) ** 2)
    assert transmission(om, omega_eff=om) == pytest.approx(reduced, rel=1e-12)


def test_collective_coupling_sqrt_n():
    cc = collective_coupling([2.74] * 8)
    assert cc.omega_eff == pytest.approx(2.74 * np.sqrt(8.0), rel=1e-14)
    assert round(cc.omega_eff, 3) == 7.750
    assert cc.n_atoms == 8


def test_collective_coupling_quadrature_sum():
    rng = np.random.default_rng(5)
    for _ in range(25):
        gs = rng.uniform(0, 4, size=rng.integers(1, 12))
        cc = collective_coupling(gs)
        assert cc.omega_eff == pytest.approx(np.linalg.norm(gs), rel=1e-13)


def test_collective_coupling_validation():
    with pytest.raises(ValueError):
        collective_coupling([])
    with pytest.raises(ValueError):
        collective_coupling([2.0, -0.1])
    with pytest.raises(ValueError):
        CollectiveCoupling(per_atom_g=(1.0, 1.0), omega_eff=1.0, n_atoms=2)


def test_detunings_closure():
    d = Detunings(delta_pa=1.5, delta_ca=-0.4)
    assert d.delta_pc == pytest.approx(1.9, abs=1e-15)
    ok = Detunings(delta_pa=1.5, delta_ca=-0.4, delta_pc=1.9)
    assert ok.delta_pc == 1.9
    with pytest.raises(ValueError):
        Detunings(delta_pa=1.5, delta_ca=-0.4, delta_pc=1.0)


def test_cavity_params_validation():
    with pytest.raises(ValueError):
        CavityParams(kappa=0.0)
    with pytest.raises(ValueError):
        CavityParams(lambda_lattice_nm=853.0)  # red of the probe


def test_spectrum_scan_validation():
    grid = np.linspace(-1, 1, 5)
    with pytest.raises(ValueError):
        SpectrumScan(grid[::-1].copy(), np.ones(5))
    with pytest.raises(ValueError):
        SpectrumScan(grid, np.ones(4))
    with pytest.raises(ValueError):
        SpectrumScan(grid, np.array([1, 1, np.nan, 1, 1]))
    with pytest.raises(ValueError):
        SpectrumScan(grid, np.array([1, 1, -0.1, 1, 1]))
    scan = spectrum(grid, omega_eff=2.0)
    assert len(scan) == 5


def test_transmission_scalar_matches_vector():
    grid = np.linspace(-9, 9, 61)
    vec = transmission(grid, delta_ca=-0.2, omega_eff=5.0)
    for i in (0, 17, 60):
        assert vec[i] == transmission(float(grid[i]), delta_ca=-0.2,
                                      omega_eff=5.0)


def test_splitting_peaks_against_grid_search():
    om = 2.74 * np.sqrt(8.0)
    lo, hi = splitting_peaks(om, delta_ca=-0.2)
    grid = np.linspace(-2 * om, 2 * om, 400001)
    t = transmission(grid, delta_ca=-0.2, omega_eff=om)
    lo_grid = grid[grid < 0][np.argmax(t[grid < 0])]
    hi_grid = grid[np.argmax(np.where(grid > 0, t, -1.0))]
    step = grid[1] - grid[0]
    assert lo == pytest.approx(lo_grid, abs=step)
    assert hi == pytest.approx(hi_grid, abs=step)
    assert lo == pytest.approx(-7.970792, abs=1e-4)
    assert hi == pytest.approx(7.782095, abs=1e-4)


def test_splitting_peaks_near_plus_minus_omega():
    om = 2.74 * np.sqrt(8.0)
    lo, hi = splitting_peaks(om)
    # kappa and gamma push the maxima slightly outward at these rates
    assert abs(lo + om) < 0.2
    assert abs(hi - om) < 0.2
    # two independent bracket searches agree to the search tolerance
    assert lo == pytest.approx(-hi, abs=1e-6)


def test_splitting_requires_positive_omega():
    with pytest.raises(ValueError):
        splitting_peaks(0.0)


def test_asymmetry_follows_cavity_detuning():
    om = 2.74 * np.sqrt(8.0)
    for dca in (-0.2, 0.2):
        lo, hi = splitting_peaks(om, delta_ca=dca)
        t_lo = transmission(lo, delta_ca=dca, omega_eff=om)
        t_hi = transmission(hi, delta_ca=dca, omega_eff=om)
        ratio = max(t_lo, t_hi) / min(t_lo, t_hi)
        assert ratio == pytest.approx(1.0707461855, rel=1e-6)
        higher = lo if t_lo > t_hi else hi
        assert np.sign(higher) == np.sign(dca)


def test_symmetric_spectrum_has_equal_peaks():
    om = 2.74 * np.sqrt(8.0)
    lo, hi = splitting_peaks(om, delta_ca=0.0)
    assert transmission(lo, omega_eff=om) == pytest.approx(
        transmission(hi, omega_eff=om), rel=1e-9)
