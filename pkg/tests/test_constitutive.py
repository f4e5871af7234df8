import numpy as np
import pytest
from hypothesis import given, strategies as st

from cooktwin.constitutive import MaterialModel, choi_okos


@pytest.fixture
def mat():
    return MaterialModel()


def test_component_properties_at_freezing_point():
    props = choi_okos(273.15)
    assert props.lambda_w == pytest.approx(0.57109, rel=1e-9)
    assert props.lambda_p == pytest.approx(0.17881, rel=1e-9)
    assert props.cp_w == pytest.approx(4128.9, rel=1e-9)
    assert props.cp_p == pytest.approx(2008.2, rel=1e-9)


def test_water_conductivity_at_50c():
    # direct polynomial evaluation as the oracle
    expected = 0.57109 + 1.7625e-3 * 50 - 6.7036e-6 * 50**2
    assert choi_okos(323.15).lambda_w == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.642456, rel=1e-9)


def test_polynomials_clamped_outside_validity():
    assert choi_okos(100.0) == choi_okos(250.0)
    assert choi_okos(900.0) == choi_okos(500.0)


def test_equilibrium_concentration_spot_values(mat):
    assert mat.equilibrium_concentration(315.0) == pytest.approx(0.76, rel=1e-9)
    # closed form: 0.77 - 0.31/31
    assert mat.equilibrium_concentration(315.0) == pytest.approx(
        0.77 - 0.31 / 31.0, rel=1e-12)
    assert mat.equilibrium_concentration(-1e6) == pytest.approx(0.77, abs=1e-12)
    assert mat.equilibrium_concentration(1e6) == pytest.approx(0.46, abs=1e-12)


def test_storage_modulus_spot_values(mat):
    assert mat.storage_modulus(342.15) == pytest.approx(52750.0, rel=1e-9)
    # exp(-15.75) tail
    expected = 92000.0 + (13500.0 - 92000.0) / (1.0 + np.exp(-15.75))
    assert mat.storage_modulus(279.15) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(13500.01, abs=5e-3)
    assert mat.storage_modulus(-1e6) == pytest.approx(13500.0, abs=1e-9)


def test_swelling_pressure(mat):
    for T in (280.0, 315.0, 342.15, 400.0):
        C_eq = mat.equilibrium_concentration(T)
        assert mat.swelling_pressure(C_eq, T) == pytest.approx(0.0, abs=1e-9)
    p = mat.swelling_pressure(0.76, 279.15)
    oracle = mat.storage_modulus(279.15) * (0.76 - mat.equilibrium_concentration(279.15))
    assert p == pytest.approx(oracle, rel=1e-12)
    assert p == pytest.approx(-134.7, abs=0.1)
    p2 = mat.swelling_pressure(0.80, 342.15)
    assert p2 == pytest.approx(
        52750.0 * (0.80 - mat.equilibrium_concentration(342.15)), rel=1e-12)


def test_monotonicity_on_fine_sweep(mat):
    T = np.linspace(250.0, 500.0, 20001)
    ceq = mat.equilibrium_concentration(T)
    gp = mat.storage_modulus(T)
    assert np.all(np.diff(ceq) < 0.0)
    # the modulus sigmoid saturates to its limit in float64 near 465 K,
    # so strictness is only checkable below the saturated tail
    assert np.all(np.diff(gp) >= 0.0)
    active = T <= 430.0
    assert np.all(np.diff(gp[active]) > 0.0)
    assert ceq.max() < 0.77 and ceq.min() > 0.46
    assert gp.min() > 13500.0 and gp.max() <= 92000.0


def test_effective_conductivity_equal_fractions():
    mat = MaterialModel(volume_fraction_mode="mass_as_volume")
    lam_par, lam_orth = mat.effective_conductivity(0.5, 273.15)
    assert lam_par == pytest.approx(0.5 * 0.57109 + 0.5 * 0.17881, rel=1e-12)
    assert lam_par == pytest.approx(0.37495, rel=1e-9)
    assert lam_orth == pytest.approx(1.0 / (0.5 / 0.57109 + 0.5 / 0.17881),
                                     rel=1e-12)
    assert lam_orth == pytest.approx(0.272347, rel=1e-5)


def test_conductivity_single_phase_degeneracy(mat):
    lam_par, lam_orth = mat.effective_conductivity(1.0, 300.0)
    lw = choi_okos(300.0).lambda_w
    assert lam_par == pytest.approx(lw, rel=1e-12)
    assert lam_orth == pytest.approx(lw, rel=1e-12)


def test_orthogonal_never_exceeds_parallel(mat):
    C = np.linspace(0.01, 0.99, 99)
    for T in (260.0, 300.0, 350.0, 450.0):
        lam_par, lam_orth = mat.effective_conductivity(C, T)
        assert np.all(lam_orth <= lam_par + 1e-15)
        assert np.all(lam_orth < lam_par)  # strict away from phi in {0,1}


def test_density_based_volume_fractions(mat):
    phi_w, phi_p = mat.volume_fractions(0.5)
    # half the mass each, but water is less dense, so more volume
    assert phi_w == pytest.approx((0.5 / 1000) / (0.5 / 1000 + 0.5 / 1330),
                                  rel=1e-12)
    assert phi_w + phi_p == pytest.approx(1.0, rel=1e-15)
    assert phi_w > 0.5


def test_heat_capacity_endpoints_and_affinity(mat):
    assert mat.effective_heat_capacity(1.0, 273.15) == pytest.approx(4128.9)
    assert mat.effective_heat_capacity(0.0, 273.15) == pytest.approx(2008.2)
    assert mat.effective_heat_capacity(0.5, 273.15) == pytest.approx(3068.55)
    # affine in C: midpoint equals mean of endpoints, any T
    for T in (280.0, 350.0, 470.0):
        a = mat.effective_heat_capacity(0.2, T)
        b = mat.effective_heat_capacity(0.8, T)
        mid = mat.effective_heat_capacity(0.5, T)
        assert mid == pytest.approx(0.5 * (a + b), rel=1e-14)


def test_darcy_velocity(mat):
    assert np.all(mat.darcy_velocity(np.zeros(3), 300.0) == 0.0)
    # coefficient product with G' pinned at its cold tail value
    cold = MaterialModel(gprime_params=mat.gprime_params)
    u = cold.darcy_velocity(np.array([1.0, 0.0, 0.0]), 279.15)
    mob = 3e-17 * cold.storage_modulus(279.15) / 1e-3
    assert u[0] == pytest.approx(-mob, rel=1e-12)
    assert u[0] == pytest.approx(-4.05e-10, rel=1e-3)
    # flow runs down the pressure gradient
    u = mat.darcy_velocity(np.array([0.3, -0.2, 0.0]), 330.0)
    assert u[0] < 0.0 and u[1] > 0.0 and u[2] == 0.0


@given(st.floats(0.0, 1.0), st.floats(250.0, 500.0))
def test_properties_pure_and_deterministic(C, T):
    mat = MaterialModel()
    assert mat.equilibrium_concentration(T) == mat.equilibrium_concentration(T)
    assert mat.storage_modulus(T) == mat.storage_modulus(T)
    a1 = mat.effective_conductivity(C, T)
    a2 = mat.effective_conductivity(C, T)
    assert a1[0] == a2[0] and a1[1] == a2[1]
    assert mat.effective_heat_capacity(C, T) == mat.effective_heat_capacity(C, T)


def test_invariant_validation():
    with pytest.raises(ValueError):
        MaterialModel(diffusion_coefficient=-1e-10)
    with pytest.raises(ValueError):
        MaterialModel(diffusion_coefficient=0.0)
    with pytest.raises(ValueError):
        MaterialModel(permeability=1e-20)
    with pytest.raises(ValueError):
        MaterialModel(permeability=1e-15)
    with pytest.raises(ValueError):
        MaterialModel(volume_fraction_mode="nonsense")
