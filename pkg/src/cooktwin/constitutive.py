"""Material laws for the coupled water-concentration/temperature model.

Everything here is a pure function of local state (C, T). All functions
accept scalars or numpy arrays and vectorize elementwise.
"""

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

# Polynomial fits for water/protein transport properties, valid near
# culinary temperatures. Arguments in degrees Celsius.
_LAMBDA_W = (0.57109, 1.7625e-3, -6.7036e-6)
_LAMBDA_P = (0.17881, 1.1958e-3, -2.7178e-6)
_CP_P = (2008.2, 1.2089, -1.3129e-3)
_CP_W = (4128.9, -9.0864e-2, 5.4731e-3)

# Evaluation clamp: the polynomials are fits, keep transient over/undershoots
# from extrapolating into nonphysical territory.
T_CLAMP_MIN = 250.0
T_CLAMP_MAX = 500.0


class ComponentProperties(NamedTuple):
    lambda_w: float | np.ndarray
    lambda_p: float | np.ndarray
    cp_w: float | np.ndarray
    cp_p: float | np.ndarray


def choi_okos(T):
    """Water/protein conductivities (W/m/K) and heat capacities (J/kg/K).

    Quadratic polynomials in (T - 273.15); T clamped to [250, 500] K.
    """
    Tc = np.clip(T, T_CLAMP_MIN, T_CLAMP_MAX) - 273.15
    lw = _LAMBDA_W[0] + _LAMBDA_W[1] * Tc + _LAMBDA_W[2] * Tc**2
    lp = _LAMBDA_P[0] + _LAMBDA_P[1] * Tc + _LAMBDA_P[2] * Tc**2
    cw = _CP_W[0] + _CP_W[1] * Tc + _CP_W[2] * Tc**2
    cp = _CP_P[0] + _CP_P[1] * Tc + _CP_P[2] * Tc**2
    return ComponentProperties(lw, lp, cw, cp)


@dataclass(frozen=True)
class EquilibriumParams:
    """Sigmoid parameters of the water holding capacity."""

    amplitude: float = 0.31
    prefactor: float = 30.0
    rate: float = 0.17          # 1/K
    t_sigma: float = 315.0      # K


@dataclass(frozen=True)
class StorageModulusParams:
    """Sigmoid parameters of the temperature-dependent storage modulus."""

    g_max: float = 92_000.0     # Pa
    g_min: float = 13_500.0     # Pa
    t_mid: float = 342.15       # K
    delta_t: float = 4.0        # K


@dataclass(frozen=True)
class MaterialModel:
    """All constitutive parameters of the C-T model.

    Immutable; share freely between threads and simulations.
    """

    diffusion_coefficient: float = 3.0e-10      # m^2/s, isotropic
    permeability: float = 3.0e-17               # m^2
    water_viscosity: float = 1.0e-3             # Pa s
    water_density: float = 1000.0               # kg/m^3, energy-equation rho
    initial_water_mass_fraction: float = 0.77   # y_w0
    ceq_params: EquilibriumParams = field(default_factory=EquilibriumParams)
    gprime_params: StorageModulusParams = field(default_factory=StorageModulusParams)
    component_densities: tuple[float, float] = (1000.0, 1330.0)  # water, protein
    volume_fraction_mode: str = "densities"     # or "mass_as_volume"

    def __post_init__(self):
        if not self.diffusion_coefficient > 0.0:
            raise ValueError("diffusion coefficient must be positive")
        if not 1e-19 <= self.permeability <= 1e-16:
            raise ValueError(
                f"permeability {self.permeability} outside the physical "
                "range [1e-19, 1e-16] m^2")
        if self.volume_fraction_mode not in ("densities", "mass_as_volume"):
            raise ValueError(
                f"unknown volume_fraction_mode {self.volume_fraction_mode!r}")

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)

    def equilibrium_concentration(self, T):
        """Water holding capacity C_eq(T); strictly decreasing in T."""
        p = self.ceq_params
        return self.initial_water_mass_fraction - p.amplitude / (
            1.0 + p.prefactor * np.exp(-p.rate * (np.asarray(T, float) - p.t_sigma)))

    def storage_modulus(self, T):
        """Storage modulus G'(T) in Pa; strictly increasing in T."""
        p = self.gprime_params
        return p.g_max + (p.g_min - p.g_max) / (
            1.0 + np.exp((np.asarray(T, float) - p.t_mid) / p.delta_t))

    def swelling_pressure(self, C, T):
        """Pressure driving water transport: G'(T) * (C - C_eq(T)), Pa."""
        return self.storage_modulus(T) * (C - self.equilibrium_concentration(T))

    def volume_fractions(self, C):
        """Water/protein volume fractions from the water mass fraction."""
        C = np.asarray(C, float)
        if self.volume_fraction_mode == "mass_as_volume":
            return C, 1.0 - C
        rho_w, rho_p = self.component_densities
        vw = C / rho_w
        vp = (1.0 - C) / rho_p
        phi_w = vw / (vw + vp)
        return phi_w, 1.0 - phi_w

    def effective_conductivity(self, C, T):
        """Orthotropic conductivity (fiber-parallel, orthogonal), W/m/K.

        Arithmetic mean of the component conductivities along the fibers,
        harmonic mean across them; the orthogonal value never exceeds the
        parallel one.
        """
        lw, lp, _, _ = choi_okos(T)
        phi_w, phi_p = self.volume_fractions(C)
        lam_par = phi_w * lw + phi_p * lp
        lam_orth = 1.0 / (phi_w / lw + phi_p / lp)
        return lam_par, lam_orth

    def effective_heat_capacity(self, C, T):
        """Mass-fraction-weighted heat capacity, J/kg/K; affine in C."""
        _, _, cw, cp = choi_okos(T)
        return cw * np.asarray(C, float) + cp * (1.0 - np.asarray(C, float))

    def darcy_mobility(self, T):
        """Coefficient kappa*G'(T)/mu_w of the excess-concentration gradient."""
        return self.permeability * self.storage_modulus(T) / self.water_viscosity

    def darcy_velocity(self, grad_excess, T):
        """Water velocity from the gradient of (C - C_eq), m/s.

        grad_excess holds the gradient components in its last axis; the
        returned array has the same shape. Flow runs down the pressure
        gradient: a positive excess gradient gives a negative velocity.
        """
        grad = np.asarray(grad_excess, float)
        mob = np.asarray(self.darcy_mobility(T), float)
        return -mob[..., None] * grad if grad.ndim > mob.ndim else -mob * grad
