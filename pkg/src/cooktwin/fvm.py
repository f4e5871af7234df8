"""Segregated implicit finite-volume solver for the coupled C-T model.

Per time step (first-order implicit Euler), an outer Picard loop
alternately assembles and solves the linearized water-concentration and
temperature systems, recomputing every coupling coefficient (C_eq, G',
Darcy velocity, conductivity, heat capacity) each sweep until both
scaled residuals drop below the threshold.

Spatial scheme: two-point flux diffusion with distance-weighted harmonic
face conductivities, second-order upwind convection (upwind value plus
upwind-side gradient extrapolation, face value clipped to the adjacent
cell band), Robin boundaries on the bottom/surface patches, zero flux on
the symmetry planes. No non-orthogonality correction is needed on these
axis-aligned grids.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, bicgstab

from . import kernels
from .constitutive import MaterialModel
from .errors import ConvergenceError, LinearSolverError
from .mesh import PATCH_FACES, StructuredMesh
from .signals import ExcitationSignal

ROBIN_PATCHES = ("bottom", "surface")


@dataclass(frozen=True)
class ThrottleSpec:
    """Smooth reduction of boundary heat flux around boiling.

    The factor is 1 below t_onset, residual_fraction above t_full, and a
    half-cosine blend in between; it stands in for latent-heat losses.
    """

    enabled: bool = True
    t_onset: float = 371.0
    t_full: float = 375.0
    residual_fraction: float = 0.10

    def __post_init__(self):
        if not 0.0 < self.residual_fraction <= 1.0:
            raise ValueError("residual_fraction must lie in (0, 1]")
        if self.t_full <= self.t_onset:
            raise ValueError("t_full must exceed t_onset")

    def factor(self, T_face):
        if not self.enabled:
            return np.ones_like(np.asarray(T_face, float))
        T = np.asarray(T_face, float)
        x = np.clip((T - self.t_onset) / (self.t_full - self.t_onset), 0.0, 1.0)
        blend = 0.5 * (1.0 + np.cos(np.pi * x))
        return self.residual_fraction + (1.0 - self.residual_fraction) * blend


@dataclass(frozen=True)
class PatchBoundary:
    """Robin data of one boundary patch.

    drive may be a constant temperature (K) or an ExcitationSignal.
    """

    beta: float = 1.0e-6            # mass-transfer coefficient, m/s
    alpha: float = 44.0             # heat-transfer coefficient, W/m^2/K
    c_ambient: float = 0.05         # ambient water mass fraction
    drive: float | ExcitationSignal = 443.15
    throttle: ThrottleSpec = field(default_factory=ThrottleSpec)

    def __post_init__(self):
        if self.beta < 0.0 or self.alpha < 0.0:
            raise ValueError("transfer coefficients must be >= 0")
        if not 0.0 <= self.c_ambient <= 1.0:
            raise ValueError("ambient concentration must lie in [0, 1]")

    def drive_value(self, t):
        if isinstance(self.drive, ExcitationSignal):
            return float(self.drive.evaluate(t))
        return float(self.drive)


@dataclass(frozen=True)
class BoundarySpec:
    """Per-patch Robin conditions; symmetry planes are always zero-flux."""

    bottom: PatchBoundary = field(default_factory=lambda: PatchBoundary(alpha=59.0))
    surface: PatchBoundary = field(default_factory=PatchBoundary)

    def patch(self, name):
        return getattr(self, name)

    def resolve(self, t, alpha_multiplier=1.0, drive_override=None):
        """Freeze time-dependent data into plain numbers for one step.

        alpha_multiplier scales the surface (external air) coefficient;
        drive_override, if given, maps patch name -> drive temperature.
        """
        out = {}
        for name in ROBIN_PATCHES:
            p = self.patch(name)
            drive = (drive_override[name] if drive_override and name in drive_override
                     else p.drive_value(t))
            alpha = p.alpha * (alpha_multiplier if name == "surface" else 1.0)
            out[name] = ResolvedPatch(p.beta, alpha, p.c_ambient, drive, p.throttle)
        return out


class ResolvedPatch(NamedTuple):
    beta: float
    alpha: float
    c_ambient: float
    t_drive: float
    throttle: ThrottleSpec


@dataclass(frozen=True)
class SolverSettings:
    dt: float = 1.0
    residual_threshold: float = 1.0e-7
    max_outer_iterations: int = 50
    linear_rtol: float = 1.0e-10
    linear_max_iterations: int = 500
    convection: bool = True          # debug switch: False zeroes the Darcy term
    second_order_upwind: bool = True
    # Picard damping between outer sweeps: the solved iterate and the
    # Darcy velocity are blended with their previous values. The
    # converged state is unchanged (same fixed point); without damping
    # the iterate-dependent upwind corrections limit-cycle in small
    # boundary-layer cells where C_eq(T) is steep.
    scalar_relaxation: float = 0.8
    velocity_relaxation: float = 0.7

    def __post_init__(self):
        if not 0.1 <= self.dt <= 1.0:
            raise ValueError("time step must lie in [0.1, 1] s")
        if self.residual_threshold <= 0.0 or self.linear_rtol <= 0.0:
            raise ValueError("thresholds must be positive")
        if self.max_outer_iterations < 1 or self.linear_max_iterations < 1:
            raise ValueError("iteration caps must be >= 1")
        if not 0.0 < self.velocity_relaxation <= 1.0:
            raise ValueError("velocity relaxation must lie in (0, 1]")
        if not 0.0 < self.scalar_relaxation <= 1.0:
            raise ValueError("scalar relaxation must lie in (0, 1]")


class StencilSystem(NamedTuple):
    """Assembled 7-point system: aP*phi - sum(a_nb*phi_nb) = b."""

    aP: np.ndarray
    aXm: np.ndarray
    aXp: np.ndarray
    aYm: np.ndarray
    aYp: np.ndarray
    aZm: np.ndarray
    aZp: np.ndarray
    b: np.ndarray


def scaled_residual(system: StencilSystem, phi: np.ndarray) -> float:
    """Fluent-style scaled residual; zero denominator counts as converged."""
    num, den = kernels.scaled_residual_parts(*system, phi)
    if den == 0.0:
        return 0.0
    return num / den


def solve_system(system: StencilSystem, x0: np.ndarray, rtol: float,
                 maxiter: int) -> np.ndarray:
    """Jacobi-preconditioned BiCGStab on the stencil operator.

    Contract: residual reduced below rtol * ||b|| within maxiter
    iterations, else LinearSolverError.
    """
    shape = system.aP.shape
    n = system.aP.size
    b = system.b.ravel()
    if not np.any(b):
        return np.zeros(shape)

    mats = system[:7]

    def matvec(v):
        return kernels.stencil_matvec(
            *mats, np.ascontiguousarray(v.reshape(shape))).ravel()

    inv_diag = 1.0 / system.aP.ravel()
    A = LinearOperator((n, n), matvec=matvec)
    M = LinearOperator((n, n), matvec=lambda v: inv_diag * v)
    x, info = bicgstab(A, b, x0=x0.ravel().copy(), rtol=rtol, atol=0.0,
                       maxiter=maxiter, M=M)
    if info != 0:
        raise LinearSolverError(
            f"BiCGStab failed to reduce the residual by {rtol:g} within "
            f"{maxiter} iterations (info={info})")
    return x.reshape(shape)


def boundary_heat_flux(T_face, alpha, t_drive, throttle: ThrottleSpec = None):
    """Robin heat flux into the domain, W/m^2, throttled near boiling."""
    q = -alpha * (np.asarray(T_face, float) - t_drive)
    if throttle is not None:
        q = q * throttle.factor(T_face)
    return q


def boundary_mass_flux(C_face, beta, c_ambient):
    """Combined diffusive+convective water flux into the domain, C m/s."""
    return -beta * (np.asarray(C_face, float) - c_ambient)


class SimulationState:
    """Mutable fields of one running simulation; single-thread confined."""

    def __init__(self, mesh: StructuredMesh, material: MaterialModel,
                 C: np.ndarray, T: np.ndarray, time: float = 0.0):
        self.mesh = mesh
        self.material = material
        self.C = C
        self.T = T
        self.time = time
        self.velocity = tuple(np.zeros(mesh.shape) for _ in range(3))
        self.last_residuals = []
        self.last_outer_iterations = 0
        self.last_exchange = None

    def water_mass(self):
        """Volume integral of C over the quarter domain, m^3."""
        return float(np.sum(self.C * self.mesh.cell_volumes()))

    def mean_concentration(self):
        return self.water_mass() / self.mesh.total_volume()


def initialize(mesh: StructuredMesh, material: MaterialModel,
               T0: float = 279.15, C0: float = 0.76) -> SimulationState:
    """Uniform-field state at time zero."""
    if not 0.0 <= C0 <= 1.0:
        raise ValueError(f"initial concentration {C0} outside [0, 1]")
    if T0 <= 0.0:
        raise ValueError("initial temperature must be positive (kelvin)")
    shape = mesh.shape
    return SimulationState(mesh, material,
                           np.full(shape, float(C0)),
                           np.full(shape, float(T0)))


# (axis, side) -> plane selector for a 3D cell array
def _plane(arr, axis, side):
    idx = [slice(None)] * 3
    idx[axis] = -1 if side else 0
    return arr[tuple(idx)]


class _BoundaryPlanes(NamedTuple):
    rc_T: list          # six Robin coefficient planes for the T system
    rv_T: list          # six drive-temperature planes
    rc_C: list
    rv_C: list
    T_face: list        # resolved face temperatures (gradient stencils)
    E_face: list        # face values of C - C_eq (Darcy gradient)
    C_face: list


def _boundary_planes(state, resolved, lam_par, lam_orth, widths, convection):
    """Per box-face Robin coefficients and face values.

    The thermal Robin flux resolves the face temperature against the
    half-cell conduction resistance (two local fixed-point sweeps for the
    throttle factor). The concentration exchange combines the prescribed
    beta flux with the convective exudation through open faces: the
    one-sided Darcy velocity at the face, where it points outward, drains
    the water held above the ambient level. Sealed patches (beta = 0) and
    symmetry planes exchange nothing.
    """
    material = state.material
    face_patch = {fc: name for name, faces in PATCH_FACES.items() for fc in faces}
    rc_T, rv_T, rc_C, rv_C = [], [], [], []
    T_faces, E_faces, C_faces = [], [], []
    for axis in range(3):
        lam_normal = lam_par if axis == 0 else lam_orth
        for side in (0, 1):
            T_P = np.ascontiguousarray(_plane(state.T, axis, side))
            C_P = np.ascontiguousarray(_plane(state.C, axis, side))
            patch = face_patch[(axis, side)]
            if patch not in ROBIN_PATCHES:
                rc_T.append(np.zeros_like(T_P))
                rv_T.append(np.zeros_like(T_P))
                rc_C.append(np.zeros_like(T_P))
                rv_C.append(np.zeros_like(T_P))
                T_face = T_P
                C_face = C_P
                E_face = C_face - material.equilibrium_concentration(T_face)
            else:
                p = resolved[patch]
                lam_P = _plane(lam_normal, axis, side)
                d = widths[axis][-1 if side else 0] / 2.0
                cond = lam_P / d
                T_face = T_P.copy()
                alpha_eff = np.full_like(T_P, p.alpha)
                for _ in range(2):
                    alpha_eff = p.alpha * p.throttle.factor(T_face)
                    T_face = ((cond * T_P + alpha_eff * p.t_drive)
                              / (cond + alpha_eff))
                rc_T.append(alpha_eff * cond / (alpha_eff + cond))
                rv_T.append(np.full_like(T_P, p.t_drive))
                # face water concentration from the diffusive/evaporative
                # balance; drier than the cell, which is what drives the
                # outward exudation branch of the Darcy field
                cond_c = material.diffusion_coefficient / d
                C_face = ((cond_c * C_P + p.beta * p.c_ambient)
                          / (cond_c + p.beta))
                E_face = C_face - material.equilibrium_concentration(T_face)
                rc = np.full_like(T_P, p.beta)
                if p.beta > 0.0 and convection:
                    E_P = C_P - material.equilibrium_concentration(T_P)
                    u_out = -material.darcy_mobility(T_face) \
                        * (E_face - E_P) / d
                    rc = rc + np.maximum(u_out, 0.0)
                rc_C.append(rc)
                rv_C.append(np.full_like(T_P, p.c_ambient))
            T_faces.append(T_face)
            C_faces.append(C_face)
            E_faces.append(E_face)
    return _BoundaryPlanes(rc_T, rv_T, rc_C, rv_C, T_faces, E_faces, C_faces)


def _face_fluxes(u, mesh, enabled):
    """Volumetric flow (u . n A) through interior faces per axis."""
    dx, dy, dz = mesh.widths
    if not enabled:
        nx, ny, nz = mesh.shape
        return (np.zeros((nx + 1, ny, nz)), np.zeros((nx, ny + 1, nz)),
                np.zeros((nx, ny, nz + 1)))
    Fx = kernels.face_normal_velocity(u[0], 0) * (dy[None, :, None]
                                                  * dz[None, None, :])
    Fy = kernels.face_normal_velocity(u[1], 1) * (dx[:, None, None]
                                                  * dz[None, None, :])
    Fz = kernels.face_normal_velocity(u[2], 2) * (dx[:, None, None]
                                                  * dy[None, :, None])
    return Fx, Fy, Fz


def _interleave(rc, rv):
    out = []
    for c, v in zip(rc, rv):
        out.append(np.ascontiguousarray(c))
        out.append(np.ascontiguousarray(v))
    return out


def step(state: SimulationState, resolved_boundaries, settings: SolverSettings):
    """Advance the coupled fields by one implicit-Euler step (in place).

    resolved_boundaries maps patch name -> ResolvedPatch (see
    BoundarySpec.resolve). Raises ConvergenceError when the outer loop
    exhausts its iteration budget.
    """
    mesh, material = state.mesh, state.material
    dx, dy, dz = (np.ascontiguousarray(w) for w in mesh.widths)
    widths = (dx, dy, dz)
    C_old = state.C.copy()
    T_old = state.T.copy()
    ones = np.ones(mesh.shape)
    gamma_c = np.full(mesh.shape, material.diffusion_coefficient)
    dt = settings.dt
    tol = settings.residual_threshold

    def relax(sweep, base):
        # full Picard updates first; once a limit cycle could establish
        # itself, damp, and keep tightening every 8 stalled sweeps. The
        # fixed point is unaffected.
        if sweep < 2:
            return 1.0
        return max(base * 0.5 ** ((sweep - 2) // 8), 0.15)

    history = []
    converged = False
    u = state.velocity
    for sweep in range(settings.max_outer_iterations):
        wr = relax(sweep, settings.scalar_relaxation)
        wu = relax(sweep, settings.velocity_relaxation)
        # sweep-fresh coupling coefficients
        lam_par, lam_orth = material.effective_conductivity(state.C, state.T)
        planes = _boundary_planes(state, resolved_boundaries,
                                  lam_par, lam_orth, widths,
                                  settings.convection)
        excess = state.C - material.equilibrium_concentration(state.T)
        gE = kernels.cell_gradient(excess, dx, dy, dz, *planes.E_face)
        if settings.convection:
            mob = material.darcy_mobility(state.T)
            u = tuple(wu * (-mob * g) + (1.0 - wu) * up
                      for g, up in zip(gE, u))
        else:
            u = tuple(np.zeros(mesh.shape) for _ in range(3))
        Fx, Fy, Fz = _face_fluxes(u, mesh, settings.convection)

        gC = kernels.cell_gradient(state.C, dx, dy, dz, *planes.C_face)
        sys_c = StencilSystem(*kernels.assemble_system(
            state.C, C_old, ones, ones, True,
            gamma_c, gamma_c, gamma_c, Fx, Fy, Fz,
            *gC, settings.second_order_upwind,
            *_interleave(planes.rc_C, planes.rv_C),
            dx, dy, dz, dt))
        res_c = scaled_residual(sys_c, state.C)
        if res_c >= tol:
            sol = solve_system(sys_c, state.C, settings.linear_rtol,
                               settings.linear_max_iterations)
            state.C = wr * sol + (1.0 - wr) * state.C

        # temperature system with the freshest concentration
        lam_par, lam_orth = material.effective_conductivity(state.C, state.T)
        rho_cp = material.water_density * material.effective_heat_capacity(
            state.C, state.T)
        planes = _boundary_planes(state, resolved_boundaries,
                                  lam_par, lam_orth, widths,
                                  settings.convection)
        gT = kernels.cell_gradient(state.T, dx, dy, dz, *planes.T_face)
        sys_t = StencilSystem(*kernels.assemble_system(
            state.T, T_old, rho_cp, rho_cp, False,
            lam_par, lam_orth, lam_orth, Fx, Fy, Fz,
            *gT, settings.second_order_upwind,
            *_interleave(planes.rc_T, planes.rv_T),
            dx, dy, dz, dt))
        res_t = scaled_residual(sys_t, state.T)
        if res_t >= tol:
            sol = solve_system(sys_t, state.T, settings.linear_rtol,
                               settings.linear_max_iterations)
            state.T = wr * sol + (1.0 - wr) * state.T

        history.append((res_c, res_t))
        if res_c < tol and res_t < tol:
            converged = True
            break

    if not converged:
        raise ConvergenceError(
            f"outer loop exceeded {settings.max_outer_iterations} iterations "
            f"at t={state.time:.3f}s (last residuals C={history[-1][0]:.3e}, "
            f"T={history[-1][1]:.3e})", history=history, time=state.time)

    state.velocity = u
    state.time += dt
    state.last_residuals = history
    state.last_outer_iterations = len(history)
    # exchange coefficients of the final sweep, for exact mass accounting
    state.last_exchange = (planes.rc_C, planes.rv_C)
    return state


def boundary_water_outflow(state: SimulationState):
    """Water volume outflow over all Robin faces at the last step, m^3/s.

    Uses the exchange coefficients of the final converged sweep, so the
    discrete balance matches the implicit update to solver accuracy.
    """
    if getattr(state, "last_exchange", None) is None:
        return 0.0
    rc_C, rv_C = state.last_exchange
    mesh = state.mesh
    dx, dy, dz = mesh.widths
    areas = {0: dy[:, None] * dz[None, :],
             1: dx[:, None] * dz[None, :],
             2: dx[:, None] * dy[None, :]}
    total = 0.0
    idx = 0
    for axis in range(3):
        for side in (0, 1):
            C_P = _plane(state.C, axis, side)
            total += float(np.sum(rc_C[idx] * (C_P - rv_C[idx])
                                  * areas[axis]))
            idx += 1
    return total
