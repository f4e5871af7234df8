"""Discrete PI control with output limiting and closed-loop runners.

The loop alternates measurement, PI update and plant advance at a fixed
control step. Plants are either a trained quadratic ROM (instant) or
the full-order solver (co-simulation); both expose output()/advance().
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CooktwinError
from .fvm import initialize, step
from .mesh import build_quarter_cuboid
from .rom import RomState, rom_step
from .simulate import Disturbance, Scenario, convection_multiplier

__all__ = ["PiConfig", "PiState", "pi_step", "Disturbance",
           "ClosedLoopResult", "RomPlant", "FomPlant", "run_closed_loop",
           "disturbance_comparison", "reentry_time"]


@dataclass(frozen=True)
class PiConfig:
    kp: float = 10.0
    ki: float = 0.01                 # 1/s
    dt: float = 1.0                  # control step, s
    u_min: float = 293.15
    u_max: float = 500.0
    bias: float = 293.15             # command at zero error and empty integral
    anti_windup: bool = True

    def __post_init__(self):
        if self.u_min >= self.u_max:
            raise ValueError("u_min must be below u_max")
        if self.dt <= 0.0:
            raise ValueError("control step must be positive")


@dataclass(frozen=True)
class PiState:
    integral: float = 0.0


def pi_step(state: PiState, setpoint, measurement, config: PiConfig):
    """One PI update; returns (command, new state, saturation flag).

    With anti-windup enabled the integrator freezes on samples where the
    command clamps and the error would push it deeper into saturation.
    """
    e = setpoint - measurement
    integral = state.integral + e * config.dt
    u_raw = config.bias + config.kp * e + config.ki * integral
    if config.anti_windup and ((u_raw > config.u_max and e > 0.0)
                               or (u_raw < config.u_min and e < 0.0)):
        integral = state.integral
        u_raw = config.bias + config.kp * e + config.ki * integral
    u = min(max(u_raw, config.u_min), config.u_max)
    return u, PiState(integral), u != u_raw


@dataclass
class ClosedLoopResult:
    t: np.ndarray
    setpoint: np.ndarray
    measured: np.ndarray
    command: np.ndarray
    integral: np.ndarray
    saturated: np.ndarray

    def columns(self):
        return {"t_s": self.t, "setpoint_K": self.setpoint,
                "T_core_K": self.measured, "T_in_K": self.command,
                "integral_Ks": self.integral,
                "saturated": self.saturated.astype(float)}


class RomPlant:
    """Quadratic ROM as the controlled plant.

    A two-channel (convection-aware) model receives the disturbance on
    its second input; a single-channel model simply never sees it.
    """

    def __init__(self, rom, y0=None, disturbance: Disturbance = None):
        self.rom = rom
        self.disturbance = disturbance
        self.y = rom.y_ref if y0 is None else float(y0)
        self.state = rom.initial_state(self.y)
        if disturbance is not None and rom.n_channels < 2:
            raise CooktwinError(
                "plant model has no convection channel for the disturbance")

    def output(self):
        return self.y

    def steps_per(self, dt_ctrl):
        n = round(dt_ctrl / self.rom.dt)
        if n < 1 or abs(n * self.rom.dt - dt_ctrl) > 1e-9:
            raise CooktwinError(
                f"control step {dt_ctrl} s is not a multiple of the model "
                f"step {self.rom.dt} s")
        return n

    def advance(self, u, t_now, dt_ctrl):
        n = self.steps_per(dt_ctrl)
        for i in range(n):
            t_sub = t_now + (i + 1) * self.rom.dt
            if self.rom.n_channels >= 2:
                mult = (convection_multiplier([self.disturbance], t_sub)
                        if self.disturbance else 1.0)
                u_vec = np.array([u] + [mult] + [0.0] * (self.rom.n_channels - 2))
            else:
                u_vec = np.array([u])
            self.y = rom_step(self.rom, self.state, u_vec)
        return self.y


class FomPlant:
    """Full-order solver in the loop (co-simulation reference)."""

    def __init__(self, scenario: Scenario, disturbance: Disturbance = None,
                 drive_patch: str = "bottom", measure_probe: str = "core"):
        self.scenario = scenario
        self.disturbance = disturbance
        self.drive_patch = drive_patch
        self.mesh = build_quarter_cuboid(scenario.mesh_spec)
        self.state = initialize(self.mesh, scenario.material,
                                scenario.initial_temperature,
                                scenario.initial_concentration)
        self.probes = scenario.resolved_probes()
        self.probes.validate(self.mesh)
        self.measure_probe = measure_probe

    def output(self):
        return self.probes.sample(self.mesh, self.state.T)[self.measure_probe]

    def advance(self, u, t_now, dt_ctrl):
        dt = self.scenario.settings.dt
        n = round(dt_ctrl / dt)
        if n < 1 or abs(n * dt - dt_ctrl) > 1e-9:
            raise CooktwinError(
                "control step is not a multiple of the solver time step")
        for _ in range(n):
            t_new = self.state.time + dt
            mult = (convection_multiplier([self.disturbance], t_new)
                    if self.disturbance else 1.0)
            resolved = self.scenario.boundaries.resolve(
                t_new, alpha_multiplier=mult,
                drive_override={self.drive_patch: float(u)})
            step(self.state, resolved, self.scenario.settings)
        return self.output()


def run_closed_loop(plant, setpoint, config: PiConfig,
                    duration: float) -> ClosedLoopResult:
    """Drive the plant to the setpoint; deterministic for fixed inputs.

    Per control step: measure, compute the limited PI command, apply it
    over the step, advance the plant.
    """
    n_steps = round(duration / config.dt)
    pi = PiState()
    t, y, u, integ, sat = [0.0], [plant.output()], [], [], []
    for k in range(n_steps):
        t_now = k * config.dt
        cmd, pi, clipped = pi_step(pi, setpoint, y[-1], config)
        u.append(cmd)
        integ.append(pi.integral)
        sat.append(clipped)
        y.append(plant.advance(cmd, t_now, config.dt))
        t.append(t_now + config.dt)
    # command history aligned with the measurement it acted on
    u.append(u[-1])
    integ.append(integ[-1])
    sat.append(sat[-1])
    return ClosedLoopResult(
        t=np.array(t), setpoint=np.full(len(t), float(setpoint)),
        measured=np.array(y), command=np.array(u),
        integral=np.array(integ), saturated=np.array(sat, dtype=bool))


def reentry_time(t, y, setpoint, onset, band=1.0):
    """First time at/after onset from which |y - setpoint| stays in band.

    Returns onset itself when the trajectory never leaves the band after
    onset.
    """
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    outside = (np.abs(y - setpoint) > band) & (t >= onset)
    if not np.any(outside):
        return float(onset)
    last_out = np.max(np.nonzero(outside)[0])
    if last_out + 1 >= t.size:
        return float("inf")
    return float(t[last_out + 1])


def disturbance_comparison(aware_rom, non_aware_rom, setpoint,
                           config: PiConfig, disturbance: Disturbance,
                           duration, y0=None, band=1.0):
    """Convection-aware loop vs the non-aware twin's open prediction.

    The aware model sees the disturbance on its convection channel and
    the controller counteracts it. The non-aware loop never senses it,
    so its command stays on the undisturbed path; replaying that command
    on the aware model (as truth proxy) shows the uncorrected excursion.
    Returns re-entry times into the +-band around the setpoint.
    """
    aware = run_closed_loop(
        RomPlant(aware_rom, y0=y0, disturbance=disturbance),
        setpoint, config, duration)
    undisturbed = run_closed_loop(
        RomPlant(aware_rom, y0=y0, disturbance=None),
        setpoint, config, duration)
    na_loop = run_closed_loop(
        RomPlant(non_aware_rom, y0=y0, disturbance=None),
        setpoint, config, duration)

    # replay the non-aware command on the disturbed truth proxy
    n = aware.t.size
    mult = np.array([convection_multiplier([disturbance], tk)
                     for tk in aware.t])
    u_open = np.vstack([na_loop.command,
                        mult] + [np.zeros(n)] * (aware_rom.n_channels - 2))
    y_open = aware_rom.simulate(u_open, y0=y0)

    return {
        "aware": aware,
        "undisturbed": undisturbed,
        "non_aware_loop": na_loop,
        "open_prediction": (aware.t, y_open),
        "t_reentry_aware": reentry_time(aware.t, aware.measured, setpoint,
                                        disturbance.onset, band),
        "t_reentry_open": reentry_time(aware.t, y_open, setpoint,
                                       disturbance.onset, band),
    }
