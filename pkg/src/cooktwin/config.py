"""Scenario configuration: one hierarchical YAML document per run.

Defaults reproduce the convection-oven benchmark without any user input
(geometry included); a config file only overrides what it names.
Unknown keys are rejected with their full path. All temperatures are
kelvin, all lengths metres, all times seconds (key names carry units).
"""

from dataclasses import dataclass, field

import numpy as np
import yaml

from .constitutive import EquilibriumParams, MaterialModel, StorageModulusParams
from .errors import ConfigError
from .fvm import BoundarySpec, PatchBoundary, SolverSettings, ThrottleSpec
from .mesh import MeshSpec
from .signals import VARIANTS, ExcitationSignal
from .simulate import Disturbance, Scenario


@dataclass(frozen=True)
class GciConfig:
    spacings: tuple = (2.5e-3, 1.6e-3, 1.0e-3)
    qoi_probe: str = "surface"
    qoi_time: float = 200.0
    safety: float = 1.25


@dataclass(frozen=True)
class RomConfig:
    kind: str = "quad"
    sample_step: float = 5.0
    na: int = 4
    nb: int = 4
    ridge: float | None = None
    duration: float = 1200.0
    convection_channel: bool = False


@dataclass(frozen=True)
class ControlConfig:
    pi: "PiSettings" = None
    setpoint: float = 330.0
    duration: float = 3000.0

    def __post_init__(self):
        if self.pi is None:
            from .control import PiConfig
            object.__setattr__(self, "pi", PiConfig())


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a run needs, with mode-specific blocks."""

    scenario: Scenario = field(default_factory=Scenario)
    gci: GciConfig = field(default_factory=GciConfig)
    rom: RomConfig = field(default_factory=RomConfig)
    control: "ControlConfig" = field(default_factory=ControlConfig)
    disturbance: Disturbance = field(default_factory=Disturbance)
    disturbance_enabled: bool = False


def _require_mapping(value, path):
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected a mapping")
    return value


def _reject_unknown(d, known, path):
    for key in d:
        if key not in known:
            raise ConfigError(f"unknown key {path}.{key}" if path
                              else f"unknown key {key}")


def _get_float(d, key, default, path):
    v = d.get(key, default)
    try:
        return float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}.{key}: expected a number, got {v!r}")


def _get_int(d, key, default, path):
    v = d.get(key, default)
    if isinstance(v, bool) or (not isinstance(v, int)
                               and not float(v).is_integer()):
        raise ConfigError(f"{path}.{key}: expected an integer, got {v!r}")
    return int(v)


def _get_bool(d, key, default, path):
    v = d.get(key, default)
    if not isinstance(v, bool):
        raise ConfigError(f"{path}.{key}: expected true/false, got {v!r}")
    return v


def _get_str(d, key, default, path, allowed=None):
    v = d.get(key, default)
    if not isinstance(v, str):
        raise ConfigError(f"{path}.{key}: expected a string, got {v!r}")
    if allowed and v not in allowed:
        raise ConfigError(f"{path}.{key}: {v!r} not one of {sorted(allowed)}")
    return v


_SIGNAL_KEYS = ("variant", "baseline_k", "peak_k", "t_up_s", "t_const_s",
                "t_down_s", "t_period_s", "t_pulse_s", "t_dead_s", "n_pulses")


def parse_signal(d, path="signal", baseline_default=279.15):
    d = _require_mapping(d, path)
    _reject_unknown(d, _SIGNAL_KEYS, path)
    try:
        return ExcitationSignal(
            variant=_get_str(d, "variant", "constant_with_ramp", path,
                             allowed=VARIANTS),
            baseline=_get_float(d, "baseline_k", baseline_default, path),
            peak=_get_float(d, "peak_k", 443.15, path),
            t_up=_get_float(d, "t_up_s", 0.0, path),
            t_const=_get_float(d, "t_const_s", 0.0, path),
            t_down=_get_float(d, "t_down_s", 0.0, path),
            t_period=_get_float(d, "t_period_s", 0.0, path),
            t_pulse=_get_float(d, "t_pulse_s", 0.0, path),
            t_dead=_get_float(d, "t_dead_s", 0.0, path),
            n_pulses=_get_int(d, "n_pulses", 1, path))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}")


def _parse_throttle(d, path):
    d = _require_mapping(d, path)
    _reject_unknown(d, ("enabled", "onset_k", "full_k", "residual_fraction"),
                    path)
    try:
        return ThrottleSpec(
            enabled=_get_bool(d, "enabled", True, path),
            t_onset=_get_float(d, "onset_k", 371.0, path),
            t_full=_get_float(d, "full_k", 375.0, path),
            residual_fraction=_get_float(d, "residual_fraction", 0.10, path))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}")


def _parse_patch(d, name, alpha_default, path):
    d = _require_mapping(d, path)
    _reject_unknown(d, ("beta_m_s", "alpha_w_m2k", "c_ambient", "drive_k",
                        "drive_signal", "throttle"), path)
    if "drive_signal" in d:
        drive = parse_signal(d["drive_signal"], f"{path}.drive_signal")
    else:
        drive = _get_float(d, "drive_k", 443.15, path)
    try:
        return PatchBoundary(
            beta=_get_float(d, "beta_m_s", 1.0e-6, path),
            alpha=_get_float(d, "alpha_w_m2k", alpha_default, path),
            c_ambient=_get_float(d, "c_ambient", 0.05, path),
            drive=drive,
            throttle=_parse_throttle(d.get("throttle"), f"{path}.throttle"))
    except ValueError as exc:
        raise ConfigError(f"boundary patch {name!r}: {exc}")


def _parse_material(d, path="material"):
    d = _require_mapping(d, path)
    _reject_unknown(d, ("diffusion_coefficient_m2_s", "permeability_m2",
                        "water_viscosity_pa_s", "water_density_kg_m3",
                        "initial_water_mass_fraction",
                        "component_densities_kg_m3", "volume_fraction_mode",
                        "ceq", "gprime"), path)
    ceq = _require_mapping(d.get("ceq"), f"{path}.ceq")
    _reject_unknown(ceq, ("amplitude", "prefactor", "rate_per_k", "t_sigma_k"),
                    f"{path}.ceq")
    gp = _require_mapping(d.get("gprime"), f"{path}.gprime")
    _reject_unknown(gp, ("g_max_pa", "g_min_pa", "t_mid_k", "delta_t_k"),
                    f"{path}.gprime")
    dens = d.get("component_densities_kg_m3", {})
    dens = _require_mapping(dens, f"{path}.component_densities_kg_m3")
    _reject_unknown(dens, ("water", "protein"),
                    f"{path}.component_densities_kg_m3")
    try:
        return MaterialModel(
            diffusion_coefficient=_get_float(
                d, "diffusion_coefficient_m2_s", 3.0e-10, path),
            permeability=_get_float(d, "permeability_m2", 3.0e-17, path),
            water_viscosity=_get_float(d, "water_viscosity_pa_s", 1.0e-3, path),
            water_density=_get_float(d, "water_density_kg_m3", 1000.0, path),
            initial_water_mass_fraction=_get_float(
                d, "initial_water_mass_fraction", 0.77, path),
            ceq_params=EquilibriumParams(
                amplitude=_get_float(ceq, "amplitude", 0.31, f"{path}.ceq"),
                prefactor=_get_float(ceq, "prefactor", 30.0, f"{path}.ceq"),
                rate=_get_float(ceq, "rate_per_k", 0.17, f"{path}.ceq"),
                t_sigma=_get_float(ceq, "t_sigma_k", 315.0, f"{path}.ceq")),
            gprime_params=StorageModulusParams(
                g_max=_get_float(gp, "g_max_pa", 92000.0, f"{path}.gprime"),
                g_min=_get_float(gp, "g_min_pa", 13500.0, f"{path}.gprime"),
                t_mid=_get_float(gp, "t_mid_k", 342.15, f"{path}.gprime"),
                delta_t=_get_float(gp, "delta_t_k", 4.0, f"{path}.gprime")),
            component_densities=(
                _get_float(dens, "water", 1000.0, path),
                _get_float(dens, "protein", 1330.0, path)),
            volume_fraction_mode=_get_str(
                d, "volume_fraction_mode", "densities", path,
                allowed=("densities", "mass_as_volume")))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}")


_TOP_KEYS = ("geometry", "mesh", "material", "initial", "boundaries",
             "simulation", "solver", "input", "gci", "rom", "control",
             "disturbance")


def parse_config(raw: dict) -> ScenarioConfig:
    raw = _require_mapping(raw, "")
    _reject_unknown(raw, _TOP_KEYS, "")

    geo = _require_mapping(raw.get("geometry"), "geometry")
    _reject_unknown(geo, ("full_dims_m",), "geometry")
    dims = geo.get("full_dims_m", [0.070, 0.040, 0.030])
    if not (isinstance(dims, (list, tuple)) and len(dims) == 3):
        raise ConfigError("geometry.full_dims_m: expected three lengths")
    msh = _require_mapping(raw.get("mesh"), "mesh")
    _reject_unknown(msh, ("spacing_m", "inflation_layers",
                          "first_layer_height_m"), "mesh")
    try:
        mesh_spec = MeshSpec(
            cuboid_dims=tuple(float(v) for v in dims),
            spacing=_get_float(msh, "spacing_m", 5.0e-4, "mesh"),
            inflation_layers=_get_int(msh, "inflation_layers", 10, "mesh"),
            first_layer_height=_get_float(msh, "first_layer_height_m",
                                          1.0e-4, "mesh"))
    except Exception as exc:
        raise ConfigError(f"mesh: {exc}")

    material = _parse_material(raw.get("material"))

    ini = _require_mapping(raw.get("initial"), "initial")
    _reject_unknown(ini, ("temperature_k", "concentration"), "initial")
    t0 = _get_float(ini, "temperature_k", 279.15, "initial")
    c0 = _get_float(ini, "concentration", 0.76, "initial")
    if not 0.0 <= c0 <= 1.0:
        raise ConfigError("initial.concentration must lie in [0, 1]")

    bnd = _require_mapping(raw.get("boundaries"), "boundaries")
    _reject_unknown(bnd, ("bottom", "surface"), "boundaries")
    boundaries = BoundarySpec(
        bottom=_parse_patch(bnd.get("bottom"), "bottom", 59.0,
                            "boundaries.bottom"),
        surface=_parse_patch(bnd.get("surface"), "surface", 44.0,
                             "boundaries.surface"))

    sim = _require_mapping(raw.get("simulation"), "simulation")
    _reject_unknown(sim, ("duration_s", "time_step_s", "output_interval_s",
                          "convection", "second_order_upwind",
                          "probe_height_m", "snapshot_times_s"), "simulation")
    sol = _require_mapping(raw.get("solver"), "solver")
    _reject_unknown(sol, ("residual_threshold", "max_outer_iterations",
                          "linear_rtol", "linear_max_iterations"), "solver")
    try:
        settings = SolverSettings(
            dt=_get_float(sim, "time_step_s", 1.0, "simulation"),
            residual_threshold=_get_float(sol, "residual_threshold", 1.0e-7,
                                          "solver"),
            max_outer_iterations=_get_int(sol, "max_outer_iterations", 50,
                                          "solver"),
            linear_rtol=_get_float(sol, "linear_rtol", 1.0e-10, "solver"),
            linear_max_iterations=_get_int(sol, "linear_max_iterations", 500,
                                           "solver"),
            convection=_get_bool(sim, "convection", True, "simulation"),
            second_order_upwind=_get_bool(sim, "second_order_upwind", True,
                                          "simulation"))
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}")

    inp = _require_mapping(raw.get("input"), "input")
    _reject_unknown(inp, ("patch", "signal"), "input")
    input_patch = None
    input_signal = None
    if inp:
        input_patch = _get_str(inp, "patch", "bottom", "input",
                               allowed=("bottom", "surface"))
        input_signal = parse_signal(inp.get("signal"), "input.signal",
                                    baseline_default=t0)

    snap = sim.get("snapshot_times_s", [])
    if not isinstance(snap, (list, tuple)):
        raise ConfigError("simulation.snapshot_times_s: expected a list")

    scenario = Scenario(
        mesh_spec=mesh_spec, material=material, boundaries=boundaries,
        settings=settings, initial_temperature=t0, initial_concentration=c0,
        duration=_get_float(sim, "duration_s", 1200.0, "simulation"),
        output_interval=_get_float(sim, "output_interval_s", 5.0,
                                   "simulation"),
        probe_height=_get_float(sim, "probe_height_m", 0.015, "simulation"),
        input_patch=input_patch, input_signal=input_signal,
        snapshot_times=tuple(float(v) for v in snap))

    g = _require_mapping(raw.get("gci"), "gci")
    _reject_unknown(g, ("spacings_m", "qoi_probe", "qoi_time_s", "safety"),
                    "gci")
    spacings = g.get("spacings_m", list(GciConfig.spacings))
    if not isinstance(spacings, (list, tuple)):
        raise ConfigError("gci.spacings_m: expected a list")
    gci = GciConfig(
        spacings=tuple(float(v) for v in spacings),
        qoi_probe=_get_str(g, "qoi_probe", "surface", "gci",
                           allowed=("core", "surface", "probe")),
        qoi_time=_get_float(g, "qoi_time_s", 200.0, "gci"),
        safety=_get_float(g, "safety", 1.25, "gci"))

    r = _require_mapping(raw.get("rom"), "rom")
    _reject_unknown(r, ("kind", "sample_step_s", "na", "nb", "ridge",
                        "duration_s", "convection_channel"), "rom")
    ridge = r.get("ridge", None)
    rom = RomConfig(
        kind=_get_str(r, "kind", "quad", "rom", allowed=("lti", "quad")),
        sample_step=_get_float(r, "sample_step_s", 5.0, "rom"),
        na=_get_int(r, "na", 4, "rom"),
        nb=_get_int(r, "nb", 4, "rom"),
        ridge=None if ridge is None else float(ridge),
        duration=_get_float(r, "duration_s", 1200.0, "rom"),
        convection_channel=_get_bool(r, "convection_channel", False, "rom"))

    c = _require_mapping(raw.get("control"), "control")
    _reject_unknown(c, ("kp", "ki_per_s", "step_s", "u_min_k", "u_max_k",
                        "bias_k", "anti_windup", "setpoint_k", "duration_s"),
                    "control")
    from .control import PiConfig
    try:
        control = ControlConfig(
            pi=PiConfig(kp=_get_float(c, "kp", 10.0, "control"),
                        ki=_get_float(c, "ki_per_s", 0.01, "control"),
                        dt=_get_float(c, "step_s", 1.0, "control"),
                        u_min=_get_float(c, "u_min_k", 293.15, "control"),
                        u_max=_get_float(c, "u_max_k", 500.0, "control"),
                        bias=_get_float(c, "bias_k", 293.15, "control"),
                        anti_windup=_get_bool(c, "anti_windup", True,
                                              "control")),
            setpoint=_get_float(c, "setpoint_k", 330.0, "control"),
            duration=_get_float(c, "duration_s", 3000.0, "control"))
    except ValueError as exc:
        raise ConfigError(f"control: {exc}")

    dd = _require_mapping(raw.get("disturbance"), "disturbance")
    _reject_unknown(dd, ("enabled", "onset_s", "duration_s", "multiplier"),
                    "disturbance")
    try:
        disturbance = Disturbance(
            onset=_get_float(dd, "onset_s", 400.0, "disturbance"),
            duration=_get_float(dd, "duration_s", 500.0, "disturbance"),
            multiplier=_get_float(dd, "multiplier", 2.0, "disturbance"))
    except ValueError as exc:
        raise ConfigError(f"disturbance: {exc}")

    return ScenarioConfig(scenario=scenario, gci=gci, rom=rom,
                          control=control, disturbance=disturbance,
                          disturbance_enabled=_get_bool(dd, "enabled", False,
                                                        "disturbance"))


def load_config(path) -> ScenarioConfig:
    """Parse and validate a YAML scenario file."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1})" if mark else ""
        raise ConfigError(f"{path}: YAML parse error{where}: {exc}")
    return parse_config(raw or {})


def _dump_signal(sig: ExcitationSignal):
    return {"variant": sig.variant, "baseline_k": sig.baseline,
            "peak_k": sig.peak, "t_up_s": sig.t_up, "t_const_s": sig.t_const,
            "t_down_s": sig.t_down, "t_period_s": sig.t_period,
            "t_pulse_s": sig.t_pulse, "t_dead_s": sig.t_dead,
            "n_pulses": sig.n_pulses}


def _dump_patch(p: PatchBoundary):
    out = {"beta_m_s": p.beta, "alpha_w_m2k": p.alpha,
           "c_ambient": p.c_ambient,
           "throttle": {"enabled": p.throttle.enabled,
                        "onset_k": p.throttle.t_onset,
                        "full_k": p.throttle.t_full,
                        "residual_fraction": p.throttle.residual_fraction}}
    if isinstance(p.drive, ExcitationSignal):
        out["drive_signal"] = _dump_signal(p.drive)
    else:
        out["drive_k"] = p.drive
    return out


def dump_config(cfg: ScenarioConfig) -> dict:
    """Fully resolved config echo; parse_config(dump_config(c)) == c."""
    sc = cfg.scenario
    m = sc.material
    out = {
        "geometry": {"full_dims_m": list(sc.mesh_spec.cuboid_dims)},
        "mesh": {"spacing_m": sc.mesh_spec.spacing,
                 "inflation_layers": sc.mesh_spec.inflation_layers,
                 "first_layer_height_m": sc.mesh_spec.first_layer_height},
        "material": {
            "diffusion_coefficient_m2_s": m.diffusion_coefficient,
            "permeability_m2": m.permeability,
            "water_viscosity_pa_s": m.water_viscosity,
            "water_density_kg_m3": m.water_density,
            "initial_water_mass_fraction": m.initial_water_mass_fraction,
            "component_densities_kg_m3": {
                "water": m.component_densities[0],
                "protein": m.component_densities[1]},
            "volume_fraction_mode": m.volume_fraction_mode,
            "ceq": {"amplitude": m.ceq_params.amplitude,
                    "prefactor": m.ceq_params.prefactor,
                    "rate_per_k": m.ceq_params.rate,
                    "t_sigma_k": m.ceq_params.t_sigma},
            "gprime": {"g_max_pa": m.gprime_params.g_max,
                       "g_min_pa": m.gprime_params.g_min,
                       "t_mid_k": m.gprime_params.t_mid,
                       "delta_t_k": m.gprime_params.delta_t}},
        "initial": {"temperature_k": sc.initial_temperature,
                    "concentration": sc.initial_concentration},
        "boundaries": {"bottom": _dump_patch(sc.boundaries.bottom),
                       "surface": _dump_patch(sc.boundaries.surface)},
        "simulation": {"duration_s": sc.duration,
                       "time_step_s": sc.settings.dt,
                       "output_interval_s": sc.output_interval,
                       "convection": sc.settings.convection,
                       "second_order_upwind": sc.settings.second_order_upwind,
                       "probe_height_m": sc.probe_height,
                       "snapshot_times_s": list(sc.snapshot_times)},
        "solver": {"residual_threshold": sc.settings.residual_threshold,
                   "max_outer_iterations": sc.settings.max_outer_iterations,
                   "linear_rtol": sc.settings.linear_rtol,
                   "linear_max_iterations": sc.settings.linear_max_iterations},
        "gci": {"spacings_m": list(cfg.gci.spacings),
                "qoi_probe": cfg.gci.qoi_probe,
                "qoi_time_s": cfg.gci.qoi_time,
                "safety": cfg.gci.safety},
        "rom": {"kind": cfg.rom.kind, "sample_step_s": cfg.rom.sample_step,
                "na": cfg.rom.na, "nb": cfg.rom.nb,
                "duration_s": cfg.rom.duration,
                "convection_channel": cfg.rom.convection_channel,
                **({"ridge": cfg.rom.ridge} if cfg.rom.ridge is not None
                   else {})},
        "control": {"kp": cfg.control.pi.kp, "ki_per_s": cfg.control.pi.ki,
                    "step_s": cfg.control.pi.dt,
                    "u_min_k": cfg.control.pi.u_min,
                    "u_max_k": cfg.control.pi.u_max,
                    "bias_k": cfg.control.pi.bias,
                    "anti_windup": cfg.control.pi.anti_windup,
                    "setpoint_k": cfg.control.setpoint,
                    "duration_s": cfg.control.duration},
        "disturbance": {"enabled": cfg.disturbance_enabled,
                        "onset_s": cfg.disturbance.onset,
                        "duration_s": cfg.disturbance.duration,
                        "multiplier": cfg.disturbance.multiplier},
    }
    if sc.input_signal is not None:
        out["input"] = {"patch": sc.input_patch,
                        "signal": _dump_signal(sc.input_signal)}
    return out
