"""Shared full-order scenarios and a disk cache for their trajectories.

The reduced-order and control acceptance checks all consume pan-fry
trajectories of the coarse-mesh solver; those runs cost minutes each, so
they are generated once into tests/.cache and reloaded afterwards.
Delete the directory to force regeneration.
"""

from pathlib import Path

import numpy as np

from cooktwin.fvm import BoundarySpec, PatchBoundary, SolverSettings
from cooktwin.io import read_csv, write_timeseries_csv
from cooktwin.mesh import MeshSpec
from cooktwin.signals import ExcitationSignal
from cooktwin.simulate import Scenario, TimeSeries, run_simulation

CACHE_DIR = Path(__file__).parent / ".cache"

BASELINE = 279.15
AIR_TEMPERATURE = 293.15
AIR_ALPHA = 15.0            # external heat transfer to ambient air

COARSE_MESH = MeshSpec(spacing=1.0e-3)

# learning-phase excitation signals for the pan drive temperature
LEARNING_SIGNALS = {
    "learn_step443": ExcitationSignal("constant_with_ramp", BASELINE, 443.15,
                                      t_up=10.0),
    "learn_step473": ExcitationSignal("constant_with_ramp", BASELINE, 473.15,
                                      t_up=10.0),
    "learn_trapezoid403": ExcitationSignal("trapezoid_pulse", BASELINE,
                                           403.15, t_up=200.0, t_const=300.0,
                                           t_down=100.0),
    "learn_sawtooth443": ExcitationSignal("sawtooth", BASELINE, 443.15,
                                          t_period=500.0),
    "learn_halfsine498": ExcitationSignal("half_sine_pulse", BASELINE, 498.15,
                                          t_pulse=500.0),
}

# evaluation-phase signals, never used for training
EVALUATION_SIGNALS = {
    "eval_rect443": ExcitationSignal("rectangular_pulse", BASELINE, 443.15,
                                     t_pulse=60.0),
    "eval_halfsine443": ExcitationSignal("half_sine_pulse", BASELINE, 443.15,
                                         t_pulse=200.0),
    "eval_step443_noramp": ExcitationSignal("constant_with_ramp", BASELINE,
                                            443.15, t_up=0.0),
    "eval_train473": ExcitationSignal("pulse_train", BASELINE, 473.15,
                                      t_pulse=50.0, t_dead=450.0, n_pulses=3),
}


def panfry_scenario(signal=None, disturbances=(), duration=1200.0,
                    output_interval=1.0):
    """Pan contact drives the bottom patch; air cools the exposed faces."""
    boundaries = BoundarySpec(
        bottom=PatchBoundary(alpha=59.0, drive=BASELINE),
        surface=PatchBoundary(alpha=AIR_ALPHA, drive=AIR_TEMPERATURE))
    return Scenario(
        mesh_spec=COARSE_MESH, boundaries=boundaries,
        settings=SolverSettings(),
        duration=duration, output_interval=output_interval,
        input_patch="bottom", input_signal=signal,
        disturbances=tuple(disturbances))


def oven_scenario(duration=1200.0, output_interval=5.0, convection=True):
    return Scenario(mesh_spec=COARSE_MESH, duration=duration,
                    output_interval=output_interval,
                    settings=SolverSettings(convection=convection))


def _series_from_columns(cols):
    return TimeSeries(
        t=cols["t_s"], T_in=cols["T_in_K"], T_core=cols["T_core_K"],
        T_surface=cols["T_surface_K"], T_probe=cols["T_probe_K"],
        C_mean=cols["C_mean"], mass_balance=cols["mass_balance"],
        conv_mult=cols.get("conv_mult"))


def fom_series(name, scenario) -> TimeSeries:
    """Run (or reload) one cached full-order trajectory."""
    CACHE_DIR.mkdir(exist_ok=True)
    path = CACHE_DIR / f"{name}.csv"
    if path.exists():
        return _series_from_columns(read_csv(path))
    series = run_simulation(scenario)
    write_timeseries_csv(series, path)
    return series


def learning_series():
    return {name: fom_series(name, panfry_scenario(sig))
            for name, sig in LEARNING_SIGNALS.items()}


def evaluation_series():
    return {name: fom_series(name, panfry_scenario(sig))
            for name, sig in EVALUATION_SIGNALS.items()}


# convection-channel training: pan steps combined with forced-convection
# windows at staggered onsets so the multiplier input carries information
def convection_training_runs():
    from cooktwin.simulate import Disturbance
    runs = {
        "conv_step443_d300": (
            LEARNING_SIGNALS["learn_step443"],
            (Disturbance(onset=300.0, duration=400.0, multiplier=2.0),)),
        "conv_step473_d600": (
            LEARNING_SIGNALS["learn_step473"],
            (Disturbance(onset=600.0, duration=300.0, multiplier=2.0),)),
        "conv_saw443_d200": (
            LEARNING_SIGNALS["learn_sawtooth443"],
            (Disturbance(onset=200.0, duration=250.0, multiplier=2.0),
             Disturbance(onset=800.0, duration=200.0, multiplier=2.0))),
    }
    return {name: fom_series(name, panfry_scenario(sig, disturbances=dist))
            for name, (sig, dist) in runs.items()}


if __name__ == "__main__":
    import time
    for label, fn in (("learning", learning_series),
                      ("evaluation", evaluation_series),
                      ("convection", convection_training_runs)):
        t0 = time.perf_counter()
        out = fn()
        print(f"{label}: {sorted(out)} in {time.perf_counter()-t0:.0f}s",
              flush=True)
