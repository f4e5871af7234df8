"""Digital-twin toolkit for meat cooking processes.

Building blocks: a coupled water-concentration/temperature finite-volume
solver on structured quarter-symmetry grids, grid-convergence-index
verification, excitation-signal generation, linear and quadratic
reduced-order model identification, and PI closed-loop control with
either the ROM or the full-order solver as plant.
"""

__version__ = "0.1.0"

from .constitutive import MaterialModel, choi_okos
from .mesh import MeshSpec, ProbeSet, StructuredMesh, build_quarter_cuboid, probe_value
from .signals import ExcitationSignal
from .fvm import (BoundarySpec, PatchBoundary, SolverSettings, ThrottleSpec,
                  boundary_heat_flux, boundary_mass_flux, initialize,
                  scaled_residual, step)
from .simulate import Disturbance, Scenario, TimeSeries, run_simulation
from .gci import GciReport, GridSample, QuantityOfInterest, gci_three_grid, run_grid_study
from .rom import (LtiRom, QuadRom, RomErrorReport, TrainingSet, Trajectory,
                  evaluate_rom, load_rom, rom_error, rom_step, save_rom,
                  train_lti, train_quadratic)
from .control import (ClosedLoopResult, FomPlant, PiConfig, RomPlant,
                      disturbance_comparison, pi_step, run_closed_loop)

__all__ = [
    "MaterialModel", "choi_okos",
    "MeshSpec", "StructuredMesh", "ProbeSet", "build_quarter_cuboid",
    "probe_value",
    "ExcitationSignal",
    "BoundarySpec", "PatchBoundary", "SolverSettings", "ThrottleSpec",
    "boundary_heat_flux", "boundary_mass_flux", "initialize",
    "scaled_residual", "step",
    "Disturbance", "Scenario", "TimeSeries", "run_simulation",
    "GciReport", "GridSample", "QuantityOfInterest", "gci_three_grid",
    "run_grid_study",
    "LtiRom", "QuadRom", "RomErrorReport", "TrainingSet", "Trajectory",
    "evaluate_rom", "load_rom", "rom_error", "rom_step", "save_rom",
    "train_lti", "train_quadratic",
    "ClosedLoopResult", "FomPlant", "PiConfig", "RomPlant",
    "disturbance_comparison", "pi_step", "run_closed_loop",
]
