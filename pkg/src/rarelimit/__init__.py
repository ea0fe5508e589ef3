"""Vacuum rarefaction waves and the zero-dissipation limit of 1D viscous gas flow."""

from .gas import GasModel, PrimitiveState
from .waves import CutoffState, WaveSetup, make_cutoff, make_setup
from .burgers import BurgersProfile
from .profile import ProfileState, profile_eval
from .solver import Grid, SimState, SolverConfig, init_well_prepared, run, step
from .harness import Schedule, SweepRecord, fit_rate, run_sweep, theoretical_rate

__version__ = "0.1.0"

__all__ = [
    "GasModel", "PrimitiveState", "WaveSetup", "CutoffState", "make_setup",
    "make_cutoff", "BurgersProfile", "ProfileState", "profile_eval", "Grid",
    "SimState", "SolverConfig", "init_well_prepared", "run", "step",
    "Schedule", "SweepRecord", "fit_rate", "run_sweep", "theoretical_rate",
    "__version__",
]
