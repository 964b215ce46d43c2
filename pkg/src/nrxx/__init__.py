"""Regularized Hermite moment (NRxx) solver for the 1D-space / 3D-velocity BGK equation."""

from .integrate import (
    RkcCoeffs,
    StageError,
    StepPlan,
    beta,
    collide,
    rkc_coeffs,
    rkc_step,
    select_stages,
    select_timestep,
    strang_advance,
)
from .moments import (
    InadmissibleStateError,
    MacroState,
    MomentRep,
    MultiIndexTable,
    flux_moments,
    index_table,
    linear_combine,
    macro_from_rep,
    maxwellian,
    project,
    to_standard,
)
from .riemann import EulerState, solve_riemann
from .scenarios import (
    ConfigError,
    ScenarioConfig,
    SolutionRecord,
    SolverBreakdown,
    knudsen_convert,
    run_scenario,
)
from .spatial import BoundaryCondition, Field, GridSpec, convection_rhs, hll_flux, reconstruct
from .studies import convergence_study, scaling_benchmark

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "ConfigError",
    "EulerState",
    "Field",
    "GridSpec",
    "InadmissibleStateError",
    "MacroState",
    "MomentRep",
    "MultiIndexTable",
    "RkcCoeffs",
    "ScenarioConfig",
    "SolutionRecord",
    "SolverBreakdown",
    "StageError",
    "StepPlan",
    "beta",
    "collide",
    "convection_rhs",
    "convergence_study",
    "flux_moments",
    "hll_flux",
    "index_table",
    "knudsen_convert",
    "linear_combine",
    "macro_from_rep",
    "maxwellian",
    "project",
    "reconstruct",
    "rkc_coeffs",
    "rkc_step",
    "run_scenario",
    "scaling_benchmark",
    "select_stages",
    "select_timestep",
    "solve_riemann",
    "strang_advance",
    "to_standard",
]
