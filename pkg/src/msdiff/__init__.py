"""Higher-order Maxwell-Stefan diffusion for monatomic gas mixtures.

A numerical library and CLI for the ten-moment description of multi-species
diffusion in the diffusive scaling: exact collision exchange terms for
angle-only kernels, the anisotropic Gaussian closure with a quadrature
oracle, the algebraic small-parameter limit system, and a 1-D stiff
IMEX finite-volume integrator with conservation diagnostics.
"""

from .closure import GaussianClosure, build_closure, quadrature_moments, third_order_flux
from .collisions import (
    AngularCoeffs,
    angular_coeffs,
    energy_source,
    momentum_flux_source,
    momentum_flux_source_parts,
    momentum_source,
)
from .config import SimConfig, load_config, parse_config
from .grid import GridField
from .limit import (
    AsymptoticSolution,
    LimitAssembly,
    assemble,
    build_beta,
    build_m,
    compatibility_residual,
    limit_solution_on_grid,
    ms_velocity_solve,
    solve_deviatoric,
)
from .mixture import (
    MixtureAggregates,
    MixtureSpec,
    SpeciesState,
    ideal_gas_pressure,
    mixture_aggregates,
    pressure_decompose,
    validate_spec,
)
from .presets import initial_grid, preset_state
from .simulator import (
    SimReport,
    SweepResult,
    cfl_dt,
    explicit_flux_update,
    implicit_source_update,
    run,
    run_alpha_sweep,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "AngularCoeffs", "AsymptoticSolution", "GaussianClosure", "GridField",
    "LimitAssembly", "MixtureAggregates", "MixtureSpec", "SimConfig",
    "SimReport", "SpeciesState", "SweepResult", "angular_coeffs", "assemble",
    "build_beta", "build_closure", "build_m", "cfl_dt",
    "compatibility_residual", "energy_source", "explicit_flux_update",
    "ideal_gas_pressure", "implicit_source_update", "initial_grid",
    "limit_solution_on_grid", "load_config", "mixture_aggregates",
    "momentum_flux_source", "momentum_flux_source_parts", "momentum_source",
    "ms_velocity_solve", "parse_config", "preset_state", "pressure_decompose",
    "quadrature_moments", "run", "run_alpha_sweep", "solve_deviatoric",
    "step", "third_order_flux", "validate_spec",
]
