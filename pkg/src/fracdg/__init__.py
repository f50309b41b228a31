"""Explicit RKDG2 solver for 1D scalar conservation laws with fractional diffusion.

Periodic piecewise-polynomial (DG) spatial discretization with upwind-type
numerical fluxes, a Galerkin fractional diffusion operator assembled in
closed form, and a two-stage explicit Runge-Kutta time stepper, plus the
convergence and structure diagnostics built on top of them.
"""

from .mesh import Mesh, DGFunction, build_mesh, trace, l2_project, inner_product, l2_norm
from .fluxes import (FluxModel, NumericalFlux, linear_flux, burgers_flux,
                     godunov_flux, engquist_osher_flux, upwind_flux,
                     a_quantity, check_lemma31)
from .fractional import (derive_c_lambda, SpectralOracle, FractionalOperator,
                         assemble_operator, assemble_blocks, check_inverse_inequality)
from .reference import TrigSolution, ManufacturedSolution, fine_grid_reference
from .projections import (gauss_radau_project, upwind_project, SwitchTracker,
                          cell_speed_range, verify_switch_bound,
                          synthetic_switch_study, switch_slope)
from .scheme import (run, RunResult, TrajectoryRecord, convective_rhs,
                     source_rhs, cfl_timestep, consistency_defect,
                     consistency_defect_ratios)
from .analysis import (l2_error, jump_error, pad_to_degree, eoc, EocTable,
                       ErrorRecord, EnergyErrorAccumulator, error_norms,
                       energy_identity_residual)
from .config import RunConfig, ConfigError, parse_config
from .studies import (StudyError, run_solve, run_convergence, run_temporal,
                      run_operator_check, run_diagnostics)
from .reports import CSV_HEADER, validate_summary, write_study

__version__ = "0.1.0"
