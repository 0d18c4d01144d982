"""Switch reconfiguration for power distribution grids as binary optimization.

The toolkit models a grid of load blocks, feeders, and tie switches,
builds a penalized pseudo-Boolean objective whose minimum is the
loss-optimal feasible switch assignment, reduces it to quadratic form
for annealing hardware, solves it classically, and cross-checks every
verdict against an independent graph-theoretic oracle.
"""

from .errors import FlowUndefinedError, GridFormatError, VariableGuardError
from .grid import Block, Feeder, Grid, parse_grid, serialize_grid
from .objective import (
    ObjectiveBundle,
    PenaltyParams,
    blackout_block_poly,
    blackout_penalty,
    blackout_unit_poly,
    build_objective,
    cumulative_drop_poly,
    current_penalty,
    default_penalty_params,
    max_voltage_penalty,
    maxconn_penalty,
    maxconn_unit_poly,
    min_voltage_penalty,
    power_loss_poly,
    radial_pair_poly,
    radial_penalty,
    radial_unit_poly,
    total_current_poly,
    voltage_poly,
)
from .poly import (
    Poly,
    bits_from_string,
    bits_to_string,
    from_hubo_doc,
    hubo_dumps,
    hubo_loads,
    to_hubo_doc,
)
from .quadratize import (
    AuxVar,
    QuboModel,
    aux_sidecar,
    default_reduction_weight,
    export_qubo,
    lift_assignment,
    min_over_aux,
    parse_qubo,
    project_assignment,
    quadratize,
)
from .solve import (
    AnnealSchedule,
    SolveResult,
    anneal_hubo,
    anneal_qubo,
    brute_force_min,
    flip_delta,
)
from .validate import (
    MODE_PAPER,
    MODE_PHYSICAL,
    EnergizedComponent,
    FeasibilityReport,
    Violation,
    check_feasibility,
    energized_components,
    enumerate_feasible,
    physical_currents,
    physical_loss,
    physical_voltages,
)

__version__ = "0.1.0"

__all__ = [
    "AnnealSchedule",
    "AuxVar",
    "Block",
    "EnergizedComponent",
    "FeasibilityReport",
    "Feeder",
    "FlowUndefinedError",
    "Grid",
    "GridFormatError",
    "MODE_PAPER",
    "MODE_PHYSICAL",
    "ObjectiveBundle",
    "PenaltyParams",
    "Poly",
    "QuboModel",
    "SolveResult",
    "VariableGuardError",
    "Violation",
    "anneal_hubo",
    "anneal_qubo",
    "aux_sidecar",
    "bits_from_string",
    "bits_to_string",
    "blackout_block_poly",
    "blackout_penalty",
    "blackout_unit_poly",
    "brute_force_min",
    "build_objective",
    "check_feasibility",
    "cumulative_drop_poly",
    "current_penalty",
    "default_penalty_params",
    "default_reduction_weight",
    "energized_components",
    "enumerate_feasible",
    "export_qubo",
    "flip_delta",
    "from_hubo_doc",
    "hubo_dumps",
    "hubo_loads",
    "lift_assignment",
    "max_voltage_penalty",
    "maxconn_penalty",
    "maxconn_unit_poly",
    "min_over_aux",
    "min_voltage_penalty",
    "parse_grid",
    "parse_qubo",
    "physical_currents",
    "physical_loss",
    "physical_voltages",
    "power_loss_poly",
    "project_assignment",
    "quadratize",
    "radial_pair_poly",
    "radial_penalty",
    "radial_unit_poly",
    "serialize_grid",
    "to_hubo_doc",
    "total_current_poly",
    "voltage_poly",
]
