"""Design optimization for hybrid PCM + active-cooling thermal loops.

The package models a pumped coolant loop that couples a heat-producing
device, a latent-heat storage unit and an active heat exchanger, simulates
it forward in time, and solves a simultaneous design-and-control program
that selects the storage capacity, melt temperature and control
trajectories against a unified energy-based objective.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    NumericalError,
    PcmForgeError,
    PlantInfeasibleError,
    ProfileFormatError,
    SolverEvalError,
    ValidationError,
)
from .objective import (
    ObjectiveBreakdown,
    dynamic_objectives,
    evaluate as evaluate_objectives,
    static_objectives,
    total_objective,
)
from .plant import (
    CoolantState,
    FlowSplit,
    HeatFlows,
    PcmDesign,
    PlantParams,
    ValveCommand,
    flow_split,
    pv_boundary,
    solve_coolant,
    state_conversions,
)
from .scenario import (
    Bounds,
    ControlPolicy,
    DisturbanceProfile,
    InitialState,
    RunConfig,
    Scenario,
    Weights,
    case_study_scenario,
    default_case_study,
    default_design,
    load_config,
    load_profile_csv,
    save_config,
    synth_profile,
    write_profile_csv,
)
from .simulate import ControlSequence, Trajectory, rollout, step, write_trajectory_csv
from .solver import SolveOptions, SolveResult, solve, verify
from .transcription import EvalPoint, NlpProblem, VariableLayout, assemble

__all__ = [
    "__version__",
    "Bounds",
    "ControlPolicy",
    "ControlSequence",
    "CoolantState",
    "ConfigError",
    "DisturbanceProfile",
    "EvalPoint",
    "FlowSplit",
    "HeatFlows",
    "InitialState",
    "NlpProblem",
    "NumericalError",
    "ObjectiveBreakdown",
    "PcmDesign",
    "PcmForgeError",
    "PlantInfeasibleError",
    "PlantParams",
    "ProfileFormatError",
    "RunConfig",
    "Scenario",
    "SolveOptions",
    "SolveResult",
    "SolverEvalError",
    "Trajectory",
    "ValidationError",
    "ValveCommand",
    "VariableLayout",
    "Weights",
    "assemble",
    "case_study_scenario",
    "default_case_study",
    "default_design",
    "dynamic_objectives",
    "evaluate_objectives",
    "flow_split",
    "load_config",
    "load_profile_csv",
    "pv_boundary",
    "rollout",
    "save_config",
    "solve",
    "solve_coolant",
    "state_conversions",
    "static_objectives",
    "step",
    "synth_profile",
    "total_objective",
    "verify",
    "write_profile_csv",
    "write_trajectory_csv",
]
