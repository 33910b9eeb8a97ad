"""Event-triggered optimal output consensus for heterogeneous linear agents."""

from .analysis import fit_exponential_rate, lyapunov_W0, min_inter_event, tail_radius
from .config import Scenario, dump_config, load_config, load_scenario
from .costs import CostEnsemble, CostFunction, bisect_optimum, builtin_cost, global_gradient, solve_optimum
from .engine import AgentSpec, ConfigError, InitialConditions, SimConfig, SimulationError, Trace, prepare, simulate
from .generator import GeneratorParams, recommended_parameters
from .graph import WeightedDigraph, complement_basis, laplacian, spectral_report
from .plant import LinearPlant, synthesize
from .trigger import TriggerRule

__version__ = "0.1.0"

__all__ = [
    "AgentSpec",
    "ConfigError",
    "CostEnsemble",
    "CostFunction",
    "GeneratorParams",
    "InitialConditions",
    "LinearPlant",
    "Scenario",
    "SimConfig",
    "SimulationError",
    "Trace",
    "TriggerRule",
    "WeightedDigraph",
    "bisect_optimum",
    "builtin_cost",
    "complement_basis",
    "dump_config",
    "fit_exponential_rate",
    "global_gradient",
    "laplacian",
    "load_config",
    "load_scenario",
    "lyapunov_W0",
    "min_inter_event",
    "prepare",
    "recommended_parameters",
    "simulate",
    "solve_optimum",
    "spectral_report",
    "synthesize",
    "tail_radius",
]
