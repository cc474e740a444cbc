"""Cooperative multi-vehicle 3D path planning with formation keeping.

Paths for N vehicles are planned jointly: each vehicle carries a five-term
path cost plus a graph-based formation-keeping cost, candidate plans are
compared by Pareto dominance over the per-vehicle cost vector, and a
spherical-step particle swarm (one swarm per vehicle, index-paired candidates)
searches for a plan no vehicle can be made better off against. A rigid-body
baseline planner is included for comparison.
"""

from .formation import (
    FormationGraph,
    expand_incidence,
    formation_cost,
    formation_error_at,
    pairwise_error_oracle,
)
from .game import joint_cost, pareto_dominates, pareto_front, weakly_dominates
from .planner import (
    PlanMetrics,
    PlanResult,
    evaluate_plan,
    min_separation,
    min_threat_clearance,
    plan_game,
    plan_rigid,
)
from .scenario import (
    BUILTIN_IDS,
    CostWeights,
    SafetyParams,
    Scenario,
    ScenarioError,
    ScenarioFormatError,
    ScenarioValidationError,
    Threat,
    VehicleSpec,
    Workspace,
    builtin_scenario,
    load_scenario,
    save_scenario,
    validate,
)
from .single_cost import (
    altitude_cost,
    path_length,
    single_cost,
    smoothness_costs,
    threat_cost,
)
from .spso import (
    ConfigError,
    Particle,
    PsoConfig,
    Swarm,
    default_step_limit,
    init_swarm,
    path_to_spherical,
    spherical_to_path,
    update_particle,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_IDS",
    "ConfigError",
    "CostWeights",
    "FormationGraph",
    "Particle",
    "PlanMetrics",
    "PlanResult",
    "PsoConfig",
    "SafetyParams",
    "Scenario",
    "ScenarioError",
    "ScenarioFormatError",
    "ScenarioValidationError",
    "Swarm",
    "Threat",
    "VehicleSpec",
    "Workspace",
    "altitude_cost",
    "builtin_scenario",
    "default_step_limit",
    "evaluate_plan",
    "expand_incidence",
    "formation_cost",
    "formation_error_at",
    "init_swarm",
    "joint_cost",
    "load_scenario",
    "min_separation",
    "min_threat_clearance",
    "pairwise_error_oracle",
    "pareto_dominates",
    "pareto_front",
    "path_length",
    "path_to_spherical",
    "plan_game",
    "plan_rigid",
    "save_scenario",
    "single_cost",
    "smoothness_costs",
    "spherical_to_path",
    "threat_cost",
    "update_particle",
    "validate",
]
