"""Formation path planning for UAV teams with a fuzzy-chaos TLBO optimizer."""

from .baselines import GA, THETA_PSO, BaselineParams, run_baseline, run_ga, run_theta_pso
from .fitness import CostBreakdown, EvaluationContext, evaluate, evaluate_batch
from .formation import CentroidPath, FormationSpec, UavPath, check_formation_rules, derive_uav_paths, regular_offsets
from .optimizer import FTLBOParams, InfeasibleScenarioError, RunResult, TLBOParams, run_ftlbo, run_tlbo
from .scenario import GeoPoint, LocalPoint, Obstacle, Scenario, ScenarioError, Weights, load_scenario

__all__ = [
    "GA", "THETA_PSO", "BaselineParams", "run_baseline", "run_ga", "run_theta_pso",
    "CostBreakdown", "EvaluationContext", "evaluate", "evaluate_batch",
    "CentroidPath", "FormationSpec", "UavPath", "check_formation_rules", "derive_uav_paths", "regular_offsets",
    "FTLBOParams", "InfeasibleScenarioError", "RunResult", "TLBOParams", "run_ftlbo", "run_tlbo",
    "GeoPoint", "LocalPoint", "Obstacle", "Scenario", "ScenarioError", "Weights", "load_scenario",
]
