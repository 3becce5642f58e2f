"""Solver, simulator and verifier for the adversarial LQG cheap-talk game."""

__version__ = "0.1.0"

from .equilibrium import (
    CoefficientLadder,
    EquilibriumReport,
    Regime,
    StrategyProfile,
    behavioral_value,
    classify_regime,
    coefficient_ladder,
    pure_value,
    solve,
    solve_behavioral_spe,
    solve_pure_spe,
    solve_two_stage_spe,
)
from .model import (
    AdversaryAction,
    AdversaryConstraints,
    AgentAction,
    Belief,
    ModelParams,
    StageParams,
    ValidationError,
    table1,
    validate,
)
from .sim import SimConfig, SimResult, monte_carlo_value, rollout
from .stationary import asymptotic_avg_reward, kleene_iterate, map_J, map_L, stationary_profile
from .verify import DeviationCertificate, certify_profile, one_shot_deviation_check

__all__ = [
    "AdversaryAction",
    "AdversaryConstraints",
    "AgentAction",
    "Belief",
    "CoefficientLadder",
    "DeviationCertificate",
    "EquilibriumReport",
    "ModelParams",
    "Regime",
    "SimConfig",
    "SimResult",
    "StageParams",
    "StrategyProfile",
    "ValidationError",
    "asymptotic_avg_reward",
    "behavioral_value",
    "certify_profile",
    "classify_regime",
    "coefficient_ladder",
    "kleene_iterate",
    "map_J",
    "map_L",
    "monte_carlo_value",
    "one_shot_deviation_check",
    "pure_value",
    "rollout",
    "solve",
    "solve_behavioral_spe",
    "solve_pure_spe",
    "solve_two_stage_spe",
    "stationary_profile",
    "table1",
    "validate",
]
