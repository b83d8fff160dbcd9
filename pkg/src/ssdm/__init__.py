"""ssdm: strategic decision making under sampled multi-stage uncertainty.

A feasibility-seeking solver built from a randomized sampling separation
oracle driving cutting schemes (bundle-level and ellipsoid), a bisection
optimizer for linear objectives over reliable strategic decisions, and a
multi-product inventory instantiation with Monte Carlo validation.
"""

from .backend import backend_name
from .ballprog import Bundle, min_max_over_ball, project_to_level
from .bisection import BisectionConfig, BisectionOutcome, minimize, \
    objective_range
from .engines import EngineResult, run_bl, run_ellipsoid
from .geometry import Ball, PolyhedralRep, Separator, StagePolyhedron, \
    bounding_ball, normalize_separator
from .inventory import InventoryInstance, StrategicDecisionView, build_model, \
    default_instance, greedy_local_policy, sample_scenario, utopian_cost
from .lp import LinearProgram, LPResult, lp_feasible, solve_lp
from .model import Scenario, SemiStochasticModel, epsilon_hat, \
    membership_or_separator, separator_from_infeasibility, stage_feasible
from .oracle import OracleConfig, OracleState, QueryOutcome, SamplingOracle, \
    sample_size
from .remodel import BasisTerm, BlockSplit, BlockStagedModel, DecisionBasis, \
    lift
from .reports import ValidationReport, validate_decision

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BasisTerm",
    "BisectionConfig",
    "BisectionOutcome",
    "BlockSplit",
    "BlockStagedModel",
    "Bundle",
    "DecisionBasis",
    "EngineResult",
    "InventoryInstance",
    "LPResult",
    "LinearProgram",
    "OracleConfig",
    "OracleState",
    "PolyhedralRep",
    "QueryOutcome",
    "SamplingOracle",
    "Scenario",
    "SemiStochasticModel",
    "Separator",
    "StagePolyhedron",
    "StrategicDecisionView",
    "ValidationReport",
    "backend_name",
    "bounding_ball",
    "build_model",
    "default_instance",
    "epsilon_hat",
    "greedy_local_policy",
    "lift",
    "lp_feasible",
    "membership_or_separator",
    "min_max_over_ball",
    "minimize",
    "normalize_separator",
    "objective_range",
    "project_to_level",
    "run_bl",
    "run_ellipsoid",
    "sample_scenario",
    "sample_size",
    "separator_from_infeasibility",
    "solve_lp",
    "stage_feasible",
    "utopian_cost",
    "validate_decision",
    "__version__",
]
