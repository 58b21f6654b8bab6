"""Exact envy-free rent division with piecewise-linear utilities."""
import types as _types

from .errors import (
    GuardExceeded,
    InvalidProfile,
    InvariantViolation,
    IterationLimitExceeded,
    NoPerfectMatching,
    NotDoublyStochastic,
    PreconditionViolated,
    ValidationError,
)
from .lp import LinearProgram, solve_lp
from .matching import WeightedBipartiteGraph, first_choice_graph, max_weight_perfect_matching
from .model import (
    LinearDomain,
    PiecewiseLinearUtility,
    RentInstance,
    Solution,
    check_ef,
    check_eps_ef,
    evaluate,
    linear_domain,
    validate_instance,
    zero_crossing,
)
from .optimal import check_dsic_sample, compute_partition, optimal_solve
from .oracle import enumerate_ef, minimal_price
from .quasilinear import shift_prices, solve_quasilinear
from .reductions import (
    LinearInstance,
    PolymatrixGame,
    StrategyProfile,
    build_game,
    ef_to_candidate,
    extract_ef,
    reduce_piecewise_to_linear,
    verify_ne,
)
from .rounding import certify_transfer, round_instance
from .solver import SolveMode, build_surrogate, compute_potential, solve, solve_fixed_rent_nonneg

__all__ = [k for k, v in dict(globals()).items() if not k.startswith("_") and not isinstance(v, _types.ModuleType)]
