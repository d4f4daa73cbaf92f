"""Numerical laboratory for a predator-prey system with two moving habitat fronts.

The predator occupies an interval [g(t), h(t)] whose endpoints advance by
Stefan-type conditions; the prey lives on the (truncated) line.  The package
simulates the coupled dynamics, classifies each run as spreading or
vanishing, brackets the sharp expansion-coefficient threshold by bisection,
and verifies closed-form thresholds and long-time limits against independent
oracles.
"""

from .errors import (
    BracketError,
    FrontBreachError,
    GeometryError,
    OracleError,
    RegimeError,
    SolverError,
    StefanPPError,
    ValidationError,
)
from .model import (
    LimitIterates,
    ModelParams,
    hunting_regime,
    lambda_threshold,
    limit_iteration,
    mu_upper_bound,
    spreading_limits,
)
from .grids import (
    FrontState,
    LineGrid,
    StraightGrid,
    interp_pred_to_line,
    interp_prey_to_straight,
    transform_coefficients,
    x_to_y,
    y_to_x,
)
from .solver import (
    FieldState,
    NumericsConfig,
    SimulationResult,
    Snapshot,
    StopRules,
    boundary_flux,
    simulate,
    step,
)
from .steady import LogisticBVP, SteadyProfile, existence_threshold, ode_upper_v, solve_bvp
from .analysis import (
    SPREADING,
    UNDECIDED,
    VANISHING,
    DominationReport,
    LimitReport,
    MuStarBracket,
    Supersolution,
    Verdict,
    build_supersolution,
    check_domination,
    classify,
    estimate_mu_star,
    verify_limits,
)
from .config import RunConfig, SweepAxis, SweepSpec, load_config, save_config
from .runner import run

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "FrontBreachError",
    "GeometryError",
    "OracleError",
    "RegimeError",
    "SolverError",
    "StefanPPError",
    "ValidationError",
    "LimitIterates",
    "ModelParams",
    "hunting_regime",
    "lambda_threshold",
    "limit_iteration",
    "mu_upper_bound",
    "spreading_limits",
    "FrontState",
    "LineGrid",
    "StraightGrid",
    "interp_pred_to_line",
    "interp_prey_to_straight",
    "transform_coefficients",
    "x_to_y",
    "y_to_x",
    "FieldState",
    "NumericsConfig",
    "SimulationResult",
    "Snapshot",
    "StopRules",
    "boundary_flux",
    "simulate",
    "step",
    "LogisticBVP",
    "SteadyProfile",
    "existence_threshold",
    "ode_upper_v",
    "solve_bvp",
    "SPREADING",
    "UNDECIDED",
    "VANISHING",
    "DominationReport",
    "LimitReport",
    "MuStarBracket",
    "Supersolution",
    "Verdict",
    "build_supersolution",
    "check_domination",
    "classify",
    "estimate_mu_star",
    "verify_limits",
    "RunConfig",
    "SweepAxis",
    "SweepSpec",
    "load_config",
    "save_config",
    "run",
    "__version__",
]
