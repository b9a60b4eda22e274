"""Payoff-based learning of Nash equilibria in monotone convex games.

The learner needs nothing but each player's own realized cost values; the
reference variational-inequality solvers, the Gaussian-smoothing gradient
oracle, and the experiment harness exist to validate it.
"""

from .games import (
    BoxSet,
    GameDefinition,
    MissingGradientError,
    best_unilateral_improvement,
    eval_cost,
    eval_cost_batch,
    eval_game_mapping,
    finite_difference_mapping,
    project,
    project_joint,
    registry,
    registry_names,
)
from .learner import (
    IterationRecord,
    LearnerState,
    PayoffBasedLearner,
    sample_actions,
    step,
    update_player_mean,
)
from .schedules import (
    DEFAULT_EXPONENTS,
    ConditionCheck,
    Schedule,
    ScheduleExponents,
    ScheduleReport,
    as_exponents,
    validate_exponents,
)
from .smoothing import (
    BiasVarianceReport,
    GradientEstimate,
    SmoothedQuery,
    analytic_smoothed_gradient,
    bias_report,
    finite_difference_gradient,
    mixed_mapping,
    score_gradient,
    score_samples,
    smoothed_cost,
)
from .solvers import (
    ConvergenceError,
    SolverSettings,
    TikhonovPoint,
    fixed_point_residual,
    path_max_norm,
    solve_tikhonov,
    solve_vi,
    tikhonov_path,
)

__version__ = "0.1.0"

__all__ = [
    "BoxSet",
    "GameDefinition",
    "MissingGradientError",
    "best_unilateral_improvement",
    "eval_cost",
    "eval_cost_batch",
    "eval_game_mapping",
    "finite_difference_mapping",
    "project",
    "project_joint",
    "registry",
    "registry_names",
    "IterationRecord",
    "LearnerState",
    "PayoffBasedLearner",
    "sample_actions",
    "step",
    "update_player_mean",
    "DEFAULT_EXPONENTS",
    "ConditionCheck",
    "Schedule",
    "ScheduleExponents",
    "ScheduleReport",
    "as_exponents",
    "validate_exponents",
    "BiasVarianceReport",
    "GradientEstimate",
    "SmoothedQuery",
    "analytic_smoothed_gradient",
    "bias_report",
    "finite_difference_gradient",
    "mixed_mapping",
    "score_gradient",
    "score_samples",
    "smoothed_cost",
    "ConvergenceError",
    "SolverSettings",
    "TikhonovPoint",
    "fixed_point_residual",
    "path_max_norm",
    "solve_tikhonov",
    "solve_vi",
    "tikhonov_path",
    "__version__",
]
