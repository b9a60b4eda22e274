"""Full-information reference solvers, used only for validation.

These solvers read analytic gradients and therefore live outside the
payoff-based information model; the learner never calls them.  All of
them run an extragradient iteration (predictor and corrector projected
steps per round): plain projected iteration orbits on skew mappings such
as the bilinear game, and its safe step size for the regularized mapping
M + eps*I collapses like eps for small eps, while extragradient handles
both regimes with a step tied only to the Lipschitz constant.

The convergence certificate is the natural-residual gap
||y - Proj[y - step * T(y)]||, reported in every result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .games import GameDefinition, MissingGradientError, as_joint_action


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted before reaching the residual tolerance."""

    def __init__(self, message: str, residual: float, iterations: int, partial_path=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.partial_path = partial_path


@dataclass(frozen=True)
class SolverSettings:
    """Step size (None = auto from a Lipschitz probe), tolerance, budget."""

    step: Optional[float] = None
    tol: float = 1e-9
    max_iters: int = 200_000

    def __post_init__(self):
        if self.step is not None and self.step <= 0:
            raise ValueError("step must be positive")
        if self.tol <= 0 or self.max_iters <= 0:
            raise ValueError("tol and max_iters must be positive")


@dataclass(frozen=True)
class TikhonovPoint:
    """Solution of the eps-regularized variational inequality."""

    epsilon: float
    y: np.ndarray
    residual: float
    iterations: int


def _joint_mapping(game: GameDefinition) -> Callable[[np.ndarray], np.ndarray]:
    if game.analytic_gradient is None:
        raise MissingGradientError(
            f"reference solvers need analytic gradients; game {game.name!r} has none"
        )
    grad = game.analytic_gradient
    n, d = game.n_players, game.dim

    def mapping(y):
        return np.concatenate(
            [np.asarray(grad(i, y), dtype=float).reshape(d) for i in range(n)]
        )

    return mapping


def estimate_lipschitz(
    mapping: Callable[[np.ndarray], np.ndarray],
    lower: np.ndarray,
    upper: np.ndarray,
    n_pairs: int = 64,
    seed: int = 0,
) -> float:
    """Sampled lower bound on the mapping's Lipschitz constant.

    Pairs are drawn from the box (unbounded sides are probed on [-1, 1]).
    """
    lo = np.where(np.isfinite(lower), lower, -1.0)
    hi = np.where(np.isfinite(upper), upper, 1.0)
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(n_pairs):
        u = rng.uniform(lo, hi)
        v = rng.uniform(lo, hi)
        gap = float(np.linalg.norm(u - v))
        if gap < 1e-12:
            continue
        best = max(best, float(np.linalg.norm(mapping(u) - mapping(v))) / gap)
    return max(best, 1e-8)


def _extragradient(mapping, lower, upper, y0, step, tol, max_iters):
    y = np.minimum(np.maximum(np.asarray(y0, dtype=float), lower), upper)
    residual = np.inf
    for iteration in range(max_iters):
        half = np.minimum(np.maximum(y - step * mapping(y), lower), upper)
        residual = float(np.linalg.norm(y - half))
        if residual <= tol:
            return y, residual, iteration
        y = np.minimum(np.maximum(y - step * mapping(half), lower), upper)
    half = np.minimum(np.maximum(y - step * mapping(y), lower), upper)
    residual = float(np.linalg.norm(y - half))
    if residual <= tol:
        return y, residual, max_iters
    raise ConvergenceError(
        f"no convergence after {max_iters} iterations (residual {residual:.3e} > tol {tol:.3e})",
        residual=residual,
        iterations=max_iters,
    )


def _start_point(game: GameDefinition) -> np.ndarray:
    lower, upper = game.joint_bounds()
    return np.clip(np.zeros(game.joint_dim), lower, upper)


def fixed_point_residual(game: GameDefinition, y, step: float = 1.0, epsilon: float = 0.0) -> float:
    """Natural residual ||y - Proj[y - step * (M(y) + eps*y)]||."""
    y = as_joint_action(game, y)
    mapping = _joint_mapping(game)
    lower, upper = game.joint_bounds()
    moved = np.minimum(np.maximum(y - step * (mapping(y) + epsilon * y), lower), upper)
    return float(np.linalg.norm(y - moved))


def solve_vi(game: GameDefinition, settings: Optional[SolverSettings] = None, y0=None) -> np.ndarray:
    """Point of the game's variational inequality (a Nash equilibrium)."""
    settings = settings or SolverSettings()
    mapping = _joint_mapping(game)
    lower, upper = game.joint_bounds()
    step = settings.step
    if step is None:
        step = 0.5 / estimate_lipschitz(mapping, lower, upper)
    start = _start_point(game) if y0 is None else as_joint_action(game, y0)
    y, _, _ = _extragradient(
        mapping, lower, upper, start, step, settings.tol, settings.max_iters
    )
    return y


def solve_tikhonov(
    game: GameDefinition,
    epsilon: float,
    settings: Optional[SolverSettings] = None,
    y0=None,
) -> TikhonovPoint:
    """Unique solution of the eps-regularized variational inequality.

    The regularized mapping M + eps*I is strongly monotone, so the point
    exists and is unique; any convergent run lands on it up to tol.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    settings = settings or SolverSettings()
    base = _joint_mapping(game)
    lower, upper = game.joint_bounds()

    def mapping(y):
        return base(y) + epsilon * y

    step = settings.step
    if step is None:
        step = 0.5 / estimate_lipschitz(mapping, lower, upper)
    start = _start_point(game) if y0 is None else as_joint_action(game, y0)
    y, residual, iterations = _extragradient(
        mapping, lower, upper, start, step, settings.tol, settings.max_iters
    )
    return TikhonovPoint(epsilon=float(epsilon), y=y, residual=residual, iterations=iterations)


def tikhonov_path(
    game: GameDefinition,
    epsilon_schedule: Sequence[float],
    settings: Optional[SolverSettings] = None,
) -> list[TikhonovPoint]:
    """Regularization continuation: solve each eps warm-started from the last.

    The schedule must be strictly decreasing and positive; the path
    converges to the least-norm equilibrium as eps goes to 0.  A solve
    failure aborts and attaches the partial path to the error.
    """
    epsilons = [float(e) for e in epsilon_schedule]
    if not epsilons:
        raise ValueError("epsilon schedule is empty")
    if any(e <= 0 for e in epsilons):
        raise ValueError("epsilon values must be positive")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError("epsilon schedule must be strictly decreasing")

    path: list[TikhonovPoint] = []
    y0 = None
    for epsilon in epsilons:
        try:
            point = solve_tikhonov(game, epsilon, settings=settings, y0=y0)
        except ConvergenceError as err:
            raise ConvergenceError(
                f"path solve failed at epsilon={epsilon:g} after {len(path)} points: {err}",
                residual=err.residual,
                iterations=err.iterations,
                partial_path=path,
            ) from err
        path.append(point)
        y0 = point.y
    return path


def path_max_norm(path: Sequence[TikhonovPoint]) -> float:
    """Measured uniform bound on the path norms."""
    return max(float(np.linalg.norm(point.y)) for point in path)
