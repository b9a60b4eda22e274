"""Convex games on box-shaped action sets.

A game is a set of N players, each owning a block of `dim` coordinates of
the joint action vector, a per-player cost evaluator, and optionally an
analytic partial-gradient evaluator (the game mapping).  Cost evaluators
must be defined on the whole joint space, not just the feasible box,
because the payoff-based learner plays unclipped Gaussian samples.

Evaluators are expected to be numpy-vectorized over leading axes; the
``*_batch`` helpers fall back to a row loop for evaluators that are not.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


class MissingGradientError(RuntimeError):
    """Raised when an operation needs analytic gradients the game lacks."""


@dataclass(frozen=True)
class BoxSet:
    """Axis-aligned box ``{v : lower <= v <= upper}``, possibly unbounded."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("box bounds must be 1-d arrays of equal length")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise ValueError("box bounds must not be NaN")
        if np.any(lower > upper):
            raise ValueError("box is empty: lower > upper in some coordinate")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def is_bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))


def project(box: BoxSet, v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto a box: componentwise clamp."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != box.dim:
        raise ValueError(f"expected vector of length {box.dim}, got shape {v.shape}")
    return np.clip(v, box.lower, box.upper)


@dataclass(frozen=True)
class GameDefinition:
    """An N-player convex game with per-player box action sets.

    cost(i, a) evaluates player i's cost at the joint action a (last axis
    of length n_players*dim).  analytic_gradient(i, a), when present,
    returns d J_i / d a^i, shape (..., dim).  smoothed_gradient(i, mu,
    sigma), when present, is the closed-form gradient of the Gaussian-
    smoothed cost; for polynomial costs of degree <= 2 it coincides with
    the plain gradient at the mean.
    """

    name: str
    n_players: int
    dim: int
    action_sets: tuple[BoxSet, ...]
    cost: Callable[[int, np.ndarray], np.ndarray]
    analytic_gradient: Optional[Callable[[int, np.ndarray], np.ndarray]] = None
    smoothed_gradient: Optional[Callable[[int, np.ndarray, float], np.ndarray]] = None
    reference_equilibrium: Optional[np.ndarray] = None
    monotone: bool = False

    def __post_init__(self):
        if self.n_players < 1 or self.dim < 1:
            raise ValueError("n_players and dim must be >= 1")
        if len(self.action_sets) != self.n_players:
            raise ValueError("need one action set per player")
        for box in self.action_sets:
            if box.dim != self.dim:
                raise ValueError("all action sets must have dimension `dim`")
        if self.reference_equilibrium is not None:
            ref = np.asarray(self.reference_equilibrium, dtype=float)
            if ref.shape != (self.joint_dim,):
                raise ValueError("reference equilibrium has wrong length")
            object.__setattr__(self, "reference_equilibrium", ref)

    @property
    def joint_dim(self) -> int:
        return self.n_players * self.dim

    def player_slice(self, i: int) -> slice:
        check_player(self, i)
        return slice(i * self.dim, (i + 1) * self.dim)

    def joint_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lower = np.concatenate([box.lower for box in self.action_sets])
        upper = np.concatenate([box.upper for box in self.action_sets])
        return lower, upper


def check_player(game: GameDefinition, i: int) -> int:
    if not 0 <= i < game.n_players:
        raise ValueError(f"player index {i} out of range [0, {game.n_players})")
    return i


def as_joint_action(game: GameDefinition, a) -> np.ndarray:
    """Validate and convert a joint action to a flat float array."""
    a = np.asarray(a, dtype=float)
    if a.shape[-1] != game.joint_dim:
        raise ValueError(
            f"joint action must have {game.joint_dim} coordinates, got shape {a.shape}"
        )
    return a


def project_joint(game: GameDefinition, a: np.ndarray) -> np.ndarray:
    """Project a joint action onto the product of all players' boxes."""
    lower, upper = game.joint_bounds()
    return np.clip(as_joint_action(game, a), lower, upper)


def eval_cost(game: GameDefinition, i: int, a) -> float:
    """Player i's cost at the joint action a. Pure and deterministic."""
    check_player(game, i)
    a = as_joint_action(game, a)
    if a.ndim != 1:
        raise ValueError("eval_cost takes a single joint action; use eval_cost_batch")
    return float(game.cost(i, a))


def eval_cost_batch(game: GameDefinition, i: int, actions: np.ndarray) -> np.ndarray:
    """Player i's cost at each row of an (m, joint_dim) batch."""
    check_player(game, i)
    actions = as_joint_action(game, actions)
    try:
        out = np.asarray(game.cost(i, actions), dtype=float)
        if out.shape == actions.shape[:-1]:
            return out
    except (ValueError, TypeError):
        pass
    # evaluator is not vectorized; fall back to a row loop
    return np.array([float(game.cost(i, row)) for row in actions.reshape(-1, game.joint_dim)]).reshape(actions.shape[:-1])


def eval_game_mapping(game: GameDefinition, a, allow_finite_difference: bool = False) -> np.ndarray:
    """Stacked own-cost partial gradients (M_1(a), ..., M_N(a)).

    Requires analytic gradients; pass allow_finite_difference=True to fall
    back to central differences (diagnostics only, never used by the
    payoff-based learner).
    """
    a = as_joint_action(game, a)
    if game.analytic_gradient is None:
        if not allow_finite_difference:
            raise MissingGradientError(
                f"game {game.name!r} has no analytic gradient; "
                "pass allow_finite_difference=True for a diagnostic fallback"
            )
        return finite_difference_mapping(game, a)
    return np.concatenate(
        [np.asarray(game.analytic_gradient(i, a), dtype=float).reshape(game.dim)
         for i in range(game.n_players)]
    )


def eval_mapping_batch(game: GameDefinition, actions: np.ndarray) -> np.ndarray:
    """Game mapping at each row of an (m, joint_dim) batch, shape (m, joint_dim)."""
    if game.analytic_gradient is None:
        raise MissingGradientError(f"game {game.name!r} has no analytic gradient")
    actions = as_joint_action(game, actions)
    if actions.ndim == 1:
        return eval_game_mapping(game, actions)
    blocks = []
    for i in range(game.n_players):
        try:
            g = np.asarray(game.analytic_gradient(i, actions), dtype=float)
            if g.shape != actions.shape[:-1] + (game.dim,):
                raise ValueError
        except (ValueError, TypeError):
            g = np.stack([np.asarray(game.analytic_gradient(i, row), dtype=float).reshape(game.dim)
                          for row in actions])
        blocks.append(g)
    return np.concatenate(blocks, axis=-1)


def finite_difference_mapping(game: GameDefinition, a, step: float = 1e-5) -> np.ndarray:
    """Central-difference estimate of the game mapping. Diagnostics only."""
    a = as_joint_action(game, a)
    out = np.empty(game.joint_dim)
    for i in range(game.n_players):
        for k in range(game.dim):
            j = i * game.dim + k
            hi = a.copy()
            lo = a.copy()
            hi[j] += step
            lo[j] -= step
            out[j] = (eval_cost(game, i, hi) - eval_cost(game, i, lo)) / (2 * step)
    return out


def best_unilateral_improvement(game: GameDefinition, a, n_grid: int = 1000) -> float:
    """Largest cost reduction any single player can get by deviating.

    Scans an n_grid-point grid over each player's interval; only defined
    for dim == 1 games with bounded boxes.  Nonpositive (up to grid
    resolution) at a Nash equilibrium.
    """
    if game.dim != 1:
        raise ValueError("grid verification is implemented for dim == 1 games only")
    a = as_joint_action(game, a)
    best = -np.inf
    for i in range(game.n_players):
        box = game.action_sets[i]
        if not box.is_bounded:
            raise ValueError("grid verification needs bounded action sets")
        grid = np.linspace(box.lower[0], box.upper[0], n_grid)
        candidates = np.tile(a, (n_grid, 1))
        candidates[:, i] = grid
        costs = eval_cost_batch(game, i, candidates)
        best = max(best, eval_cost(game, i, a) - float(np.min(costs)))
    return best


# ---------------------------------------------------------------------------
# Built-in games


def _bilinear() -> GameDefinition:
    # Two-player zero-sum game with skew-symmetric linear mapping; the
    # classic case where unregularized gradient play orbits the origin.
    def cost(i, a):
        prod = a[..., 0] * a[..., 1]
        return prod if i == 0 else -prod

    def grad(i, a):
        if i == 0:
            return a[..., 1:2]
        return -a[..., 0:1]

    return GameDefinition(
        name="bilinear",
        n_players=2,
        dim=1,
        action_sets=(BoxSet([-1.0], [1.0]), BoxSet([-1.0], [1.0])),
        cost=cost,
        analytic_gradient=grad,
        smoothed_gradient=lambda i, mu, sigma: grad(i, np.asarray(mu, dtype=float)),
        reference_equilibrium=np.zeros(2),
        monotone=True,
    )


def _quadratic_strong() -> GameDefinition:
    # Strongly monotone quadratic game with a weak coupling term; the
    # unique equilibrium solves a 2x2 linear system.
    targets = (0.3, -0.2)
    coupling = 0.1

    def cost(i, a):
        own = a[..., i]
        other = a[..., 1 - i]
        return (own - targets[i]) ** 2 + coupling * own * other

    def grad(i, a):
        own = a[..., i : i + 1]
        other = a[..., 1 - i : 2 - i]
        return 2.0 * (own - targets[i]) + coupling * other

    system = np.array([[2.0, coupling], [coupling, 2.0]])
    rhs = np.array([2.0 * targets[0], 2.0 * targets[1]])
    equilibrium = np.linalg.solve(system, rhs)

    return GameDefinition(
        name="quadratic-strong",
        n_players=2,
        dim=1,
        action_sets=(BoxSet([-1.0], [1.0]), BoxSet([-1.0], [1.0])),
        cost=cost,
        analytic_gradient=grad,
        smoothed_gradient=lambda i, mu, sigma: grad(i, np.asarray(mu, dtype=float)),
        reference_equilibrium=equilibrium,
        monotone=True,
    )


def _shifted_sum() -> GameDefinition:
    # Merely monotone game whose equilibria form the whole segment
    # a1 + a2 = 1 inside the box; the least-norm point is (0.5, 0.5).
    def cost(i, a):
        own = a[..., i]
        return 0.5 * own**2 + a[..., 0] * a[..., 1] - own

    def grad(i, a):
        return (a[..., 0:1] + a[..., 1:2]) - 1.0

    return GameDefinition(
        name="shifted-sum",
        n_players=2,
        dim=1,
        action_sets=(BoxSet([-1.0], [1.0]), BoxSet([-1.0], [1.0])),
        cost=cost,
        analytic_gradient=grad,
        smoothed_gradient=lambda i, mu, sigma: grad(i, np.asarray(mu, dtype=float)),
        reference_equilibrium=np.array([0.5, 0.5]),
        monotone=True,
    )


_REGISTRY: dict[str, Callable[[], GameDefinition]] = {
    "bilinear": _bilinear,
    "quadratic-strong": _quadratic_strong,
    "shifted-sum": _shifted_sum,
}


def registry(name: str) -> GameDefinition:
    """Look up a built-in game by name."""
    try:
        factory = _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise ValueError(f"unknown game {name!r}; registry: {known}") from None
    return factory()


def registry_names() -> list[str]:
    return sorted(_REGISTRY)
