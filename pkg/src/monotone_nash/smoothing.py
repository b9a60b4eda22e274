"""Gaussian-smoothed costs and independent gradient estimators.

The smoothed cost of player i is the expectation of its cost under
independent Gaussian randomization of all players' actions.  Its gradient
with respect to the player's own mean can be estimated three ways that
must agree: the score-function form payoff * (x_i - mu_i) / sigma^2 (the
quantity the learner actually uses), the smoothed game mapping (mean of
the analytic gradient over the same Gaussian), and finite differences of
the smoothed cost itself.

All estimators draw x = mu + sigma * Z with Z from a generator seeded by
the query seed, so two queries sharing a seed share Z exactly: common
random numbers across sigma values and across nearby means come for free,
which is what makes the finite-difference and bias comparisons sharp.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import (
    GameDefinition,
    MissingGradientError,
    as_joint_action,
    check_player,
    eval_cost_batch,
    eval_game_mapping,
)


@dataclass(frozen=True)
class SmoothedQuery:
    """One smoothing query: a game, joint means, noise level, sample budget."""

    game: GameDefinition
    mu: np.ndarray
    sigma: float
    n_samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mu", as_joint_action(self.game, self.mu))
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")


@dataclass(frozen=True)
class GradientEstimate:
    """A gradient estimate with per-coordinate standard errors."""

    value: np.ndarray
    standard_error: np.ndarray
    method: str


@dataclass(frozen=True)
class BiasVarianceReport:
    """Measured bias norm and score-noise second moment at one sigma."""

    sigma: float
    q_norm: float
    r_second_moment: float
    n_samples: int


def _draws(query: SmoothedQuery) -> np.ndarray:
    """Joint-action samples for a query, shape (n_samples, joint_dim)."""
    rng = np.random.default_rng(query.seed)
    z = rng.standard_normal((query.n_samples, query.game.joint_dim))
    return query.mu + query.sigma * z


def _costs(query: SmoothedQuery, i: int, actions: np.ndarray) -> np.ndarray:
    values = eval_cost_batch(query.game, i, actions)
    if not np.all(np.isfinite(values)):
        bad = int(np.argmax(~np.isfinite(values)))
        raise RuntimeError(
            f"player {i} cost is non-finite at sampled action "
            f"{np.array2string(actions[bad], precision=6)}"
        )
    return values


def _mean_with_se(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = samples.shape[0]
    mean = samples.mean(axis=0)
    if n > 1:
        se = samples.std(axis=0, ddof=1) / np.sqrt(n)
    else:
        # a single sample carries no spread information; zero is reserved
        # for the exact analytic route
        se = np.full_like(np.atleast_1d(mean), np.inf, dtype=float)
    return mean, se


def smoothed_cost(query: SmoothedQuery, i: int) -> tuple[float, float]:
    """Monte-Carlo estimate of player i's smoothed cost, with standard error."""
    check_player(query.game, i)
    values = _costs(query, i, _draws(query))
    mean, se = _mean_with_se(values)
    return float(mean), float(se)


def score_gradient(query: SmoothedQuery, i: int) -> GradientEstimate:
    """Score-function estimate of d(smoothed cost)/d(own means).

    Averages payoff * (x_i - mu_i) / sigma^2 over the query's samples;
    this is exactly the drift term the payoff-based learner applies.
    """
    check_player(query.game, i)
    game = query.game
    actions = _draws(query)
    values = _costs(query, i, actions)
    block = game.player_slice(i)
    score = (actions[:, block] - query.mu[block]) / query.sigma**2
    samples = values[:, None] * score
    mean, se = _mean_with_se(samples)
    return GradientEstimate(value=mean, standard_error=se, method="score_mc")


def mixed_mapping(query: SmoothedQuery, i: int) -> GradientEstimate:
    """Smoothed game mapping for player i: mean of M_i over the Gaussian."""
    check_player(query.game, i)
    game = query.game
    if game.analytic_gradient is None:
        raise MissingGradientError(f"game {game.name!r} has no analytic gradient")
    actions = _draws(query)
    grads = np.asarray(game.analytic_gradient(i, actions), dtype=float)
    if grads.shape != (query.n_samples, game.dim):
        grads = np.stack(
            [np.asarray(game.analytic_gradient(i, row), dtype=float).reshape(game.dim)
             for row in actions]
        )
    mean, se = _mean_with_se(grads)
    return GradientEstimate(value=mean, standard_error=se, method="mixed_mapping_mc")


def finite_difference_gradient(query: SmoothedQuery, i: int, step: float = 1e-3) -> GradientEstimate:
    """Central finite differences of the smoothed cost in the own means.

    Shifting the mean by h shifts every sample by h (common random
    numbers), so the difference quotient is computed per sample and the
    reported standard error reflects only the residual sampling noise.
    """
    check_player(query.game, i)
    game = query.game
    actions = _draws(query)
    block = game.player_slice(i)
    value = np.empty(game.dim)
    se = np.empty(game.dim)
    for k in range(game.dim):
        shift = np.zeros(game.joint_dim)
        shift[block.start + k] = step
        quotients = (
            _costs(query, i, actions + shift) - _costs(query, i, actions - shift)
        ) / (2 * step)
        value[k], se[k] = _mean_with_se(quotients)
    return GradientEstimate(value=value, standard_error=se, method="finite_difference")


def analytic_smoothed_gradient(query: SmoothedQuery, i: int) -> GradientEstimate:
    """Closed-form smoothed gradient, for games that declare one."""
    check_player(query.game, i)
    game = query.game
    if game.smoothed_gradient is None:
        raise MissingGradientError(f"game {game.name!r} has no closed-form smoothed gradient")
    value = np.asarray(game.smoothed_gradient(i, query.mu, query.sigma), dtype=float).reshape(game.dim)
    return GradientEstimate(value=value, standard_error=np.zeros(game.dim), method="analytic")


def combined_se(a: GradientEstimate, b: GradientEstimate) -> np.ndarray:
    return np.sqrt(a.standard_error**2 + b.standard_error**2)


def agree_within(a: GradientEstimate, b: GradientEstimate, factor: float = 3.0) -> np.ndarray:
    """Per-coordinate agreement of two estimates within `factor` combined SEs."""
    return np.abs(a.value - b.value) <= factor * combined_se(a, b)


def score_samples(query: SmoothedQuery) -> np.ndarray:
    """Raw stacked score-function samples, shape (n_samples, joint_dim).

    Row j holds, for every player i, payoff_i(x_j) * (x_j^i - mu^i) /
    sigma^2.  The per-coordinate mean is the smoothed-mapping estimate and
    the spread around it is the martingale noise of the learner update.
    """
    game = query.game
    actions = _draws(query)
    out = np.empty((query.n_samples, game.joint_dim))
    for i in range(game.n_players):
        block = game.player_slice(i)
        values = _costs(query, i, actions)
        out[:, block] = values[:, None] * (actions[:, block] - query.mu[block]) / query.sigma**2
    return out


def bias_report(
    game: GameDefinition,
    mu,
    sigma_list,
    n_samples: int = 100_000,
    seed: int = 0,
) -> list[BiasVarianceReport]:
    """Measured smoothing bias and score-noise second moment per sigma.

    For each sigma, q_norm is the norm of (smoothed mapping estimate -
    true mapping at mu) stacked over players, and r_second_moment
    estimates E ||F - E F||^2 for the stacked score samples F.  One seed
    drives every sigma, so the underlying standard normal draws are
    shared across the list.
    """
    mu = as_joint_action(game, mu)
    if game.analytic_gradient is None:
        raise MissingGradientError(f"game {game.name!r} has no analytic gradient")
    mapping_at_mu = eval_game_mapping(game, mu)
    reports = []
    for sigma in sigma_list:
        query = SmoothedQuery(game=game, mu=mu, sigma=float(sigma), n_samples=n_samples, seed=seed)
        smoothed = np.concatenate(
            [mixed_mapping(query, i).value for i in range(game.n_players)]
        )
        q_norm = float(np.linalg.norm(smoothed - mapping_at_mu))
        f = score_samples(query)
        r_second = float(np.sum(f.var(axis=0, ddof=1)))
        reports.append(
            BiasVarianceReport(
                sigma=float(sigma), q_norm=q_norm,
                r_second_moment=r_second, n_samples=n_samples,
            )
        )
    return reports
