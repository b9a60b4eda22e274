"""Payoff-based regularized equilibrium learning.

Each iteration every player draws an action from a Gaussian centered at
its current mean, all players observe only their own realized cost at the
joint sample, and each mean moves against the score-function payoff term
plus a vanishing ridge pull toward the origin:

    mu_i <- Proj_box_i[ mu_i - gamma(t) * payoff_i * (x_i - mu_i)
                              - gamma(t) * sigma(t)^2 * epsilon(t) * mu_i ]

which is the literal update gamma*sigma^2*(payoff*(x_i-mu_i)/sigma^2 +
epsilon*mu_i) with the sigma^2 factors cancelled.  The per-player update
function receives nothing beyond the player's own mean, own sample, own
scalar payoff, and the schedule values; that restriction is the whole
point of the payoff-based information model.

Samples are played unclipped: costs are defined on the whole space and
the score-function identity needs untruncated Gaussians.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from sklearn.base import BaseEstimator

from .games import BoxSet, GameDefinition, as_joint_action
from .schedules import Schedule, as_exponents, validate_exponents


@dataclass
class IterationRecord:
    """Telemetry for one learner iteration (mu is the post-update mean)."""

    t: int
    mu: np.ndarray
    x: np.ndarray
    payoff: np.ndarray
    gamma: float
    sigma: float
    epsilon: float
    dist_to_ref: Optional[float] = None


@dataclass
class LearnerState:
    """Entire mutable state of a run: means, iteration counter, RNG."""

    mu: np.ndarray
    t: int
    rng: np.random.Generator


def sample_actions(state: LearnerState, sigma: float) -> np.ndarray:
    """Draw a joint action with each coordinate ~ Normal(mu_k, sigma).

    sigma is the standard deviation.  Advances the state's RNG.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return state.mu + sigma * state.rng.standard_normal(state.mu.shape[0])


def update_player_mean(
    box: BoxSet,
    mu_i: np.ndarray,
    x_i: np.ndarray,
    payoff_i: float,
    gamma: float,
    sigma: float,
    epsilon: float,
) -> np.ndarray:
    """One player's mean update from its own observations only."""
    drift = gamma * payoff_i * (x_i - mu_i) + gamma * sigma * sigma * epsilon * mu_i
    return np.minimum(np.maximum(mu_i - drift, box.lower), box.upper)


def step(
    state: LearnerState,
    game: GameDefinition,
    schedule: Schedule,
    regularized: bool = True,
) -> IterationRecord:
    """Advance the learner by one iteration and return its record.

    All players sample simultaneously, all payoffs are realized at the
    full joint sample, then all means update.  This is in the hot loop,
    hence the inlined schedule powers and raw cost calls.
    """
    t = state.t
    exponents = schedule.exponents
    ft = float(t)
    gamma = ft**-exponents.a
    sigma = ft**-exponents.b
    epsilon = ft**-exponents.c if regularized else 0.0

    x = sample_actions(state, sigma)
    n, d = game.n_players, game.dim
    cost = game.cost
    payoffs = np.empty(n)
    for i in range(n):
        value = float(cost(i, x))
        if not math.isfinite(value):
            raise RuntimeError(
                f"player {i} produced non-finite payoff {value!r} at joint action "
                f"{np.array2string(x, precision=6)}; check the cost evaluator"
            )
        payoffs[i] = value

    mu = state.mu
    new_mu = np.empty_like(mu)
    for i in range(n):
        block = slice(i * d, (i + 1) * d)
        new_mu[block] = update_player_mean(
            game.action_sets[i], mu[block], x[block], payoffs[i],
            gamma, sigma, epsilon,
        )

    state.mu = new_mu
    state.t = t + 1

    dist = None
    ref = game.reference_equilibrium
    if ref is not None:
        diff = new_mu - ref
        dist = float(np.sqrt(diff @ diff))
    return IterationRecord(
        t=t, mu=new_mu.copy(), x=x, payoff=payoffs,
        gamma=gamma, sigma=sigma, epsilon=epsilon, dist_to_ref=dist,
    )


def default_thinning(t: int, max_iters: int) -> bool:
    """Record every iteration up to 10^4, every 10th beyond, plus the last."""
    return t <= 10_000 or t % 10 == 0 or t == max_iters


class PayoffBasedLearner(BaseEstimator):
    """Learns a Nash equilibrium of a monotone game from payoff feedback.

    Parameters
    ----------
    exponents : ScheduleExponents or (a, b, c) triple
        Power-law exponents for step size t^-a, exploration noise t^-b,
        and regularization t^-c.
    max_iters : int
        Number of update iterations, counted from t = 1.
    seed : int or numpy Generator
        Source of the sampling randomness; identical seeds give identical
        trajectories.
    regularized : bool
        With False the ridge term is dropped (epsilon forced to 0).  That
        baseline variant is known not to converge on merely monotone
        games and is kept for comparison runs.
    mu0 : array-like or None
        Initial means; any finite values are allowed.  None starts from
        the projection of the origin onto the action sets.
    thinning : int or None
        Emit every k-th record (plus the first and last); None applies
        default_thinning.
    validate_schedule : bool
        Reject inadmissible exponents for regularized runs; set False to
        downgrade the rejection to a warning for experiments.

    Attributes after fit
    --------------------
    mu_ : final joint means (always inside the action sets)
    n_iter_ : number of iterations performed
    history_ : list of emitted IterationRecord
    state_ : final LearnerState (continuing RNG stream included)
    """

    def __init__(
        self,
        exponents=(5.0 / 9.0, 5.0 / 27.0, 1.0 / 27.0),
        max_iters: int = 5000,
        seed=0,
        regularized: bool = True,
        mu0=None,
        thinning: Optional[int] = None,
        validate_schedule: bool = True,
    ):
        self.exponents = exponents
        self.max_iters = max_iters
        self.seed = seed
        self.regularized = regularized
        self.mu0 = mu0
        self.thinning = thinning
        self.validate_schedule = validate_schedule

    def _initial_means(self, game: GameDefinition) -> np.ndarray:
        if self.mu0 is None:
            lower, upper = game.joint_bounds()
            return np.clip(np.zeros(game.joint_dim), lower, upper)
        mu0 = as_joint_action(game, self.mu0)
        if mu0.ndim != 1 or not np.all(np.isfinite(mu0)):
            raise ValueError("mu0 must be a finite joint action vector")
        return mu0.copy()

    def fit(self, game: GameDefinition, record_sink: Optional[Callable[[IterationRecord], None]] = None):
        """Run the learning loop on a game; returns self."""
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        exponents = as_exponents(self.exponents)
        if self.regularized:
            report = validate_exponents(exponents)
            if not report.ok:
                failed = "; ".join(f"({c.key}) needs {c.inequality}" for c in report.failures())
                if self.validate_schedule:
                    raise ValueError(f"inadmissible schedule exponents: {failed}")
                warnings.warn(f"running with inadmissible schedule exponents: {failed}")

        schedule = Schedule(exponents)
        rng = np.random.default_rng(self.seed)
        state = LearnerState(mu=self._initial_means(game), t=1, rng=rng)

        history: list[IterationRecord] = []
        for _ in range(self.max_iters):
            record = step(state, game, schedule, regularized=self.regularized)
            if self._emit(record.t):
                history.append(record)
                if record_sink is not None:
                    record_sink(record)

        self.game_ = game
        self.mu_ = state.mu.copy()
        self.n_iter_ = self.max_iters
        self.history_ = history
        self.state_ = state
        return self

    def _emit(self, t: int) -> bool:
        if self.thinning is None:
            return default_thinning(t, self.max_iters)
        k = int(self.thinning)
        if k < 1:
            raise ValueError("thinning must be a positive integer")
        return t == 1 or t % k == 0 or t == self.max_iters
